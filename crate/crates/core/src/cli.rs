//! Command-line front end: every command writes one CSV table.
//!
//! Exit codes: 0 success, 1 input or numerical error, 2 a checked band failed.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{im_re_limit, nu_tail_asymptotic_check, point_hitting_asymptote};
use crate::error::{LevyError, Result};
use crate::fluctuation::renewal_pair;
use crate::hitting::{BandSummary, HittingContext};
use crate::kernels::{h_sym, k_lambda, u_lambda};
use crate::levy_model::{list_models, LevyModel, ModelConfig};
use crate::mc_engine::MCConfig;
use crate::verify::{run_suite, Suite, VerifyOptions, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BAND: i32 = 2;

/// Ratio band for simulated comparator cells.
const HIT_BAND: (f64, f64) = (1.0 / 16.0, 16.0);

#[derive(Debug, Parser)]
#[command(name = "levy-hit", version, about = "Potential kernels and hitting-time estimates for 1-d Lévy processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic exponent on a ξ grid.
    Psi {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "1e-3:1e3:64")]
        xi_grid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// u^λ(0), u^λ(x), K^λ(x) and H^λ(x); λ = 0 gives the compensated kernels.
    Kernel {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "0.1:10:9")]
        x_grid: String,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Limit constants: jump tail, Im/Re at the origin, point asymptote.
    Asymp {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "1:1e3:4")]
        t_grid: String,
        #[arg(long, default_value = "0.5:2:3")]
        x_grid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Renewal functions of the ladder height processes.
    Fluct {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "0.1:10:9")]
        x_grid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Survival P^x(T_[−R,R] > t): comparator against Monte Carlo.
    Hit {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long = "R")]
        r: f64,
        #[arg(long, default_value = "0.1:100:10")]
        t_grid: String,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification suite (or `all`).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// List the built-in models.
    Models,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Preset name or TOML model file.
    #[arg(long)]
    pub model: String,
    /// Override a model field, e.g. `--set sigma=0.5` or `--set measure.alpha=1.7`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 20_000)]
    pub mc_paths: usize,
    #[arg(long, default_value_t = MCConfig::default().seed)]
    pub seed: u64,
    /// Largest skeleton step.
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// `lo:hi:n`, log-spaced when both ends are positive, linear otherwise.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || LevyError::Config(format!("grid '{s}' is not lo:hi:n"));
    if parts.len() == 1 {
        return Ok(vec![parts[0].trim().parse().map_err(|_| bad())?]);
    }
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || (n == 1 && lo != hi) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok(if lo > 0.0 && hi > 0.0 {
        (0..n).map(|i| lo * (hi / lo).powf(step(i))).collect()
    } else {
        (0..n).map(|i| lo + (hi - lo) * step(i)).collect()
    })
}

/// Applies `key=value` overrides to a model description.
pub fn apply_overrides(cfg: &ModelConfig, overrides: &[String]) -> Result<ModelConfig> {
    if overrides.is_empty() {
        return Ok(cfg.clone());
    }
    let mut doc: toml::Table = toml::from_str(&cfg.to_toml_string()?).map_err(|e| LevyError::Config(e.to_string()))?;
    for o in overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| LevyError::Config(format!("override '{o}' is not KEY=VALUE")))?;
        let value: toml::Value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let mut path: Vec<&str> = key.trim().split('.').collect();
        let last = path.pop().expect("split yields one item");
        let mut table = &mut doc;
        for p in path {
            table = table
                .get_mut(p)
                .and_then(|v| v.as_table_mut())
                .ok_or_else(|| LevyError::Config(format!("no table '{p}' in the model")))?;
        }
        table.insert(last.to_string(), value);
    }
    let text = toml::to_string(&doc).map_err(|e| LevyError::Config(e.to_string()))?;
    ModelConfig::from_toml_str(&text)
}

fn load_model(args: &ModelArgs) -> Result<LevyModel> {
    let base = LevyModel::from_arg(&args.model)?;
    apply_overrides(&base.to_config(), &args.overrides)?.build()
}

/// CSV table with `#` comment lines ahead of the header.
#[derive(Debug, Default)]
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Table::default()
        }
    }

    pub fn comment(&mut self, c: impl Into<String>) {
        self.comments.push(c.into());
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn render(&self) -> Result<String> {
        let mut buf = Vec::new();
        for c in &self.comments {
            let _ = writeln!(buf, "# {c}");
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let io = |e: csv::Error| LevyError::Config(format!("csv: {e}"));
            w.write_record(&self.header).map_err(io)?;
            for r in &self.rows {
                w.write_record(r).map_err(io)?;
            }
            w.flush().map_err(|e| LevyError::Config(e.to_string()))?;
        }
        String::from_utf8(buf).map_err(|e| LevyError::Config(e.to_string()))
    }
}

/// Reader matching [`Table::render`].
pub fn csv_reader<R: std::io::Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r)
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| LevyError::Config(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: &OutArgs, table: &Table) -> Result<()> {
    let text = table.render()?;
    match &out.output {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mc_config(mc: &McArgs, t_max: f64) -> MCConfig {
    MCConfig {
        seed: mc.seed,
        n_paths: mc.mc_paths,
        dt: mc.dt.min(t_max),
        t_max,
        ..MCConfig::default()
    }
}

/// Executes a parsed command; `Ok(true)` when every checked band held.
pub fn execute(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Models => {
            print!("{}", list_models());
            Ok(true)
        }
        Command::Psi { model, xi_grid, out } => {
            let m = load_model(model)?;
            let mut t = Table::new(&["xi", "re_psi", "im_psi"]);
            for xi in parse_grid(xi_grid)? {
                let p = m.eval_exponent(xi)?;
                t.push([num(xi), num(p.re), num(p.im)]);
            }
            emit(out, &t).map(|_| true)
        }
        Command::Kernel {
            model,
            x_grid,
            lambda,
            out,
        } => {
            let m = load_model(model)?;
            let mut t = Table::new(&["lambda", "x", "u_lambda", "k_lambda", "h_lambda"]);
            t.comment(format!("lambda={lambda}"));
            for x in parse_grid(x_grid)? {
                let u = if *lambda > 0.0 {
                    num(u_lambda(&m, *lambda, x)?.value)
                } else {
                    String::new()
                };
                t.push([
                    num(*lambda),
                    num(x),
                    u,
                    num(k_lambda(&m, *lambda, x)?.value),
                    num(h_sym(&m, x, *lambda)?.value),
                ]);
            }
            emit(out, &t).map(|_| true)
        }
        Command::Asymp {
            model,
            t_grid,
            x_grid,
            out,
        } => {
            let m = load_model(model)?;
            let mut t = Table::new(&["quantity", "argument", "value", "predicted"]);
            if let Some(r) = nu_tail_asymptotic_check(&m, &parse_grid(t_grid)?, 0.05)? {
                for (a, v) in &r.curve {
                    t.push(["nu_tail_ratio".into(), num(*a), num(*v), num(r.predicted_constant)]);
                }
            }
            if let Ok(r) = im_re_limit(&m) {
                for (a, v) in &r.curve {
                    t.push(["im_re_ratio".into(), num(*a), num(*v), num(r.predicted_constant)]);
                }
            }
            for x in parse_grid(x_grid)? {
                match point_hitting_asymptote(&m, x) {
                    Ok(v) => t.push(["point_asymptote".into(), num(x), num(v), num(v)]),
                    Err(LevyError::AssumptionViolated(msg)) => t.comment(format!("point asymptote: {msg}")),
                    Err(e) => return Err(e),
                }
            }
            emit(out, &t).map(|_| true)
        }
        Command::Fluct { model, x_grid, out } => {
            let m = load_model(model)?;
            let pair = renewal_pair(&m)?;
            let mut t = Table::new(&["x", "v", "vhat", "v_prime", "vhat_prime"]);
            t.comment(format!("provenance={:?}", pair.provenance));
            for x in parse_grid(x_grid)? {
                t.push([num(x), num(pair.v(x)), num(pair.vhat(x)), num(pair.v_prime(x)), num(pair.vhat_prime(x))]);
            }
            emit(out, &t).map(|_| true)
        }
        Command::Hit {
            model,
            x,
            r,
            t_grid,
            mc,
            out,
        } => {
            let m = load_model(model)?;
            let grid = parse_grid(t_grid)?;
            let t_max = grid.iter().cloned().fold(0.0, f64::max);
            let cfg = mc_config(mc, t_max);
            eprintln!("seed={}", mc.seed);
            let reports = if m.spectrally_negative() {
                let ctx = HittingContext::new(&m)?;
                ctx.simulate_cells(*x, *r, &grid, &cfg, |c, x, r, t| c.spectrally_negative_comparator(x, r, t))?
            } else if *x < -*r {
                // Below the interval: reflect and study the dual from −x.
                let ctx = HittingContext::new(&m.dual()?)?;
                let mut reps = ctx.simulate_cells(-*x, *r, &grid, &cfg, |c, x, r, t| c.interval_comparator(x, r, t))?;
                reps.iter_mut().for_each(|rep| rep.x = *x);
                reps
            } else {
                let ctx = HittingContext::new(&m)?;
                ctx.simulate_cells(*x, *r, &grid, &cfg, |c, x, r, t| c.interval_comparator(x, r, t))?
            };
            let mut t = Table::new(&["x", "R", "t", "regime", "comparator", "mc_estimate", "ci_halfwidth", "ratio"]);
            t.comment(format!("seed={} paths={} dt={}", mc.seed, mc.mc_paths, cfg.dt));
            for rep in &reports {
                t.push([
                    num(rep.x),
                    num(rep.r),
                    num(rep.t),
                    rep.regime.as_str().to_string(),
                    num(rep.paper_comparator),
                    num(rep.mc_estimate),
                    num(rep.ci_halfwidth),
                    num(rep.ratio),
                ]);
            }
            emit(out, &t)?;
            Ok(BandSummary::of(&reports).within(HIT_BAND.0, HIT_BAND.1))
        }
        Command::Verify { suite, mc, out } => {
            let suites = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![Suite::from_name(suite)?]
            };
            let opts = VerifyOptions {
                seed: mc.seed,
                n_paths: mc.mc_paths,
                threads: None,
            };
            let header: Vec<&str> = CSV_HEADER.split(',').collect();
            let mut t = Table::new(&header);
            t.comment(format!("seed={} paths={}", mc.seed, mc.mc_paths));
            let mut ok = true;
            for s in suites {
                let rep = run_suite(s, &opts)?;
                eprintln!(
                    "{:<22} {} ({} rows, {} failed)",
                    s.name(),
                    if rep.passed() { "PASS" } else { "FAIL" },
                    rep.rows.len(),
                    rep.failures()
                );
                ok &= rep.passed();
                for r in &rep.rows {
                    t.push([
                        s.name().to_string(),
                        r.label.clone(),
                        num(r.value),
                        num(r.reference),
                        num(r.lo),
                        num(r.hi),
                        (if r.pass { "pass" } else { "fail" }).to_string(),
                    ]);
                }
            }
            emit(out, &t)?;
            Ok(ok)
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_BAND,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("1e-3:1e3:7").unwrap();
        assert_eq!(g.len(), 7);
        assert!((g[3] - 1.0).abs() < 1e-12);
        assert_eq!(parse_grid("-1:1:3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_grid("2.5").unwrap(), vec![2.5]);
        for bad in ["1:2", "a:b:3", "1:2:0", "1:2:1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn overrides() {
        let base = LevyModel::stable_unit(1.5, 0.0).unwrap().to_config();
        let c = apply_overrides(&base, &["sigma=0.5".into(), "measure.alpha=1.7".into()]).unwrap();
        assert_eq!(c.sigma, 0.5);
        assert!(c.build().is_ok());
        assert!(apply_overrides(&base, &["sigma".into()]).is_err());
        assert!(apply_overrides(&base, &["nope.x=1".into()]).is_err());
        assert!(apply_overrides(&base, &["bogus=1".into()]).is_err());
    }

    #[test]
    fn unknown_command_is_an_input_error() {
        assert_eq!(run(["levy-hit", "frobnicate"]), EXIT_INPUT);
        assert_eq!(run(["levy-hit", "psi", "--model", "no-such-model"]), EXIT_INPUT);
    }
}
