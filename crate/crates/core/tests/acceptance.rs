//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Randomized suites run once with one worker and again with eight; the
//! final criterion compares the two CSV renderings byte for byte.

use std::time::{Duration, Instant};

use levy_hit::verify::{run_suite, Suite, SuiteReport, VerifyOptions};

struct Criterion {
    id: u32,
    suite: Suite,
    /// Hard wall-clock budget, when the criterion states one.
    budget: Option<Duration>,
}

const SEED: u64 = 20_240_611;
const PATHS: usize = 20_000;

fn run(suite: Suite, threads: usize) -> (SuiteReport, Duration) {
    let opts = VerifyOptions {
        seed: SEED,
        n_paths: PATHS,
        threads: Some(threads),
    };
    let start = Instant::now();
    let rep = run_suite(suite, &opts).unwrap_or_else(|e| panic!("{}: {e}", suite.name()));
    (rep, start.elapsed())
}

fn main() {
    let mins = |m: u64| Some(Duration::from_secs(60 * m));
    let criteria = [
        Criterion { id: 1, suite: Suite::BrownianClosedForms, budget: mins(1) },
        Criterion { id: 2, suite: Suite::StableKernels, budget: mins(2) },
        Criterion { id: 3, suite: Suite::TailConstants, budget: mins(1) },
        Criterion { id: 4, suite: Suite::ImReLimit, budget: mins(1) },
        Criterion { id: 5, suite: Suite::ResolventScaling, budget: None },
        Criterion { id: 6, suite: Suite::ExitProbability, budget: None },
        Criterion { id: 7, suite: Suite::IntervalSandwich, budget: None },
        Criterion { id: 8, suite: Suite::SpectrallyNegative, budget: None },
        Criterion { id: 9, suite: Suite::PointProxy, budget: None },
    ];
    let mut all_ok = true;
    let mut reruns = Vec::new();
    for c in &criteria {
        let (rep, took) = run(c.suite, 1);
        let in_time = c.budget.is_none_or(|b| took <= b);
        let ok = rep.passed() && in_time;
        all_ok &= ok;
        println!(
            "criterion {:>2} {:<22} {}  rows {}/{}  {:.1}s{}",
            c.id,
            c.suite.name(),
            if ok { "PASS" } else { "FAIL" },
            rep.rows.len() - rep.failures(),
            rep.rows.len(),
            took.as_secs_f64(),
            if in_time { "" } else { "  (over budget)" }
        );
        for r in rep.rows.iter().filter(|r| !r.pass) {
            println!("    failed: {} = {:e} not in [{:e}, {:e}]", r.label, r.value, r.lo, r.hi);
        }
        if c.suite.randomized() {
            reruns.push(rep);
        }
    }
    let mut identical = 0;
    for first in &reruns {
        let (again, _) = run(first.suite, 8);
        if again.to_csv() == first.to_csv() {
            identical += 1;
        } else {
            println!("    differs with 8 workers: {}", first.suite.name());
        }
    }
    let ok = identical == reruns.len();
    all_ok &= ok;
    println!(
        "criterion 10 {:<22} {}  suites {}/{} byte-identical (seed {SEED}, workers 1 vs 8)",
        "determinism",
        if ok { "PASS" } else { "FAIL" },
        identical,
        reruns.len()
    );
    println!("acceptance: {}", if all_ok { "all criteria pass" } else { "FAILURES" });
    if !all_ok {
        std::process::exit(1);
    }
}
