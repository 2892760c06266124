use levy_hit::fluctuation::{exit_right_bounds, renewal_pair, stable_rho, EXIT_LOWER_CONSTANT};
use levy_hit::kernels::transition_density;
use levy_hit::levy_model::preset;
use levy_hit::mc_engine::{
    estimate_exit_right, estimate_hitting_tail, ladder_renewal_estimate, sample_increments, MCConfig, Target,
};
use levy_hit::numerics::erf;
use levy_hit::LevyModel;

fn cfg(n_paths: usize, dt: f64, t_max: f64, seed: u64) -> MCConfig {
    MCConfig {
        seed,
        n_paths,
        dt,
        t_max,
        threads: Some(1),
        ..MCConfig::default()
    }
}

/// Largest gap between the empirical CDF and `F(0) + ∫_0^x p(1, y) dy` on
/// `[−6, 6]`, with `F(0) = P(X_1 > 0)` known from the positivity parameter.
fn windowed_ks(model: &LevyModel, samples: &mut [f64], f0: f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let h = 0.01;
    let mut worst: f64 = 0.0;
    for dir in [1.0, -1.0] {
        let (mut cdf, mut prev) = (f0, transition_density(model, 1.0, 0.0).unwrap());
        for i in 1..=600 {
            let x = dir * h * i as f64;
            let p = transition_density(model, 1.0, x).unwrap();
            cdf += dir * 0.5 * h * (p + prev);
            prev = p;
            let emp = samples.partition_point(|&s| s <= x) as f64 / n;
            worst = worst.max((emp - cdf).abs());
        }
    }
    worst
}

#[test]
fn stable_increments_pass_a_ks_check_against_the_density() {
    let n = 20_000;
    for (name, beta) in [("stable-sym-1.5", 0.0), ("stable-specneg-1.5", -1.0)] {
        let m = preset(name).unwrap();
        let mut xs = sample_increments(&m, 1.0, n, 99).unwrap();
        // P(X_1 ≤ 0) = 1 − ρ.
        let f0 = 1.0 - stable_rho(1.5, beta);
        let d = windowed_ks(&m, &mut xs, f0);
        // 1% critical value of the Kolmogorov distribution.
        assert!(d < 1.63 / (n as f64).sqrt(), "{name}: D = {d}");
    }
}

#[test]
fn brownian_survival_lies_in_the_erf_band() {
    let m = LevyModel::brownian(1.0).unwrap();
    let eps = 0.05;
    let t = [0.25, 1.0, 4.0, 16.0];
    let res = estimate_hitting_tail(&m, 1.0, Target::ball(eps).unwrap(), &t, &cfg(4000, 0.01, 16.0, 5)).unwrap();
    for (r, &tt) in res.iter().zip(&t) {
        // Var X_t = 2t, so P^1(T_{[−ε,ε]} > t) = erf((1 − ε)/(2√t)).
        let exact = erf((1.0 - eps) / (2.0 * tt.sqrt()));
        assert!(r.contains(exact, 3.0), "t={tt}: {} ± {} vs {exact}", r.estimate, r.ci_halfwidth);
    }
}

#[test]
fn exit_estimates_respect_the_upper_bound() {
    for name in ["stable-sym-1.5", "stable-specneg-1.5", "stable-sym-1.8"] {
        let m = preset(name).unwrap();
        let pair = renewal_pair(&m).unwrap();
        for (x, r) in [(0.3, 1.0), (2.0, 3.0)] {
            let est = estimate_exit_right(&m, x, r, &cfg(4000, 0.01, 1e3, 11)).unwrap();
            let b = exit_right_bounds(&m, &pair, x, r, EXIT_LOWER_CONSTANT).unwrap();
            assert!(est.estimate <= b.upper + 3.0 * est.ci_halfwidth, "{name} x={x} R={r}: {est:?} vs {b:?}");
            assert!(est.estimate >= b.lower, "{name} x={x} R={r}: {est:?} vs {b:?}");
        }
    }
}

#[test]
fn spectrally_negative_descending_ladder_has_exponent_one_half() {
    // V̂(x) ∝ x^{α(1−ρ)} = x^{1/2} for α = 3/2, ρ = 2/3.
    let m = preset("stable-specneg-1.5").unwrap();
    let est = ladder_renewal_estimate(&m, &[1.0, 3.0, 10.0], &cfg(1000, 1.0, 1.0, 2)).unwrap();
    let slope = est.log_slope();
    assert!((slope - 0.5).abs() < 0.025, "slope {slope}");
}
