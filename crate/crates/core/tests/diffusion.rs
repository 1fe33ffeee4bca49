use greedfear::diffusion::*;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// (S, σ, T, call) at K = 100, r = 0.05, from an independent Black–Scholes
/// evaluation in double precision.
const BLACK_SCHOLES: [(f64, f64, f64, f64); 75] = [
(80.0, 0.1, 0.25, 1.210248070911113e-05),
    (80.0, 0.1, 1.0, 1.475702859852142e-01),
    (80.0, 0.1, 3.0, 3.197055353869928e+00),
    (80.0, 0.2, 0.25, 5.642380134086533e-02),
    (80.0, 0.2, 1.0, 1.859419572812183e+00),
    (80.0, 0.2, 3.0, 8.633702028968433e+00),
    (80.0, 0.3, 0.25, 4.833245754277415e-01),
    (80.0, 0.3, 1.0, 4.553219350065298e+00),
    (80.0, 0.3, 3.0, 1.415035935500141e+01),
    (80.0, 0.45, 0.25, 1.871393601572317e+00),
    (80.0, 0.45, 1.0, 9.143498596895128e+00),
    (80.0, 0.45, 3.0, 2.225033107735777e+01),
    (80.0, 0.6, 0.25, 3.772079919702083e+00),
    (80.0, 0.6, 1.0, 1.391348390599170e+01),
    (80.0, 0.6, 3.0, 2.997653302698933e+01),
    (90.0, 0.1, 0.25, 5.817789921971261e-02),
    (90.0, 0.1, 1.0, 1.680635530242967e+00),
    (90.0, 0.1, 3.0, 8.240274052965020e+00),
    (90.0, 0.2, 0.25, 8.975218205295548e-01),
    (90.0, 0.2, 1.0, 5.091222078817552e+00),
    (90.0, 0.2, 3.0, 1.416968142690360e+01),
    (90.0, 0.3, 0.25, 2.308660128277989e+00),
    (90.0, 0.3, 1.0, 8.661055189855666e+00),
    (90.0, 0.3, 3.0, 2.007584116720492e+01),
    (90.0, 0.45, 0.25, 4.781219732898887e+00),
    (90.0, 0.45, 1.0, 1.403879968187920e+01),
    (90.0, 0.45, 3.0, 2.870293340380708e+01),
    (90.0, 0.6, 0.25, 7.404775027944520e+00),
    (90.0, 0.6, 1.0, 1.935670598808556e+01),
    (90.0, 0.6, 3.0, 3.691485559818285e+01),
    (100.0, 0.1, 0.25, 2.664832221639188e+00),
    (100.0, 0.1, 1.0, 6.804957708822144e+00),
    (100.0, 0.1, 3.0, 1.564211441246003e+01),
    (100.0, 0.2, 0.25, 4.614997129602855e+00),
    (100.0, 0.2, 1.0, 1.045058357218556e+01),
    (100.0, 0.2, 3.0, 2.092436095289521e+01),
    (100.0, 0.3, 0.25, 6.583084497992466e+00),
    (100.0, 0.3, 1.0, 1.423125478598582e+01),
    (100.0, 0.3, 3.0, 2.680548359664154e+01),
    (100.0, 0.45, 0.25, 9.536453845161482e+00),
    (100.0, 0.45, 1.0, 1.991176963146768e+01),
    (100.0, 0.45, 3.0, 3.567145202263897e+01),
    (100.0, 0.6, 0.25, 1.248079761283542e+01),
    (100.0, 0.6, 1.0, 2.552320566560950e+01),
    (100.0, 0.6, 3.0, 4.421841060837053e+01),
    (110.00000000000001, 0.1, 0.25, 1.127103716117226e+01),
    (110.00000000000001, 0.1, 1.0, 1.521008330137410e+01),
    (110.00000000000001, 0.1, 3.0, 2.452374523998623e+01),
    (110.00000000000001, 0.2, 0.25, 1.198832952446104e+01),
    (110.00000000000001, 0.2, 1.0, 1.766295374059045e+01),
    (110.00000000000001, 0.2, 3.0, 2.863885305919462e+01),
    (110.00000000000001, 0.3, 0.25, 1.340252961037017e+01),
    (110.00000000000001, 0.3, 1.0, 2.106103119260968e+01),
    (110.00000000000001, 0.3, 3.0, 3.419707186070642e+01),
    (110.00000000000001, 0.45, 0.25, 1.601815308784234e+01),
    (110.00000000000001, 0.45, 1.0, 2.662245920304753e+01),
    (110.00000000000001, 0.45, 3.0, 4.307316395396528e+01),
    (110.00000000000001, 0.6, 0.25, 1.885497621018619e+01),
    (110.00000000000001, 0.6, 1.0, 3.230829460802531e+01),
    (110.00000000000001, 0.6, 3.0, 5.183078432884695e+01),
    (125.0, 0.1, 0.25, 2.624222128242063e+01),
    (125.0, 0.1, 1.0, 2.988747236754801e+01),
    (125.0, 0.1, 3.0, 3.902879156609441e+01),
    (125.0, 0.2, 0.25, 2.627662302459596e+01),
    (125.0, 0.2, 1.0, 3.073604430490968e+01),
    (125.0, 0.2, 3.0, 4.148310077155712e+01),
    (125.0, 0.3, 0.25, 2.665603304433652e+01),
    (125.0, 0.3, 1.0, 3.307760713708974e+01),
    (125.0, 0.3, 3.0, 4.625451845524289e+01),
    (125.0, 0.45, 0.25, 2.813632764772788e+01),
    (125.0, 0.45, 1.0, 3.794909450060553e+01),
    (125.0, 0.45, 3.0, 5.483993272303218e+01),
    (125.0, 0.6, 0.25, 3.032552426252232e+01),
    (125.0, 0.6, 1.0, 4.343940865762401e+01),
    (125.0, 0.6, 3.0, 6.373045040521324e+01),
];

fn call(k: f64) -> impl Fn(f64) -> f64 + Sync {
    move |s| (s - k).max(0.0)
}

#[test]
fn derived_coefficient_examples() {
    let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.0).unwrap();
    let d = derived_coefficients(&spec, 0.0, 100.0, false).unwrap();
    assert_eq!((d.r_invest, d.div_yield, d.drift_r, d.reward_h), (0.05, 0.0, 0.05, 0.0));
    assert!(close(d.sharpe, 0.25, 1e-15) && close(d.sharpe_tau, 0.25, 1e-15));

    let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1).unwrap();
    let d = derived_coefficients(&spec, 0.3, 80.0, false).unwrap();
    assert!(close(d.sharpe_tau, 0.30, 1e-14));
    assert!(close(d.reward_h, 0.009, 1e-15));
    assert!(close(d.drift_r, 0.05 - 0.1 * (0.1 - 0.05), 1e-15));
    assert!(close(d.r_invest, 0.055, 1e-15));

    // the 𝒢r variant moves the drift away from r − 𝒢(μ − r)
    let on = derived_coefficients(&spec, 0.3, 80.0, true).unwrap();
    assert!(close(on.drift_r, 0.05 - 0.1 * 0.1, 1e-15));
    assert!((on.drift_r - 0.045).abs() > 1e-3);

    let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.04, -0.5).unwrap();
    assert!(close(derived_coefficients(&spec, 0.0, 1.0, false).unwrap().r_invest, 0.02, 1e-15));
}

#[test]
fn coefficient_validation() {
    assert_eq!(GreedFearDiffusionSpec::constant(0.1, 0.0, 0.05, 0.1).unwrap_err().kind(), "domain");
    assert!(GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, -1.0).is_err());
    assert!(GreedFearDiffusionSpec::constant(0.1, 0.2, 0.0, 0.1).is_err());
    let spec = GreedFearDiffusionSpec::new(
        0.1.into(),
        Coefficient::function(|t, _| 0.2 - t),
        0.1.into(),
        0.2.into(),
        0.05.into(),
        0.0.into(),
    )
    .unwrap();
    assert!(derived_coefficients(&spec, 0.1, 100.0, false).is_ok());
    let err = derived_coefficients(&spec, 0.5, 100.0, false).unwrap_err();
    assert!(err.to_string().contains("sigma"), "{err}");
    assert!(derived_coefficients(&spec, 0.1, 0.0, false).is_err());
}

#[test]
fn closed_form_reduces_to_black_scholes() {
    let bs = price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.1, 0.0).unwrap();
    assert!(close(bs, 10.4506, 1e-4) && close(bs, 10.450583572185565, 1e-10), "{bs}");
    for &(s, sigma, t, want) in BLACK_SCHOLES.iter() {
        let got = price_call_closed_form(s, 100.0, 0.0, t, 0.05, sigma, 0.12, 0.0).unwrap();
        assert!(close(got, want, 1e-10), "S {s} σ {sigma} T {t}: {got} vs {want}");
        // valuation date only enters through T − t
        let shifted = price_call_closed_form(s, 100.0, 2.0, 2.0 + t, 0.05, sigma, 0.12, 0.0).unwrap();
        assert!(close(shifted, got, 1e-12));
    }
    let deep = price_call_closed_form(100.0, 1e-9, 0.0, 1.0, 0.05, 0.2, 0.1, 0.0).unwrap();
    assert!(close(deep, 100.0, 1e-8));
    assert_eq!(price_call_closed_form(100.0, 100.0, 1.0, 1.0, 0.05, 0.2, 0.1, 0.0).unwrap_err().kind(), "domain");
    assert!(price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.1, -1.0).is_err());
}

#[test]
fn closed_form_shape_in_strike() {
    for &g in &[-0.3, 0.1, 0.5] {
        let prices: Vec<f64> = (0..41)
            .map(|i| price_call_closed_form(100.0, 60.0 + 2.0 * i as f64, 0.0, 1.0, 0.05, 0.2, 0.1, g).unwrap())
            .collect();
        for w in prices.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        for w in prices.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-10);
        }
    }
}

#[test]
fn reward_term_limits() {
    // G = 0 pays nothing; tiny horizons pay h·τ
    assert_eq!(reward_term(0.05, 0.2, 0.1, 0.0, 1.0), 0.0);
    let h = ((1.1f64 * 0.1 - 0.05) / 0.2).powi(2) * 0.1;
    assert!(close(reward_term(0.05, 0.2, 0.1, 0.1, 1e-6), h * 1e-6, 1e-15));
    // long horizons approach the perpetuity h / (r(1+𝒢))
    assert!(close(reward_term(0.05, 0.2, 0.1, 0.1, 2000.0), h / 0.055, 1e-12));
}

#[test]
fn monte_carlo_degenerate_payoffs_are_exact() {
    let mc = MonteCarloSettings::new(2_000, 40, 7, true).unwrap();
    let zero_reward = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.0).unwrap();
    let est = price_fk_monte_carlo(&zero_reward, |_| 0.0, 0.0, 100.0, 1.0, &mc).unwrap();
    assert_eq!(est.price, 0.0);
    assert_eq!(est.std_error, 0.0);

    let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.3).unwrap();
    let est = price_fk_monte_carlo(&spec, |_| 5.0, 0.0, 100.0, 2.0, &mc).unwrap();
    let want = 5.0 * (-0.05 * 1.3 * 2.0f64).exp() - reward_term(0.05, 0.2, 0.1, 0.3, 2.0);
    // only the trapezoid error of the reward integral remains, O(dt² (r^ℑ)²)
    assert!(close(est.price, want, 1e-6), "{} vs {want}", est.price);
    assert!(est.std_error < 1e-10);
}

#[test]
fn monte_carlo_matches_closed_form() {
    let mc = MonteCarloSettings::new(200_000, 50, 11, true).unwrap();
    for &g in &[-0.3, 0.0, 0.1, 0.5] {
        let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, g).unwrap();
        let est = price_fk_monte_carlo(&spec, call(100.0), 0.0, 100.0, 1.0, &mc).unwrap();
        let exact = price_call_closed_form(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.1, g).unwrap();
        let z = (est.price - exact) / est.std_error;
        assert!(z.abs() < 3.0, "G {g}: mc {} ± {}, closed {exact}", est.price, est.std_error);
    }
}

#[test]
fn monte_carlo_unbiased_across_seeds() {
    let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1).unwrap();
    let exact = price_call_closed_form(100.0, 95.0, 0.0, 1.0, 0.05, 0.2, 0.1, 0.1).unwrap();
    let excursions = (0..20)
        .filter(|&seed| {
            let mc = MonteCarloSettings::new(20_000, 25, seed, true).unwrap();
            let est = price_fk_monte_carlo(&spec, call(95.0), 0.0, 100.0, 1.0, &mc).unwrap();
            ((est.price - exact) / est.std_error).abs() >= 3.0
        })
        .count();
    assert!(excursions <= 1, "{excursions} excursions");
}

#[test]
fn printed_discounting_disagrees_with_feynman_kac() {
    // Discounting the option part at r instead of r(1+𝒢) is off by e^{𝒢rτ}.
    let (g, r, sigma, mu) = (0.5, 0.05, 0.2, 0.1);
    let spec = GreedFearDiffusionSpec::constant(mu, sigma, r, g).unwrap();
    let mc = MonteCarloSettings::new(200_000, 50, 3, true).unwrap();
    let est = price_fk_monte_carlo(&spec, call(100.0), 0.0, 100.0, 1.0, &mc).unwrap();
    let reward = reward_term(r, sigma, mu, g, 1.0);
    let printed = black_scholes_call(100.0, 100.0, 1.0, r, sigma, g * (mu - r)).unwrap() - reward;
    assert!(((est.price - printed) / est.std_error).abs() > 10.0);
}

#[test]
fn general_coefficients_and_errors() {
    // time-dependent rate and greed: compare a coarse and a fine time grid
    let spec = GreedFearDiffusionSpec::new(
        0.1.into(),
        0.2.into(),
        Coefficient::Affine { c0: 0.1, ct: 0.02, cx: 0.0 },
        0.25.into(),
        Coefficient::Affine { c0: 0.04, ct: 0.01, cx: 0.0 },
        Coefficient::Affine { c0: 0.1, ct: 0.0, cx: 0.01 },
    )
    .unwrap();
    let coarse = price_fk_monte_carlo(&spec, call(100.0), 0.0, 100.0, 1.0, &MonteCarloSettings::new(50_000, 50, 1, true).unwrap()).unwrap();
    let fine = price_fk_monte_carlo(&spec, call(100.0), 0.0, 100.0, 1.0, &MonteCarloSettings::new(50_000, 200, 1, true).unwrap()).unwrap();
    assert!(((coarse.price - fine.price) / coarse.std_error.hypot(fine.std_error)).abs() < 4.0);

    let bad = GreedFearDiffusionSpec::new(
        0.1.into(),
        Coefficient::function(|_, x| if x > 130.0 { f64::NAN } else { 0.4 }),
        0.1.into(),
        0.2.into(),
        0.05.into(),
        0.0.into(),
    )
    .unwrap();
    let err = price_fk_monte_carlo(&bad, call(100.0), 0.0, 100.0, 1.0, &MonteCarloSettings::new(1_000, 20, 1, true).unwrap()).unwrap_err();
    assert_eq!(err.kind(), "numeric");
    assert!(err.to_string().contains("sigma"), "{err}");

    let ok = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1).unwrap();
    let mc = MonteCarloSettings::default();
    assert_eq!(price_fk_monte_carlo(&ok, call(100.0), 1.0, 100.0, 1.0, &mc).unwrap_err().kind(), "domain");
    assert!(MonteCarloSettings::new(0, 10, 1, true).is_err());
}

#[test]
fn seed_determinism_independent_of_threads() {
    let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1).unwrap();
    let mc = MonteCarloSettings::new(4_001, 30, 99, true).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| price_fk_monte_carlo(&spec, call(100.0), 0.0, 100.0, 1.0, &mc).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    assert_eq!(one.n_samples, 2_001);
    let other = price_fk_monte_carlo(&spec, call(100.0), 0.0, 100.0, 1.0, &MonteCarloSettings { seed: 100, ..mc }).unwrap();
    assert_ne!(one.price, other.price);
}

#[test]
fn hedge_ratio_examples() {
    let spec = GreedFearDiffusionSpec::constant(0.1, 0.2, 0.05, 0.1).unwrap();
    let (a, b) = hedge_ratios(&spec, 0.5, 100.0, 12.0, 0.6).unwrap();
    assert!(close(a, 0.6015, 1e-14), "{a}");
    assert!(close(a * 100.0 + b * (0.05f64 * 0.5).exp(), 12.0 * 1.1, 1e-12));

    let plain = GreedFearDiffusionSpec::constant(0.1, 0.3, 0.05, 0.0).unwrap();
    let (a, _) = hedge_ratios(&plain, 0.0, 80.0, 3.0, 0.42).unwrap();
    assert!(close(a, 0.42, 1e-15));

    // σ^τ ≠ σ scales the delta by σ^τ/σ
    let spec = GreedFearDiffusionSpec::new(0.1.into(), 0.2.into(), 0.1.into(), 0.3.into(), 0.05.into(), 0.0.into()).unwrap();
    let (a, _) = hedge_ratios(&spec, 0.0, 100.0, 5.0, 0.5).unwrap();
    assert!(close(a, 0.75, 1e-15));
}

proptest! {
    #[test]
    fn hedge_identity_holds(
        mu in -0.2f64..0.4, sigma in 0.05f64..0.8, sigma_tau in 0.05f64..0.8, r in 0.001f64..0.1,
        g in -0.9f64..2.0, t in 0.0f64..5.0, s in 1.0f64..500.0, f in 0.0f64..100.0, fx in 0.0f64..1.0,
    ) {
        let spec = GreedFearDiffusionSpec::new(
            mu.into(), sigma.into(), ((1.0 + g) * mu).into(), sigma_tau.into(), r.into(), g.into(),
        ).unwrap();
        let (a, b) = hedge_ratios(&spec, t, s, f, fx).unwrap();
        let lhs = a * s + b * (r * t).exp();
        prop_assert!((lhs - f * (1.0 + g)).abs() <= 1e-12 * (1.0 + (f * (1.0 + g)).abs() + (a * s).abs()));
    }

    #[test]
    fn closed_form_nonincreasing_in_strike(g in -0.9f64..1.5, k in 50.0f64..150.0, dk in 0.01f64..10.0) {
        let c1 = price_call_closed_form(100.0, k, 0.0, 1.0, 0.05, 0.25, 0.1, g).unwrap();
        let c2 = price_call_closed_form(100.0, k + dk, 0.0, 1.0, 0.05, 0.25, 0.1, g).unwrap();
        prop_assert!(c2 <= c1 + 1e-12);
    }
}
