use greedfear::binomial::*;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn reference(a: f64, n: usize) -> GreedFearBinomialSpec<f64> {
    GreedFearBinomialSpec::new(100.0, 0.10, 0.2, 0.05, a, n, 1.0).unwrap()
}

fn call(k: f64) -> impl Fn(f64) -> f64 {
    move |s| (s - k).max(0.0)
}

/// Dividend-yield Black–Scholes values at S = K = 100, r = 0.05, σ = 0.2,
/// T = 1, from an independent double-precision evaluation.
const DIVIDEND_BS: [(f64, f64); 6] = [
    (0.0, 10.450583572185565),
    (0.02, 9.227005508154036),
    (0.025, 8.93667801992408),
    (-0.025, 12.121408229797957),
    (0.05, 7.577082146427273),
    (-0.05, 13.950027451711705),
];

#[test]
fn tree_shape() {
    let spec = reference(0.3, 1);
    let tree = build_tree(&spec).unwrap();
    assert_eq!(tree.len(), 2);
    assert!(close(tree[1][1].price, 100.0 * (1.0 + 0.1 + 0.2), 1e-12));
    assert!(close(tree[1][0].price, 100.0 * (1.0 + 0.1 - 0.2), 1e-12));

    let tree = build_tree(&reference(0.0, 30)).unwrap();
    for (k, level) in tree.iter().enumerate() {
        assert_eq!(level.len(), k + 1);
        assert!(level.iter().all(|n| n.price > 0.0 && n.step == k));
    }
    // recombination: up then down equals down then up
    let (u, d) = reference(0.0, 30).factors();
    assert!(close(tree[2][1].price, 100.0 * u * d, 1e-12));

    let flat = GreedFearBinomialSpec::new(100.0, 0.1, 0.0, 0.05, 0.0, 8, 2.0).unwrap();
    let tree = build_tree(&flat).unwrap();
    for (k, level) in tree.iter().enumerate() {
        let want = 100.0 * (1.0 + 0.1 * 0.25f64).powi(k as i32);
        assert!(level.iter().all(|n| close(n.price, want, 1e-10)));
    }
}

#[test]
fn invalid_trees_name_the_minimal_n() {
    // 1 + μΔt − σ√Δt ≤ 0 for a single step with σ = 1.5
    let spec = GreedFearBinomialSpec::new(100.0, 0.1, 1.5, 0.05, 0.0, 1, 1.0).unwrap();
    let err = build_tree(&spec).unwrap_err();
    assert_eq!(err.kind(), "config");
    let msg = err.to_string();
    let n: usize = msg.rsplit("n >= ").next().unwrap().parse().unwrap();
    let ok = |n: usize| 1.0 + 0.1 / n as f64 - 1.5 / (n as f64).sqrt() > 0.0;
    assert!(ok(n) && !ok(n - 1), "{msg}");

    // |θ^ℑ|√Δt ≥ 1: θ^ℑ = (μ − r)(1 + 𝒜)/σ = 2.5 with 𝒜 = 9, σ = 0.2
    let spec = GreedFearBinomialSpec::new(100.0, 0.10, 0.2, 0.05, 9.0, 4, 1.0).unwrap();
    let err = price_binomial(&spec, call(100.0)).unwrap_err();
    assert_eq!(err.kind(), "config");
    assert!(err.to_string().ends_with("n >= 7"), "{err}");
    assert!(price_binomial(&GreedFearBinomialSpec { n_steps: 7, ..spec }, call(100.0)).is_ok());

    assert!(GreedFearBinomialSpec::new(100.0, 0.05, 0.2, 0.06, 0.0, 10, 1.0).is_err());
    assert!(GreedFearBinomialSpec::new(100.0, 0.10, 0.2, 0.05, 0.0, 0, 1.0).is_err());
    let flat = GreedFearBinomialSpec::new(100.0, 0.1, 0.0, 0.05, 0.0, 8, 2.0).unwrap();
    assert_eq!(price_binomial(&flat, call(100.0)).unwrap_err().kind(), "config");
}

#[test]
fn hedge_ratio_examples() {
    assert!(close(hedge_ratio_node(10.0, 6.0, 110.0, 95.0, 0.0).unwrap(), 4.0 / 15.0, 1e-15));
    let g = node_greed_fear(1.0, 0.2, 10.0, 6.0, 0.01);
    assert!(close(g, 0.08, 1e-15));
    let a = hedge_ratio_node(10.0, 6.0, 110.0, 95.0, g).unwrap();
    assert!(close(a, 4.0 / 15.0 + 0.08 * 205.0 / 225.0, 1e-15));
    assert!(close(a, 0.33956, 1e-5));
    let g = node_greed_fear(3.0, 0.2, 7.0, 7.0, 0.01);
    assert_eq!(hedge_ratio_node(7.0, 7.0, 110.0, 95.0, g).unwrap(), 0.0);
    assert_eq!(hedge_ratio_node(1.0, 0.0, 100.0, 100.0, 0.0).unwrap_err().kind(), "config");
}

#[test]
fn closed_form_dividend_values() {
    for &(dy, want) in DIVIDEND_BS.iter() {
        let got = price_closed_form_dividend(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, dy).unwrap();
        assert!(close(got, want, 1e-10), "D_y {dy}: {got}");
    }
    let mut last = f64::INFINITY;
    for i in 0..21 {
        let dy = -0.1 + 0.01 * i as f64;
        let c = price_closed_form_dividend(100.0, 95.0, 0.0, 1.5, 0.05, 0.25, dy).unwrap();
        assert!(c <= last);
        last = c;
        let p = price_put_closed_form_dividend(100.0, 95.0, 0.0, 1.5, 0.05, 0.25, dy).unwrap();
        let parity = 100.0 * (-dy * 1.5f64).exp() - 95.0 * (-0.05 * 1.5f64).exp();
        assert!(close(c - p, parity, 1e-10));
    }
    assert_eq!(price_closed_form_dividend(100.0, 100.0, 1.0, 1.0, 0.05, 0.2, 0.0).unwrap_err().kind(), "domain");
}

#[test]
fn binomial_converges_to_dividend_formula() {
    for &a in &[-0.5, 0.0, 0.5, 1.0] {
        let exact = price_closed_form_dividend(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.05 * a).unwrap();
        let tree = price_binomial(&reference(a, 2000), call(100.0)).unwrap();
        assert!(close(tree, exact, 0.02), "A {a}: {tree} vs {exact}");
    }
    let tree = price_binomial(&reference(0.0, 2000), call(100.0)).unwrap();
    assert!(close(tree, 10.4506, 0.02));
}

#[test]
fn strike_band_error_shrinks_with_n() {
    let strikes: Vec<f64> = (0..21).map(|i| 80.0 + 2.0 * i as f64).collect();
    for &a in &[-0.5, 1.0] {
        let sup_err = |n: usize| {
            strikes
                .iter()
                .map(|&k| {
                    let exact = price_closed_form_dividend(100.0, k, 0.0, 1.0, 0.05, 0.2, 0.05 * a).unwrap();
                    (price_binomial(&reference(a, n), call(k)).unwrap() - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        let errs: Vec<f64> = [125, 500, 2000].iter().map(|&n| sup_err(n)).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "A {a}: {errs:?}");
    }
}

#[test]
fn constant_payoff_is_discounted_exactly() {
    for &a in &[-1.0, 0.0, 0.7] {
        let v = price_binomial(&reference(a, 300), |_| 4.0).unwrap();
        assert!(close(v, 4.0 * (-0.05f64).exp(), 1e-12), "A {a}: {v}");
    }
}

#[test]
fn zero_greed_is_the_plain_tree() {
    // with 𝒜 = 0 the weights use the ordinary Sharpe ratio (μ − r)/σ
    let spec = reference(0.0, 400);
    let (pu, pd) = spec.weights();
    let skew = 0.5 * 0.25 * (1.0f64 / 400.0).sqrt();
    assert!(close(pu, 0.5 - skew, 1e-15) && close(pd, 0.5 + skew, 1e-15));
    let report = price_binomial_report(&spec, call(100.0)).unwrap();
    assert_eq!(report.dy_implied_by_a, 0.0);
    assert_eq!(report.n, 400);
}

#[test]
fn greed_lowers_prices() {
    let grid: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
    let tree: Vec<f64> = grid.iter().map(|&a| price_binomial(&reference(a, 500), call(100.0)).unwrap()).collect();
    let closed: Vec<f64> = grid
        .iter()
        .map(|&a| price_closed_form_dividend(100.0, 100.0, 0.0, 1.0, 0.05, 0.2, 0.05 * a).unwrap())
        .collect();
    for w in tree.windows(2).chain(closed.windows(2)) {
        assert!(w[1] <= w[0]);
    }
}

proptest! {
    #[test]
    fn weights_are_probabilities(a in -3.0f64..3.0, sigma in 0.05f64..0.8, n in 50usize..400) {
        let spec = GreedFearBinomialSpec::new(100.0, 0.1, sigma, 0.04, a, n, 1.0).unwrap();
        let (pu, pd) = spec.weights();
        if (spec.sharpe() * spec.dt().sqrt()).abs() < 1.0 {
            prop_assert!(pu > 0.0 && pu < 1.0 && pd > 0.0 && pd < 1.0);
        }
        prop_assert!((pu + pd - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tree_price_monotone_in_greed(a in -1.0f64..1.5, da in 0.01f64..1.0, k in 70.0f64..130.0) {
        let lo = price_binomial(&reference(a, 200), call(k)).unwrap();
        let hi = price_binomial(&reference(a + da, 200), call(k)).unwrap();
        prop_assert!(hi <= lo + 1e-12);
    }
}
