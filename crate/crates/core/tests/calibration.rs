use std::io::Write;

use greedfear::binomial::price_closed_form_dividend;
use greedfear::calibration::*;
use greedfear::levy::{LevyMarket, LevyModel, LevyPricer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const SPOT: f64 = 100.0;
const RATE: f64 = 0.05;

fn synthetic(sigma: f64, dy: f64) -> Vec<OptionQuote<f64>> {
    let mut quotes = Vec::new();
    for &t in &[0.5, 1.0, 2.0] {
        for &k in &[80.0, 90.0, 100.0, 110.0, 120.0] {
            let mid_price = price_closed_form_dividend(SPOT, k, 0.0, t, RATE, sigma, dy).unwrap();
            quotes.push(OptionQuote {
                strike: k,
                maturity: t,
                mid_price,
            });
        }
    }
    quotes
}

fn write_csv(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

#[test]
fn loads_quote_files() {
    let f = write_csv("strike,maturity,mid_price\n90,1,14.2\n100, 1 ,8.1\n110,0.5,2.5\n");
    let q = load_quotes::<f64>(f.path()).unwrap();
    assert_eq!(q.len(), 3);
    assert_eq!(q[1], OptionQuote { strike: 100.0, maturity: 1.0, mid_price: 8.1 });

    let f = write_csv("strike,maturity,mid_price\n90,1,14.2\n100,1,-1\n");
    match load_quotes::<f64>(f.path()).unwrap_err() {
        greedfear::Error::Parse { row, message } => {
            assert_eq!(row, 3);
            assert!(message.contains("mid_price"), "{message}");
        }
        e => panic!("unexpected {e:?}"),
    }

    let f = write_csv("strike,maturity,mid_price\n");
    let err = load_quotes::<f64>(f.path()).unwrap_err();
    assert_eq!(err.kind(), "parse");
    assert!(err.to_string().contains("no quotes"));

    let f = write_csv("strike,maturity,mid_price\n90,abc,3\n");
    assert!(matches!(load_quotes::<f64>(f.path()).unwrap_err(), greedfear::Error::Parse { row: 2, .. }));
    let f = write_csv("strike,maturity,mid_price\n90,1\n");
    assert_eq!(load_quotes::<f64>(f.path()).unwrap_err().kind(), "parse");
    let f = write_csv("k,t,c\n90,1,3\n");
    assert!(matches!(load_quotes::<f64>(f.path()).unwrap_err(), greedfear::Error::Parse { row: 1, .. }));

    let err = load_quotes::<f64>("/nonexistent/quotes.csv").unwrap_err();
    assert_eq!(err.kind(), "file_not_found");
    assert!(err.to_string().contains("file not found"));
}

#[test]
fn objective_examples() {
    let quotes = synthetic(0.2, 0.025);
    assert!(objective(&quotes, SPOT, RATE, 0.2, 0.025).unwrap() < 1e-20);
    assert!(objective(&quotes, SPOT, RATE, 0.21, 0.025).unwrap() > 0.0);

    let one = [OptionQuote { strike: 100.0, maturity: 1.0, mid_price: 10.0 }];
    let model = price_closed_form_dividend(SPOT, 100.0, 0.0, 1.0, RATE, 0.2, 0.0).unwrap();
    let want = ((10.0 - model) / 10.0f64).powi(2);
    assert!((objective(&one, SPOT, RATE, 0.2, 0.0).unwrap() - want).abs() < 1e-12);
    assert_eq!(objective(&one, SPOT, RATE, -0.2, 0.0).unwrap_err().kind(), "domain");
}

#[test]
fn noiseless_round_trip() {
    let quotes = synthetic(0.2, 0.025);
    let fit = calibrate_sigma_dy(&quotes, SPOT, RATE, &CalibrationSettings::default()).unwrap();
    assert!((fit.sigma_impl - 0.2).abs() < 1e-4, "{fit:?}");
    assert!((fit.dy_impl - 0.025).abs() < 1e-4, "{fit:?}");
    assert!(fit.objective < 1e-12);
    assert!(fit.converged);
    let at = objective(&quotes, SPOT, RATE, fit.sigma_impl, fit.dy_impl).unwrap();
    assert_eq!(at, fit.objective);

    let again = calibrate_sigma_dy(&quotes, SPOT, RATE, &CalibrationSettings::default()).unwrap();
    assert_eq!(fit, again);
}

#[test]
fn no_greed_is_not_invented() {
    let quotes = synthetic(0.3, 0.0);
    let fit = calibrate_sigma_dy(&quotes, SPOT, RATE, &CalibrationSettings::default()).unwrap();
    assert!(fit.dy_impl.abs() < 1e-4, "{fit:?}");
}

#[test]
fn implied_yield_sign_follows_greed() {
    // D_y = (μ − r)𝒜 with μ = 0.1
    for &a in &[-0.6, 0.4] {
        let quotes = synthetic(0.25, 0.05 * a);
        let fit = calibrate_sigma_dy(&quotes, SPOT, RATE, &CalibrationSettings::default()).unwrap();
        assert_eq!(fit.dy_impl > 0.0, a > 0.0);
    }
}

#[test]
fn noisy_quotes_recover_parameters_in_median() {
    let clean = synthetic(0.2, 0.025);
    let (mut es, mut ed) = (Vec::new(), Vec::new());
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noisy: Vec<_> = clean
            .iter()
            .map(|q| {
                let z: f64 = StandardNormal.sample(&mut rng);
                OptionQuote { mid_price: q.mid_price * (1.0 + 0.01 * z), ..*q }
            })
            .collect();
        let fit = calibrate_sigma_dy(&noisy, SPOT, RATE, &CalibrationSettings::default()).unwrap();
        es.push((fit.sigma_impl - 0.2).abs());
        ed.push((fit.dy_impl - 0.025).abs());
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        0.5 * (v[9] + v[10])
    };
    assert!(median(&mut es) < 0.01, "{es:?}");
    assert!(median(&mut ed) < 0.01, "{ed:?}");
}

#[test]
fn identifiability_and_sanity_errors() {
    let s = CalibrationSettings::default();
    let quotes = synthetic(0.2, 0.0);
    let err = calibrate_sigma_dy(&quotes[..1], SPOT, RATE, &s).unwrap_err();
    assert_eq!(err.kind(), "identifiability");
    let same_strike: Vec<_> = quotes.iter().filter(|q| q.strike == 100.0).copied().collect();
    assert_eq!(calibrate_sigma_dy(&same_strike, SPOT, RATE, &s).unwrap_err().kind(), "identifiability");

    let mut bad = quotes.clone();
    bad[0].mid_price = 150.0;
    assert_eq!(calibrate_sigma_dy(&bad, SPOT, RATE, &s).unwrap_err().kind(), "domain");

    let inverted = CalibrationSettings { sigma_bounds: (1.0, 0.5), ..s };
    assert_eq!(calibrate_sigma_dy(&quotes, SPOT, RATE, &inverted).unwrap_err().kind(), "config");
    let zero_tol = CalibrationSettings { tol: 0.0, ..s };
    assert_eq!(calibrate_sigma_dy(&quotes, SPOT, RATE, &zero_tol).unwrap_err().kind(), "config");
}

fn bs_pricer(spot: f64) -> impl Fn(&[f64]) -> greedfear::Result<Box<dyn Fn(f64, f64) -> greedfear::Result<f64>>> + Sync {
    move |p: &[f64]| {
        let (sigma, dy) = (p[0], p[1]);
        Ok(Box::new(move |k, t| price_closed_form_dividend(spot, k, 0.0, t, RATE, sigma, dy)) as Box<_>)
    }
}

#[test]
fn generic_degenerate_box_returns_the_point() {
    let quotes = synthetic(0.2, 0.025);
    let s = CalibrationSettings::default();
    let fit = calibrate_generic(&quotes, SPOT, bs_pricer(SPOT), &[(0.3, 0.3), (0.01, 0.01)], &s).unwrap();
    assert_eq!(fit.params, vec![0.3, 0.01]);
    assert_eq!(fit.objective, objective(&quotes, SPOT, RATE, 0.3, 0.01).unwrap());
    assert_eq!(fit.n_iterations, 0);
    assert!(fit.converged);
    assert_eq!(fit.on_boundary, vec![false, false]);
}

#[test]
fn generic_box_excluding_truth_hits_the_boundary() {
    let quotes = synthetic(0.2, 0.025);
    let s = CalibrationSettings::default();
    let fit = calibrate_generic(&quotes, SPOT, bs_pricer(SPOT), &[(0.25, 0.6), (-0.2, 0.2)], &s).unwrap();
    assert!(fit.converged);
    assert!((fit.params[0] - 0.25).abs() < 1e-9, "{fit:?}");
    assert_eq!(fit.on_boundary, vec![true, false]);
    assert!(fit.objective > 0.0);
}

#[test]
fn logistic_levy_round_trip() {
    let (m, rho) = (0.02, 0.12);
    let truth = LevyPricer::new(LevyMarket::new(LevyModel::logistic(m, rho).unwrap(), SPOT, RATE).unwrap()).unwrap();
    let mut quotes = Vec::new();
    for &t in &[0.5, 1.0] {
        for &k in &[85.0, 95.0, 100.0, 105.0, 115.0] {
            quotes.push(OptionQuote {
                strike: k,
                maturity: t,
                mid_price: truth.call(k, t).unwrap(),
            });
        }
    }
    let pricer = |p: &[f64]| {
        let model = LevyModel::logistic(p[0], p[1])?;
        let pricer = LevyPricer::new(LevyMarket::new(model, SPOT, RATE)?)?;
        Ok(move |k, t| pricer.call(k, t))
    };
    let s = CalibrationSettings {
        tol: 1e-7,
        multistart: 4,
        ..CalibrationSettings::default()
    };
    let fit = calibrate_generic(&quotes, SPOT, pricer, &[(-0.1, 0.1), (0.05, 0.3)], &s).unwrap();
    assert!((fit.params[0] - m).abs() < 1e-3, "{fit:?}");
    assert!((fit.params[1] - rho).abs() < 1e-3, "{fit:?}");
    assert!(fit.objective < 1e-10);
}
