//! Batch front end: every command prints one JSON object (or CSV with
//! `--out csv`) on standard output.
//!
//! Exit codes: 0 on success, 1 for usage errors, missing files and bad
//! input files, 2 when the engine rejects the request. Engine failures print
//! `{"error": {"kind", "message"}}` on standard error.

mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use greedfear::binomial::{price_binomial_report, GreedFearBinomialSpec};
use greedfear::calibration::{calibrate_generic, calibrate_sigma_dy, load_quotes, CalibrationSettings};
use greedfear::diffusion::{
    derived_coefficients, price_call_closed_form, price_fk_monte_carlo_with, reward_term, Coefficient,
    GreedFearDiffusionSpec, MonteCarloSettings,
};
use greedfear::distributions::DistributionSpec;
use greedfear::levy::{LevyMarket, LevyModel, LevyPricer};
use greedfear::transforms::{posterior_stats, PenalizedCdf, ValueFunction, WeightingFunction};

pub use output::{emit_table, format_number};

#[derive(Parser, Debug)]
#[command(name = "greedfear", version, about = "Behavioral option pricing engine")]
struct Cli {
    /// Output format; JSON except for `transform table`.
    #[arg(long, value_enum, global = true)]
    out: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distribution queries.
    #[command(subcommand)]
    Dist(DistCommand),
    /// Value and probability weighting functions.
    #[command(subcommand)]
    Transform(TransformCommand),
    /// Moments of a penalized cdf.
    #[command(subcommand)]
    Posterior(PosteriorCommand),
    /// European option prices.
    #[command(subcommand)]
    Price(PriceCommand),
    /// Fit model parameters to a quote file.
    Calibrate(CalibrateArgs),
}

#[derive(Subcommand, Debug)]
enum DistCommand {
    /// Evaluate one quantity of a distribution, e.g. `--spec '{"family":"laplace","m":0,"b":1}'`.
    Eval {
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum)]
        what: DistQuantity,
        /// Argument; required for everything except `moments`.
        #[arg(long, value_parser = decimal)]
        x: Option<f64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DistQuantity {
    Pdf,
    Cdf,
    Sf,
    Quantile,
    Isf,
    Cf,
    Mgf,
    Moments,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TransformSpec {
    /// Probability weighting function as JSON, e.g. `{"kind":"tk","gamma":0.5}`.
    #[arg(long)]
    wpf: Option<String>,
    /// Value function as JSON, e.g. `{"kind":"tk","alpha":0.88,"beta":0.88,"lambda":2.25}`.
    #[arg(long)]
    value_fn: Option<String>,
}

#[derive(Subcommand, Debug)]
enum TransformCommand {
    Eval {
        #[command(flatten)]
        spec: TransformSpec,
        #[arg(long, value_parser = decimal)]
        x: f64,
    },
    /// CSV grid of the transform; defaults to `--out csv`.
    Table {
        #[command(flatten)]
        spec: TransformSpec,
        /// Grid size including both end points.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Grid range, end points included. Without a range, weighting
        /// functions use the interior grid `i/(points+1)` and value functions [-1, 1].
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum PosteriorCommand {
    /// Mean, standard deviation and information ratio of `w ∘ F`.
    Stats {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        wpf: String,
        /// Starting integration range; widened until the tails are negligible.
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct Contract {
    #[arg(long, value_parser = decimal)]
    s0: f64,
    /// Strike.
    #[arg(long, value_parser = decimal)]
    k: f64,
    /// Maturity in years.
    #[arg(long, value_parser = decimal)]
    t: f64,
    #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
    r: f64,
    /// Price a put instead of a call.
    #[arg(long)]
    put: bool,
}

#[derive(Subcommand, Debug)]
enum PriceCommand {
    /// Esscher-transform pricing under the logistic Lévy model.
    LevyLogistic {
        #[command(flatten)]
        contract: Contract,
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        m: f64,
        #[arg(long, value_parser = decimal)]
        rho: f64,
    },
    /// Location-shift pricing under the negative-Gumbel Lévy model.
    LevyNeggumbel {
        #[command(flatten)]
        contract: Contract,
        /// Physical location; pricing replaces it by the risk-neutral one.
        #[arg(long, value_parser = decimal, allow_hyphen_values = true, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, value_parser = decimal)]
        varrho: f64,
    },
    /// Closed-form greed–fear call with constant coefficients.
    GreedfearBs {
        #[arg(long, value_parser = decimal)]
        s0: f64,
        #[arg(long, value_parser = decimal)]
        k: f64,
        #[arg(long, value_parser = decimal)]
        t: f64,
        /// Valuation time.
        #[arg(long, value_parser = decimal, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, value_parser = decimal)]
        r: f64,
        #[arg(long, value_parser = decimal)]
        sigma: f64,
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        mu: f64,
        /// Greed–fear level 𝒢.
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        g: f64,
    },
    /// Feynman–Kac Monte Carlo. Coefficients are numbers or `affine:c0,ct,cx`
    /// for `c0 + ct·t + cx·ln x`.
    GreedfearMc {
        #[arg(long, value_parser = decimal)]
        s0: f64,
        #[arg(long, value_parser = decimal)]
        k: f64,
        #[arg(long, value_parser = decimal)]
        t: f64,
        #[arg(long, value_parser = decimal, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
        mu: Coef,
        #[arg(long, value_parser = coefficient)]
        sigma: Coef,
        /// Defaults to `(1 + 𝒢)μ` (constant coefficients only).
        #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
        mu_tau: Option<Coef>,
        /// Defaults to `sigma`.
        #[arg(long, value_parser = coefficient)]
        sigma_tau: Option<Coef>,
        #[arg(long, value_parser = coefficient)]
        r: Coef,
        #[arg(long, value_parser = coefficient, allow_hyphen_values = true)]
        g: Coef,
        #[arg(long)]
        put: bool,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_antithetic: bool,
        /// Add the `𝒢r` term to the hedger's dividend yield.
        #[arg(long)]
        include_gr_term: bool,
    },
    /// Greed–fear binomial tree.
    Binomial {
        #[arg(long, value_parser = decimal)]
        s0: f64,
        #[arg(long, value_parser = decimal)]
        k: f64,
        #[arg(long, value_parser = decimal)]
        mu: f64,
        #[arg(long, value_parser = decimal)]
        r: f64,
        #[arg(long, value_parser = decimal)]
        sigma: f64,
        #[arg(long, value_parser = decimal)]
        t: f64,
        /// Greed–fear coefficient 𝒜.
        #[arg(long, value_parser = decimal, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        put: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Model {
    BsDy,
    LevyLogistic,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    /// CSV with header `strike,maturity,mid_price`.
    #[arg(long)]
    quotes: PathBuf,
    #[arg(long, value_parser = decimal)]
    s0: f64,
    #[arg(long, value_parser = decimal)]
    r: f64,
    #[arg(long, value_enum, default_value_t = Model::BsDy)]
    model: Model,
    #[arg(long, default_value_t = 8)]
    multistart: usize,
    #[arg(long, value_parser = decimal, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
}

#[derive(Clone, Copy, Debug)]
enum Coef {
    Constant(f64),
    Affine(f64, f64, f64),
}

impl From<Coef> for Coefficient<f64> {
    fn from(c: Coef) -> Self {
        match c {
            Coef::Constant(v) => Coefficient::Constant(v),
            Coef::Affine(c0, ct, cx) => Coefficient::Affine { c0, ct, cx },
        }
    }
}

fn decimal(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a decimal number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn coefficient(s: &str) -> Result<Coef, String> {
    match s.strip_prefix("affine:") {
        Some(rest) => {
            let parts = rest.split(',').map(decimal).collect::<Result<Vec<_>, _>>()?;
            match parts[..] {
                [c0, ct, cx] => Ok(Coef::Affine(c0, ct, cx)),
                _ => Err(format!("affine coefficient needs three values c0,ct,cx, got {rest:?}")),
            }
        }
        None => decimal(s).map(Coef::Constant),
    }
}

enum Failure {
    Usage(String),
    Engine(greedfear::Error),
}

impl From<greedfear::Error> for Failure {
    fn from(e: greedfear::Error) -> Self {
        use greedfear::Error::*;
        match e {
            FileNotFound(_) | Parse { .. } | Io(_) => Failure::Usage(e.to_string()),
            e => Failure::Engine(e),
        }
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("invalid {what}: {e}")))
}

enum Transform {
    Weighting(WeightingFunction<f64>),
    Value(ValueFunction<f64>),
}

fn transform(spec: &TransformSpec) -> Result<Transform, Failure> {
    match (&spec.wpf, &spec.value_fn) {
        (Some(w), _) => Ok(Transform::Weighting(parse_json("--wpf", w)?)),
        (_, Some(v)) => Ok(Transform::Value(parse_json("--value-fn", v)?)),
        _ => Err(Failure::Usage("one of --wpf or --value-fn is required".into())),
    }
}

fn need_x(x: Option<f64>, what: DistQuantity) -> Result<f64, Failure> {
    x.ok_or_else(|| Failure::Usage(format!("--x is required for {what:?}").to_lowercase()))
}

/// Result of one command: a JSON object, or a finished CSV table.
enum Report {
    Json(Value),
    Table(String),
}

fn dispatch(cli: Cli) -> Result<Report, Failure> {
    let value = match cli.command {
        Command::Dist(DistCommand::Eval { spec, what, x }) => {
            let d: DistributionSpec<f64> = parse_json("--spec", &spec)?;
            match what {
                DistQuantity::Pdf => json!({ "value": d.pdf(need_x(x, what)?) }),
                DistQuantity::Cdf => json!({ "value": d.cdf(need_x(x, what)?) }),
                DistQuantity::Sf => json!({ "value": d.sf(need_x(x, what)?) }),
                DistQuantity::Quantile => json!({ "value": d.quantile(need_x(x, what)?)? }),
                DistQuantity::Isf => json!({ "value": d.isf(need_x(x, what)?)? }),
                DistQuantity::Mgf => json!({ "value": d.mgf(need_x(x, what)?)? }),
                DistQuantity::Cf => {
                    let c = d.cf(need_x(x, what)?)?;
                    json!({ "re": c.re, "im": c.im })
                }
                DistQuantity::Moments => serde_json::to_value(d.moments()).expect("moments serialize"),
            }
        }
        Command::Transform(TransformCommand::Eval { spec, x }) => match transform(&spec)? {
            Transform::Weighting(w) => json!({ "value": w.eval(x)? }),
            Transform::Value(v) => json!({ "value": v.eval(x)? }),
        },
        Command::Transform(TransformCommand::Table { spec, points, lo, hi }) => {
            let t = transform(&spec)?;
            let names = match t {
                Transform::Weighting(_) => ["u", "w"],
                Transform::Value(_) => ["x", "v"],
            };
            let grid: Vec<f64> = match (&t, lo, hi) {
                (Transform::Weighting(_), None, None) => (1..=points).map(|i| i as f64 / (points + 1) as f64).collect(),
                _ => {
                    let (lo, hi) = (lo.unwrap_or(-1.0), hi.unwrap_or(1.0));
                    if !(lo <= hi) || (points > 1 && lo == hi) {
                        return Err(Failure::Usage(format!("grid range [{lo}, {hi}] is empty")));
                    }
                    match points {
                        0 => Vec::new(),
                        1 => vec![lo],
                        n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
                    }
                }
            };
            let mut rows = Vec::with_capacity(grid.len());
            for &u in &grid {
                let w = match &t {
                    Transform::Weighting(w) => w.eval(u)?,
                    Transform::Value(v) => v.eval(u)?,
                };
                rows.push(vec![u, w]);
            }
            let table = emit_table(&names, &rows).map_err(Failure::Usage)?;
            return Ok(match cli.out {
                None | Some(Format::Csv) => Report::Table(table),
                Some(Format::Json) => Report::Json(json!({ names[0]: grid, names[1]: rows.iter().map(|r| r[1]).collect::<Vec<_>>() })),
            });
        }
        Command::Posterior(PosteriorCommand::Stats { prior, wpf, lo, hi }) => {
            let prior: DistributionSpec<f64> = parse_json("--prior", &prior)?;
            let w: WeightingFunction<f64> = parse_json("--wpf", &wpf)?;
            let (s_lo, s_hi) = prior.support();
            let (loc, scale) = (prior.location(), prior.scale());
            let hint = (
                lo.unwrap_or(if s_lo.is_finite() { s_lo } else { loc - 10.0 * scale }),
                hi.unwrap_or(if s_hi.is_finite() { s_hi } else { loc + 10.0 * scale }),
            );
            let stats = posterior_stats(&PenalizedCdf::new(w, prior), hint)?;
            serde_json::to_value(stats).expect("stats serialize")
        }
        Command::Price(cmd) => price(cmd)?,
        Command::Calibrate(args) => calibrate(args)?,
    };
    Ok(Report::Json(value))
}

fn levy_price(market: LevyMarket<f64>, c: &Contract) -> Result<(f64, LevyPricer<f64>), Failure> {
    let pricer = LevyPricer::new(market)?;
    let price = if c.put { pricer.put(c.k, c.t)? } else { pricer.call(c.k, c.t)? };
    Ok((price, pricer))
}

fn price(cmd: PriceCommand) -> Result<Value, Failure> {
    Ok(match cmd {
        PriceCommand::LevyLogistic { contract: c, m, rho } => {
            let market = LevyMarket::new(LevyModel::logistic(m, rho)?, c.s0, c.r)?;
            let (price, pricer) = levy_price(market, &c)?;
            let sol = pricer.esscher().expect("logistic markets carry an Esscher root");
            json!({
                "price": price,
                "h_q": sol.h_q,
                "diagnostics": { "residual": sol.residual, "h_domain": [sol.domain.0, sol.domain.1] },
            })
        }
        PriceCommand::LevyNeggumbel { contract: c, mu, varrho } => {
            let market = LevyMarket::new(LevyModel::neg_gumbel(mu, varrho)?, c.s0, c.r)?;
            let (price, pricer) = levy_price(market, &c)?;
            json!({
                "price": price,
                "mu_q": pricer.rn_location(),
                "diagnostics": { "physical_mu": mu, "varrho": varrho },
            })
        }
        PriceCommand::GreedfearBs { s0, k, t, t0, r, sigma, mu, g } => {
            let price = price_call_closed_form(s0, k, t0, t, r, sigma, mu, g)?;
            let spec = GreedFearDiffusionSpec::constant(mu, sigma, r, g)?;
            let coefficients = derived_coefficients(&spec, t0, s0, false)?;
            json!({
                "price": price,
                "reward_term": reward_term(r, sigma, mu, g, t - t0),
                "coefficients": coefficients,
            })
        }
        PriceCommand::GreedfearMc {
            s0,
            k,
            t,
            t0,
            mu,
            sigma,
            mu_tau,
            sigma_tau,
            r,
            g,
            put,
            paths,
            steps,
            seed,
            no_antithetic,
            include_gr_term,
        } => {
            let mu_tau = match (mu_tau, mu, g) {
                (Some(c), _, _) => c,
                (None, Coef::Constant(m), Coef::Constant(gv)) => Coef::Constant((1.0 + gv) * m),
                _ => return Err(Failure::Usage("--mu-tau is required when mu or g is not constant".into())),
            };
            let spec = GreedFearDiffusionSpec::new(
                mu.into(),
                sigma.into(),
                mu_tau.into(),
                sigma_tau.unwrap_or(sigma).into(),
                r.into(),
                g.into(),
            )?;
            let mc = MonteCarloSettings::new(paths, steps, seed, !no_antithetic)?;
            let payoff = move |x: f64| if put { (k - x).max(0.0) } else { (x - k).max(0.0) };
            let est = price_fk_monte_carlo_with(&spec, payoff, t0, s0, t, &mc, include_gr_term)?;
            let coefficients = derived_coefficients(&spec, t0, s0, include_gr_term)?;
            json!({
                "price": est.price,
                "std_error": est.std_error,
                "n_samples": est.n_samples,
                "coefficients": coefficients,
            })
        }
        PriceCommand::Binomial { s0, k, mu, r, sigma, t, a, n, put } => {
            let spec = GreedFearBinomialSpec::new(s0, mu, sigma, r, a, n, t)?;
            let payoff = |x: f64| if put { (k - x).max(0.0) } else { (x - k).max(0.0) };
            let report = price_binomial_report(&spec, payoff)?;
            json!({
                "price": report.price,
                "n": report.n,
                "dy_implied_by_A": report.dy_implied_by_a,
                "probability_bounds": [report.probability_bounds.0, report.probability_bounds.1],
            })
        }
    })
}

fn calibrate(args: CalibrateArgs) -> Result<Value, Failure> {
    let quotes = load_quotes::<f64>(&args.quotes)?;
    let settings = CalibrationSettings {
        tol: args.tol,
        max_iter: args.max_iter,
        multistart: args.multistart,
        ..CalibrationSettings::default()
    };
    Ok(match args.model {
        Model::BsDy => {
            let fit = calibrate_sigma_dy(&quotes, args.s0, args.r, &settings)?;
            serde_json::to_value(fit).expect("result serializes")
        }
        Model::LevyLogistic => {
            let (s0, r) = (args.s0, args.r);
            let pricer = |p: &[f64]| {
                let pricer = LevyPricer::new(LevyMarket::new(LevyModel::logistic(p[0], p[1])?, s0, r)?)?;
                Ok(move |k, t| pricer.call(k, t))
            };
            let fit = calibrate_generic(&quotes, s0, pricer, &[(-0.5, 0.5), (1e-3, 1.0)], &settings)?;
            json!({
                "m": fit.params[0],
                "rho": fit.params[1],
                "objective": fit.objective,
                "n_iterations": fit.n_iterations,
                "converged": fit.converged,
                "on_boundary": fit.on_boundary,
            })
        }
    })
}

/// Runs one command line (including the program name) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let format = cli.out.unwrap_or(Format::Json);
    match dispatch(cli) {
        Ok(Report::Table(csv)) => {
            let _ = write!(out, "{csv}");
            0
        }
        Ok(Report::Json(v)) => {
            let text = match format {
                Format::Json => format!("{v}\n"),
                Format::Csv => match output::record_csv(&v) {
                    Ok(t) => t,
                    Err(msg) => {
                        let _ = writeln!(err, "error: {msg}");
                        return 1;
                    }
                },
            };
            let _ = write!(out, "{text}");
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Engine(e)) => {
            let diag = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            let _ = writeln!(err, "{diag}");
            2
        }
    }
}
