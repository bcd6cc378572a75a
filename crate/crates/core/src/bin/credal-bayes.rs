use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use credal_bayes::bayes::{self, PosteriorQuery, PosteriorReport};
use credal_bayes::campaign::{self, CampaignConfig, PriorFamily};
use credal_bayes::capacity::MAX_PAIR_CHECK;
use credal_bayes::model::{self, Model, ModelFile};
use credal_bayes::oracle::{self, LikelihoodSearch};
use credal_bayes::{Capacity, Error, EventMask, Exact, OutcomeSpace, Scalar};

/// Bayesian updating of upper probabilities with an ambiguous prior and an
/// ambiguous likelihood.
#[derive(Parser)]
#[command(name = "credal-bayes", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior upper and lower probabilities for the model's events.
    Update {
        /// Model file (JSON).
        model: PathBuf,
        /// Report every event instead of the listed ones.
        #[arg(long)]
        sweep: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Compare both bounds with the brute-force oracle.
    Verify {
        /// Model to verify; omit when using --random.
        model: Option<PathBuf>,
        /// Verify N random instances instead of a model.
        #[arg(long, value_name = "N", conflicts_with = "model")]
        random: Option<usize>,
        /// Campaign seed (default 0).
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Prior family: distortion, contamination or arbitrary.
        #[arg(long, value_name = "F", default_value = "distortion")]
        family: PriorFamily,
        #[command(flatten)]
        common: Common,
    },
    /// Fold the posterior capacity over a sequence of observations.
    Iterate {
        /// Model file (JSON); its likelihood is not used.
        model: PathBuf,
        /// Observation list (JSON), applied in order.
        observations: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Use exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Tolerance for equality and chain checks.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
}

/// A failure with the exit code it maps to and, for defects, a model dump.
struct Failure {
    error: Error,
    dump: Option<Value>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, dump: None }
    }
}

impl From<std::io::Error> for Failure {
    fn from(error: std::io::Error) -> Self {
        Error::from(error).into()
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self.error {
            Error::UndefinedRatio { .. } => 3,
            Error::ChainViolation(_) | Error::ConcavityLost(_) => 4,
            Error::PivotLimit(_) => 1,
            _ => 2,
        }
    }
}

type CliResult = Result<String, Failure>;

fn main() -> ExitCode {
    env_logger::init();
    if let Some(threads) = std::env::var("CREDAL_BAYES_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.error);
            if let Some(dump) = &failure.dump {
                eprintln!("offending model:");
                eprintln!("{}", serde_json::to_string_pretty(dump).unwrap_or_default());
            }
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: &Command) -> CliResult {
    match command {
        Command::Update { model, sweep, common } => {
            let file = load(model)?;
            if exact_mode(&file, common) {
                update::<Exact>(&file, *sweep, common)
            } else {
                update::<f64>(&file, *sweep, common)
            }
        }
        Command::Verify {
            model,
            random,
            seed,
            family,
            common,
        } => match (model, random) {
            (Some(path), None) => {
                let file = load(path)?;
                if exact_mode(&file, common) {
                    verify_model::<Exact>(&file, common)
                } else {
                    verify_model::<f64>(&file, common)
                }
            }
            (None, Some(n)) => {
                let mut config = CampaignConfig::new(*n, seed.unwrap_or(0), *family);
                if let Some(tol) = common.tol {
                    config.tol = tol;
                } else if common.exact {
                    config.tol = 0.0;
                }
                if common.exact {
                    verify_random::<Exact>(&config, common)
                } else {
                    verify_random::<f64>(&config, common)
                }
            }
            _ => Err(Error::model("$", "give either a model file or --random N").into()),
        },
        Command::Iterate {
            model,
            observations,
            common,
        } => {
            let file = load(model)?;
            let text = std::fs::read_to_string(observations)?;
            if exact_mode(&file, common) {
                iterate::<Exact>(&file, &text, common)
            } else {
                iterate::<f64>(&file, &text, common)
            }
        }
    }
}

fn load(path: &Path) -> Result<ModelFile, Failure> {
    Ok(ModelFile::from_json_str(&std::fs::read_to_string(path)?)?)
}

fn exact_mode(file: &ModelFile, common: &Common) -> bool {
    common.exact || file.options.exact
}

fn tolerance<S: Scalar>(file_tol: Option<f64>, common: &Common) -> S {
    common.tol.or(file_tol).map_or_else(S::optim_tol, S::from_f64)
}

fn update<S: Scalar>(file: &ModelFile, sweep: bool, common: &Common) -> CliResult {
    let model: Model<S> = file.build()?;
    let space = model.space().clone();
    let events = if sweep {
        if space.len() > MAX_PAIR_CHECK {
            return Err(Error::SpaceTooLarge {
                n: space.len(),
                max: MAX_PAIR_CHECK,
            }
            .into());
        }
        space.events().collect()
    } else {
        model.events.clone()
    };
    let tol = tolerance::<S>(model.options.tol, common);
    let base = PosteriorQuery::new(model.prior.clone(), model.likelihood.clone(), model.events.first().copied().unwrap_or(EventMask::EMPTY))?;
    let reports = events
        .par_iter()
        .map(|&a| bayes::report(&base.with_event(a)))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &reports {
        check_bounds(r, &tol, &space).map_err(|error| Failure {
            error,
            dump: Some(model.to_json()),
        })?;
    }
    let posterior = posterior_if_attained(&model)?;

    let mut out = String::new();
    if common.json {
        let doc = json!({
            "outcomes": space.labels(),
            "reports": reports.iter().map(|r| r.to_json(&space)).collect::<Vec<_>>(),
            "posterior": posterior.as_ref().map(model::capacity_to_json),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")).unwrap();
    } else {
        let rows = reports
            .iter()
            .map(|r| {
                vec![
                    space.describe(r.event),
                    r.lower_vertex.as_ref().map_or("undefined".into(), sig),
                    sig(&r.bound_vertex),
                    r.equality_diagnosis.name().into(),
                    sig(&r.c_value),
                    sig(&r.c_prime_value),
                ]
            })
            .collect::<Vec<_>>();
        out += &table(&["event", "lower", "upper", "diagnosis", "c", "c'"], &rows);
    }
    Ok(out)
}

/// Vertex bound below the Choquet bound, lower bounds in the mirrored order.
fn check_bounds<S: Scalar>(r: &PosteriorReport<S>, tol: &S, space: &OutcomeSpace) -> Result<(), Error> {
    let le = |a: &S, b: &S| *a <= b.clone() + tol.clone();
    let mut ok = le(&r.bound_vertex, &r.bound_choquet);
    if let (Some(lv), Some(lc)) = (&r.lower_vertex, &r.lower_choquet) {
        ok &= le(lc, lv) && le(lv, &r.bound_vertex);
    }
    if ok {
        Ok(())
    } else {
        Err(Error::ChainViolation(format!(
            "bounds out of order on event {}: vertex {}, Choquet {}",
            space.describe(r.event),
            r.bound_vertex,
            r.bound_choquet
        )))
    }
}

/// The posterior capacity, when the bounds are known to be attained.
fn posterior_if_attained<S: Scalar>(model: &Model<S>) -> Result<Option<Capacity<S>>, Failure> {
    if model.space().len() > MAX_PAIR_CHECK
        || !model.prior.is_two_alternating()?
        || !model.likelihood.envelopes_are_members()
        || !model.likelihood.contains_all_extremes()
    {
        return Ok(None);
    }
    let posterior = bayes::posterior_capacity(&model.prior, &model.likelihood)?;
    if let Some((a, b)) = posterior.two_alternating_violation()? {
        return Err(Failure {
            error: Error::ConcavityLost(format!("posterior violates 2-alternation at ({a}, {b})")),
            dump: Some(model.to_json()),
        });
    }
    Ok(Some(posterior))
}

fn verify_model<S: Scalar>(file: &ModelFile, common: &Common) -> CliResult {
    let model: Model<S> = file.build()?;
    let space = model.space().clone();
    let tol = tolerance::<S>(model.options.tol, common);
    let base = PosteriorQuery::new(
        model.prior.clone(),
        model.likelihood.clone(),
        model.events.first().copied().unwrap_or(EventMask::EMPTY),
    )?;
    let reports = model
        .events
        .par_iter()
        .map(|&a| oracle::verify_theorem_with_tol(&base.with_event(a), LikelihoodSearch::Exhaustive, &tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|error| {
            let dump = matches!(error, Error::ChainViolation(_)).then(|| model.to_json());
            Failure { error, dump }
        })?;
    let mut out = String::new();
    if common.json {
        for r in &reports {
            writeln!(out, "{}", r.to_json(&space)).unwrap();
        }
    } else {
        let rows = reports
            .iter()
            .map(|r| {
                vec![
                    space.describe(r.event),
                    r.oracle.as_ref().map_or("-".into(), sig),
                    sig(&r.bound_vertex),
                    sig(&r.bound_choquet),
                    r.equality_diagnosis.name().into(),
                ]
            })
            .collect::<Vec<_>>();
        out += &table(&["event", "oracle", "vertex", "choquet", "diagnosis"], &rows);
    }
    Ok(out)
}

fn verify_random<S: Scalar>(config: &CampaignConfig, common: &Common) -> CliResult {
    let result = campaign::run_campaign::<S>(config)?;
    let mut out = String::new();
    if common.json {
        for record in &result.records {
            writeln!(out, "{}", record.to_json()).unwrap();
        }
        writeln!(out, "{}", json!({"summary": result.summary.to_json()})).unwrap();
    } else {
        writeln!(out, "family               {}", config.family).unwrap();
        writeln!(out, "seed                 {}", config.seed).unwrap();
        writeln!(out, "{}", result.summary).unwrap();
    }
    if let Some(first) = result.violations().next() {
        print!("{out}");
        for v in result.violations() {
            eprintln!("instance {}: {}", v.index, v.message);
        }
        return Err(Failure {
            error: Error::ChainViolation(format!(
                "{} of {} instances violate the chain",
                result.summary.violations, result.summary.instances
            )),
            dump: Some(first.model.clone()),
        });
    }
    Ok(out)
}

fn iterate<S: Scalar>(file: &ModelFile, observations: &str, common: &Common) -> CliResult {
    let model: Model<S> = file.build()?;
    let space = model.space().clone();
    if let Some((a, b)) = model.prior.two_alternating_violation()? {
        return Err(Error::NotTwoAlternating(a, b).into());
    }
    let steps = model::parse_observations::<S>(&space, observations)?;
    let mut current = model.prior.clone();
    let mut trajectory = vec![current.clone()];
    for (t, l) in steps.iter().enumerate() {
        let next = bayes::posterior_capacity(&current, l)?;
        if let Some((a, b)) = next.two_alternating_violation()? {
            let replay = Model {
                prior: current.clone(),
                likelihood: l.clone(),
                events: model.events.clone(),
                options: model.options.clone(),
            };
            return Err(Failure {
                error: Error::ConcavityLost(format!("step {}: violated at ({a}, {b})", t + 1)),
                dump: Some(replay.to_json()),
            });
        }
        trajectory.push(next.clone());
        current = next;
    }

    let n = space.len();
    let bounds = |c: &Capacity<S>, a: EventMask| {
        (S::one() - c.value(a.complement(n)).clone(), c.value(a).clone())
    };
    let mut out = String::new();
    if common.json {
        let steps: Vec<Value> = trajectory
            .iter()
            .enumerate()
            .map(|(t, c)| {
                let events: Vec<Value> = model
                    .events
                    .iter()
                    .map(|&a| {
                        let (lower, upper) = bounds(c, a);
                        json!({"event": space.event_key(a), "lower": lower.to_json(), "upper": upper.to_json()})
                    })
                    .collect();
                json!({"step": t, "two_alternating": true, "events": events})
            })
            .collect();
        let doc = json!({
            "outcomes": space.labels(),
            "steps": steps,
            "posterior": model::capacity_to_json(&current),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")).unwrap();
    } else {
        let mut rows = Vec::new();
        for (t, c) in trajectory.iter().enumerate() {
            for &a in &model.events {
                let (lower, upper) = bounds(c, a);
                rows.push(vec![t.to_string(), space.describe(a), sig(&lower), sig(&upper)]);
            }
        }
        out += &table(&["step", "event", "lower", "upper"], &rows);
    }
    Ok(out)
}

/// Six significant digits.
fn sig<S: Scalar>(x: &S) -> String {
    let x = x.to_f64();
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').into()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}
