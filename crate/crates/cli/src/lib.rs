//! Batch front end: instance configs in, JSON reports out.

pub mod config;
pub mod report;

use std::time::Instant;

use sgen2_core::generators::{build_generators, classify_case, Case, Instance};
use sgen2_core::sunits::AlphaOptions;
use sgen2_core::verify::verify;
use sgen2_core::Error;

pub use config::{InstanceConfig, NSetting};
pub use report::{Analysis, ExampleResult, Golden, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config invalid: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 1 for bad input, 2 when a hypothesis of the construction fails, 3 for failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(e) => match e {
                Error::NotMonic
                | Error::Reducible(_)
                | Error::DatasheetInvalid(_)
                | Error::DatasheetRequired(_)
                | Error::IndexDivisor(_)
                | Error::NotASubfield(_)
                | Error::InvalidInput(_)
                | Error::PrimeInS
                | Error::ResidueFieldTooLarge(..) => 1,
                Error::CardinalityTooSmall(_)
                | Error::HypothesisFails(_)
                | Error::SearchExhausted(_)
                | Error::NotStabilized(_)
                | Error::InconsistentCM(_)
                | Error::OrderBoundExceeded(_)
                | Error::UnitLog(_) => 2,
                Error::IdentityFailed(_)
                | Error::NotInLattice
                | Error::NotContained
                | Error::DivisionByZero
                | Error::ZeroElement => 3,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Analyze,
    Alpha,
    Generate,
    Verify,
    Examples,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Alpha => "alpha",
            Command::Generate => "generate",
            Command::Verify => "verify",
            Command::Examples => "examples",
        }
    }
}

/// A report plus whether every check in it passed (exit 3 otherwise).
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

struct Clock {
    start: Instant,
    marks: Vec<(String, f64)>,
}

impl Clock {
    fn new() -> Self {
        Self {
            start: Instant::now(),
            marks: Vec::new(),
        }
    }

    fn mark(&mut self, name: &str) {
        let t = self.start.elapsed().as_secs_f64();
        self.marks.push((name.to_string(), t));
        self.start = Instant::now();
    }
}

pub fn run(command: Command, config: Option<&InstanceConfig>, timings: bool) -> Result<Outcome, CliError> {
    if command == Command::Examples {
        return run_examples(timings);
    }
    let cfg = config.ok_or_else(|| CliError::Config(format!("{} needs --config", command.name())))?;
    let mut clock = Clock::new();
    let k = cfg.build_field()?;
    let s = cfg.resolve_s(&k)?;
    let inst = Instance::new(k, s)?;
    clock.mark("instance");
    let analysis = Analysis::new(&inst, &classify_case(&inst)?);
    clock.mark("analysis");
    let mut report = Report::new(command.name(), Some(cfg.clone()), analysis);
    let mut ok = true;
    if command != Command::Analyze {
        let triple = build_generators(&inst, cfg.h, &AlphaOptions::default())?;
        clock.mark("generators");
        report.certificate = Some(triple.certificate.clone());
        if command != Command::Alpha {
            report.triple = Some(triple.to_record());
        }
        if command == Command::Verify {
            let v = verify(&inst, &triple, &cfg.verify_options())?;
            clock.mark("verify");
            ok = v.overall;
            report.verification = Some(v);
        }
    }
    if timings {
        report.timings = Some(clock.marks.into_iter().map(|(stage, seconds)| report::Timing { stage, seconds }).collect());
    }
    Ok(Outcome { report, ok })
}

/// The two Gaussian examples: S above 2, and S above 5.
pub fn builtin_examples() -> Vec<(&'static str, InstanceConfig, Golden)> {
    let cfg = |p: i64| {
        InstanceConfig::from_json(&format!(r#"{{"field": {{"poly": [1, 0, 1]}}, "S": [{{"p": {p}}}]}}"#))
            .expect("built-in config")
    };
    vec![
        (
            "gaussian-2",
            cfg(2),
            Golden {
                card_s: 2,
                rank: 1,
                rational_rank: 1,
                case: Case::Case2,
            },
        ),
        (
            "gaussian-5",
            cfg(5),
            Golden {
                card_s: 3,
                rank: 2,
                rational_rank: 1,
                case: Case::Case1,
            },
        ),
    ]
}

fn run_examples(timings: bool) -> Result<Outcome, CliError> {
    let mut out = Vec::new();
    let mut clock = Clock::new();
    for (name, cfg, expected) in builtin_examples() {
        let k = cfg.build_field()?;
        let s = cfg.resolve_s(&k)?;
        let inst = Instance::new(k, s)?;
        let analysis = Analysis::new(&inst, &classify_case(&inst)?);
        let triple = build_generators(&inst, cfg.h, &AlphaOptions::default())?;
        clock.mark(name);
        let observed = Golden::observe(&analysis);
        out.push(ExampleResult {
            name: name.to_string(),
            pass: observed == expected,
            expected,
            observed,
            instance: cfg,
            analysis,
            triple: triple.to_record(),
        });
    }
    let ok = out.iter().all(|e| e.pass);
    let mut report = Report::empty("examples");
    report.examples = Some(out);
    if timings {
        report.timings = Some(clock.marks.into_iter().map(|(stage, seconds)| report::Timing { stage, seconds }).collect());
    }
    Ok(Outcome { report, ok })
}
