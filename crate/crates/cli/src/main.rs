use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bfredholm::scenario::{Model, Operation, Scenario, Tolerances, SCHEMA};
use bfredholm::semisimple::{b_fredholm_spectrum, b_weyl_decompose, classify, fredholm_spectrum};
use bfredholm::suite::{run_suite, Suite, SuiteConfig};
use bfredholm::toeplitz::{bf_spectrum_curve, classify_operator, winding_index, Space, DEFAULT_CURVE_SAMPLES};
use bfredholm::{drazin_inverse, Error, C64};
use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "bf", version, about = "Fredholm and B-Fredholm classification of block-matrix and Toeplitz elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the scenario element (Fredholm, B-Fredholm, index).
    Classify(ScenarioArgs),
    /// Emit the Fredholm and B-Fredholm spectra as point sets.
    Spectrum {
        #[command(flatten)]
        common: ScenarioArgs,
        /// Number of circle samples for Toeplitz symbols.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Run a seeded verification suite.
    Verify {
        #[arg(long, value_parser = PossibleValuesParser::new(Suite::ALL.map(Suite::name)).map(|s| s.parse::<Suite>().expect("listed suite")))]
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Relative rank tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Curve samples (mapping) or grid points (example).
        #[arg(long)]
        grid: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Split a block element as `b + c` with `b` Drazin invertible and `c` in the ideal.
    Decompose(ScenarioArgs),
    /// Drazin inverse of every block of a block element.
    Drazin(ScenarioArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file (JSON, schema "bf/1").
    scenario: PathBuf,
    /// Relative rank tolerance; overrides the scenario value.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) => 3,
            CliError::Write { .. } => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    schema: &'static str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
}

impl<'a> Header<'a> {
    fn new(command: &'a str) -> Self {
        Header {
            tool: "bf",
            version: env!("CARGO_PKG_VERSION"),
            schema: SCHEMA,
            command,
            tolerances: None,
            seed: None,
            samples: None,
            grid: None,
        }
    }
}

fn load(args: &ScenarioArgs, op: Operation) -> CliResult<Scenario> {
    let mut scenario = Scenario::from_path(&args.scenario)?;
    info!("loaded {:?} scenario from {}", scenario.model.kind(), args.scenario.display());
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidInput(format!("--tol must lie in (0, 1), got {tol}")).into());
        }
        scenario.tolerances.rank = tol;
    }
    if !scenario.requests(op) {
        warn!("scenario does not list {op:?} among its requested operations");
    }
    Ok(scenario)
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Write {
            path: "stdout".into(),
            source,
        }),
    }
}

fn emit_json(output: Option<&Path>, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    emit(output, &text)
}

fn cmd_classify(args: &ScenarioArgs) -> CliResult<()> {
    let scenario = load(args, Operation::Classify)?;
    let tol = scenario.tolerances;
    let mut header = Header::new("classify");
    header.tolerances = Some(tol);
    let body = match &scenario.model {
        Model::Block { element, ideal } => {
            let report = classify(element, ideal, tol.rank)?;
            json!({ "header": header, "kind": "block", "report": report })
        }
        Model::Toeplitz(t) => {
            let report = classify_operator(t, tol.circle)?;
            let winding = match (report.fredholm, t.space()) {
                (true, Space::Unilateral) if !report.finite_rank_only => Some(winding_index(t.symbol(), tol.circle)?),
                _ => None,
            };
            json!({ "header": header, "kind": "toeplitz", "report": report, "winding": winding })
        }
    };
    emit_json(args.output.as_deref(), &body)
}

fn points(values: &[C64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn cmd_spectrum(args: &ScenarioArgs, grid: Option<usize>, out: Format) -> CliResult<()> {
    let scenario = load(args, Operation::Spectrum)?;
    let tol = scenario.tolerances;
    let mut header = Header::new("spectrum");
    header.tolerances = Some(tol);
    let (sigma_f, sigma_bf) = match &scenario.model {
        Model::Block { element, ideal } => (fredholm_spectrum(element, ideal, tol.rank)?, b_fredholm_spectrum(element, ideal)?),
        Model::Toeplitz(t) => {
            let samples = grid.unwrap_or(DEFAULT_CURVE_SAMPLES);
            header.grid = Some(samples);
            let curve = bf_spectrum_curve(t, samples)?;
            (curve.sigma_f, curve.sigma_bf)
        }
    };
    info!("{} Fredholm and {} B-Fredholm spectrum points", sigma_f.len(), sigma_bf.len());
    match out {
        Format::Json => {
            let body = json!({
                "header": header,
                "sigma_f": points(&sigma_f),
                "sigma_bf": points(&sigma_bf),
            });
            emit_json(args.output.as_deref(), &body)
        }
        Format::Csv => {
            let header_line = serde_json::to_string(&header).map_err(Error::from)?;
            let mut text = format!("# {header_line}\nre,im,tag\n");
            for (tag, set) in [("sigma_F", &sigma_f), ("sigma_BF", &sigma_bf)] {
                for z in set {
                    text.push_str(&format!("{},{},{tag}\n", z.re, z.im));
                }
            }
            emit(args.output.as_deref(), &text)
        }
    }
}

fn cmd_decompose(args: &ScenarioArgs) -> CliResult<()> {
    let scenario = load(args, Operation::Decompose)?;
    let Model::Block { element, ideal } = &scenario.model else {
        return Err(Error::InvalidInput("decompose needs a block scenario".into()).into());
    };
    let mut header = Header::new("decompose");
    header.tolerances = Some(scenario.tolerances);
    let d = b_weyl_decompose(element, ideal, scenario.tolerances.rank)?;
    emit_json(args.output.as_deref(), &json!({ "header": header, "decomposition": d }))
}

fn cmd_drazin(args: &ScenarioArgs) -> CliResult<()> {
    let scenario = load(args, Operation::Drazin)?;
    let Model::Block { element, .. } = &scenario.model else {
        return Err(Error::InvalidInput("drazin needs a block scenario".into()).into());
    };
    let mut header = Header::new("drazin");
    header.tolerances = Some(scenario.tolerances);
    let blocks = element
        .blocks()
        .iter()
        .map(|m| drazin_inverse(m, scenario.tolerances.rank))
        .collect::<Result<Vec<_>, _>>()?;
    emit_json(args.output.as_deref(), &json!({ "header": header, "blocks": blocks }))
}

fn cmd_verify(cfg: SuiteConfig, suite: Suite, output: Option<&Path>) -> CliResult<bool> {
    if !(cfg.tol.is_finite() && cfg.tol > 0.0 && cfg.tol < 1.0) {
        return Err(Error::InvalidInput(format!("--tol must lie in (0, 1), got {}", cfg.tol)).into());
    }
    let report = run_suite(suite, &cfg)?;
    for c in &report.checks {
        let verdict = match (c.passed, c.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "MISS",
        };
        eprintln!("{verdict} {suite}/{}: {}", c.name, c.detail);
    }
    let mut header = Header::new("verify");
    header.seed = Some(cfg.seed);
    header.samples = Some(cfg.samples);
    header.grid = cfg.grid;
    header.tolerances = Some(Tolerances {
        rank: cfg.tol,
        ..Tolerances::default()
    });
    emit_json(output, &json!({ "header": header, "report": report }))?;
    Ok(report.passed)
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Classify(args) => cmd_classify(&args).map(|_| true),
        Command::Spectrum { common, grid, out } => cmd_spectrum(&common, grid, out).map(|_| true),
        Command::Decompose(args) => cmd_decompose(&args).map(|_| true),
        Command::Drazin(args) => cmd_drazin(&args).map(|_| true),
        Command::Verify {
            suite,
            seed,
            samples,
            tol,
            grid,
            output,
        } => {
            let cfg = SuiteConfig {
                seed,
                samples,
                tol: tol.unwrap_or(SuiteConfig::default().tol),
                grid,
            };
            cmd_verify(cfg, suite, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BF_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
