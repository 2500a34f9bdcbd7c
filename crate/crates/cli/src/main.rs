//! `spongestat`: exact connectivity analysis of self-affine sponges from
//! the command line.
//!
//! Every subcommand reads JSON spec files, runs the corresponding library
//! analysis, and emits a deterministic report: identical inputs produce
//! byte-identical output at any thread count. Exit codes: 0 success,
//! 1 usage or input error, 2 exhausted budget/depth/number range,
//! 3 certificate verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sponge_core::classify::{self, Caps};
use sponge_core::components;
use sponge_core::deciders::{self, Certificate};
use sponge_core::error::Error as CoreError;
use sponge_core::geometry;
use sponge_core::metrics;
use sponge_core::num::GridInt;
use sponge_core::report::{
    compare_results, gap_entries_doc, kind_str, profile_rows_doc, round_trip_doc, BoxDoc,
    ClassificationDoc, IslandLevelDoc, LevelSummaryDoc, Report, Results, RunConfigDoc, SpecDoc,
    VerdictDoc,
};
use sponge_core::{BigCoord, Coord, SpongeSpec};

#[derive(Parser)]
#[command(
    name = "spongestat",
    version,
    about = "Exact delta-component structure of self-affine sponges",
    long_about = "Analyzes self-affine Sierpinski sponges and fractal cubes given as \
                  digit-set spec files: connected-component censuses, certified \
                  delta-component brackets, gap sequences, island structure, and \
                  theorem-level classification with machine-checkable certificates."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Pretty-printed JSON report.
    Json,
    /// The same report as a single JSON line.
    Jsonl,
    /// The subcommand's main table as CSV (falls back to JSON for
    /// subcommands without a table).
    Csv,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Jsonl => "jsonl",
            Format::Csv => "csv",
        }
    }
}

#[derive(Args)]
struct Common {
    /// Worker threads (0 = one per CPU). Affects wall time only, never
    /// output bytes.
    #[arg(long, default_value_t = 0, global = false)]
    threads: usize,
    /// Compute with arbitrary-precision integers instead of 128-bit ones.
    #[arg(long)]
    big: bool,
    /// Work budget: maximum boxes enumerated / pairs tested per step.
    #[arg(long, default_value_t = sponge_core::DEFAULT_BUDGET)]
    budget: u64,
    /// Stdout format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory to write report.json plus CSV artifacts into.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    /// Maximal power law of the delta-component count.
    Mpl,
    /// Perfect disconnectedness.
    Pd,
}

#[derive(Subcommand)]
enum Command {
    /// Kind, box dimension, and level-by-level component censuses.
    Analyze {
        spec: PathBuf,
        /// Deepest census level.
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Island counts per level, with one witness island.
    Islands {
        spec: PathBuf,
        /// Deepest level searched.
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Decide total disconnectedness, with certificate.
    Td {
        spec: PathBuf,
        /// Deepest level tried by the neighbor-translate test.
        #[arg(long, default_value_t = 3)]
        cap: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Delta-component count brackets along delta = n_d^-k.
    Hprofile {
        spec: PathBuf,
        /// Largest k sampled.
        #[arg(long, default_value_t = 5)]
        kmax: u32,
        /// Fix the approximation stage at k + this, instead of the
        /// shallowest stage fine enough per row.
        #[arg(long)]
        extra_depth: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Certified gap sequence, with the inversion check.
    Gapseq {
        spec: PathBuf,
        /// Resolve gaps down to n_d^-(kmax+1).
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Classify one property with certificates for every conjunct.
    Classify {
        spec: PathBuf,
        #[arg(long, value_enum)]
        property: PropertyArg,
        /// Deepest island-search level.
        #[arg(long, default_value_t = 4)]
        island_cap: u32,
        /// Deepest neighbor-translate level.
        #[arg(long, default_value_t = 3)]
        xi_cap: u32,
        /// Profile depth for the advisory corroboration block.
        #[arg(long, default_value_t = 5)]
        kmax: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two specs through Lipschitz-invariant structure.
    Compare {
        spec_a: PathBuf,
        spec_b: PathBuf,
        #[arg(long, default_value_t = 4)]
        island_cap: u32,
        #[arg(long, default_value_t = 3)]
        xi_cap: u32,
        /// Gap-sequence depth for the ratio window.
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check every certificate embedded in a report file.
    VerifyCert {
        report: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Analyze { common, .. }
            | Command::Islands { common, .. }
            | Command::Td { common, .. }
            | Command::Hprofile { common, .. }
            | Command::Gapseq { common, .. }
            | Command::Classify { common, .. }
            | Command::Compare { common, .. }
            | Command::VerifyCert { common, .. } => common,
        }
    }
}

enum CliError {
    Core(CoreError),
    Io(PathBuf, std::io::Error),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) => 1,
            CliError::Core(e) => match e {
                CoreError::BudgetExceeded { .. }
                | CoreError::DepthTooShallow { .. }
                | CoreError::DeltaTooLarge { .. }
                | CoreError::ArithmeticOverflow
                | CoreError::AllAxesDegenerate
                | CoreError::ProfileTooShort { .. } => 2,
                CoreError::InvalidCertificate { .. } => 3,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(path, e) => format!("{}: {e}", path.display()),
            CliError::Core(CoreError::ArithmeticOverflow) => {
                format!("{}; retry with --big", CoreError::ArithmeticOverflow)
            }
            CliError::Core(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version exit cleanly; real usage errors exit 1.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = cli.command.common();
    if common.threads > 0 {
        // A second build in the same process is impossible here; ignore
        // the already-initialized error all the same.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global();
    }
    let outcome = if common.big {
        execute::<BigCoord>(&cli.command)
    } else {
        execute::<Coord>(&cli.command)
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_spec(path: &Path) -> Result<(SpongeSpec, SpecDoc), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let doc = SpecDoc::parse(&text)?;
    let spec = doc.to_spec()?;
    Ok((spec, doc))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn make_report(
    config: RunConfigDoc,
    spec: SpecDoc,
    second_spec: Option<SpecDoc>,
    results: Results,
) -> Report {
    Report {
        tool: "spongestat".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config,
        spec,
        second_spec,
        results,
    }
}

fn base_config(subcommand: &str, spec_paths: Vec<String>, common: &Common) -> RunConfigDoc {
    RunConfigDoc {
        subcommand: subcommand.into(),
        spec_paths,
        island_cap: 0,
        xi_cap: 0,
        kmax: 0,
        extra_depth: None,
        budget: common.budget,
        big: common.big,
        format: common.format.as_str().into(),
        out_dir: common.out.as_ref().map(|p| path_str(p)),
    }
}

fn emit(
    report: &Report,
    common: &Common,
    artifacts: &[(&'static str, String)],
) -> Result<(), CliError> {
    let stdout_text = match common.format {
        Format::Json => report.to_json_pretty(),
        Format::Jsonl => report.to_json_line(),
        Format::Csv => artifacts
            .first()
            .map(|(_, content)| content.clone())
            .unwrap_or_else(|| report.to_json_pretty()),
    };
    print!("{stdout_text}");
    if let Some(dir) = &common.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
        let report_path = dir.join("report.json");
        fs::write(&report_path, report.to_json_pretty())
            .map_err(|e| CliError::Io(report_path.clone(), e))?;
        for (name, content) in artifacts {
            let path = dir.join(name);
            fs::write(&path, content).map_err(|e| CliError::Io(path.clone(), e))?;
        }
    }
    Ok(())
}

fn execute<T: GridInt>(cmd: &Command) -> Result<(), CliError> {
    let common = cmd.common();
    match cmd {
        Command::Analyze { spec: path, depth, .. } => {
            let (spec, doc) = load_spec(path)?;
            let mut config = base_config("analyze", vec![path_str(path)], common);
            config.kmax = *depth;
            let dim = spec.box_dimension();
            let mut levels = Vec::new();
            let mut census = String::from(
                "level,total_boxes,component_count,island_count,max_component_size\n",
            );
            let mut comp_dump = String::from("component,box_count,boundary\n");
            for k in 1..=*depth {
                let summary = components::level_summary::<T>(&spec, k, common.budget)?;
                let row = LevelSummaryDoc::from(&summary);
                census.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.level,
                    row.total_boxes,
                    row.component_count,
                    row.island_count,
                    row.max_component_size
                ));
                levels.push(row);
                if k == *depth {
                    for (i, (size, boundary)) in summary
                        .component_sizes
                        .iter()
                        .zip(&summary.boundary_flags)
                        .enumerate()
                    {
                        comp_dump.push_str(&format!("{i},{size},{boundary}\n"));
                    }
                }
            }
            let results = Results::Analyze {
                kind: kind_str(spec.kind()).into(),
                box_dimension: dim.value,
                dimension_terms: dim.terms,
                projection_counts: dim.projection_counts,
                levels,
            };
            let report = make_report(config, doc, None, results);
            emit(
                &report,
                common,
                &[("census.csv", census), ("components.csv", comp_dump)],
            )
        }
        Command::Islands { spec: path, depth, .. } => {
            let (spec, doc) = load_spec(path)?;
            let mut config = base_config("islands", vec![path_str(path)], common);
            config.kmax = *depth;
            let mut rows = Vec::new();
            let mut witness_level = None;
            let mut witness: Option<Vec<BoxDoc>> = None;
            let mut witness_csv = None;
            let mut table = String::from("level,islands\n");
            for k in 1..=*depth {
                let (count, w) = components::islands::<T>(&spec, k, common.budget)?;
                rows.push(IslandLevelDoc { level: k, islands: count });
                table.push_str(&format!("{k},{count}\n"));
                if witness.is_none() {
                    if let Some(w) = w {
                        witness_level = Some(k);
                        witness_csv = Some(geometry::boxes_csv(&w));
                        witness = Some(w.iter().map(BoxDoc::from_box).collect());
                    }
                }
            }
            let results = Results::Islands { levels: rows, witness_level, witness };
            let report = make_report(config, doc, None, results);
            let mut artifacts = vec![("islands.csv", table)];
            if let Some(csv) = witness_csv {
                artifacts.push(("witness.csv", csv));
            }
            emit(&report, common, &artifacts)
        }
        Command::Td { spec: path, cap, .. } => {
            let (spec, doc) = load_spec(path)?;
            let mut config = base_config("td", vec![path_str(path)], common);
            config.xi_cap = *cap;
            let verdict = deciders::is_totally_disconnected::<T>(&spec, *cap, common.budget)?;
            let finite_type_bound = match &verdict.certificate {
                Certificate::XiLevel { level } => {
                    Some(deciders::finite_type_bound(&spec, *level)?)
                }
                _ => None,
            };
            let results = Results::Td {
                verdict: VerdictDoc::from_verdict(&verdict),
                finite_type_bound,
            };
            let report = make_report(config, doc, None, results);
            emit(&report, common, &[])
        }
        Command::Hprofile { spec: path, kmax, extra_depth, .. } => {
            let (spec, doc) = load_spec(path)?;
            let mut config = base_config("hprofile", vec![path_str(path)], common);
            config.kmax = *kmax;
            config.extra_depth = *extra_depth;
            let profile = metrics::h_profile::<T>(&spec, *kmax, *extra_depth, common.budget)?;
            let estimate = if profile.rows.len() >= 3 {
                metrics::estimate_exponent(&profile).ok()
            } else {
                None
            };
            let csv = metrics::profile_csv(&profile);
            let results = Results::Hprofile {
                rows: profile_rows_doc(&profile),
                slope: estimate.as_ref().map(|e| e.slope),
                low_confidence: estimate.as_ref().map(|e| e.low_confidence),
            };
            let report = make_report(config, doc, None, results);
            emit(&report, common, &[("profile.csv", csv)])
        }
        Command::Gapseq { spec: path, kmax, .. } => {
            let (spec, doc) = load_spec(path)?;
            let mut config = base_config("gapseq", vec![path_str(path)], common);
            config.kmax = *kmax;
            let gaps = metrics::gap_sequence::<T>(&spec, *kmax, common.budget)?;
            let round = metrics::gap_round_trip(&spec, &gaps, common.budget)?;
            let csv = gaps.csv();
            let results = Results::Gapseq {
                depth: gaps.depth,
                floor_sq: gaps.floor_sq.to_string(),
                entries: gap_entries_doc(&gaps),
                unresolved: gaps
                    .unresolved
                    .iter()
                    .map(|(lo, hi)| [lo.to_string(), hi.to_string()])
                    .collect(),
                round_trip: round_trip_doc(&round),
            };
            let report = make_report(config, doc, None, results);
            emit(&report, common, &[("gaps.csv", csv)])
        }
        Command::Classify { spec: path, property, island_cap, xi_cap, kmax, .. } => {
            let (spec, doc) = load_spec(path)?;
            let mut config = base_config("classify", vec![path_str(path)], common);
            config.island_cap = *island_cap;
            config.xi_cap = *xi_cap;
            config.kmax = *kmax;
            let caps = Caps {
                island_cap: *island_cap,
                xi_cap: *xi_cap,
                profile_kmax: *kmax,
                gap_kmax: *kmax,
                budget: common.budget,
                ..Caps::default()
            };
            let classification = match property {
                PropertyArg::Mpl => classify::classify_maximal_power_law::<T>(&spec, &caps)?,
                PropertyArg::Pd => {
                    classify::classify_perfectly_disconnected::<T>(&spec, &caps)?
                }
            };
            let results = Results::Classify {
                classification: ClassificationDoc::from_classification(&classification),
            };
            let report = make_report(config, doc, None, results);
            emit(&report, common, &[])
        }
        Command::Compare { spec_a, spec_b, island_cap, xi_cap, kmax, .. } => {
            let (left, doc_a) = load_spec(spec_a)?;
            let (right, doc_b) = load_spec(spec_b)?;
            let mut config = base_config(
                "compare",
                vec![path_str(spec_a), path_str(spec_b)],
                common,
            );
            config.island_cap = *island_cap;
            config.xi_cap = *xi_cap;
            config.kmax = *kmax;
            let caps = Caps {
                island_cap: *island_cap,
                xi_cap: *xi_cap,
                profile_kmax: *kmax,
                gap_kmax: *kmax,
                budget: common.budget,
                ..Caps::default()
            };
            let comparison = classify::compare::<T>(&left, &right, &caps)?;
            let report = make_report(config, doc_a, Some(doc_b), compare_results(&comparison));
            emit(&report, common, &[])
        }
        Command::VerifyCert { report: path, .. } => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
            let incoming = Report::parse(&text)?;
            let checked = sponge_core::report::reverify_report::<T>(&incoming, common.budget)?;
            let mut config = base_config("verify-cert", vec![path_str(path)], common);
            config.budget = common.budget;
            let results = Results::VerifyCert { checked, all_valid: true };
            let report = make_report(config, incoming.spec.clone(), None, results);
            emit(&report, common, &[])
        }
    }
}
