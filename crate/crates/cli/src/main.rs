//! `ggmsel`: select Gaussian graphical models from CSV data, adjust
//! p-values, and run error-rate simulations.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ggm_select::selection::{GraphClass, PriorKnowledge, Reduction, SelectionConfig};
use ggm_select::simulation::{estimate_error_rates, HarnessConfig, ModelSpec};
use ggm_select::stats::normal_two_sided_quantile;
use ggm_select::testing::{self, AdjustMethod, ErrorRate, ErrorRateSpec, MonteCarlo};
use ggm_select::{run_selection, Dataset, Graph, VertexOrder};
use nalgebra::DMatrix;

#[derive(Parser)]
#[command(name = "ggmsel", version, about = "Gaussian graphical model selection by multiple testing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a graph from a CSV data file.
    Select(SelectArgs),
    /// Adjust a CSV of (label, p) rows for multiplicity.
    Adjust(AdjustArgs),
    /// Estimate error rates of the procedures by simulation.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Undirected,
    Bidirected,
    Dag,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceArg {
    Minimal,
    Parents,
}

#[derive(Args)]
struct SelectArgs {
    /// CSV file with a header row of variable names.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "undirected")]
    graph: ClassArg,
    /// Comma-separated variable names giving the well-numbering (dag only).
    #[arg(long)]
    order: Option<String>,
    /// Defaults to sidak-step for dag and maxt-step otherwise.
    #[arg(long)]
    method: Option<AdjustMethod>,
    /// fwer, gfwer:K, tppfp:L or fdr.
    #[arg(long, default_value = "fwer")]
    error: ErrorRate,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Shrink conditioning sets using the prior edge lists.
    #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "minimal")]
    reduce: Option<ReduceArg>,
    /// Edge list of edges known to be present (1-based column numbers).
    #[arg(long)]
    prior_present: Option<PathBuf>,
    /// Edge list of edges known to be absent (1-based column numbers).
    #[arg(long)]
    prior_absent: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    mc_draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report destination; standard output when omitted.
    #[arg(long)]
    out_report: Option<PathBuf>,
    #[arg(long)]
    out_dot: Option<PathBuf>,
}

#[derive(Args)]
struct AdjustArgs {
    /// CSV of `label,p` rows, with or without a header.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    method: AdjustMethod,
    /// Null correlation matrix of the statistics (CSV, no header) for the
    /// max-T methods; identity when omitted.
    #[arg(long)]
    corr: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    mc_draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Seven variables, nine edges, partial correlations in [0.2, 0.55].
    #[arg(long, conflicts_with_all = ["p", "edges", "range", "graph"])]
    fig2: bool,
    #[arg(long, default_value_t = 7)]
    p: usize,
    #[arg(long, default_value_t = 9)]
    edges: usize,
    /// Partial correlation magnitude range as `lo,hi`.
    #[arg(long, default_value = "0.2,0.55")]
    range: String,
    /// Graph class of the true model; dag uses the identity ordering.
    #[arg(long, value_enum, default_value = "undirected")]
    graph: ClassArg,
    #[arg(long, default_value_t = 0)]
    model_seed: u64,
    #[arg(long, default_value = "25,50,100,200,300,500")]
    sizes: String,
    #[arg(long, default_value = "bonferroni,holm,sidak,sidak-step,maxt,maxt-step")]
    methods: String,
    #[arg(long, default_value = "fwer")]
    error: ErrorRate,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    #[arg(long, default_value_t = 10_000)]
    mc_draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes with their exit codes.
enum Failure {
    Validation(String),
    Numeric(String),
}

impl From<ggm_select::Error> for Failure {
    fn from(e: ggm_select::Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn invalid<T>(message: impl Into<String>) -> CliResult<T> {
    Err(Failure::Validation(message.into()))
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, content: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Failure::Validation(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(content)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn parse_order(list: &str, names: &[String]) -> CliResult<VertexOrder> {
    let mut vertices = Vec::new();
    for name in list.split(',').map(str::trim) {
        match names.iter().position(|n| n == name) {
            Some(v) if !vertices.contains(&v) => vertices.push(v),
            Some(_) => return invalid(format!("--order lists {name:?} twice")),
            None => return invalid(format!("--order names unknown variable {name:?}")),
        }
    }
    if vertices.len() != names.len() {
        return invalid(format!("--order lists {} of {} variables", vertices.len(), names.len()));
    }
    Ok(VertexOrder::new(vertices)?)
}

fn graph_class(arg: ClassArg, order: Option<&str>, names: &[String]) -> CliResult<GraphClass> {
    match (arg, order) {
        (ClassArg::Dag, Some(list)) => Ok(GraphClass::Dag(parse_order(list, names)?)),
        (ClassArg::Dag, None) => invalid("--graph dag requires --order"),
        (_, Some(_)) => invalid("--order only applies to --graph dag"),
        (ClassArg::Undirected, None) => Ok(GraphClass::Undirected),
        (ClassArg::Bidirected, None) => Ok(GraphClass::Bidirected),
    }
}

fn read_prior(path: Option<&Path>, class: &GraphClass) -> CliResult<Option<Graph>> {
    let Some(path) = path else { return Ok(None) };
    let text = read(path)?;
    Graph::parse_edge_list(&text, class.edge_kind())
        .map(Some)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn cmd_select(args: SelectArgs) -> CliResult<()> {
    let error = ErrorRateSpec::new(args.error, args.alpha)?;
    let data = Dataset::from_csv_path(&args.input)
        .map_err(|e| Failure::Validation(format!("{}: {e}", args.input.display())))?;
    let class = graph_class(args.graph, args.order.as_deref(), data.names())?;
    let absent = read_prior(args.prior_absent.as_deref(), &class)?;
    let present = read_prior(args.prior_present.as_deref(), &class)?;
    let prior = PriorKnowledge::from_graphs(&class, data.p(), absent.as_ref(), present.as_ref())?;
    let mut config = SelectionConfig::new(class, error);
    if let Some(m) = args.method {
        config.method = m;
    }
    config.prior = prior;
    config.monte_carlo = MonteCarlo { draws: args.mc_draws, seed: args.seed };
    config.reduction = args.reduce.map(|r| match r {
        ReduceArg::Minimal => Reduction::Minimal,
        ReduceArg::Parents => Reduction::Parents,
    });
    let result = run_selection(&data, &config)?;
    if let Some(dot) = &args.out_dot {
        emit(Some(dot), result.to_dot().as_bytes())?;
    }
    emit(args.out_report.as_deref(), result.to_json()?.as_bytes())
}

fn read_pvalues(path: &Path) -> CliResult<(Vec<String>, Vec<f64>)> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut labels, mut values) = (Vec::new(), Vec::new());
    for (k, record) in rdr.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| Failure::Validation(format!("row {row}: {e}")))?;
        if record.len() != 2 {
            return invalid(format!("row {row}: expected 2 fields (label,p), found {}", record.len()));
        }
        match record[1].parse::<f64>() {
            Ok(p) => {
                labels.push(record[0].to_string());
                values.push(p);
            }
            // a non-numeric first row is a header
            Err(_) if row == 1 => continue,
            Err(_) => return invalid(format!("row {row}, column 2: not a number: {:?}", &record[1])),
        }
    }
    if values.is_empty() {
        return invalid(format!("{}: no p-values", path.display()));
    }
    Ok((labels, values))
}

fn read_matrix(path: &Path, m: usize) -> CliResult<DMatrix<f64>> {
    let text = read(path)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut rows = 0;
    for (k, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Failure::Validation(format!("{}: row {}: {e}", path.display(), k + 1)))?;
        if record.len() != m {
            return invalid(format!("{}: row {} has {} entries, expected {m}", path.display(), k + 1, record.len()));
        }
        for (c, field) in record.iter().enumerate() {
            let x = field.parse::<f64>().map_err(|_| {
                Failure::Validation(format!("{}: row {}, column {}: not a number", path.display(), k + 1, c + 1))
            })?;
            values.push(x);
        }
        rows += 1;
    }
    if rows != m {
        return invalid(format!("{}: {rows} rows, expected {m}", path.display()));
    }
    Ok(DMatrix::from_row_slice(m, m, &values))
}

fn cmd_adjust(args: AdjustArgs) -> CliResult<()> {
    let (labels, p) = read_pvalues(&args.input)?;
    let adjusted = if args.method.is_joint() {
        let corr = match &args.corr {
            Some(path) => read_matrix(path, p.len())?,
            None => DMatrix::identity(p.len(), p.len()),
        };
        let stats = p
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                normal_two_sided_quantile(value).map_err(|_| ggm_select::Error::InvalidPValue { index, value })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mc = MonteCarlo { draws: args.mc_draws, seed: args.seed };
        let (single, step) = testing::maxt_both(&stats, &corr, mc)?;
        if args.method == AdjustMethod::MaxT { single } else { step }
    } else {
        match args.method {
            AdjustMethod::Bonferroni => testing::bonferroni(&p)?,
            AdjustMethod::Holm => testing::holm(&p)?,
            AdjustMethod::Sidak => testing::sidak(&p)?,
            _ => testing::sidak_step(&p)?,
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::Validation(e.to_string());
    w.write_record(["label", "p", "adjusted"]).map_err(csv_err)?;
    for ((label, raw), adj) in labels.iter().zip(&p).zip(&adjusted.values) {
        w.write_record([label.clone(), raw.to_string(), adj.to_string()]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Validation(e.to_string()))?;
    emit(args.out.as_deref(), &bytes)
}

fn parse_list<T: std::str::FromStr>(flag: &str, list: &str) -> CliResult<Vec<T>> {
    list.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Failure::Validation(format!("--{flag}: cannot parse {s:?}"))))
        .collect()
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let error = ErrorRateSpec::new(args.error, args.alpha)?;
    if args.reps == 0 {
        return invalid("--reps must be at least 1");
    }
    let model = if args.fig2 {
        ModelSpec { seed: args.model_seed, ..ModelSpec::seven_by_nine() }
    } else {
        let range: Vec<f64> = parse_list("range", &args.range)?;
        let [lo, hi] = range[..] else { return invalid("--range expects lo,hi") };
        let class = match args.graph {
            ClassArg::Undirected => GraphClass::Undirected,
            ClassArg::Bidirected => GraphClass::Bidirected,
            ClassArg::Dag => GraphClass::Dag(VertexOrder::identity(args.p)),
        };
        ModelSpec { p: args.p, class, edges: args.edges, lo, hi, seed: args.model_seed }
    };
    let cfg = HarnessConfig {
        model,
        sample_sizes: parse_list("sizes", &args.sizes)?,
        replicates: args.reps,
        methods: parse_list("methods", &args.methods)?,
        error,
        mc_draws: args.mc_draws,
        seed: args.seed,
    };
    let table = estimate_error_rates(&cfg)?;
    let mut bytes = Vec::new();
    table.write_csv(&mut bytes)?;
    emit(args.out.as_deref(), &bytes)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.kind().to_string();
            let detail = e.render().to_string();
            let first = detail.lines().find(|l| !l.trim().is_empty()).unwrap_or(&text);
            eprintln!("error[usage]: {}", one_line(first.trim_start_matches("error:")));
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Select(args) => cmd_select(args),
        Command::Adjust(args) => cmd_adjust(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error[validation]: {}", one_line(&msg));
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error[numeric]: {}", one_line(&msg));
            ExitCode::from(3)
        }
    }
}
