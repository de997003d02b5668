use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use twopoint::alpha::independence_number;
use twopoint::catalog::{catalog, ENTRIES};
use twopoint::certify::{certify, emit_report, CertifyOptions, ReportFormat};
use twopoint::events::build_two_point_graph;
use twopoint::experiment::{run_experiment, NoiseModel};
use twopoint::io::{
    emit_graph, event_graph_value, matrix_rows, ortho_rep_value, parse_graph, parse_ortho_rep_json, read_graph,
    to_json_string, GraphFormat,
};
use twopoint::orthorep::{extract_ortho_rep, verify_ortho_rep};
use twopoint::quantum::Scheme;
use twopoint::theta::{self, SdpStatus, DEFAULT_TOLERANCE};
use twopoint::{Error, Graph, Result};

/// Classical and quantum bounds of exclusivity-graph inequalities, their
/// two-point compilation, and simulated experiments.
#[derive(Parser)]
#[command(name = "twopoint", version)]
struct Cli {
    /// More log output on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact independence number α(G).
    Alpha(GraphArgs),
    /// Lovász number ϑ(G).
    Theta(ThetaArgs),
    /// Compile G into the two-point event graph G'.
    Transform(GraphArgs),
    /// Extract and verify an optimal orthogonal representation.
    Orthorep(ThetaArgs),
    /// Simulate the two-point experiment.
    Simulate(SimulateArgs),
    /// Run the whole pipeline and check the identities.
    Certify(CertifyArgs),
    /// List the named graphs, or print one.
    Catalog(CatalogArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Json,
    Dimacs,
}

impl From<InputFormat> for GraphFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Json => GraphFormat::Json,
            InputFormat::Dimacs => GraphFormat::Dimacs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Projective,
    Demolition,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Projective => Scheme::Projective,
            SchemeArg::Demolition => Scheme::DemolitionReprepare,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file (JSON or DIMACS), inline graph text, or a catalog name.
    graph: String,
    /// Input format; guessed from the extension or content when absent.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ThetaArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Include the optimal matrix X in JSON output.
    #[arg(long)]
    dump_x: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Depolarizing probability applied to the prepared state.
    #[arg(long, default_value_t = 0.0)]
    noise_depol: f64,
    /// Misalignment angle of each measurement vector, in radians.
    #[arg(long, default_value_t = 0.0)]
    noise_angle: f64,
    /// Probability of flipping each recorded outcome.
    #[arg(long, default_value_t = 0.0)]
    noise_flip: f64,
    #[arg(long, value_enum, default_value = "projective")]
    scheme: SchemeArg,
}

impl RunArgs {
    fn noise(&self) -> NoiseModel {
        NoiseModel {
            depolarizing_p: self.noise_depol,
            vector_misalignment_angle: self.noise_angle,
            outcome_flip_p: self.noise_flip,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Representation JSON; extracted from the ϑ optimum when absent.
    #[arg(long)]
    rep: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    skip_montecarlo: bool,
    /// Include the optimal ϑ matrices in JSON output.
    #[arg(long)]
    dump_x: bool,
}

#[derive(Args)]
struct CatalogArgs {
    name: Option<String>,
    /// Graph format for a named entry.
    #[arg(long, value_enum, default_value = "json")]
    graph_format: InputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Command outcome: text to print and whether every check passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }
}

fn load_graph(args: &GraphArgs) -> Result<Graph> {
    let format = args.input_format.map(GraphFormat::from);
    let path = Path::new(&args.graph);
    if path.is_file() {
        return read_graph(path, format);
    }
    let text = args.graph.trim_start();
    if text.starts_with('{') || text.starts_with("p ") || text.starts_with("c ") {
        let format = format.unwrap_or_else(|| GraphFormat::detect(None, text));
        return parse_graph(text, format);
    }
    catalog(&args.graph)
}

fn render(format: OutputFormat, value: &serde_json::Value, text: impl FnOnce() -> String) -> Result<String> {
    match format {
        OutputFormat::Json => to_json_string(value),
        OutputFormat::Text => Ok(text()),
    }
}

fn cmd_alpha(args: &GraphArgs) -> Result<Outcome> {
    let g = load_graph(args)?;
    let h = g.expand_weighted().graph;
    let r = independence_number(&h)?;
    let value = json!({
        "schema": 1,
        "n": h.n(),
        "edges": h.edge_count(),
        "alpha": r.alpha,
        "witness": r.witness,
        "node_count": r.node_count,
    });
    let text = || format!("alpha = {}\nwitness = {:?}\n", r.alpha, r.witness);
    Ok(Outcome::ok(render(args.out.format, &value, text)?))
}

fn cmd_theta(args: &ThetaArgs) -> Result<Outcome> {
    let g = load_graph(&args.graph)?.expand_weighted().graph;
    let sol = theta::theta(&g, args.tolerance)?;
    let feasibility = theta::verify_feasibility(&g, &sol.x, args.tolerance)?;
    let mut value = json!({
        "schema": 1,
        "n": g.n(),
        "edges": g.edge_count(),
        "theta": sol.primal_value,
        "dual_bound": sol.dual_value,
        "gap": sol.gap(),
        "status": sol.status,
        "iterations": sol.iterations,
        "formulation": sol.formulation,
        "tolerance": sol.tolerance,
        "feasibility": feasibility,
    });
    if args.dump_x {
        value["x"] = json!(matrix_rows(&sol.x));
    }
    let text = || {
        let r = sol.residuals;
        format!(
            "theta = {:.12}\ndual bound = {:.12}\nstatus = {:?} ({} iterations)\nresiduals: min eigenvalue {:.1e}, trace {:.1e}, edges {:.1e}\n",
            sol.primal_value, sol.dual_value, sol.status, sol.iterations, r.min_eigenvalue, r.trace_error, r.max_edge_entry
        )
    };
    Ok(Outcome {
        text: render(args.graph.out.format, &value, text)?,
        passed: sol.status == SdpStatus::Converged && feasibility.passed(),
    })
}

fn cmd_transform(args: &GraphArgs) -> Result<Outcome> {
    let g = load_graph(args)?;
    let eg = build_two_point_graph(&g)?;
    let mut value = event_graph_value(&eg);
    value["schema"] = json!(1);
    let text = || {
        let mut out = format!(
            "G: n = {}, |E| = {}\nG': n = {}, |E| = {}\n",
            g.n(),
            g.edge_count(),
            eg.graph().n(),
            eg.graph().edge_count()
        );
        for (v, label) in eg.labels().iter().enumerate() {
            let _ = writeln!(out, "{v}: {label}");
        }
        out
    };
    Ok(Outcome::ok(render(args.out.format, &value, text)?))
}

fn cmd_orthorep(args: &ThetaArgs) -> Result<Outcome> {
    let g = load_graph(&args.graph)?.expand_weighted().graph;
    let sol = theta::theta(&g, args.tolerance)?;
    let rep = extract_ortho_rep(&g, &sol, args.tolerance)?;
    let report = verify_ortho_rep(&g, &rep, sol.primal_value, 100.0 * args.tolerance)?;
    let mut value = ortho_rep_value(&rep);
    value["theta"] = json!(sol.primal_value);
    value["verification"] = json!(report);
    let text = || {
        let mut out = format!("d = {}\ntheta = {:.12}\n", rep.dimension(), sol.primal_value);
        let _ = writeln!(
            out,
            "max edge overlap {:.1e}, max norm error {:.1e}, overlap sum {:.12}",
            report.max_edge_overlap, report.max_norm_error, report.overlap_sum
        );
        for (i, v) in rep.vectors().iter().enumerate() {
            let coords: Vec<String> = v.iter().map(|z| format!("{:.6}", z.re)).collect();
            let _ = writeln!(out, "v{i} = ({})", coords.join(", "));
        }
        out
    };
    Ok(Outcome {
        text: render(args.graph.out.format, &value, text)?,
        passed: report.passed(),
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let g = load_graph(&args.graph)?.expand_weighted().graph;
    let rep = match &args.rep {
        Some(path) => parse_ortho_rep_json(&std::fs::read_to_string(path)?)?,
        None => {
            let sol = theta::theta(&g, args.tolerance)?;
            extract_ortho_rep(&g, &sol, args.tolerance)?
        }
    };
    let rec = run_experiment(&rep, &g, args.run.shots, args.run.seed, args.run.noise(), args.run.scheme.into())?;
    let mut value = serde_json::to_value(&rec)?;
    value["schema"] = json!(1);
    let text = || {
        let mut out = format!(
            "S = {:.6} +/- {:.6} ({} shots per context, seed {})\n",
            rec.s_estimate, rec.s_std_error, rec.shots, rec.seed
        );
        for (name, t) in [("epsilon", &rec.epsilon), ("epsilon'", &rec.epsilon_prime)] {
            if let (Some(max), Some(z)) = (t.max, t.max_z) {
                let _ = writeln!(out, "{name}: max {max:.3e} ({z:.2} standard errors)");
            }
        }
        out
    };
    Ok(Outcome::ok(render(args.graph.out.format, &value, text)?))
}

fn cmd_certify(args: &CertifyArgs) -> Result<Outcome> {
    let g = load_graph(&args.graph)?;
    let opts = CertifyOptions {
        tolerance: args.tolerance,
        shots: args.run.shots,
        seed: args.run.seed,
        noise: args.run.noise(),
        scheme: args.run.scheme.into(),
        skip_montecarlo: args.skip_montecarlo,
        dump_x: args.dump_x,
    };
    let report = certify(&g, &opts);
    let format = match args.graph.out.format {
        OutputFormat::Json => ReportFormat::Json,
        OutputFormat::Text => ReportFormat::Text,
    };
    let text = emit_report(&report, format)?;
    if let Some(err) = report.error() {
        // partial report still goes out before the error is reported
        write_output(args.graph.out.output.as_deref(), &text)?;
        return Err(err);
    }
    Ok(Outcome {
        text,
        passed: report.passed(),
    })
}

fn cmd_catalog(args: &CatalogArgs) -> Result<Outcome> {
    match &args.name {
        None => Ok(Outcome::ok(ENTRIES.iter().map(|e| format!("{e}\n")).collect())),
        Some(name) => {
            let g = catalog(name)?;
            Ok(Outcome::ok(emit_graph(&g, args.graph_format.into())?))
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn output_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Alpha(a) | Command::Transform(a) => a.out.output.as_deref(),
        Command::Theta(a) | Command::Orthorep(a) => a.graph.out.output.as_deref(),
        Command::Simulate(a) => a.graph.out.output.as_deref(),
        Command::Certify(a) => a.graph.out.output.as_deref(),
        Command::Catalog(a) => a.output.as_deref(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let result = match &cli.command {
        Command::Alpha(a) => cmd_alpha(a),
        Command::Theta(a) => cmd_theta(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Orthorep(a) => cmd_orthorep(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Catalog(a) => cmd_catalog(a),
    }
    .and_then(|outcome| {
        write_output(output_path(&cli.command), &outcome.text)?;
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
