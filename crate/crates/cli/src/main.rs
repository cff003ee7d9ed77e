use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use acumen_core::check::check_model;
use acumen_core::corpus::{parse_args, read_header};
use acumen_core::engine::trace::{CsvTraceWriter, JsonlTraceWriter, VarFilter};
use acumen_core::engine::{Model, Observer, SimConfig, Simulation};
use acumen_core::scene::SceneWriter;
use acumen_core::syntax::{parse, pretty_print, ClassDef};
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 1;
const EXIT_DIAGNOSTICS: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "acumen-lite", version, about = "Check and simulate hybrid models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model and run static checks.
    Check { path: PathBuf },
    /// Simulate a model and write traces and scenes.
    Run(RunArgs),
    /// Print a model in canonical layout.
    Fmt { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Csv,
    Jsonl,
}

#[derive(clap::Args)]
struct RunArgs {
    path: PathBuf,
    /// Class to instantiate as the root [default: last class in the file]
    #[arg(long)]
    root: Option<String>,
    /// Root arguments as comma-separated constant expressions, e.g. "5,[0,0,0]"
    /// [default: the file's `// args:` header line when --root is not given]
    #[arg(long, allow_hyphen_values = true)]
    args: Option<String>,
    /// Integration step in seconds [default: 1/64]
    #[arg(long, allow_hyphen_values = true)]
    time_step: Option<f64>,
    /// Simulated end time in seconds [default: 10]
    #[arg(long, allow_hyphen_values = true)]
    end_time: Option<f64>,
    /// Simulated start time in seconds [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    start_time: Option<f64>,
    /// Discrete iterations allowed per instant [default: 1000]
    #[arg(long)]
    max_discrete_iters: Option<usize>,
    /// Trace output file, or `-` for standard output
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Trace format [default: jsonl for .jsonl files, csv otherwise]
    #[arg(long, value_enum)]
    trace_format: Option<TraceFormat>,
    /// Scene output file (JSON Lines)
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Comma-separated trace path patterns; `*` and `?` are wildcards
    #[arg(long)]
    vars: Option<String>,
}

/// A failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check { path } => cmd_check(&path),
        Command::Run(args) => cmd_run(args),
        Command::Fmt { path } => cmd_fmt(&path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("error: cannot read {}: {e}", path.display())))
}

fn load(path: &Path, source: &str) -> Result<Vec<ClassDef>, Failure> {
    parse(source).map_err(|e| Failure::new(EXIT_DIAGNOSTICS, format!("{}:{e}", path.display())))
}

fn load_checked(path: &Path, source: &str) -> Result<Vec<ClassDef>, Failure> {
    let classes = load(path, source)?;
    let diags = check_model(&classes);
    if diags.is_empty() {
        return Ok(classes);
    }
    let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
    Err(Failure::new(EXIT_DIAGNOSTICS, lines.join("\n")))
}

fn cmd_check(path: &Path) -> Result<(), Failure> {
    let classes = load_checked(path, &read(path)?)?;
    println!("{}: ok ({} classes)", path.display(), classes.len());
    Ok(())
}

fn cmd_fmt(path: &Path) -> Result<(), Failure> {
    let classes = load(path, &read(path)?)?;
    print!("{}", pretty_print(&classes));
    Ok(())
}

fn create(path: &Path) -> Result<Box<dyn Write>, Failure> {
    if path == Path::new("-") {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let file = File::create(path)
        .map_err(|e| Failure::new(EXIT_RUNTIME, format!("error: cannot create {}: {e}", path.display())))?;
    Ok(Box::new(BufWriter::new(file)))
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    if args.trace.is_none() && args.scene.is_none() {
        return Err(Failure::new(EXIT_USAGE, "error: run needs at least one of --trace and --scene"));
    }
    let defaults = SimConfig::default();
    let config = SimConfig {
        start_time: args.start_time.unwrap_or(defaults.start_time),
        end_time: args.end_time.unwrap_or(defaults.end_time),
        time_step: args.time_step.unwrap_or(defaults.time_step),
        max_discrete_iterations: args.max_discrete_iters.unwrap_or(defaults.max_discrete_iterations),
    };
    config.validate().map_err(|e| Failure::new(EXIT_USAGE, format!("error: {e}")))?;
    let source = read(&args.path)?;
    // the file's `// args:` header line holds the arguments of its default root
    let header_args = if args.root.is_none() { read_header(&source).args } else { None };
    let root_args = match args.args.or(header_args) {
        Some(text) => parse_args(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("error: --args: {e}")))?,
        None => Vec::new(),
    };

    let classes = load_checked(&args.path, &source)?;
    let model = Model::new(classes).map_err(|e| Failure::new(EXIT_DIAGNOSTICS, e.to_string()))?;
    let root = match args.root.as_deref().or(model.default_root()) {
        Some(r) => r.to_string(),
        None => return Err(Failure::new(EXIT_DIAGNOSTICS, format!("{}: no classes", args.path.display()))),
    };
    if model.class(&root).is_err() {
        return Err(Failure::new(EXIT_USAGE, format!("error: no class `{root}` in {}", args.path.display())));
    }

    let filter = args.vars.as_deref().map(VarFilter::parse).unwrap_or_default();
    let mut observers: Vec<Box<dyn Observer>> = Vec::new();
    if let Some(path) = &args.trace {
        let jsonl_ext = path.extension().is_some_and(|e| e == "jsonl");
        let out = create(path)?;
        match args.trace_format.unwrap_or(if jsonl_ext { TraceFormat::Jsonl } else { TraceFormat::Csv }) {
            TraceFormat::Csv => observers.push(Box::new(CsvTraceWriter::new(out, filter))),
            TraceFormat::Jsonl => observers.push(Box::new(JsonlTraceWriter::new(out, filter))),
        }
    }
    if let Some(path) = &args.scene {
        observers.push(Box::new(SceneWriter::new(create(path)?, path.clone())));
    }

    let started = Instant::now();
    let path = args.path.display();
    let mut sim = Simulation::new(&model, &root, root_args, config)
        .map_err(|e| Failure::new(EXIT_RUNTIME, format!("{path}: error: {e}")))?;
    let mut refs: Vec<&mut dyn Observer> = observers.iter_mut().map(|o| o.as_mut() as &mut dyn Observer).collect();
    let outcome = sim.run(&mut refs);
    // flush whatever was recorded, also after a failure
    let flushed: Result<(), String> = refs.iter_mut().try_for_each(|o| o.finish().map_err(|e| e.to_string()));
    let stats = sim.stats();
    eprintln!(
        "frames: {}, discrete events: {}, wall time: {:.3} s",
        stats.frames,
        stats.discrete_events,
        started.elapsed().as_secs_f64()
    );
    outcome.map_err(|e| Failure::new(EXIT_RUNTIME, format!("{path}: error: {e}")))?;
    flushed.map_err(|e| Failure::new(EXIT_RUNTIME, format!("error: {e}")))
}
