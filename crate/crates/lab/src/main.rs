use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fringe_core::{ModelSpec, RandomSource, ShapeCode, TreeShape};
use fringe_lab::clt::clt_diagnostic;
use fringe_lab::config::ConfigFile;
use fringe_lab::constants::{constants, ConstantsRequest};
use fringe_lab::experiment::{run, run_replicates, ExperimentPlan, DEFAULT_MAX_LEAVES, DEFAULT_N, DEFAULT_REPS};
use fringe_lab::oscillation::{geometric_grid, oscillation_scan, ScanSettings};
use fringe_lab::output::{self, Format, Row};
use fringe_lab::parse::{parse_grid, parse_model, parse_probability, parse_rational, parse_ratio, parse_sizes};
use fringe_lab::{compare, tables, CompareOptions, LabError, Result};
use num_traits::ToPrimitive;

const KNOWN_KEYS: &[&str] = &[
    "model",
    "n",
    "p",
    "beta",
    "seed",
    "format",
    "tree",
    "fourier-terms",
    "period-ratio",
    "max-denominator",
    "reps",
    "max-leaves",
    "jobs",
    "cladogram",
    "per-replicate",
    "clt",
    "grid",
    "points-per-octave",
    "output",
];

/// Fringe subtree statistics of random binary trees.
#[derive(Parser, Debug)]
#[command(name = "fringelab", version)]
struct Cli {
    /// Flat `key = value` file; keys are the long flag names. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw one tree.
    Sample(SampleArgs),
    /// Exact and asymptotic constants of one shape, as JSON.
    Constants(ConstantsArgs),
    /// Limiting fringe and leaf-share tables for the five full models.
    Tables(TablesArgs),
    /// Replicated fringe census.
    Census(CensusArgs),
    /// Census compared against the predicted limits; exit 1 on a failed verdict.
    Compare(CensusArgs),
    /// Phase-folded Patricia counts against the periodic mean.
    Oscillate(OscillateArgs),
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// trie, patricia, bst, ebst, cbst, beta_split (beta), cb, uniform_full (uniform)
    #[arg(long)]
    model: Option<String>,
    /// Bit probability, a fraction such as 1/2 or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Split parameter of beta-splitting trees.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// shape or code; general trees print the code of their extension.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Shape as `(*,(*,*))` or a preorder bit code.
    #[arg(long)]
    tree: Option<String>,
    #[arg(long)]
    fourier_terms: Option<String>,
    /// Force `log p / log q = a/b` instead of detecting it.
    #[arg(long)]
    period_ratio: Option<String>,
    #[arg(long)]
    max_denominator: Option<String>,
}

#[derive(Args, Debug)]
struct TablesArgs {
    /// text or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated sizes; `2^k` allowed.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    max_leaves: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    /// Identify mirror images.
    #[arg(long)]
    cladogram: bool,
    /// Shapes to report (repeatable); default all shapes seen.
    #[arg(long)]
    tree: Vec<String>,
    /// Also emit one row per replicate and shape.
    #[arg(long)]
    per_replicate: bool,
    /// Add normality-proxy rows; failures count toward the exit code.
    #[arg(long)]
    clt: bool,
    #[arg(long)]
    fourier_terms: Option<String>,
    #[arg(long)]
    period_ratio: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OscillateArgs {
    #[arg(long)]
    tree: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Size range such as 2^10..2^20.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    points_per_octave: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    fourier_terms: Option<String>,
    #[arg(long)]
    period_ratio: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Flag, then config file, then default; every resolved value is logged.
struct Resolver {
    cfg: ConfigFile,
}

impl Resolver {
    fn get(&self, key: &str, flag: &Option<String>, default: Option<&str>) -> Option<String> {
        let (v, source) = match (flag, self.cfg.get(key), default) {
            (Some(v), ..) => (v.clone(), "flag"),
            (None, Some(v), _) => (v.to_string(), "config"),
            (None, None, Some(d)) => (d.to_string(), "default"),
            (None, None, None) => return None,
        };
        log::info!("{key} = {v} ({source})");
        Some(v)
    }

    fn require(&self, key: &str, flag: &Option<String>) -> Result<String> {
        self.get(key, flag, None)
            .ok_or_else(|| LabError::Usage(format!("--{key} is required")))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, flag: &Option<String>, default: &str) -> Result<T> {
        let v = self.get(key, flag, Some(default)).expect("defaulted");
        v.trim()
            .parse()
            .map_err(|_| LabError::Usage(format!("--{key}: cannot parse `{v}`")))
    }

    fn flag(&self, key: &str, set: bool) -> Result<bool> {
        let v = if set {
            true
        } else {
            match self.cfg.get(key) {
                None => false,
                Some("true") => true,
                Some("false") => false,
                Some(other) => return Err(LabError::Usage(format!("{key}: expected true or false, got `{other}`"))),
            }
        };
        log::info!("{key} = {v}");
        Ok(v)
    }

    fn model(&self, args: &ModelArgs) -> Result<(ModelSpec, num_rational::BigRational)> {
        let (model, fixed_beta) = parse_model(&self.require("model", &args.model)?)?;
        let p = parse_probability(&self.get("p", &args.p, Some("1/2")).expect("defaulted"))?;
        let beta = match fixed_beta {
            Some(b) => {
                log::info!("beta = {b} (model)");
                b
            }
            None => to_f64(&parse_rational(&self.get("beta", &args.beta, Some("-1")).expect("defaulted"))?),
        };
        let spec = ModelSpec::new(model, 1).with_p(to_f64(&p)).with_beta(beta);
        Ok((spec, p))
    }
}

fn to_f64(r: &num_rational::BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn parse_tree(s: &str) -> Result<TreeShape> {
    let s = s.trim();
    if !s.is_empty() && s.chars().all(|c| c == '0' || c == '1') {
        return Ok(ShapeCode::parse(s)?.decode()?);
    }
    Ok(TreeShape::parse(s)?)
}

fn format_of(r: &Resolver, flag: &Option<String>) -> Result<Format> {
    r.get("format", flag, Some("csv"))
        .expect("defaulted")
        .parse()
        .map_err(LabError::Usage)
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_sample(r: &Resolver, a: &SampleArgs) -> Result<bool> {
    let (spec, _) = r.model(&a.model)?;
    let n = fringe_lab::parse::parse_size(&r.require("n", &a.n)?)?;
    let seed: u64 = r.parsed("seed", &a.seed, "0")?;
    let format = r.get("format", &a.format, Some("shape")).expect("defaulted");
    let spec = ModelSpec { n, ..spec };
    let tree = spec.sample(&mut RandomSource::new(seed))?;
    let text = match format.as_str() {
        "shape" => tree.format(),
        "code" if tree.is_full() => tree.code()?.to_string(),
        "code" => tree.extended_code().to_string(),
        other => return Err(LabError::Usage(format!("unknown format `{other}` (shape, code)"))),
    };
    println!("{text}");
    Ok(true)
}

fn cmd_constants(r: &Resolver, a: &ConstantsArgs) -> Result<bool> {
    let (spec, p) = r.model(&a.model)?;
    let tree = parse_tree(&r.require("tree", &a.tree)?)?;
    let mut req = ConstantsRequest::new(spec.model);
    req.p = p;
    req.beta = spec.beta;
    req.fourier_terms = r.parsed("fourier-terms", &a.fourier_terms, "8")?;
    req.max_denominator = r.parsed("max-denominator", &a.max_denominator, "10000")?;
    if let Some(ratio) = r.get("period-ratio", &a.period_ratio, None) {
        req.period_ratio = Some(parse_ratio(&ratio)?);
    }
    let record = constants(&tree, &req)?;
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &record)?;
    writeln!(out)?;
    Ok(true)
}

fn cmd_tables(r: &Resolver, a: &TablesArgs) -> Result<bool> {
    let format = r.get("format", &a.format, Some("text")).expect("defaulted");
    let mut out = io::stdout().lock();
    match format.as_str() {
        "text" => write!(out, "{}", tables::render()?)?,
        "json" => {
            serde_json::to_writer_pretty(&mut out, &tables::records()?)?;
            writeln!(out)?;
        }
        other => return Err(LabError::Usage(format!("unknown format `{other}` (text, json)"))),
    }
    Ok(true)
}

fn plan_of(r: &Resolver, a: &CensusArgs) -> Result<ExperimentPlan> {
    let (spec, _) = r.model(&a.model)?;
    let n_values = parse_sizes(&r.get("n", &a.n, Some(&DEFAULT_N.to_string())).expect("defaulted"))?;
    let mut plan = ExperimentPlan::new(spec, n_values, r.parsed("reps", &a.reps, &DEFAULT_REPS.to_string())?);
    plan.max_leaves = r.parsed("max-leaves", &a.max_leaves, &DEFAULT_MAX_LEAVES.to_string())?;
    plan.master_seed = r.parsed("seed", &a.seed, "0")?;
    plan.jobs = r.parsed("jobs", &a.jobs, "1")?;
    plan.cladogram = r.flag("cladogram", a.cladogram)?;
    let trees: Vec<String> = if a.tree.is_empty() {
        r.get("tree", &None, None)
            .map(|v| v.split(';').map(str::to_string).collect())
            .unwrap_or_default()
    } else {
        a.tree.clone()
    };
    for t in &trees {
        log::info!("tree = {t}");
        plan.shapes.push(parse_tree(t)?);
    }
    plan.validate()?;
    Ok(plan)
}

fn cmd_census(r: &Resolver, a: &CensusArgs, with_compare: bool) -> Result<bool> {
    let plan = plan_of(r, a)?;
    let format = format_of(r, &a.format)?;
    let per_replicate = r.flag("per-replicate", a.per_replicate)?;
    let clt = r.flag("clt", a.clt)?;
    let stats = run(&plan)?;
    let mut rows: Vec<Row> = output::census_rows(&stats);
    let mut ok = true;
    if with_compare {
        let mut options = CompareOptions {
            fourier_terms: r.parsed("fourier-terms", &a.fourier_terms, "8")?,
            ..CompareOptions::default()
        };
        if let Some(ratio) = r.get("period-ratio", &a.period_ratio, None) {
            let (x, y) = parse_ratio(&ratio)?;
            let p = plan.spec.p;
            options.source = Some(fringe_core::SourceParams::with_periodicity(
                p,
                fringe_core::patricia::periodicity_from_ratio(p, x, y)?,
            )?);
        }
        let report = compare(&stats, &options)?;
        for row in &report.rows {
            log::info!(
                "n={} {} fringe {:.6} predicted {:.6} z {:+.2} verdict {}",
                row.n,
                row.tree,
                row.empirical,
                row.predicted,
                row.z,
                row.verdict
            );
        }
        ok = report.passed();
        rows = output::comparison_rows(&report);
    }
    if clt {
        let mut clt_rows = Vec::new();
        for size in &stats.by_n {
            for s in &size.shapes {
                match clt_diagnostic(&stats, size.n, &s.shape) {
                    Ok(row) => {
                        ok &= row.pass != Some(false);
                        clt_rows.push(row);
                    }
                    Err(e) => log::warn!("n={} shape {}: {e}", size.n, s.shape),
                }
            }
        }
        rows.extend(output::clt_rows(&clt_rows));
    }
    if per_replicate {
        for (i, &n) in plan.n_values.iter().enumerate() {
            let reps = run_replicates(&plan, i)?;
            rows.extend(output::replicate_rows(plan.spec.model.name(), n, &reps));
        }
    }
    let mut out = open_output(&a.output)?;
    output::write_rows(&rows, format, &mut out)?;
    out.flush()?;
    Ok(ok)
}

fn cmd_oscillate(r: &Resolver, a: &OscillateArgs) -> Result<bool> {
    let tree = parse_tree(&r.require("tree", &a.tree)?)?;
    let p = to_f64(&parse_probability(&r.get("p", &a.p, Some("1/2")).expect("defaulted"))?);
    let (lo, hi) = parse_grid(&r.get("grid", &a.grid, Some("2^10..2^20")).expect("defaulted"))?;
    let per: u32 = r.parsed("points-per-octave", &a.points_per_octave, "4")?;
    let settings = ScanSettings {
        reps: r.parsed("reps", &a.reps, "100")?,
        master_seed: r.parsed("seed", &a.seed, "0")?,
        jobs: r.parsed("jobs", &a.jobs, "1")?,
        fourier_terms: r.parsed("fourier-terms", &a.fourier_terms, "8")?,
    };
    let source = match r.get("period-ratio", &a.period_ratio, None) {
        Some(ratio) => {
            let (x, y) = parse_ratio(&ratio)?;
            fringe_core::SourceParams::with_periodicity(p, fringe_core::patricia::periodicity_from_ratio(p, x, y)?)?
        }
        None => fringe_core::SourceParams::new(p)?,
    };
    let format = format_of(r, &a.format)?;
    let report = oscillation_scan(&tree, source, &geometric_grid(lo, hi, per), settings)?;
    log::info!(
        "period {:.6}, relative amplitude {:.3e}, mean relative standard error {:.3e}: {}",
        report.period,
        report.relative_amplitude,
        report.mean_relative_standard_error,
        if report.resolvable { "oscillation above noise" } else { "oscillation below Monte Carlo noise" }
    );
    let mut out = open_output(&a.output)?;
    output::write_rows(&output::oscillation_rows(&report, &tree.code()?), format, &mut out)?;
    out.flush()?;
    Ok(true)
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(path) => {
            log::info!("config file {}", path.display());
            ConfigFile::load(path)?
        }
        None => ConfigFile::default(),
    };
    cfg.check_keys(KNOWN_KEYS)?;
    let r = Resolver { cfg };
    match &cli.command {
        Command::Sample(a) => cmd_sample(&r, a),
        Command::Constants(a) => cmd_constants(&r, a),
        Command::Tables(a) => cmd_tables(&r, a),
        Command::Census(a) => cmd_census(&r, a, false),
        Command::Compare(a) => cmd_census(&r, a, true),
        Command::Oscillate(a) => cmd_oscillate(&r, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
