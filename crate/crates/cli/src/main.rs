use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kacstab::crystal::{CrystalCache, CrystalSlice, PathCrystal, DEFAULT_LIMIT};
use kacstab::lattice::{depth_profile, ElasticSubgraph, Gcm, PairingVector, RootVector};
use kacstab::quiver::{contract, string_decompose, stretch, FramedRep, Mat};
use kacstab::stab::{check_weight_decomposition, fit_polynomial, json_field, run_experiment_with, DiagramSpec, ExperimentConfig, SCHEMA_VERSION};
use serde::Deserialize;
use serde_json::{json, Value};

mod error;

use error::CliError;

#[derive(Parser)]
#[command(name = "kacstab", version, about = "Multiplicities and stabilization experiments for Kac-Moody algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Crystal cache directory; defaults to $KACSTAB_CACHE_DIR.
    #[arg(long, global = true, env = "KACSTAB_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Ignore any cache directory.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for `cache verify` sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// A single tensor, branching or weight multiplicity.
    Mult(MultArgs),
    /// Run a stabilization experiment from a config file.
    Stab {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit an exact polynomial to sampled values.
    Fit {
        #[arg(long)]
        samples: PathBuf,
    },
    /// Check the decomposition of a weight multiplicity over an elastic subgraph.
    DecompCheck {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long, value_delimiter = ',')]
        elastic: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        w: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<i64>,
    },
    /// Predicates and string operations on framed representations.
    Quiver {
        #[command(subcommand)]
        op: QuiverOp,
    },
    /// Inspect or maintain the crystal cache.
    Cache {
        #[command(subcommand)]
        op: CacheOp,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MultKind {
    Tensor,
    Branch,
    Weight,
}

#[derive(Args)]
struct MultArgs {
    kind: MultKind,
    #[arg(long)]
    diagram: PathBuf,
    /// Pairings of the highest weight.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    w: Vec<i64>,
    /// Pairings of the second factor, for tensor products.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    y: Vec<i64>,
    /// Simple-root offset of the queried weight.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Vec<i64>,
    /// Elastic subgraph labels; required for branching, used for the depth report otherwise.
    #[arg(long, value_delimiter = ',')]
    elastic: Vec<String>,
}

#[derive(Args)]
struct RepArgs {
    #[arg(long)]
    rep: PathBuf,
    #[arg(long, value_delimiter = ',')]
    elastic: Vec<String>,
}

#[derive(Subcommand)]
enum QuiverOp {
    Check {
        #[command(flatten)]
        rep: RepArgs,
    },
    Stretch {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        s: usize,
    },
    Contract {
        #[command(flatten)]
        rep: RepArgs,
        /// The two labels joined by the edge to remove.
        #[arg(long, value_delimiter = ',')]
        edge: Vec<String>,
        #[arg(long)]
        s: usize,
    },
    Decompose {
        #[command(flatten)]
        rep: RepArgs,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        s: usize,
    },
}

#[derive(Subcommand)]
enum CacheOp {
    Stats,
    Clear,
    /// Regenerate one seeded-random entry and compare byte for byte.
    Verify,
}

/// What a command produced: the text to emit and the exit status.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn json(v: &Value) -> Self {
        Output { text: pretty(v), code: 0 }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn read(path: &Path, field: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::invalid(field, format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, prefix: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let f = json_field(&e);
        let field = if f == "$" { prefix.to_string() } else { format!("{prefix}.{f}") };
        CliError::invalid(field, e)
    })
}

fn load_diagram(path: &Path) -> Result<(DiagramSpec, Gcm), CliError> {
    let text = read(path, "diagram")?;
    let mut doc: Value = parse_json(&text, "diagram")?;
    if let Some(obj) = doc.as_object_mut() {
        if let Some(v) = obj.remove("schema_version") {
            if v != json!(SCHEMA_VERSION) {
                return Err(CliError::invalid("diagram.schema_version", format!("unsupported version {v}")));
            }
        }
    }
    let spec: DiagramSpec = serde_json::from_value(doc).map_err(|e| CliError::invalid(format!("diagram.{}", json_field(&e)), e))?;
    let gcm = spec.build()?;
    Ok((spec, gcm))
}

fn elastic(gcm: &Gcm, labels: &[String]) -> Result<ElasticSubgraph, CliError> {
    ElasticSubgraph::from_labels(gcm, labels).map_err(|e| CliError::invalid("elastic", e))
}

fn pairing(field: &str, values: &[i64], gcm: &Gcm) -> Result<PairingVector, CliError> {
    if values.len() != gcm.rank() {
        return Err(CliError::invalid(field, format!("expected {} entries, found {}", gcm.rank(), values.len())));
    }
    if values.iter().any(|&x| x < 0) {
        return Err(CliError::invalid(field, "must be dominant"));
    }
    Ok(PairingVector::new(values.to_vec()))
}

fn root(field: &str, values: &[i64], gcm: &Gcm) -> Result<RootVector, CliError> {
    if values.len() != gcm.rank() {
        return Err(CliError::invalid(field, format!("expected {} entries, found {}", gcm.rank(), values.len())));
    }
    RootVector::new(values.to_vec()).map_err(|e| CliError::invalid(field, e))
}

fn open_cache(g: &Global) -> Result<Option<CrystalCache>, CliError> {
    match (&g.cache_dir, g.no_cache) {
        (Some(dir), false) => Ok(Some(CrystalCache::open(dir)?)),
        _ => Ok(None),
    }
}

fn slice(cache: Option<&CrystalCache>, gcm: &Gcm, w: &PairingVector, v: &RootVector) -> Result<CrystalSlice, CliError> {
    let crystal = PathCrystal::new(gcm, w)?;
    Ok(match cache {
        Some(c) => c.get_or_generate(&crystal, v)?,
        None => crystal.generate(Some(v), DEFAULT_LIMIT)?,
    })
}

fn cmd_mult(g: &Global, a: &MultArgs) -> Result<Output, CliError> {
    let (spec, gcm) = load_diagram(&a.diagram)?;
    let w = pairing("w", &a.w, &gcm)?;
    let v = root("v", &a.v, &gcm)?;
    let x0 = elastic(&gcm, &a.elastic)?;
    let cache = open_cache(g)?;
    let s = slice(cache.as_ref(), &gcm, &w, &v)?;
    let (kind, value) = match a.kind {
        MultKind::Tensor => {
            let y = pairing("y", &a.y, &gcm)?;
            ("tensor", s.tensor_multiplicity(&y, &v)?)
        }
        MultKind::Branch => {
            if a.elastic.is_empty() {
                return Err(CliError::invalid("elastic", "branching needs an elastic subgraph"));
            }
            ("branch", s.branching_multiplicity(&v, x0.vertices())?)
        }
        MultKind::Weight => ("weight", s.weight_multiplicity(&v)?),
    };
    let deep = (!a.elastic.is_empty()).then(|| {
        let p = depth_profile(&v, &gcm, x0.vertices());
        json!({"elastic": a.elastic, "deep": p.deep, "sigma": p.sigma})
    });
    if g.format == Format::Csv {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["schema_version", "kind", "value"]).map_err(|e| CliError::Internal(e.to_string()))?;
        wtr.write_record([SCHEMA_VERSION.to_string(), kind.to_string(), value.to_string()]).map_err(|e| CliError::Internal(e.to_string()))?;
        let text = String::from_utf8(wtr.into_inner().map_err(|e| CliError::Internal(e.to_string()))?).expect("csv is utf-8");
        return Ok(Output { text, code: 0 });
    }
    Ok(Output::json(&json!({
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "value": value,
        "inputs": {"diagram": spec, "w": a.w, "y": a.y, "v": a.v, "elastic": a.elastic},
        "deep": deep,
    })))
}

fn cmd_stab(g: &Global, config: &Path) -> Result<Output, CliError> {
    let cfg = ExperimentConfig::from_json(&read(config, "config")?)?;
    let cache = open_cache(g)?;
    let report = run_experiment_with(&cfg, cache.as_ref())?;
    let full = serde_json::to_value(&report).map_err(|e| CliError::Internal(e.to_string()))?;
    if let Some(out) = &g.out {
        let csv_path = out.with_extension("csv");
        write(out, &pretty(&full))?;
        write(&csv_path, &report.to_csv())?;
        return Ok(Output::json(&json!({
            "schema_version": SCHEMA_VERSION,
            "json": out,
            "csv": csv_path,
            "stabilized": report.stabilized,
            "stable_value": report.stable_value,
        })));
    }
    Ok(match g.format {
        Format::Json => Output::json(&full),
        Format::Csv => Output { text: report.to_csv(), code: 0 },
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleDoc {
    #[serde(default = "one")]
    schema_version: u32,
    degree_bound: Vec<usize>,
    samples: Vec<Sample>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Sample {
    m: Vec<usize>,
    value: u64,
}

fn one() -> u32 {
    1
}

fn cmd_fit(samples: &Path) -> Result<Output, CliError> {
    let doc: SampleDoc = parse_json(&read(samples, "samples")?, "samples")?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(CliError::invalid("samples.schema_version", format!("unsupported version {}", doc.schema_version)));
    }
    let mut table = std::collections::BTreeMap::new();
    for (k, s) in doc.samples.iter().enumerate() {
        if table.insert(s.m.clone(), s.value).is_some() {
            return Err(CliError::invalid(format!("samples.samples[{k}].m"), "duplicate grid point"));
        }
    }
    let fit = fit_polynomial(&table, &doc.degree_bound)?;
    let mut v = serde_json::to_value(&fit).map_err(|e| CliError::Internal(e.to_string()))?;
    v["schema_version"] = json!(SCHEMA_VERSION);
    Ok(Output::json(&v))
}

fn cmd_decomp(diagram: &Path, labels: &[String], w: &[i64], v: &[i64]) -> Result<Output, CliError> {
    let (_, gcm) = load_diagram(diagram)?;
    let x0 = elastic(&gcm, labels)?;
    let w = pairing("w", w, &gcm)?;
    let v = root("v", v, &gcm)?;
    let r = check_weight_decomposition(&gcm, &x0, &w, &v)?;
    let mut out = serde_json::to_value(&r).map_err(|e| CliError::Internal(e.to_string()))?;
    out["schema_version"] = json!(SCHEMA_VERSION);
    Ok(Output { text: pretty(&out), code: if r.holds { 0 } else { 1 } })
}

fn load_rep(a: &RepArgs) -> Result<(FramedRep, ElasticSubgraph), CliError> {
    let rep = FramedRep::from_json(&read(&a.rep, "rep")?)?;
    let x0 = elastic(rep.gcm(), &a.elastic)?;
    Ok((rep, x0))
}

fn vertex(gcm: &Gcm, label: &str, field: &str) -> Result<usize, CliError> {
    gcm.index_of(label).ok_or_else(|| CliError::invalid(field, format!("unknown vertex {label:?}")))
}

fn mat_rows(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect()).collect()
}

fn labels_of(gcm: &Gcm, x0: &ElasticSubgraph) -> Vec<String> {
    x0.vertices().iter().map(|&i| gcm.label(i).to_string()).collect()
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

/// Writes a transformed rep to `--out`, or prints it.
fn emit_rep(g: &Global, rep: &FramedRep, x0: &ElasticSubgraph) -> Result<Output, CliError> {
    let mut text = rep.to_json();
    text.push('\n');
    match &g.out {
        Some(out) => {
            write(out, &text)?;
            Ok(Output::json(&json!({"schema_version": SCHEMA_VERSION, "rep": out, "elastic": labels_of(rep.gcm(), x0)})))
        }
        None => Ok(Output { text, code: 0 }),
    }
}

fn cmd_quiver(g: &Global, op: &QuiverOp) -> Result<Output, CliError> {
    match op {
        QuiverOp::Check { rep } => {
            let (r, x0) = load_rep(rep)?;
            let mm = r.check_mm();
            let eps = r.epsilon_profile();
            Ok(Output::json(&json!({
                "schema_version": SCHEMA_VERSION,
                "mm": mm.holds,
                "defect_vertex": mm.vertex.map(|k| r.gcm().label(k).to_string()),
                "defect_norm": mm.defect_norm.to_string(),
                "nilpotent": r.check_nilpotent(),
                "stable": r.check_stable(),
                "epsilon": eps,
                "epsilon_zero_on_elastic": x0.vertices().iter().all(|&i| eps[i] == 0),
            })))
        }
        QuiverOp::Stretch { rep, vertex: label, s } => {
            let (r, x0) = load_rep(rep)?;
            let i = vertex(r.gcm(), label, "vertex")?;
            let (st, x0p) = stretch(&r, &x0, i, *s)?;
            emit_rep(g, &st, &x0p)
        }
        QuiverOp::Contract { rep, edge, s } => {
            let (r, x0) = load_rep(rep)?;
            if edge.len() != 2 {
                return Err(CliError::invalid("edge", "expected two vertex labels"));
            }
            let a = vertex(r.gcm(), &edge[0], "edge")?;
            let b = vertex(r.gcm(), &edge[1], "edge")?;
            let (back, x0c) = contract(&r, &x0, (a, b), *s)?;
            emit_rep(g, &back, &x0c)
        }
        QuiverOp::Decompose { rep, vertex: label, s } => {
            let (r, x0) = load_rep(rep)?;
            let j = vertex(r.gcm(), label, "vertex")?;
            let d = string_decompose(&r, &x0, j, *s)?;
            Ok(Output::json(&json!({
                "schema_version": SCHEMA_VERSION,
                "vertex": label,
                "s": s,
                "dim": r.v()[j],
                "im_x_dim": d.im_x.cols(),
                "im_y_dim": d.im_y.cols(),
                "im_x": mat_rows(&d.im_x),
                "im_y": mat_rows(&d.im_y),
            })))
        }
    }
}

fn cmd_cache(g: &Global, op: &CacheOp) -> Result<Output, CliError> {
    let dir = g.cache_dir.as_ref().ok_or_else(|| CliError::invalid("cache_dir", "pass --cache-dir or set KACSTAB_CACHE_DIR"))?;
    let cache = CrystalCache::open(dir)?;
    match op {
        CacheOp::Stats => {
            let st = cache.stats()?;
            Ok(Output::json(&json!({"schema_version": SCHEMA_VERSION, "entries": st.entries, "bytes": st.bytes})))
        }
        CacheOp::Clear => Ok(Output::json(&json!({"schema_version": SCHEMA_VERSION, "removed": cache.clear()?}))),
        CacheOp::Verify => match cache.verify(g.seed)? {
            None => Ok(Output::json(&json!({"schema_version": SCHEMA_VERSION, "file": null, "match": null}))),
            Some((path, ok)) => {
                let text = pretty(&json!({"schema_version": SCHEMA_VERSION, "file": path, "match": ok}));
                Ok(Output { text, code: if ok { 0 } else { 1 } })
            }
        },
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::invalid("threads", "must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let csv_ok = matches!(cli.command, Command::Mult(_) | Command::Stab { .. });
    if cli.global.format == Format::Csv && !csv_ok {
        return Err(CliError::invalid("format", "csv output is available for mult and stab only"));
    }
    let g = &cli.global;
    match &cli.command {
        Command::Mult(a) => cmd_mult(g, a),
        Command::Stab { config } => cmd_stab(g, config),
        Command::Fit { samples } => cmd_fit(samples),
        Command::DecompCheck { diagram, elastic, w, v } => cmd_decomp(diagram, elastic, w, v),
        Command::Quiver { op } => cmd_quiver(g, op),
        Command::Cache { op } => cmd_cache(g, op),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let transforms = matches!(&cli.command, Command::Quiver { op: QuiverOp::Stretch { .. } | QuiverOp::Contract { .. } });
    let stab = matches!(&cli.command, Command::Stab { .. });
    let (text, code) = match run(&cli) {
        Ok(o) => (o.text, o.code),
        Err(e) => {
            eprintln!("kacstab: {e}");
            (pretty(&e.to_json()), e.exit_code() as u8)
        }
    };
    // stab and the rep transforms already wrote their files to --out
    match (&cli.global.out, transforms || stab || code != 0) {
        (Some(out), false) => {
            if let Err(e) = std::fs::write(out, &text) {
                eprintln!("kacstab: {}: {e}", out.display());
                return ExitCode::from(1);
            }
        }
        _ => print!("{text}"),
    }
    ExitCode::from(code)
}
