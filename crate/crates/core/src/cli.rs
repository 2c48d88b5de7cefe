//! Command-line front end.
//!
//! A failed verification exits with status 1 and bad input with status 2.
//! Every number printed is an exact integer or `num/den`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::axioms::{verify_axioms, AxiomConfig};
use crate::cache::{cache_root, solve_cached, CacheStatus};
use crate::cohomology::{builtin, ModelFile, RingModel};
use crate::correlators::CorrelatorTable;
use crate::descendants::{close_table, default_max_insertions, verify_series, DescError, SeriesBounds};
use crate::exact::{self, render, Rational};
use crate::floer::{arnold_report, homology_ranks, FloerComplex, FloerError};
use crate::novikov::{CurveClass, NovikovElement};
use crate::strata::{enumerate_strata, render_table};
use crate::wdvv::{kontsevich_from_table, QClass, QuantumRing, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "qhforge", version, about = "Exact genus-0 Gromov-Witten and Floer-complex calculator")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the artifact to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Directory for solved tables (defaults to $QHFORGE_CACHE).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Use the deterministic parallel solver.
    #[arg(long, global = true)]
    pub parallel: bool,
    /// Ring model in JSON form, overriding --model.
    #[arg(long, global = true)]
    pub model_file: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Rational plane curve counts N_1..N_D.
    Kontsevich {
        #[arg(long)]
        max_degree: i64,
    },
    /// Quantum multiplication table with associativity and grading reports.
    Qh {
        #[arg(long, default_value = "P2")]
        model: String,
        #[arg(long)]
        cutoff: String,
    },
    /// Dual graphs of stable maps in a class.
    Strata {
        #[arg(long, default_value = "P2")]
        model: String,
        /// Comma-separated class coordinates.
        #[arg(long)]
        class: String,
        #[arg(long)]
        marks: u32,
        #[arg(long, default_value_t = 0)]
        genus: u32,
    },
    /// Descendant generating series.
    Descendants {
        #[command(subcommand)]
        action: DescendantsAction,
    },
    /// Novikov-ring chain complexes.
    Floer {
        #[command(subcommand)]
        action: FloerAction,
    },
    /// Property suites on a solved table.
    Axioms {
        #[command(subcommand)]
        action: AxiomsAction,
    },
    /// Solve and print the correlator table as JSON lines.
    Solve {
        #[arg(long, default_value = "P2")]
        model: String,
        #[arg(long)]
        cutoff: String,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum DescendantsAction {
    /// Check the string and dilaton equations.
    Verify(DescendantsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DescendantsArgs {
    #[arg(long)]
    pub depth: u32,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, default_value = "2")]
    pub cutoff: String,
    #[arg(long)]
    pub max_insertions: Option<usize>,
    /// Read correlators from a table file instead of solving.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum FloerAction {
    /// Validate the boundary entries and test δ² = 0.
    Check { file: PathBuf },
    /// Homology ranks over the Novikov field.
    Homology { file: PathBuf },
    /// Compare generator count and homology against Betti numbers.
    Arnold {
        file: PathBuf,
        /// Comma-separated Betti numbers; defaults to the homology ranks.
        #[arg(long)]
        betti: Option<String>,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum AxiomsAction {
    /// Reduction and splitting suites.
    Verify {
        #[arg(long, default_value = "P2")]
        model: String,
        #[arg(long, default_value = "3")]
        cutoff: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InputError {
    #[error("unknown model: {0}")]
    UnknownModel(String),
    #[error("cannot read {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("insufficient cutoff: {0}")]
    Cutoff(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
}

#[derive(Debug)]
enum Failure {
    Input(InputError),
    Verify(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Unsupported(m) => InputError::Unsupported(format!("{m} (the solver handles P^n only)")).into(),
            SolveError::BadCutoff => InputError::Cutoff("cutoff must be nonnegative".into()).into(),
            e @ SolveError::CutoffInsufficient { .. } => InputError::Cutoff(e.to_string()).into(),
            other => Failure::Verify(format!("solver: {other}")),
        }
    }
}

/// Outcome of a run: process status plus the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Artifact {
    text: String,
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    ok: bool,
}

impl Artifact {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json value serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory csv");
                for r in &self.rows {
                    w.write_record(r).expect("in-memory csv");
                }
                String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
            }
        }
    }
}

pub fn run_args<I, T>(args: I) -> RunResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if status == 0 {
                RunResult { status, stdout: text, stderr: String::new() }
            } else {
                RunResult { status, stdout: String::new(), stderr: text }
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> RunResult {
    let mut notes = String::new();
    let outcome = match &cfg.command {
        Command::Kontsevich { max_degree } => kontsevich(cfg, *max_degree, &mut notes),
        Command::Qh { model, cutoff } => qh(cfg, model, cutoff, &mut notes),
        Command::Strata { model, class, marks, genus } => strata(cfg, model, class, *marks, *genus),
        Command::Descendants { action: DescendantsAction::Verify(a) } => descendants(cfg, a, &mut notes),
        Command::Floer { action } => floer(action),
        Command::Axioms { action: AxiomsAction::Verify { model, cutoff, samples, seed } } => {
            axioms(cfg, model, cutoff, *samples, *seed, &mut notes)
        }
        Command::Solve { model, cutoff } => solve(cfg, model, cutoff, &mut notes),
    };
    match outcome {
        Ok(a) => {
            let body = a.render(cfg.format);
            let status = if a.ok { 0 } else { 1 };
            match &cfg.output {
                Some(path) => match fs::write(path, &body) {
                    Ok(()) => RunResult { status, stdout: format!("wrote {}\n", path.display()), stderr: notes },
                    Err(e) => RunResult {
                        status: 2,
                        stdout: String::new(),
                        stderr: format!("{notes}error: cannot write {}: {e}\n", path.display()),
                    },
                },
                None => RunResult { status, stdout: body, stderr: notes },
            }
        }
        Err(Failure::Input(e)) => RunResult { status: 2, stdout: String::new(), stderr: format!("{notes}error: {e}\n") },
        Err(Failure::Verify(msg)) => {
            RunResult { status: 1, stdout: String::new(), stderr: format!("{notes}verification failed: {msg}\n") }
        }
    }
}

fn read_file(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path)
        .map_err(|e| InputError::Unreadable { path: path.display().to_string(), reason: e.to_string() })
}

fn load_model(cfg: &RunConfig, name: &str) -> Result<RingModel, InputError> {
    match &cfg.model_file {
        Some(path) => {
            let text = read_file(path)?;
            let unreadable = |reason: String| InputError::Unreadable { path: path.display().to_string(), reason };
            let file: ModelFile = serde_json::from_str(&text).map_err(|e| unreadable(e.to_string()))?;
            RingModel::from_file(&file).map_err(|e| unreadable(e.to_string()))
        }
        None => builtin(name).map_err(|e| InputError::UnknownModel(e.to_string())),
    }
}

fn parse_cutoff(s: &str) -> Result<Rational, InputError> {
    let c = exact::parse(s).map_err(|e| InputError::Invalid(format!("cutoff {s:?}: {e}")))?;
    if !c.is_positive() {
        return Err(InputError::Cutoff(format!("cutoff must be positive, got {}", render(&c))));
    }
    Ok(c)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, InputError> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| InputError::Invalid(format!("{what} {s:?}"))))
        .collect()
}

fn solved(cfg: &RunConfig, model: &RingModel, cutoff: &Rational, notes: &mut String) -> Result<CorrelatorTable, Failure> {
    let dir = cache_root(cfg.cache_dir.as_deref());
    let (table, status) = solve_cached(model, cutoff, dir.as_deref(), cfg.parallel)?;
    match status {
        CacheStatus::Hit => notes.push_str("cache: hit\n"),
        CacheStatus::Miss => notes.push_str("cache: miss\n"),
        CacheStatus::Disabled => {}
    }
    Ok(table)
}

fn kontsevich(cfg: &RunConfig, max_degree: i64, notes: &mut String) -> Result<Artifact, Failure> {
    if max_degree < 1 {
        return Err(InputError::Cutoff(format!("max degree must be positive, got {max_degree}")).into());
    }
    let model = builtin("P2").expect("plane is built in");
    let table = solved(cfg, &model, &Rational::from_integer(max_degree.into()), notes)?;
    let counts = kontsevich_from_table(&model, &table, max_degree)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for (i, n) in counts.iter().enumerate() {
        let d = i + 1;
        ok &= n.is_integer() && n.is_positive();
        text.push_str(&format!("N_{d} = {}\n", render(n)));
        rows.push(vec![d.to_string(), render(n)]);
    }
    if !ok {
        text.push_str("error: some N_d is not a positive integer\n");
    }
    let json = json!({
        "schema": "qhforge.kontsevich/1",
        "counts": rows.iter().map(|r| json!({"degree": r[0].parse::<u64>().unwrap_or(0), "count": r[1]})).collect::<Vec<_>>(),
        "ok": ok,
    });
    Ok(Artifact { text, json, header: vec!["degree", "count"], rows, ok })
}

fn qh(cfg: &RunConfig, name: &str, cutoff: &str, notes: &mut String) -> Result<Artifact, Failure> {
    let model = load_model(cfg, name)?;
    let cutoff = parse_cutoff(cutoff)?;
    let table = solved(cfg, &model, &cutoff, notes)?;
    let ring = QuantumRing::new(&model, &table, &cutoff).map_err(|e| Failure::Verify(e.to_string()))?;
    let rank = model.rank();
    let mut text = format!("quantum product on {} up to energy {}\n", model.name(), render(&cutoff));
    let mut rows = Vec::new();
    let mut products = Vec::new();
    for i in 0..rank {
        for j in i..rank {
            let p = ring.basis_product(i, j).render(&model);
            text.push_str(&format!("{} * {} = {}\n", model.label(i), model.label(j), p));
            rows.push(vec!["product".into(), format!("{} * {}", model.label(i), model.label(j)), p.clone()]);
            products.push(json!({"left": model.label(i), "right": model.label(j), "product": p}));
        }
    }
    let assoc = ring.associativity_failures();
    let grading = ring.grading_failures();
    text.push_str(&format!("associativity: {} of {} basis triples fail\n", assoc.len(), rank.pow(3)));
    for (i, j, k, r) in &assoc {
        text.push_str(&format!(
            "  ({} * {}) * {} - {} * ({} * {}) = {}\n",
            model.label(*i),
            model.label(*j),
            model.label(*k),
            model.label(*i),
            model.label(*j),
            model.label(*k),
            r.render(&model)
        ));
    }
    text.push_str(&format!("grading: {} of {} basis products fail\n", grading.len(), rank * rank));
    rows.push(vec!["associativity_failures".into(), String::new(), assoc.len().to_string()]);
    rows.push(vec!["grading_failures".into(), String::new(), grading.len().to_string()]);
    let mut ok = assoc.is_empty() && grading.is_empty();
    let mut relation = Value::Null;
    if let (Some(n), Some(&h)) = (model.projective_dim(), model.divisor_indices().first()) {
        let power = ring.power(&ring.basis(h), n + 1);
        let lattice = model.lattice().clone();
        let q = NovikovElement::monomial(lattice.clone(), cutoff.clone(), lattice.generator(0), Rational::one())
            .expect("generator of the lattice");
        let want: QClass = ring.basis(model.unit_index()).mul_scalar(&q);
        let holds = power == want;
        ok &= holds;
        let lhs = format!("{}^{{*{}}}", model.label(h), n + 1);
        text.push_str(&format!(
            "{lhs} = {}: {}\n",
            power.render(&model),
            if holds { "equals q·1" } else { "differs from q·1" }
        ));
        rows.push(vec!["power".into(), lhs.clone(), power.render(&model)]);
        relation = json!({"power": lhs, "value": power.render(&model), "equals_q": holds});
    }
    let json = json!({
        "schema": "qhforge.qh/1",
        "model": model.name(),
        "cutoff": render(&cutoff),
        "products": products,
        "associativity_failures": assoc.len(),
        "grading_failures": grading.len(),
        "relation": relation,
        "ok": ok,
    });
    Ok(Artifact { text, json, header: vec!["kind", "item", "value"], rows, ok })
}

fn strata(cfg: &RunConfig, name: &str, class: &str, marks: u32, genus: u32) -> Result<Artifact, Failure> {
    let model = load_model(cfg, name)?;
    let class = CurveClass(parse_list::<i64>(class, "class")?);
    let graphs = enumerate_strata(&model, &class, genus, marks).map_err(|e| InputError::Invalid(e.to_string()))?;
    let bad: Vec<usize> = graphs
        .iter()
        .enumerate()
        .filter(|(_, g)| !g.check_stability(model.lattice()) || (genus == 0 && marks <= 2 && !g.ghost_bound()))
        .map(|(i, _)| i + 1)
        .collect();
    let mut text = format!("{} graphs for A={class}, g={genus}, k={marks}\n", graphs.len());
    text.push_str(&render_table(&graphs));
    for i in &bad {
        text.push_str(&format!("graph {i} violates stability or the ghost bound\n"));
    }
    let rows: Vec<Vec<String>> =
        graphs.iter().enumerate().map(|(i, g)| vec![(i + 1).to_string(), g.describe(), g.describe_edges()]).collect();
    let json = json!({
        "schema": "qhforge.strata/1",
        "class": class.coords(),
        "genus": genus,
        "marks": marks,
        "count": graphs.len(),
        "graphs": rows.iter().map(|r| json!({"vertices": r[1], "edges": r[2]})).collect::<Vec<_>>(),
        "ok": bad.is_empty(),
    });
    Ok(Artifact { text, json, header: vec!["index", "vertices", "edges"], rows, ok: bad.is_empty() })
}

fn descendants(cfg: &RunConfig, a: &DescendantsArgs, notes: &mut String) -> Result<Artifact, Failure> {
    let (model, mut table) = match &a.table {
        Some(path) => {
            let text = read_file(path)?;
            let table = CorrelatorTable::read_jsonl(text.as_bytes())
                .map_err(|e| InputError::Unreadable { path: path.display().to_string(), reason: e.to_string() })?;
            let name = a.model.clone().unwrap_or_else(|| table.model().to_string());
            (load_model(cfg, &name)?, table)
        }
        None => {
            let model = load_model(cfg, a.model.as_deref().unwrap_or("P2"))?;
            let cutoff = parse_cutoff(&a.cutoff)?;
            let table = solved(cfg, &model, &cutoff, notes)?;
            (model, table)
        }
    };
    let max_insertions = a.max_insertions.unwrap_or_else(|| default_max_insertions(&table, 6));
    close_table(&model, &mut table, a.depth, max_insertions).map_err(|e| match e {
        DescError::GenusUnsupported(_) => Failure::Input(InputError::Invalid(e.to_string())),
        other => Failure::Verify(other.to_string()),
    })?;
    let bounds = SeriesBounds { depth: a.depth, cutoff: table.cutoff().clone(), max_insertions };
    let report = verify_series(&model, &table, &bounds);
    let mut text = format!(
        "series of {} with depth ≤ {}, energy ≤ {}, at most {} insertions\n",
        model.name(),
        a.depth,
        render(&bounds.cutoff),
        max_insertions
    );
    text.push_str(&format!("string equation: {} coefficients checked\n", report.checked_string));
    text.push_str(&format!("dilaton equation: {} coefficients checked\n", report.checked_dilaton));
    text.push_str(&format!("skipped (undetermined): {}\n", report.skipped));
    let described: Vec<String> = report.violations.iter().map(|v| v.describe(&model)).collect();
    for d in &described {
        text.push_str(&format!("  {d}\n"));
    }
    text.push_str(if report.ok() { "result: both equations hold\n" } else { "result: FAILED\n" });
    let rows = report
        .violations
        .iter()
        .zip(&described)
        .map(|(v, d)| vec![format!("{:?}", v.equation).to_lowercase(), v.key.render(&model), d.clone()])
        .collect();
    let json = json!({
        "schema": "qhforge.descendants/1",
        "model": model.name(),
        "depth": a.depth,
        "checked_string": report.checked_string,
        "checked_dilaton": report.checked_dilaton,
        "skipped": report.skipped,
        "violations": described,
        "ok": report.ok(),
    });
    Ok(Artifact { text, json, header: vec!["equation", "key", "detail"], rows, ok: report.ok() })
}

fn load_complex(path: &Path) -> Result<FloerComplex, Failure> {
    let text = read_file(path)?;
    FloerComplex::from_json(&text)
        .map_err(|e| InputError::Unreadable { path: path.display().to_string(), reason: e.to_string() }.into())
}

fn floer_failure(e: FloerError) -> Failure {
    match e {
        FloerError::IncreaseCutoff(..) => InputError::Cutoff(e.to_string()).into(),
        FloerError::MixedBlocks => InputError::Invalid(e.to_string()).into(),
        other => Failure::Verify(other.to_string()),
    }
}

fn floer(action: &FloerAction) -> Result<Artifact, Failure> {
    match action {
        FloerAction::Check { file } => {
            let c = load_complex(file)?;
            let violations: Vec<String> = c.validate().iter().map(|v| v.to_string()).collect();
            let square_zero = c.d_squared_check().map_err(floer_failure)?;
            let mut text = String::new();
            for v in &violations {
                text.push_str(&format!("violation: {v}\n"));
            }
            text.push_str(&format!("δ² = 0: {}\n", if square_zero { "yes" } else { "no" }));
            let ok = violations.is_empty() && square_zero;
            let mut rows: Vec<Vec<String>> = violations.iter().map(|v| vec!["violation".into(), v.clone()]).collect();
            rows.push(vec!["d_squared_zero".into(), square_zero.to_string()]);
            let json = json!({"schema": "qhforge.floer-check/1", "violations": violations, "d_squared_zero": square_zero, "ok": ok});
            Ok(Artifact { text, json, header: vec!["check", "detail"], rows, ok })
        }
        FloerAction::Homology { file } => {
            let c = load_complex(file)?;
            let h = homology_ranks(&c).map_err(floer_failure)?;
            let mut text = format!("{}\n", h.render());
            if !h.certified {
                text.push_str("(ranks certified only up to the cutoff)\n");
            }
            let rows = h.ranks.iter().map(|(k, r)| vec![k.to_string(), r.to_string()]).collect();
            let json = json!({
                "schema": "qhforge.floer-homology/1",
                "ranks": h.ranks.iter().map(|(k, r)| json!({"degree": k, "rank": r})).collect::<Vec<_>>(),
                "certified": h.certified,
            });
            Ok(Artifact { text, json, header: vec!["degree", "rank"], rows, ok: true })
        }
        FloerAction::Arnold { file, betti } => {
            let c = load_complex(file)?;
            let betti = match betti {
                Some(b) => parse_list::<usize>(b, "betti numbers")?,
                None => homology_ranks(&c).map_err(floer_failure)?.ranks.values().copied().collect(),
            };
            let r = arnold_report(&c, &betti).map_err(floer_failure)?;
            let text = format!("{}\n", r.render());
            let rows = vec![
                vec!["generators".into(), r.generators.to_string()],
                vec!["homology_total".into(), r.homology_total.to_string()],
                vec!["betti_total".into(), r.betti_total.to_string()],
            ];
            let json = json!({
                "schema": "qhforge.arnold/1",
                "generators": r.generators,
                "homology_total": r.homology_total,
                "betti_total": r.betti_total,
                "certified": r.certified,
                "ok": r.ok(),
            });
            Ok(Artifact { text, json, header: vec!["quantity", "value"], rows, ok: r.ok() })
        }
    }
}

fn axioms(
    cfg: &RunConfig,
    name: &str,
    cutoff: &str,
    samples: usize,
    seed: u64,
    notes: &mut String,
) -> Result<Artifact, Failure> {
    let model = load_model(cfg, name)?;
    let cutoff = parse_cutoff(cutoff)?;
    let table = solved(cfg, &model, &cutoff, notes)?;
    let report = verify_axioms(&model, &table, &AxiomConfig { samples, seed, ..AxiomConfig::default() });
    let mut text = format!("axiom suites for {} up to energy {}\n", model.name(), render(&cutoff));
    let mut rows = Vec::new();
    let mut suites = Vec::new();
    for (name, checked, failures) in report.lines() {
        let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
        text.push_str(&format!("{verdict} {name}: {checked} checked, {} failed\n", failures.len()));
        for f in &failures {
            text.push_str(&format!("  {f}\n"));
            rows.push(vec![name.clone(), f.clone()]);
        }
        suites.push(json!({"suite": name, "checked": checked, "failures": failures}));
    }
    text.push_str(&format!(
        "note: {} sampled keys are fixed by the divisor axiom alone and have no WDVV cross-check\n",
        report.reduction_divisor_only
    ));
    let json = json!({
        "schema": "qhforge.axioms/1",
        "model": model.name(),
        "cutoff": render(&cutoff),
        "suites": suites,
        "divisor_only": report.reduction_divisor_only,
        "ok": report.ok(),
    });
    Ok(Artifact { text, json, header: vec!["suite", "failure"], rows, ok: report.ok() })
}

fn solve(cfg: &RunConfig, name: &str, cutoff: &str, notes: &mut String) -> Result<Artifact, Failure> {
    let model = load_model(cfg, name)?;
    let cutoff = parse_cutoff(cutoff)?;
    let table = solved(cfg, &model, &cutoff, notes)?;
    let text = table.to_jsonl();
    let rows = table
        .iter()
        .map(|(k, e)| vec![k.class().to_string(), k.render(&model), render(&e.value), e.provenance.to_string()])
        .collect();
    let entries: Vec<Value> = table
        .iter()
        .map(|(k, e)| json!({"key": k.render(&model), "value": render(&e.value), "provenance": e.provenance.to_string()}))
        .collect();
    let json = json!({"schema": "qhforge.solve/1", "model": model.name(), "cutoff": render(&cutoff), "entries": entries});
    Ok(Artifact { text, json, header: vec!["A", "key", "value", "provenance"], rows, ok: true })
}
