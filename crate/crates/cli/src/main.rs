//! `conetrans` command-line front end.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 input error, 3 internal
//! consistency failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conetrans::geometry::{gleason_equiv, harnack_equiv};
use conetrans::instance::{gelfand_embed, load_instance, Instance, InstanceError};
use conetrans::oracle::{gen_ordered, gen_unordered, property_suite, ConeKind, GenSpec, Mutation, OracleError};
use conetrans::paving::{compute_paving, plot_data, PavingError};
use conetrans::polar::{is_polar, PairSet, PolarError};
use conetrans::rational::format_rational;
use conetrans::transport::{
    check_order, check_plan, maximal_kernel, probe_support, LpOptions, OrderVerdict, PlanDocument, TransportError,
    TransportPlan, Witness,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "conetrans", version, about = "Exact cone-constrained transports between finite measures")]
struct Cli {
    /// Write the payload here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the order: a transport plan (exit 0) or a separating witness (exit 1).
    CheckOrder { instance: PathBuf },
    /// Pairs that some transport charges.
    Transport { instance: PathBuf },
    /// A plan whose kernel supports contain those of every transport.
    Maximal { instance: PathBuf },
    /// Partition the sources into irreducible components.
    Paving {
        instance: PathBuf,
        /// Add convex polygons of each component (two-dimensional coordinates only).
        #[arg(long)]
        emit_plot: bool,
    },
    /// Largest mass a transport puts on a set of pairs.
    Polar {
        instance: PathBuf,
        /// JSON list of [source_label, target_label] pairs.
        pairs: PathBuf,
        /// Allow any coupling, not only transports.
        #[arg(long)]
        unconstrained: bool,
    },
    /// Compare two points' faces in the embedded point set (exit 1 when they differ).
    Gleason {
        instance: PathBuf,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Check a plan document against an instance (exit 1 when it is not a transport).
    VerifyPlan { instance: PathBuf, plan: PathBuf },
    /// Generate a seeded instance.
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value = "martingale")]
        cone: String,
        #[arg(long, default_value_t = 2)]
        splits: usize,
        /// Perturb the target so the instance is not ordered.
        #[arg(long)]
        unordered: bool,
        /// Also write the construction plan here.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Run the property suite on generated instances.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, hide = true)]
        mutate: bool,
    },
}

struct Payload {
    code: u8,
    json: Value,
    text: String,
}

impl Payload {
    fn new(code: u8, json: Value, text: String) -> Self {
        Payload { code, json, text }
    }
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn instance(path: &Path) -> Result<Instance, Failure> {
    load_instance(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

fn plan_text(inst: &Instance, plan: &TransportPlan) -> String {
    let mut s = String::new();
    for (i, row) in plan.pi.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(format_rational).collect();
        let _ = writeln!(s, "  {:>8} | {}", inst.label(i), cells.join(" "));
    }
    s
}

fn witness_payload(inst: &Instance, w: &Witness) -> Payload {
    let mut text = format!("not ordered: gap {}\n", format_rational(&w.gap));
    for b in &w.branches {
        let theta: Vec<String> = b.theta.iter().map(format_rational).collect();
        let _ = writeln!(text, "  branch {} + [{}]", format_rational(&b.constant), theta.join(", "));
    }
    let values: Vec<String> = (0..inst.n())
        .map(|j| format!("{}={}", inst.label(j), format_rational(&w.values[j])))
        .collect();
    let _ = writeln!(text, "  values {}", values.join(" "));
    Payload::new(1, json!({ "verdict": "not-ordered", "witness": to_value(w) }), text)
}

fn transport_failure(inst: &Instance, e: TransportError) -> Result<Payload, Failure> {
    match e {
        TransportError::NotOrdered(w) => Ok(witness_payload(inst, &w)),
        other => Err(internal(other)),
    }
}

fn cmd_check_order(path: &Path) -> Result<Payload, Failure> {
    let inst = instance(path)?;
    Ok(match check_order(&inst) {
        OrderVerdict::Ordered(plan) => {
            let text = format!("ordered\n{}", plan_text(&inst, &plan));
            Payload::new(0, json!({ "verdict": "ordered", "plan": to_value(&plan.to_document(&inst)) }), text)
        }
        OrderVerdict::NotOrdered(w) => witness_payload(&inst, &w),
    })
}

fn label_pairs(inst: &Instance, mask: &[Vec<bool>]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (i, row) in mask.iter().enumerate() {
        for (j, &on) in row.iter().enumerate() {
            if on {
                out.push((inst.label(i).to_string(), inst.label(j).to_string()));
            }
        }
    }
    out
}

fn cmd_transport(path: &Path) -> Result<Payload, Failure> {
    let inst = instance(path)?;
    let probe = match probe_support(&inst, LpOptions::default()) {
        Ok(p) => p,
        Err(e) => return transport_failure(&inst, e),
    };
    let pairs = label_pairs(&inst, &probe.mask);
    let mut text = format!("joint support ({} pairs, {} LPs)\n", pairs.len(), probe.lp_count);
    for (a, b) in &pairs {
        let _ = writeln!(text, "  {a} -> {b}");
    }
    Ok(Payload::new(0, json!({ "support": pairs, "lp_count": probe.lp_count }), text))
}

fn cmd_maximal(path: &Path) -> Result<Payload, Failure> {
    let inst = instance(path)?;
    let (plan, kernel) = match maximal_kernel(&inst) {
        Ok(x) => x,
        Err(e) => return transport_failure(&inst, e),
    };
    let mut supports = Vec::new();
    let mut text = format!("maximal plan\n{}", plan_text(&inst, &plan));
    for i in inst.sources() {
        let s: Vec<String> = kernel.support(i).map_err(internal)?.iter().map(|&j| inst.label(j).to_string()).collect();
        let _ = writeln!(text, "  S({}) = {{{}}}", inst.label(i), s.join(", "));
        supports.push(json!({ "source": inst.label(i), "support": s }));
    }
    Ok(Payload::new(0, json!({ "plan": to_value(&plan.to_document(&inst)), "supports": supports }), text))
}

fn cmd_paving(path: &Path, emit_plot: bool) -> Result<Payload, Failure> {
    let inst = instance(path)?;
    let paving = match compute_paving(&inst) {
        Ok(p) => p,
        Err(PavingError::Transport(e)) => return transport_failure(&inst, e),
        // partition violations land here too
        Err(e) => return Err(internal(e)),
    };
    let mut doc = paving.to_document(&inst);
    if emit_plot {
        doc.plot = plot_data(&inst, &paving);
        if doc.plot.is_none() {
            eprintln!("warning: --emit-plot needs two-dimensional coordinates; paving emitted without plot data");
        }
    }
    let mut text = format!("{} classes\n", doc.components.len());
    for c in &doc.components {
        let _ = writeln!(
            text,
            "  class {}: members {{{}}}, support {{{}}}, dim {}",
            c.class_id,
            c.members.join(", "),
            c.support.join(", "),
            c.dim
        );
    }
    Ok(Payload::new(0, to_value(&doc), text))
}

fn cmd_polar(path: &Path, pairs: &Path, unconstrained: bool) -> Result<Payload, Failure> {
    let inst = instance(path)?;
    let listed: Vec<(String, String)> = serde_json::from_str(&read(pairs)?)
        .map_err(|e| Failure::Input(format!("{}: expected a list of [source, target] labels: {e}", pairs.display())))?;
    let u = PairSet::from_labels(&inst, &listed).map_err(|e| Failure::Input(e.to_string()))?;
    let verdict = is_polar(&inst, &u, !unconstrained).map_err(|e| match e {
        PolarError::Instance(_) | PolarError::Index(..) => Failure::Input(e.to_string()),
        other => internal(other),
    })?;
    let doc = verdict.to_document(&inst);
    let mut text = format!("{}: max mass {}\n", doc.tag, format_rational(&doc.max_mass));
    if let Some(d) = &doc.decomposition {
        let _ = writeln!(text, "  null sources {{{}}}, null targets {{{}}}", d.n1.join(", "), d.n2.join(", "));
    }
    Ok(Payload::new(if verdict.is_polar() { 0 } else { 1 }, to_value(&doc), text))
}

fn cmd_gleason(path: &Path, a: &str, b: &str) -> Result<Payload, Failure> {
    let inst = instance(path)?;
    let pts = gelfand_embed(&inst);
    let (ia, ib) = (inst.index_of(a)?, inst.index_of(b)?);
    let h = harnack_equiv(&pts[ia], &pts[ib], &pts).map_err(internal)?;
    let g = gleason_equiv(&pts[ia], &pts[ib], &pts).map_err(internal)?;
    if h != g {
        return Err(Failure::Internal(format!("harnack test says {h}, face test says {g}")));
    }
    let text = format!("{a} and {b} {} the same face\n", if g { "share" } else { "do not share" });
    Ok(Payload::new(u8::from(!g), json!({ "a": a, "b": b, "equivalent": g }), text))
}

fn cmd_verify_plan(path: &Path, plan: &Path) -> Result<Payload, Failure> {
    let inst = instance(path)?;
    let doc: PlanDocument = serde_json::from_str(&read(plan)?).map_err(|e| Failure::Input(format!("{}: {e}", plan.display())))?;
    let plan = TransportPlan::from_document(&inst, doc).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(match check_plan(&inst, &plan) {
        Ok(()) => Payload::new(0, json!({ "valid": true }), "valid transport plan\n".into()),
        Err(v) => Payload::new(1, json!({ "valid": false, "violation": v.to_string() }), format!("invalid: {v}\n")),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    seed: u64,
    n: usize,
    d: usize,
    cone: &str,
    splits: usize,
    unordered: bool,
    plan_out: Option<&Path>,
) -> Result<Payload, Failure> {
    if n == 0 || d == 0 {
        return Err(Failure::Input("n and d must be at least 1".into()));
    }
    let cone = ConeKind::parse(cone).ok_or_else(|| Failure::Input(format!("unknown cone {cone:?}")))?;
    let spec = GenSpec { seed, n, d, cone, splits };
    let inst = if unordered {
        gen_unordered(&spec).map_err(|e| match e {
            OracleError::NoPerturbation => Failure::Input(e.to_string()),
            other => internal(other),
        })?
    } else {
        let g = gen_ordered(&spec);
        if let Some(p) = plan_out {
            write_atomic(p, &pretty(&to_value(&g.plan.to_document(&g.instance))))?;
        }
        g.instance
    };
    let doc = to_value(&inst.to_document());
    let text = pretty(&doc);
    Ok(Payload::new(0, doc, text))
}

fn cmd_verify(seed: u64, count: usize, mutate: bool) -> Payload {
    let report = property_suite(seed, count, mutate.then_some(Mutation::SkipGenerator));
    Payload::new(u8::from(!report.passed()), to_value(&report), report.to_string())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn write_atomic(path: &Path, body: &str) -> Result<(), Failure> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, body)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Payload, Failure> {
    match &cli.command {
        Command::CheckOrder { instance } => cmd_check_order(instance),
        Command::Transport { instance } => cmd_transport(instance),
        Command::Maximal { instance } => cmd_maximal(instance),
        Command::Paving { instance, emit_plot } => cmd_paving(instance, *emit_plot),
        Command::Polar { instance, pairs, unconstrained } => cmd_polar(instance, pairs, *unconstrained),
        Command::Gleason { instance, a, b } => cmd_gleason(instance, a, b),
        Command::VerifyPlan { instance, plan } => cmd_verify_plan(instance, plan),
        Command::Gen { seed, n, d, cone, splits, unordered, plan } => {
            cmd_gen(*seed, *n, *d, cone, *splits, *unordered, plan.as_deref())
        }
        Command::Verify { seed, count, mutate } => Ok(cmd_verify(*seed, *count, *mutate)),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let payload = match run(&cli) {
        Ok(p) => p,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            return ExitCode::from(3);
        }
    };
    let body = match cli.format {
        Format::Json => pretty(&payload.json),
        Format::Text => payload.text,
    };
    match &cli.out {
        Some(path) => {
            if let Err(Failure::Input(msg) | Failure::Internal(msg)) = write_atomic(path, &body) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(payload.code)
}
