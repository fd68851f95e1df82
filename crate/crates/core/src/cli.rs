//! The `etale-kit` command-line surface.
//!
//! Exit codes: 0 success, 1 parse or I/O error, 2 hypothesis or validation
//! failure, 3 internal inconsistency.

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use crate::algebra::{left_regular, operator_norm};
use crate::autgroup::{enumerate_semidirect, faut_test, generating_set, pair_from_automorphism, AutPair};
use crate::cocycle::Cocycle;
use crate::decomposition::{decompose, phi_via_germs, quotient_star_hom, rigidity_check, validate_hom, HomMatrix};
use crate::families::{make_family, FamilySpec};
use crate::groupoid::{validate, FiniteGroupoid, DEFAULT_CAP, LINEAR_CAP};
use crate::hom::enumerate_automorphisms;
use crate::io::{self, load_element, load_groupoid, load_hom, GermDocument, GroupoidDocument, HomDocument, Meta};
use crate::phase::Phase;
use crate::report::{digest, round12, sig12, Report};
use crate::selftest::run_selftest;
use crate::semigroup::{canonical_iso, enumerate_bisections};

/// Environment variable overriding the default arrow cap.
pub const CAP_ENV: &str = "ETALE_KIT_CAP";

#[derive(Debug, Parser)]
#[command(name = "etale-kit", version, about = "Finite étale groupoids and their reduced C*-algebras")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Arrow cap for enumerations (default 16, or 64 for linear algebra only).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the groupoid axioms and list every violation.
    Validate { path: String },
    /// Isotropy, effectiveness, orbits, invariant subsets and the quotient.
    Analyze { path: String },
    /// Enumerate bisections and verify Bis(G)⋉G⁽⁰⁾ ≅ G.
    Bisections {
        path: String,
        /// Include the germ groupoid with its representatives.
        #[arg(long)]
        germs: bool,
    },
    /// Reduced norm of an algebra element.
    Norm { groupoid: String, element: String },
    /// Recover (F, Phi, c) from a homomorphism matrix.
    Decompose {
        #[arg(long)]
        hom: String,
        /// Cross-check Phi through bisections and germ groupoids.
        #[arg(long)]
        germs: bool,
    },
    /// The quotient by the isotropy interior and the fibre-summing map.
    Quotient { path: String },
    /// Build the isomorphism H ≅ G_F/Iso(G_F)° for a surjective homomorphism.
    Rigidity {
        #[arg(long)]
        hom: String,
    },
    /// Orders and generators of Aut(G)⋉Z(G,μ_N).
    Aut {
        path: String,
        /// Order N of the roots of unity used for cocycles.
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Read off (Phi, c) from a diagonal-preserving automorphism.
    Faut {
        #[arg(long)]
        hom: String,
    },
    /// Run the seeded property suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the document of a standard family, e.g. '{"family":"pair","params":2}'.
    Make { spec: String },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
    report: Option<Box<Report>>,
}

impl Failure {
    fn new(code: i32, message: impl std::fmt::Display) -> Failure {
        Failure { code, message: message.to_string(), report: None }
    }

    fn with_report(code: i32, message: impl std::fmt::Display, report: Report) -> Failure {
        Failure { code, message: message.to_string(), report: Some(Box::new(report)) }
    }
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Failure {
        Failure::new(e.exit_code(), e)
    }
}

struct Ctx {
    cap: Option<usize>,
}

impl Ctx {
    fn cap(&self, default: usize) -> usize {
        self.cap.or_else(|| std::env::var(CAP_ENV).ok().and_then(|v| v.parse().ok())).unwrap_or(default)
    }

    fn check(&self, g: &FiniteGroupoid, default: usize) -> Result<usize, Failure> {
        let cap = self.cap(default);
        if g.arrow_count() > cap {
            return Err(Failure::new(2, format!("groupoid has {} arrows, above the cap {cap}", g.arrow_count())));
        }
        Ok(cap)
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run_command<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 1, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let ctx = Ctx { cap: cli.cap };
    let start = Instant::now();
    let render = |mut r: Report| {
        if cli.timing {
            r.timing_ms = Some(round12(start.elapsed().as_secs_f64() * 1e3));
        }
        if cli.json {
            r.to_json()
        } else {
            r.to_text()
        }
    };
    match dispatch(&cli.command, &ctx) {
        Ok(Output::Report(report, code)) => Outcome { code, stdout: render(report), stderr: String::new() },
        Ok(Output::Raw(text)) => Outcome { code: 0, stdout: text, stderr: String::new() },
        Err(f) => Outcome {
            code: f.code,
            stdout: f.report.map(|r| render(*r)).unwrap_or_default(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

enum Output {
    Report(Report, i32),
    Raw(String),
}

fn dispatch(command: &Command, ctx: &Ctx) -> Result<Output, Failure> {
    match command {
        Command::Validate { path } => cmd_validate(path),
        Command::Analyze { path } => cmd_analyze(path, ctx),
        Command::Bisections { path, germs } => cmd_bisections(path, *germs, ctx),
        Command::Norm { groupoid, element } => cmd_norm(groupoid, element, ctx),
        Command::Decompose { hom, germs } => cmd_decompose(hom, *germs, ctx),
        Command::Quotient { path } => cmd_quotient(path, ctx),
        Command::Rigidity { hom } => cmd_rigidity(hom, ctx),
        Command::Aut { path, order } => cmd_aut(path, *order, ctx),
        Command::Faut { hom } => cmd_faut(hom, ctx),
        Command::Selftest { seed } => {
            let report = run_selftest(*seed, ctx.cap(DEFAULT_CAP));
            let code = if report.passed() { 0 } else { 3 };
            Ok(Output::Report(report, code))
        }
        Command::Make { spec } => {
            let parsed: FamilySpec = serde_json::from_str(spec).map_err(|e| Failure::new(1, e))?;
            let g = make_family(&parsed).map_err(|e| Failure::new(2, e))?;
            let family = serde_json::to_value(&parsed).expect("serializable");
            let meta = Meta {
                name: None,
                family: family.get("family").and_then(Value::as_str).map(str::to_string),
                params: family.get("params").cloned(),
            };
            Ok(Output::Raw(GroupoidDocument::from_groupoid(&g, Some(meta)).to_json()))
        }
    }
}

fn load(path: &str) -> Result<(String, Arc<FiniteGroupoid>), Failure> {
    let text = io::read_input(path)?;
    let (_, g) = load_groupoid(&text)?;
    Ok((text, g))
}

fn load_hom_file(path: &str) -> Result<(String, HomMatrix), Failure> {
    let text = io::read_input(path)?;
    let base = if path == "-" { None } else { Path::new(path).parent() };
    let m = load_hom(&text, base)?;
    Ok((text, m))
}

fn phases(values: impl IntoIterator<Item = Phase>) -> Value {
    json!(values.into_iter().map(|p| p.to_string()).collect::<Vec<_>>())
}

fn cmd_validate(path: &str) -> Result<Output, Failure> {
    let text = io::read_input(path)?;
    let doc = GroupoidDocument::parse(&text)?;
    let mut report = Report::new("validate", digest(&[text.as_bytes()]));
    match validate(&doc.tables) {
        Err(e) => {
            report.check("structure", false, json!(e.to_string()));
            Ok(Output::Report(report, 2))
        }
        Ok(v) => {
            report.check("structure", true, Value::Null);
            for axiom in 1..=5u8 {
                let hits: Vec<&_> = v.violations.iter().filter(|x| x.axiom() == axiom).collect();
                let witness = if hits.is_empty() { Value::Null } else { json!(hits) };
                report.check(format!("axiom ({axiom})"), hits.is_empty(), witness);
            }
            report.result =
                json!({ "arrows": doc.tables.arrows, "units": doc.tables.units.len(), "violations": v.violations });
            let code = if v.passed() { 0 } else { 2 };
            Ok(Output::Report(report, code))
        }
    }
}

fn cmd_analyze(path: &str, ctx: &Ctx) -> Result<Output, Failure> {
    let (text, g) = load(path)?;
    let cap = ctx.check(&g, LINEAR_CAP)?;
    let mut report = Report::new("analyze", digest(&[text.as_bytes()]));
    let effective = g.is_effective();
    let principal = g.is_topologically_principal();
    report.check("effective iff topologically principal", effective == principal, Value::Null);
    let invariant = g
        .invariant_subsets(ctx.cap(DEFAULT_CAP))
        .map(|sets| json!(sets.iter().map(|s| s.members().to_vec()).collect::<Vec<_>>()))
        .unwrap_or_else(|e| json!(e.to_string()));
    let q = g.quotient_by_iso_interior();
    report.check("quotient is effective", q.groupoid.is_effective(), Value::Null);
    report.result = json!({
        "arrows": g.arrow_count(),
        "units": g.units(),
        "isotropy_interior": g.isotropy_interior(),
        "effective": effective,
        "topologically_principal": principal,
        "orbits": g.orbits(),
        "invariant_subsets": invariant,
        "quotient_arrows": q.groupoid.arrow_count(),
        "cap": cap,
    });
    Ok(Output::Report(report, 0))
}

fn cmd_bisections(path: &str, germs: bool, ctx: &Ctx) -> Result<Output, Failure> {
    let (text, g) = load(path)?;
    let cap = ctx.check(&g, DEFAULT_CAP)?;
    let mut report = Report::new("bisections", digest(&[text.as_bytes()]));
    let bis = enumerate_bisections(&g, cap).map_err(|e| Failure::new(2, e))?;
    let semigroup_ok = bis.semigroup().check();
    report.check(
        "inverse semigroup",
        semigroup_ok.is_ok(),
        semigroup_ok.err().map_or(Value::Null, |e| json!(e.to_string())),
    );
    let idempotents_ok =
        bis.semigroup().idempotents().iter().all(|&e| bis.get(e).arrows().iter().all(|&a| g.is_unit(a)));
    report.check("idempotents are unit bisections", idempotents_ok, Value::Null);
    let iso = canonical_iso(&g, cap);
    report.check("canonical iso", iso.is_ok(), iso.as_ref().err().map_or(Value::Null, |e| json!(e.to_string())));
    let mut result = json!({
        "count": bis.len(),
        "bisections": bis.bisections().iter().map(|u| u.arrows().to_vec()).collect::<Vec<_>>(),
    });
    if let (true, Ok(iso)) = (germs, &iso) {
        result["germs"] = serde_json::to_value(GermDocument::new(&iso.germs)).expect("serializable");
    }
    report.result = result;
    let code = if report.passed() { 0 } else { 3 };
    Ok(Output::Report(report, code))
}

fn cmd_norm(groupoid: &str, element: &str, ctx: &Ctx) -> Result<Output, Failure> {
    let (gtext, g) = load(groupoid)?;
    ctx.check(&g, LINEAR_CAP)?;
    let etext = io::read_input(element)?;
    let f = load_element(&etext, &g)?;
    let mut report = Report::new("norm", digest(&[gtext.as_bytes(), etext.as_bytes()]));
    let per_unit: Vec<Value> = g
        .units()
        .iter()
        .map(|&x| json!({ "unit": x, "norm": sig12(operator_norm(&left_regular(&g, x).expect("unit").rep(&f))) }))
        .collect();
    let norm = f.reduced_norm();
    let cstar = f.star().convolve(&f).expect("same groupoid").reduced_norm();
    let err = (cstar - norm * norm).abs();
    report.check("C*-identity", err <= 1e-9 * norm.powi(2).max(1.0), json!({ "error": sig12(err) }));
    report.result =
        json!({ "norm": sig12(norm), "per_unit": per_unit, "normalizer": crate::algebra::is_normalizer(&f) });
    Ok(Output::Report(report, 0))
}

fn hom_checks(report: &mut Report, m: &HomMatrix) {
    for (name, check) in validate_hom(m).checks() {
        report.check(name, check.pass, check.witness.as_ref().map_or(Value::Null, |w| json!(w.to_string())));
    }
}

fn cmd_decompose(path: &str, germs: bool, ctx: &Ctx) -> Result<Output, Failure> {
    let (text, m) = load_hom_file(path)?;
    ctx.check(m.source(), LINEAR_CAP)?;
    ctx.check(m.target(), LINEAR_CAP)?;
    let mut report = Report::new("decompose", digest(&[text.as_bytes()]));
    report.check("target effective", m.target().is_effective(), Value::Null);
    hom_checks(&mut report, &m);
    let data = decompose(&m).map_err(|e| Failure::with_report(e.exit_code(), &e, report.clone()))?;
    report.check("roundtrip", true, Value::Null);
    if germs {
        let cap = ctx.cap(DEFAULT_CAP);
        let via = phi_via_germs(&m, &data, cap).map_err(|e| Failure::with_report(e.exit_code(), &e, report.clone()))?;
        let agree = via.map() == data.phi().map();
        report.check("germ route agrees", agree, Value::Null);
        if !agree {
            return Err(Failure::with_report(3, "germ route disagrees with the direct recovery", report));
        }
    }
    report.result = json!({
        "F": data.f().members(),
        "sigma": data.sigma(),
        "Phi": data.phi_table(),
        "c": data.cocycle_table().into_iter().map(|(a, p)| json!([a, p.to_string()])).collect::<Vec<_>>(),
    });
    Ok(Output::Report(report, 0))
}

fn cmd_quotient(path: &str, ctx: &Ctx) -> Result<Output, Failure> {
    let (text, g) = load(path)?;
    ctx.check(&g, LINEAR_CAP)?;
    let mut report = Report::new("quotient", digest(&[text.as_bytes()]));
    let (q, m) = quotient_star_hom(&g);
    report.check("quotient is effective", q.groupoid.is_effective(), Value::Null);
    hom_checks(&mut report, &m);
    let rank = m.rank();
    report.check("surjective", rank == q.groupoid.arrow_count(), json!({ "rank": rank }));
    report.result = json!({
        "Q": q.map.map(),
        "quotient": serde_json::to_value(GroupoidDocument::from_groupoid(&q.groupoid, None)).expect("serializable"),
        "hom": serde_json::to_value(HomDocument::new(&m)).expect("serializable"),
    });
    let code = if report.passed() { 0 } else { 3 };
    Ok(Output::Report(report, code))
}

fn cmd_rigidity(path: &str, ctx: &Ctx) -> Result<Output, Failure> {
    let (text, m) = load_hom_file(path)?;
    ctx.check(m.source(), LINEAR_CAP)?;
    ctx.check(m.target(), LINEAR_CAP)?;
    let mut report = Report::new("rigidity", digest(&[text.as_bytes()]));
    hom_checks(&mut report, &m);
    let cert = rigidity_check(&m).map_err(|e| Failure::with_report(e.exit_code(), &e, report.clone()))?;
    report.check("isomorphism", cert.iso.check_bijective().is_ok(), Value::Null);
    report.result = json!({
        "F": cert.data.f().members(),
        "quotient_arrows": cert.quotient.groupoid.arrow_count(),
        "iso": cert.iso.map(),
    });
    Ok(Output::Report(report, 0))
}

fn pair_json(p: &AutPair) -> Value {
    json!({ "Phi": p.phi().map(), "c": phases(p.cocycle().values().iter().copied()) })
}

fn cmd_aut(path: &str, order: u32, ctx: &Ctx) -> Result<Output, Failure> {
    if order == 0 {
        return Err(Failure::new(1, "--order must be at least 1"));
    }
    let (text, g) = load(path)?;
    let cap = ctx.check(&g, DEFAULT_CAP)?;
    let mut report = Report::new("aut", digest(&[text.as_bytes(), order.to_string().as_bytes()]));
    let auts = enumerate_automorphisms(&g, cap).map_err(|e| Failure::new(2, e))?;
    let cocycles: Vec<Cocycle> = crate::cocycle::enumerate_cocycles(&g, order, cap).map_err(|e| Failure::new(2, e))?;
    let elements = enumerate_semidirect(&g, order, cap).map_err(|e| Failure::new(e.exit_code(), e))?;
    report.check("order is |Aut|·|Z|", elements.len() == auts.len() * cocycles.len(), Value::Null);
    let faut = elements.iter().filter(|p| faut_test(p)).count();
    if g.is_topologically_principal() {
        report.check("FAut ≅ Z(G,μ_N)", faut == cocycles.len(), json!({ "diagonal_fixing": faut }));
    }
    let gens = generating_set(&elements);
    report.result = json!({
        "aut_order": auts.len(),
        "cocycle_order": cocycles.len(),
        "semidirect_order": elements.len(),
        "generators": gens.iter().map(|&i| pair_json(&elements[i])).collect::<Vec<_>>(),
    });
    let code = if report.passed() { 0 } else { 3 };
    Ok(Output::Report(report, code))
}

fn cmd_faut(path: &str, ctx: &Ctx) -> Result<Output, Failure> {
    let (text, m) = load_hom_file(path)?;
    ctx.check(m.source(), LINEAR_CAP)?;
    let mut report = Report::new("faut", digest(&[text.as_bytes()]));
    hom_checks(&mut report, &m);
    let pair = pair_from_automorphism(&m).map_err(|e| Failure::with_report(e.exit_code(), &e, report.clone()))?;
    let fixes = faut_test(&pair);
    report.check("fixes the diagonal", fixes, Value::Null);
    let mut result = pair_json(&pair);
    result["principal"] = json!(m.source().is_topologically_principal());
    result["Phi_is_identity"] = json!(pair.phi().is_identity());
    report.result = result;
    Ok(Output::Report(report, if fixes { 0 } else { 2 }))
}
