//! Command-line interface: `list`, `compute`, `check`, `sample` and `audit`.

use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classify::{
    check_on_family, sample_necessity, verify_paper_theorems, CaseId, ClassifyError, PolySystem, SolutionFamily,
    Status, Structure, Verdict,
};
use crate::connection::{ConnectionKind, DerivedConstants};
use crate::liealg::{Eta, Family, FamilyDescription, LieAlgebra};
use crate::poly::{Polynomial, Style};
use crate::tensorcalc::{Geometry, ObjectKind};

/// Default master seed when neither `--seed` nor `LIECODAZZI_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;

/// Exit code for success or a holding condition.
pub const EXIT_OK: i32 = 0;
/// Exit code for nonzero residuals or discrepancies with the printed results.
pub const EXIT_RESIDUALS: i32 = 1;
/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for sampler starvation.
pub const EXIT_STARVATION: i32 = 3;

const PARAMS_HELP: &str = "\
Parameters are written with ASCII names: a = alpha (α), b = beta (β), g = gamma (γ), d = delta (δ).
Named constants eta, m1, m2, m3, n1, n2, n3 may also appear in solution text.

Exit codes: 0 success or holds, 1 residuals or discrepancy, 2 usage error, 3 sampler starvation.
The LIECODAZZI_SEED environment variable replaces the default seed (42).";

#[derive(Parser, Debug)]
#[command(
    name = "liecodazzi",
    version,
    about = "Exact Codazzi and quasi-statistical computations on 3-dimensional Lorentzian Lie groups",
    after_help = PARAMS_HELP
)]
struct Cli {
    /// Force ASCII output even on a UTF-8 terminal.
    #[arg(long, global = true)]
    ascii: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the seven Lie algebra families with brackets and constraints.
    #[command(after_help = PARAMS_HELP)]
    List {
        /// Show a single family (G4 shows both eta branches).
        #[arg(long, alias = "group")]
        family: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Print a symbolic table: connection, curvature, ricci, ricci-sym, torsion or nabla-ricci-sym.
    #[command(after_help = PARAMS_HELP)]
    Compute {
        #[command(flatten)]
        target: Target,
        /// Object to compute.
        #[arg(long)]
        object: String,
        #[command(flatten)]
        output: Output,
    },
    /// Print the nine-entry system, or check it on a solution family.
    #[command(after_help = PARAMS_HELP)]
    Check {
        #[command(flatten)]
        target: Target,
        /// codazzi or quasistat.
        #[arg(long)]
        structure: String,
        /// Solution family, e.g. "a=0,b=0" or "a=2*b, g!=0".
        #[arg(long)]
        solution: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Sample admissible points and evaluate the system exactly.
    #[command(after_help = PARAMS_HELP)]
    Sample {
        #[command(flatten)]
        target: Target,
        /// codazzi or quasistat.
        #[arg(long)]
        structure: String,
        /// Family to exclude from sampling; repeat the flag or separate families with `;`.
        #[arg(long)]
        exclude: Vec<String>,
        /// Number of sampled points (at least 1).
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Random seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Audit all 42 classification theorems and the printed tables.
    #[command(after_help = PARAMS_HELP)]
    Audit {
        /// Sampled points per case.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Family G1..G7.
    #[arg(long, alias = "family")]
    group: String,
    /// Sign for G4: +1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// levi-civita, bott, canonical or kn.
    #[arg(long)]
    connection: String,
}

#[derive(Args, Debug)]
struct Output {
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Also write the JSON output to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Terminal-facing settings resolved from the environment.
#[derive(Clone, Copy, Debug)]
pub struct Environment {
    /// Human output style.
    pub style: Style,
    /// Seed used when `--seed` is absent.
    pub default_seed: u64,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let unicode = stdout.is_terminal() && locale_is_utf8();
    let default_seed = match std::env::var("LIECODAZZI_SEED") {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                let _ = writeln!(stderr.lock(), "error: LIECODAZZI_SEED must be a non-negative integer, got `{v}`");
                return EXIT_USAGE;
            }
        },
        Err(_) => DEFAULT_SEED,
    };
    let env = Environment { style: if unicode { Style::Unicode } else { Style::Ascii }, default_seed };
    run_with(args, env, &mut stdout.lock(), &mut stderr.lock())
}

fn locale_is_utf8() -> bool {
    ["LC_ALL", "LC_CTYPE", "LANG"]
        .iter()
        .filter_map(|k| std::env::var(k).ok())
        .find(|v| !v.is_empty())
        .map(|v| {
            let v = v.to_ascii_lowercase();
            v.contains("utf-8") || v.contains("utf8")
        })
        .unwrap_or(false)
}

/// Runs with explicit output streams and environment.
pub fn run_with<I, T>(args: I, env: Environment, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let style = if cli.ascii { Style::Ascii } else { env.style };
    match execute(cli.command, style, env.default_seed, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cmd: Command, style: Style, default_seed: u64, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::List { family, output } => cmd_list(family, output, style, out),
        Command::Compute { target, object, output } => cmd_compute(target, object, output, style, out),
        Command::Check { target, structure, solution, output } => {
            cmd_check(target, structure, solution, output, style, out)
        }
        Command::Sample { target, structure, exclude, trials, seed, output } => {
            cmd_sample(target, structure, exclude, trials, seed.unwrap_or(default_seed), output, style, out)
        }
        Command::Audit { trials, seed, output } => cmd_audit(trials, seed.unwrap_or(default_seed), output, style, out),
    }
}

fn emit<T: Serialize>(
    value: &T,
    text: impl FnOnce() -> String,
    output: &Output,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(value).expect("output serializes");
    if let Some(path) = &output.out {
        std::fs::write(path, format!("{json}\n"))
            .map_err(|e| usage(format!("cannot write `{}`: {e}", path.display())))?;
    }
    let body = if output.json { format!("{json}\n") } else { text() };
    out.write_all(body.as_bytes()).map_err(|e| Failure { code: EXIT_USAGE, message: e.to_string() })
}

struct Resolved {
    family: Family,
    eta: Option<Eta>,
    connection: ConnectionKind,
    algebra: LieAlgebra,
}

fn resolve(t: &Target) -> Result<Resolved, Failure> {
    let family: Family = t.group.parse().map_err(|e: crate::liealg::LieError| usage(e.to_string()))?;
    let eta = match &t.eta {
        Some(s) => Some(s.parse::<Eta>().map_err(|e| usage(e.to_string()))?),
        None => None,
    };
    let connection: ConnectionKind =
        t.connection.parse().map_err(|e: crate::connection::UnknownConnection| usage(e.to_string()))?;
    let algebra = LieAlgebra::make_group(family, eta, None).map_err(|e| usage(e.to_string()))?;
    Ok(Resolved { family, eta, connection, algebra })
}

fn structure_of(s: &str) -> Result<Structure, Failure> {
    s.parse().map_err(|e: crate::classify::UnknownStructure| usage(e.to_string()))
}

fn audited(r: &Resolved) -> Result<(), Failure> {
    if r.connection == ConnectionKind::LeviCivita {
        return Err(usage("systems are defined for the bott, canonical and kn connections"));
    }
    Ok(())
}

fn header(r: &Resolved, style: Style) -> String {
    let eta = r.eta.map(|e| format!(", {}={e}", if style == Style::Unicode { "η" } else { "eta" })).unwrap_or_default();
    format!("{}{eta}, {} connection\n", r.family, r.connection)
}

fn long_names(text: &str, style: Style) -> String {
    if style == Style::Unicode {
        return text.replace("!=", "≠");
    }
    let mut s = String::new();
    let mut prev_alpha = false;
    let chars: Vec<char> = text.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        let next_alpha = chars.get(i + 1).map(|n| n.is_ascii_alphanumeric()).unwrap_or(false);
        let word = match c {
            'a' => Some("alpha"),
            'b' => Some("beta"),
            'g' => Some("gamma"),
            'd' => Some("delta"),
            _ => None,
        };
        match word {
            Some(w) if !prev_alpha && !next_alpha => s.push_str(w),
            _ => s.push(c),
        }
        prev_alpha = c.is_ascii_alphanumeric();
    }
    s
}

fn eta_linear(plus: &Polynomial, minus: &Polynomial) -> String {
    if plus == minus {
        return plus.to_string();
    }
    let half = crate::poly::rat(1, 2);
    let s = (plus + minus).scale(&half);
    let d = (plus - minus).scale(&half);
    let eta = if d == Polynomial::one() {
        "eta".to_string()
    } else if d == -Polynomial::one() {
        "-eta".to_string()
    } else if d.is_constant() {
        format!("{d}*eta")
    } else {
        format!("({d})*eta")
    };
    if s.is_zero() {
        eta
    } else {
        let st = s.to_string();
        if st.starts_with('-') {
            format!("{eta}{st}")
        } else {
            format!("{eta}+{st}")
        }
    }
}

fn g4_symbolic() -> FamilyDescription {
    let p = LieAlgebra::make_group(Family::G4, Some(Eta::Plus), None).expect("G4");
    let m = LieAlgebra::make_group(Family::G4, Some(Eta::Minus), None).expect("G4");
    let comps = |i: usize, j: usize| -> Vec<String> {
        (0..3).map(|k| eta_linear(&p.structure(i, j)[k], &m.structure(i, j)[k])).collect()
    };
    let mut d = p.describe();
    d.eta = Some("+1|-1".to_string());
    d.brackets.e1e2 = comps(0, 1);
    d.brackets.e1e3 = comps(0, 2);
    d.brackets.e2e3 = comps(1, 2);
    d
}

fn render_description(d: &FamilyDescription, style: Style) -> String {
    let vec_text = |c: &[String]| -> String {
        let mut parts: Vec<String> = Vec::new();
        for (k, comp) in c.iter().enumerate() {
            if comp == "0" {
                continue;
            }
            let e =
                if style == Style::Unicode { format!("e{}", ["₁", "₂", "₃"][k]) } else { format!("e{}", k + 1) };
            let term = match comp.as_str() {
                "1" => e,
                "-1" => format!("-{e}"),
                t if t.chars().skip(1).any(|ch| ch == '+' || ch == '-') => format!("({t})*{e}"),
                t => format!("{t}*{e}"),
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                s.push_str(&format!(" - {rest}"));
            } else {
                s.push_str(&format!(" + {p}"));
            }
        }
        s
    };
    let eta = d.eta.as_ref().map(|e| format!(" (eta = {e})")).unwrap_or_default();
    let mut s = format!("{}{eta}\n", d.family);
    let (e12, e13, e23) = if style == Style::Unicode {
        ("[e₁,e₂]", "[e₁,e₃]", "[e₂,e₃]")
    } else {
        ("[e1,e2]", "[e1,e3]", "[e2,e3]")
    };
    s.push_str(&format!("  {e12} = {}\n", vec_text(&d.brackets.e1e2)));
    s.push_str(&format!("  {e13} = {}\n", vec_text(&d.brackets.e1e3)));
    s.push_str(&format!("  {e23} = {}\n", vec_text(&d.brackets.e2e3)));
    let mut cons: Vec<String> = d.inequations.iter().map(|q| format!("{q} != 0")).collect();
    cons.extend(d.equalities.iter().map(|e| format!("{e} = 0")));
    if cons.is_empty() {
        s.push_str("  constraints: none\n");
    } else {
        s.push_str(&format!("  constraints: {}\n", cons.join(", ")));
    }
    let s = long_names(&s, Style::Ascii);
    if style == Style::Unicode {
        unicode_names(&s)
    } else {
        s
    }
}

fn unicode_names(s: &str) -> String {
    s.replace("alpha", "α")
        .replace("beta", "β")
        .replace("gamma", "γ")
        .replace("delta", "δ")
        .replace("eta", "η")
        .replace("!=", "≠")
        .replace('*', "")
}

fn cmd_list(family: Option<String>, output: Output, style: Style, out: &mut dyn Write) -> Result<i32, Failure> {
    let descs: Vec<FamilyDescription> = match family {
        Some(f) => {
            let f: Family = f.parse().map_err(|e: crate::liealg::LieError| usage(e.to_string()))?;
            f.eta_branches()
                .into_iter()
                .map(|eta| LieAlgebra::make_group(f, eta, None).expect("family").describe())
                .collect()
        }
        None => Family::ALL
            .into_iter()
            .map(|f| {
                if f.uses_eta() {
                    g4_symbolic()
                } else {
                    LieAlgebra::make_group(f, None, None).expect("family").describe()
                }
            })
            .collect(),
    };
    emit(&descs, || descs.iter().map(|d| render_description(d, style)).collect(), &output, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ComputeReport {
    schema: &'static str,
    family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<Eta>,
    table: serde_json::Value,
}

fn cmd_compute(t: Target, object: String, output: Output, style: Style, out: &mut dyn Write) -> Result<i32, Failure> {
    let r = resolve(&t)?;
    let object: ObjectKind = object.parse().map_err(|e: crate::tensorcalc::UnknownObject| usage(e.to_string()))?;
    let geo = Geometry::compute(r.connection, &r.algebra);
    let report = ComputeReport { schema: "1", family: r.family, eta: r.eta, table: geo.to_json(object) };
    emit(&report, || format!("{}{}", header(&r, style), geo.render(object, style)), &output, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SystemReport<'a> {
    schema: &'static str,
    case_id: CaseId,
    entries: Vec<SystemJsonEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<&'a Verdict>,
}

#[derive(Serialize)]
struct SystemJsonEntry {
    label: String,
    value: Polynomial,
    text: String,
}

fn system_json<'a>(s: &PolySystem, verdict: Option<&'a Verdict>) -> SystemReport<'a> {
    SystemReport {
        schema: "1",
        case_id: s.case,
        entries: s
            .entries
            .iter()
            .map(|e| SystemJsonEntry {
                label: e.label_text(s.case.structure),
                value: e.value.clone(),
                text: e.value.to_string(),
            })
            .collect(),
        verdict,
    }
}

fn system_for(r: &Resolved, structure: Structure) -> PolySystem {
    let case = CaseId { family: r.family, eta: r.eta, connection: r.connection, structure };
    PolySystem::for_case(case).expect("validated case")
}

fn render_verdict(v: &Verdict, style: Style) -> String {
    let mut s = format!("status: {}\n{}\n", v.status, v.explanation);
    for r in &v.residuals {
        let value = Polynomial::parse(&r.value).map(|p| p.render(style)).unwrap_or_else(|_| r.value.clone());
        s.push_str(&format!("  {} = {value}\n", r.label));
    }
    if let Some(st) = v.sampling {
        s.push_str(&format!("violated: {}/{}\n", st.violated, st.trials));
    }
    if let Some(w) = &v.witness {
        s.push_str(&format!("witness: {w}\n"));
    }
    if !v.unused_equalities.is_empty() {
        s.push_str(&format!("equalities not used in the reduction: {}\n", v.unused_equalities.join(", ")));
    }
    if style == Style::Unicode {
        s = s.replace("f~", "f̃");
    }
    s
}

fn cmd_check(
    t: Target,
    structure: String,
    solution: Option<String>,
    output: Output,
    style: Style,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let r = resolve(&t)?;
    let structure = structure_of(&structure)?;
    audited(&r)?;
    let s = system_for(&r, structure);
    let sol = match &solution {
        Some(text) => {
            SolutionFamily::parse_with(text, &DerivedConstants::bindings(r.eta)).map_err(|e| usage(e.to_string()))?
        }
        None => SolutionFamily::everything(),
    };
    let verdict = check_on_family(&s, &sol).map_err(|e| usage(e.to_string()))?;
    let report = system_json(&s, Some(&verdict));
    let text = || {
        let mut text = header(&r, style);
        if solution.is_none() {
            text.push_str(&s.render(style));
            if style == Style::Unicode {
                text = text.replace("f~", "f̃");
            }
        }
        text.push_str(&render_verdict(&verdict, style));
        text
    };
    emit(&report, text, &output, out)?;
    Ok(if verdict.holds() { EXIT_OK } else { EXIT_RESIDUALS })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    t: Target,
    structure: String,
    exclude: Vec<String>,
    trials: usize,
    seed: u64,
    output: Output,
    style: Style,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let r = resolve(&t)?;
    let structure = structure_of(&structure)?;
    audited(&r)?;
    let s = system_for(&r, structure);
    let bindings = DerivedConstants::bindings(r.eta);
    let mut families = Vec::new();
    for text in exclude.iter().flat_map(|e| e.split(';')) {
        if text.trim().is_empty() {
            continue;
        }
        families.push(SolutionFamily::parse_with(text, &bindings).map_err(|e| usage(e.to_string()))?);
    }
    match sample_necessity(&s, &families, trials, seed) {
        Ok(v) => {
            let text = || format!("{}seed: {seed}\n{}", header(&r, style), render_verdict(&v, style));
            emit(&system_json(&s, Some(&v)), text, &output, out)?;
            Ok(EXIT_OK)
        }
        Err(e @ ClassifyError::Starvation { .. }) => Err(Failure { code: EXIT_STARVATION, message: e.to_string() }),
        Err(e) => Err(usage(e.to_string())),
    }
}

fn cmd_audit(trials: usize, seed: u64, output: Output, style: Style, out: &mut dyn Write) -> Result<i32, Failure> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let report = verify_paper_theorems(trials, seed);
    let json = report.to_json();
    if let Some(path) = &output.out {
        std::fs::write(path, format!("{json}\n"))
            .map_err(|e| usage(format!("cannot write `{}`: {e}", path.display())))?;
    }
    let body = if output.json { format!("{json}\n") } else { report.render_table(style) };
    out.write_all(body.as_bytes()).map_err(|e| usage(e.to_string()))?;
    let discrepant =
        report.cases.iter().any(|r| r.recomputed_status == Status::PaperDiscrepancy) || report.has_discrepancies();
    Ok(if discrepant { EXIT_RESIDUALS } else { EXIT_OK })
}
