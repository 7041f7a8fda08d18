//! Command-line front end: argument handling, structure loading and rendering.
//!
//! [`run`] never touches the process environment beyond reading `NCHAM_DEPTH` and a
//! `--defs` file, so tests drive it directly.

pub mod expr;
pub mod print;

use std::collections::HashMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::adler::{self, AdlerSystem, Which};
use crate::complexes::{self, Case};
use crate::doublepoisson::{self, FiniteStructure};
use crate::dpva::{self, LambdaStructure, LambdaTensor2, Pencil, DEFAULT_DEPTH};
use crate::error::{Error, Result};
use crate::linear::{q, Q};
use crate::ncpoly::NcPoly;
use crate::psido::adjoint_bullet;
use crate::repmat;
use crate::report::Report;
use crate::tensoralg::Tensor2;
use expr::Scope;
use print::Style;

#[derive(Parser, Debug)]
#[command(name = "ncham", version, about = "Double Poisson (vertex) algebra calculator")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,
    /// Truncation depth for non-local series (default: $NCHAM_DEPTH, else 8).
    #[arg(long, global = true)]
    depth: Option<i32>,
    /// File of `let name = expr` and `let {{a,b}} = expr` lines.
    #[arg(long, global = true)]
    defs: Option<PathBuf>,
    /// Comma-separated generator names.
    #[arg(long, global = true, value_delimiter = ',')]
    gens: Vec<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Latex,
}

#[derive(Args, Debug, Default)]
struct StructArgs {
    /// Built-in structure: affine, gdN, gdN-h, gdN-k, symmetric, euler, euler0, euler1, typec.
    #[arg(long)]
    structure: Option<String>,
    /// Generator bracket `a,b=EXPR`; a missing `{{b,a}}` is filled in by skewsymmetry.
    #[arg(long = "entry", value_name = "A,B=EXPR")]
    entries: Vec<String>,
    /// Treat `--entry` definitions as double Poisson brackets (no λ, no derivatives).
    #[arg(long)]
    finite: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate {{f λ g}} or {{f,g}}.
    Bracket {
        #[command(flatten)]
        s: StructArgs,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Check skewsymmetry and/or Jacobi (both when neither flag is given).
    Check {
        #[command(flatten)]
        s: StructArgs,
        #[arg(long)]
        skew: bool,
        #[arg(long)]
        jacobi: bool,
    },
    /// Hamiltonian flow of a density or trace function.
    Flow {
        #[command(flatten)]
        s: StructArgs,
        #[arg(long)]
        hamiltonian: String,
    },
    /// Lax flows t_1..t_K with an involution report.
    Hierarchy {
        #[arg(long, value_enum)]
        system: System,
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
    /// Dirac reduction of the Gelfand–Dickey structure by u_{-N}.
    Dirac {
        /// `gdN`.
        #[arg(long)]
        system: String,
    },
    /// The λ-bracket on matrix entries.
    Vm {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        check: VmCheck,
        /// Order of L for `--check adler`.
        #[arg(long, default_value_t = 2)]
        n: i32,
    },
    /// Differentials of the finite and variational complexes.
    Complex {
        #[arg(long, value_enum)]
        op: ComplexOp,
        /// Use the finite complex (otherwise variational).
        #[arg(long)]
        finite: bool,
        #[arg(allow_hyphen_values = true)]
        exprs: Vec<String>,
    },
    /// Decide tr f = tr g (with --finite) or ∫f = ∫g.
    FunctionalEq {
        #[arg(long)]
        finite: bool,
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum System {
    Kdv,
    Boussinesq,
    Kp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VmCheck {
    Affine,
    Adler,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ComplexOp {
    D0,
    D1,
    Delta0,
    Delta1,
    Integrate,
}

/// Exit status and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// One labelled result.
struct Entry {
    label: String,
    label_tex: String,
    plain: String,
    latex: String,
    json: Json,
}

#[derive(Default)]
struct Outcome {
    entries: Vec<Entry>,
    window: Option<Json>,
    checks: Report,
}

struct Ctx {
    depth: i32,
    gens: Vec<String>,
    lets: Vec<(String, String)>,
    bracket_lines: Vec<String>,
}

/// Runs one command line (`args[0]` is the program name), reading `NCHAM_DEPTH`.
pub fn run<S: AsRef<str>>(args: &[S]) -> RunOutput {
    run_with_depth_env(args, std::env::var("NCHAM_DEPTH").ok())
}

pub fn run_with_depth_env<S: AsRef<str>>(args: &[S], depth_env: Option<String>) -> RunOutput {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { RunOutput { code, stdout: text, stderr: String::new() } } else { RunOutput { code, stdout: String::new(), stderr: text } };
        }
    };
    let format = cli.format;
    match execute(cli, depth_env) {
        Ok(out) => {
            let code = if out.checks.all_passed() { 0 } else { 1 };
            RunOutput { code, stdout: render(&out, format), stderr: String::new() }
        }
        Err(e) => {
            let pos = match &e {
                Error::Parse { pos, .. } => Some(*pos),
                _ => None,
            };
            let stdout = if format == Format::Json { format!("{}\n", json!({"error": {"message": e.to_string(), "pos": pos}})) } else { String::new() };
            RunOutput { code: 2, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn render(out: &Outcome, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Plain => {
            for e in &out.entries {
                if e.label.is_empty() {
                    s.push_str(&format!("{}\n", e.plain));
                } else {
                    s.push_str(&format!("{} = {}\n", e.label, e.plain));
                }
            }
            for c in &out.checks.checks {
                let status = if c.passed { "OK".to_string() } else if c.detail.is_empty() { "FAILED".into() } else { format!("FAILED ({})", c.detail) };
                s.push_str(&format!("{}: {status}\n", c.name));
            }
        }
        Format::Latex => {
            for e in &out.entries {
                s.push_str(&format!("{} = {} \\\\\n", e.label_tex, e.latex));
            }
            for c in &out.checks.checks {
                s.push_str(&format!("% {}: {}\n", c.name, if c.passed { "OK" } else { "FAILED" }));
            }
        }
        Format::Json => {
            let result: Vec<Json> = out.entries.iter().map(|e| json!({"label": e.label, "value": e.json})).collect();
            let checks: Vec<Json> = out.checks.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect();
            let doc = json!({"result": result, "window": out.window.clone().unwrap_or(Json::Null), "checks": checks});
            s = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
        }
    }
    s
}

fn execute(cli: Cli, depth_env: Option<String>) -> Result<Outcome> {
    let depth = match (cli.depth, depth_env) {
        (Some(d), _) => d,
        (None, Some(v)) => v.trim().parse().map_err(|_| Error::Parse { pos: 0, msg: format!("NCHAM_DEPTH is not an integer: {v:?}") })?,
        (None, None) => DEFAULT_DEPTH,
    };
    if depth < 1 {
        return Err(Error::Unsupported(format!("depth {depth} must be positive")));
    }
    let mut ctx = Ctx { depth, gens: cli.gens, lets: Vec::new(), bracket_lines: Vec::new() };
    if let Some(path) = &cli.defs {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Unsupported(format!("cannot read {}: {e}", path.display())))?;
        read_defs(&text, &mut ctx)?;
    }
    match cli.cmd {
        Cmd::Bracket { s, f, g } => cmd_bracket(&ctx, &s, &f, &g),
        Cmd::Check { s, skew, jacobi } => cmd_check(&ctx, &s, skew || !jacobi, jacobi || !skew),
        Cmd::Flow { s, hamiltonian } => cmd_flow(&ctx, &s, &hamiltonian),
        Cmd::Hierarchy { system, k } => cmd_hierarchy(&ctx, system, k),
        Cmd::Dirac { system } => cmd_dirac(&ctx, &system),
        Cmd::Vm { m, check, n } => cmd_vm(&ctx, m, check, n),
        Cmd::Complex { op, finite, exprs } => cmd_complex(&ctx, op, finite, &exprs),
        Cmd::FunctionalEq { finite, f, g } => cmd_functional_eq(&ctx, finite, &f, &g),
    }
}

/// Parses `let name = expr` and `let {{a,b}} = expr` lines; `#` starts a comment.
fn read_defs(text: &str, ctx: &mut Ctx) -> Result<()> {
    let mut offset = 0;
    for line in text.lines() {
        let start = offset;
        offset += line.len() + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let rest = body.strip_prefix("let ").ok_or(Error::Parse { pos: start, msg: "expected `let`".into() })?;
        let (lhs, rhs) = rest.split_once('=').ok_or(Error::Parse { pos: start, msg: "expected `=`".into() })?;
        let lhs = lhs.trim();
        if let Some(pair) = lhs.strip_prefix("{{").and_then(|l| l.strip_suffix("}}")) {
            ctx.bracket_lines.push(format!("{pair}={rhs}"));
        } else if !lhs.is_empty() && lhs.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && lhs != "L" {
            ctx.lets.push((lhs.to_string(), rhs.trim().to_string()));
        } else {
            return Err(Error::Parse { pos: start, msg: format!("bad definition name `{lhs}`") });
        }
    }
    Ok(())
}

impl Ctx {
    fn names_or(&self, default: &[&str]) -> Vec<String> {
        if self.gens.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.gens.clone()
        }
    }

    /// Generator names plus the evaluated `let` bindings.
    fn scope(&self, names: &[String]) -> Result<Scope> {
        let mut scope = Scope::new(names);
        for (name, text) in &self.lets {
            let v = scope.eval_str(text)?;
            scope.lets.insert(name.clone(), v);
        }
        Ok(scope)
    }

    fn poly_entry(&self, label: String, p: &NcPoly, names: &[String]) -> Entry {
        Entry { label_tex: label.clone(), label, plain: print::poly(p, names, Style::Plain), latex: print::poly(p, names, Style::Latex), json: print::poly_json(p, names) }
    }

    fn lambda_entry(&self, label: String, label_tex: String, b: &LambdaTensor2, names: &[String]) -> Entry {
        Entry { label, label_tex, plain: print::lambda_tensor(b, names, Style::Plain), latex: print::lambda_tensor(b, names, Style::Latex), json: print::lambda_tensor_json(b, names) }
    }

    fn tensor_entry(&self, label: String, t: &Tensor2, names: &[String]) -> Entry {
        Entry { label_tex: label.clone(), label, plain: print::tensor(t, names, Style::Plain), latex: print::tensor(t, names, Style::Latex), json: print::tensor_json(t, names) }
    }
}

enum Loaded {
    Lambda { names: Vec<String>, parts: Vec<LambdaStructure> },
    Finite { names: Vec<String>, parts: Vec<FiniteStructure> },
}

fn gd_builtin(name: &str) -> Option<(i32, Option<Which>)> {
    let rest = name.strip_prefix("gd")?;
    let (n, which) = match rest.split_once('-') {
        Some((n, "h")) => (n, Some(Which::H)),
        Some((n, "k")) => (n, Some(Which::K)),
        Some(_) => return None,
        None => (rest, None),
    };
    n.parse().ok().filter(|n| (1..=9).contains(n)).map(|n| (n, which))
}

fn builtin(name: &str, depth: i32) -> Result<Loaded> {
    let u = NcPoly::var(0);
    let xy = || vec!["x".to_string(), "y".to_string()];
    let loaded = match name {
        "affine" => Loaded::Lambda { names: vec!["u".into()], parts: dpva::fixtures::affine().parts },
        "symmetric" => {
            let mut s = LambdaStructure::zero(1);
            s.set(0, 0, LambdaTensor2::term(0, Tensor2::pure(&u, &NcPoly::one()) + Tensor2::pure(&NcPoly::one(), &u)));
            Loaded::Lambda { names: vec!["u".into()], parts: vec![s] }
        }
        "euler" => Loaded::Finite { names: xy(), parts: vec![doublepoisson::fixtures::euler_s0(), doublepoisson::fixtures::euler_s1()] },
        "euler0" => Loaded::Finite { names: xy(), parts: vec![doublepoisson::fixtures::euler_s0()] },
        "euler1" => Loaded::Finite { names: xy(), parts: vec![doublepoisson::fixtures::euler_s1()] },
        "typec" => Loaded::Finite { names: xy(), parts: vec![doublepoisson::fixtures::type_c()] },
        _ => {
            let (n, which) = gd_builtin(name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
            let sys = AdlerSystem::gelfand_dickey(n)?.with_depth(depth);
            let parts = match which {
                Some(w) => vec![sys.structure(w)?],
                None => sys.pencil()?.parts,
            };
            Loaded::Lambda { names: sys.names(), parts }
        }
    };
    Ok(match loaded {
        Loaded::Lambda { names, parts } => Loaded::Lambda { names, parts: parts.into_iter().map(|p| p.with_depth(depth)).collect() },
        other => other,
    })
}

fn load(ctx: &Ctx, args: &StructArgs) -> Result<Loaded> {
    let mut lines: Vec<&String> = ctx.bracket_lines.iter().collect();
    lines.extend(&args.entries);
    if let Some(name) = &args.structure {
        if !lines.is_empty() {
            return Err(Error::Unsupported("--structure cannot be combined with bracket definitions".into()));
        }
        return builtin(name, ctx.depth);
    }
    if lines.is_empty() {
        return Err(Error::Unsupported("no structure: pass --structure or --entry".into()));
    }
    let names = ctx.names_or(if args.finite { &["x", "y"] } else { &["u"] });
    let scope = ctx.scope(&names)?;
    let l = names.len();
    let mut given: HashMap<(usize, usize), Vec<LambdaTensor2>> = HashMap::new();
    for line in lines {
        let (lhs, rhs) = line.split_once('=').ok_or(Error::Parse { pos: 0, msg: format!("expected `a,b=expr` in `{line}`") })?;
        let (a, b) = lhs.split_once(',').ok_or(Error::Parse { pos: 0, msg: format!("expected `a,b` in `{lhs}`") })?;
        let idx = |s: &str| names.iter().position(|n| n == s.trim()).ok_or_else(|| Error::UnknownName(s.trim().to_string()));
        let v = scope.eval_str(rhs)?.to_lambda_pencil()?;
        given.insert((idx(a)?, idx(b)?), v);
    }
    let ncp = given.values().map(|v| v.len()).max().unwrap_or(1);
    let floor = -ctx.depth;
    let mut table = vec![vec![vec![LambdaTensor2::zero(); l]; l]; ncp];
    for (&(i, j), v) in &given {
        for (k, b) in v.iter().enumerate() {
            table[k][i][j] = b.clone();
            if i != j && !given.contains_key(&(j, i)) {
                table[k][j][i] = if args.finite { LambdaTensor2::term(0, -b.coeff(0).sigma()) } else { adjoint_bullet(b, floor).scale(&q(-1)) };
            }
        }
    }
    if args.finite {
        if given.values().flatten().any(|b| b.coeffs.keys().any(|&n| n != 0)) {
            return Err(Error::Unsupported("L appears in a finite bracket".into()));
        }
        let parts = table.iter().map(|t| FiniteStructure { brackets: t.iter().map(|row| row.iter().map(|b| b.coeff(0)).collect()).collect() }).collect();
        return Ok(Loaded::Finite { names, parts });
    }
    let parts = table.into_iter().map(|brackets| LambdaStructure { brackets, floor }).collect();
    Ok(Loaded::Lambda { names, parts })
}

/// `Σ_k c^k S_k` at a number.
fn finite_at(parts: &[FiniteStructure], c: &Q) -> FiniteStructure {
    let mut out = parts[0].clone();
    let mut pw = c.clone();
    for p in &parts[1..] {
        for (i, row) in p.brackets.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                out.brackets[i][j].add_scaled(t, &pw);
            }
        }
        pw = &pw * c;
    }
    out
}

fn cprefix(k: usize, n: usize, style: Style) -> String {
    if n == 1 {
        String::new()
    } else {
        print::cpow_prefix(k as u32, style)
    }
}

fn cmd_bracket(ctx: &Ctx, s: &StructArgs, f: &str, g: &str) -> Result<Outcome> {
    let mut out = Outcome::default();
    match load(ctx, s)? {
        Loaded::Lambda { names, parts } => {
            let scope = ctx.scope(&names)?;
            let (fp, gp) = (scope.poly(f)?, scope.poly(g)?);
            let mut valid = None;
            for (k, p) in parts.iter().enumerate() {
                let b = p.lambda_bracket(&fp, &gp);
                if b.coeffs.is_empty() && k > 0 {
                    continue;
                }
                valid = valid.or(b.valid_from);
                let label = cprefix(k, parts.len(), Style::Plain) + &print::bracket_label(f, g, Style::Plain);
                let tex = cprefix(k, parts.len(), Style::Latex) + &print::bracket_label(f, g, Style::Latex);
                out.entries.push(ctx.lambda_entry(label, tex, &b, &names));
            }
            out.window = Some(print::window_json(ctx.depth, valid));
        }
        Loaded::Finite { names, parts } => {
            let scope = ctx.scope(&names)?;
            let (fp, gp) = (scope.poly(f)?, scope.poly(g)?);
            for (k, p) in parts.iter().enumerate() {
                let t = p.bracket(&fp, &gp);
                if t.is_zero() && k > 0 {
                    continue;
                }
                out.entries.push(ctx.tensor_entry(format!("{}{{{{{f}, {g}}}}}", cprefix(k, parts.len(), Style::Plain)), &t, &names));
            }
        }
    }
    Ok(out)
}

fn cmd_check(ctx: &Ctx, s: &StructArgs, skew: bool, jacobi: bool) -> Result<Outcome> {
    let mut out = Outcome::default();
    let rep = &mut out.checks;
    match load(ctx, s)? {
        Loaded::Lambda { names, parts } => {
            if skew {
                let mut fails = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    fails.extend(p.skew_failures().into_iter().map(|(i, j)| format!("{}{}", cprefix(k, parts.len(), Style::Plain), print::bracket_label(&names[i], &names[j], Style::Plain))));
                }
                rep.push("skew", fails.is_empty(), fails.join(", "));
            }
            if jacobi {
                if parts.len() == 1 {
                    let fails = dpva::jacobi_failures(&parts[0], &parts[0])?;
                    let detail = fails.iter().map(|&(a, b, c)| format!("({}, {}, {})", names[a], names[b], names[c])).collect::<Vec<_>>().join(", ");
                    rep.push("jacobi", fails.is_empty(), detail);
                } else {
                    rep.push("jacobi (all c)", Pencil::new(parts).check_jacobi()?, "");
                }
            }
        }
        Loaded::Finite { names, parts } => {
            if skew {
                let mut fails = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    for i in 0..p.nvars() {
                        for j in 0..p.nvars() {
                            if p.brackets[i][j] != -p.brackets[j][i].sigma() {
                                fails.push(format!("{}{{{{{}, {}}}}}", cprefix(k, parts.len(), Style::Plain), names[i], names[j]));
                            }
                        }
                    }
                }
                rep.push("skew", fails.is_empty(), fails.join(", "));
            }
            if jacobi {
                // The Jacobiator of S_0 + cS_1 + … has degree 2(n−1) in c, so 2n−1 sample values decide it.
                let samples = 2 * parts.len() - 1;
                let mut fails = Vec::new();
                for c in 0..samples {
                    let st = finite_at(&parts, &q(c as i64));
                    for (a, b, cc) in st.jacobi_failures() {
                        let locus = format!("({}, {}, {})", names[a], names[b], names[cc]);
                        if !fails.contains(&locus) {
                            fails.push(locus);
                        }
                    }
                }
                rep.push(if parts.len() == 1 { "jacobi" } else { "jacobi (all c)" }, fails.is_empty(), fails.join(", "));
            }
        }
    }
    Ok(out)
}

fn cmd_flow(ctx: &Ctx, s: &StructArgs, h: &str) -> Result<Outcome> {
    let mut out = Outcome::default();
    let (names, flows): (Vec<String>, Vec<Vec<NcPoly>>) = match load(ctx, s)? {
        Loaded::Lambda { names, parts } => {
            let hp = ctx.scope(&names)?.poly(h)?;
            let flows = parts.iter().map(|p| p.hamiltonian_pde(&hp)).collect::<Result<_>>()?;
            (names, flows)
        }
        Loaded::Finite { names, parts } => {
            let hp = ctx.scope(&names)?.poly(h)?;
            (names.clone(), parts.iter().map(|p| p.hamiltonian_flow(&hp)).collect())
        }
    };
    for (k, flow) in flows.iter().enumerate() {
        if k > 0 && flow.iter().all(|p| p.is_zero()) {
            continue;
        }
        for (i, p) in flow.iter().enumerate() {
            out.entries.push(ctx.poly_entry(format!("{}d{}/dt", cprefix(k, flows.len(), Style::Plain), names[i]), p, &names));
        }
    }
    Ok(out)
}

fn cmd_hierarchy(ctx: &Ctx, system: System, kmax: u32) -> Result<Outcome> {
    if kmax == 0 {
        return Err(Error::Unsupported("--k must be positive".into()));
    }
    let sys = match system {
        System::Kdv => AdlerSystem::reduced_gd(2)?,
        System::Boussinesq => AdlerSystem::reduced_gd(3)?,
        System::Kp => AdlerSystem::kp((kmax as i32 + 1).max(4))?,
    }
    .with_depth(ctx.depth);
    let names = sys.names();
    let mut out = Outcome::default();
    for k in 1..=kmax {
        for (i, p) in sys.lax_flow(k)? {
            let name = &names[sys.var(i)? as usize];
            out.entries.push(ctx.poly_entry(format!("d{name}/dt{k}"), &p, &names));
        }
    }
    match system {
        System::Kp => {
            if kmax >= 3 {
                out.checks.extend(adler::kp_subsystem(&sys)?);
            }
        }
        _ => {
            let rep = adler::lenard_pde_verify(&sys, 0, kmax)?;
            let bad: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            out.checks.push("involution", bad.is_empty(), bad.join(", "));
        }
    }
    Ok(out)
}

fn cmd_dirac(ctx: &Ctx, system: &str) -> Result<Outcome> {
    let (n, None) = gd_builtin(system).ok_or_else(|| Error::UnknownName(system.to_string()))? else {
        return Err(Error::UnknownName(system.to_string()));
    };
    if n < 2 {
        return Err(Error::Unsupported("Dirac reduction needs N >= 2".into()));
    }
    let sys = AdlerSystem::gelfand_dickey(n)?.with_depth(ctx.depth);
    let names: Vec<String> = AdlerSystem::reduced_gd(n)?.names()[1..].to_vec();
    let s = adler::dirac_reduce(&sys)?;
    let mut out = Outcome::default();
    let mut valid = None;
    for i in 0..s.nvars() {
        for j in 0..s.nvars() {
            let b = &s.brackets[i][j];
            valid = valid.or(b.valid_from);
            let label = print::bracket_label(&names[i], &names[j], Style::Plain);
            let tex = print::bracket_label(&names[i], &names[j], Style::Latex);
            out.entries.push(ctx.lambda_entry(label, tex, b, &names));
        }
    }
    out.window = Some(print::window_json(ctx.depth, valid));
    let central = adler::dirac_centrality(&sys)?;
    let bad: Vec<&str> = central.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    out.checks.push("constraint central", bad.is_empty(), bad.join(", "));
    out.checks.push("skew", s.check_skew(), "");
    Ok(out)
}

fn cmd_vm(ctx: &Ctx, m: usize, check: VmCheck, n: i32) -> Result<Outcome> {
    if m == 0 || m > 9 {
        return Err(Error::Unsupported(format!("matrix size {m} outside 1..=9")));
    }
    let mut out = Outcome::default();
    match check {
        VmCheck::Affine => {
            let names = vec!["u".to_string()];
            for (i, j, h, k) in (0..m).flat_map(|i| (0..m).flat_map(move |j| (0..m).flat_map(move |h| (0..m).map(move |k| (i, j, h, k))))) {
                let [s0, s1] = repmat::affine_table(i, j, h, k);
                let (a, b) = (format!("u{}{}", i + 1, j + 1), format!("u{}{}", h + 1, k + 1));
                let render = |style: Style| {
                    let mut parts = Vec::new();
                    if !s0.is_zero() {
                        parts.push(print::comm_series(&s0, &names, style));
                    }
                    if !s1.is_zero() {
                        let body = print::comm_series(&s1, &names, style);
                        parts.push(match (style, body.contains(' ')) {
                            (Style::Plain, false) => format!("c*{body}"),
                            (Style::Plain, true) => format!("c*({body})"),
                            (Style::Latex, false) => format!("c {body}"),
                            (Style::Latex, true) => format!("c\\left({body}\\right)"),
                        });
                    }
                    if parts.is_empty() {
                        "0".into()
                    } else {
                        parts.join(" + ")
                    }
                };
                let tex = |x: &str| format!("u_{{{}}}", &x[1..]);
                let json = json!({"c0": print::comm_series_json(&s0, &names), "c1": print::comm_series_json(&s1, &names)});
                out.entries.push(Entry {
                    label: format!("{{{a} L {b}}}"),
                    label_tex: format!("\\{{{}{{}}_\\lambda {}\\}}", tex(&a), tex(&b)),
                    plain: render(Style::Plain),
                    latex: render(Style::Latex),
                    json,
                });
            }
            out.checks.extend(repmat::vm_affine_check(m)?);
            let jac = repmat::vm_jacobi_check_pencil(&dpva::fixtures::affine(), m, &repmat::all_triples(1, m))?;
            let bad: Vec<&str> = jac.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            out.checks.push("jacobi on entries", bad.is_empty(), bad.join(", "));
        }
        VmCheck::Adler => {
            let sys = AdlerSystem::gelfand_dickey(n)?.with_depth(ctx.depth);
            for which in [Which::H, Which::K] {
                out.checks.extend(repmat::vm_adler_series_check(&sys, which, m)?);
            }
        }
    }
    Ok(out)
}

fn cmd_complex(ctx: &Ctx, op: ComplexOp, finite: bool, exprs: &[String]) -> Result<Outcome> {
    let names = ctx.names_or(if finite { &["x", "y"] } else { &["u"] });
    let scope = ctx.scope(&names)?;
    let l = names.len();
    let case = if finite { Case::Finite } else { Case::Variational };
    let polys: Vec<NcPoly> = exprs.iter().map(|e| scope.poly(e)).collect::<Result<_>>()?;
    let want = if matches!(op, ComplexOp::D0 | ComplexOp::Delta0) { 1 } else { l };
    if polys.len() != want {
        return Err(Error::DimensionMismatch(format!("{op:?} takes {want} expression(s), got {}", polys.len())));
    }
    match (op, finite) {
        (ComplexOp::D0 | ComplexOp::D1, false) => return Err(Error::Unsupported("d0 and d1 need --finite".into())),
        (ComplexOp::Delta0 | ComplexOp::Delta1, true) => return Err(Error::Unsupported("delta0 and delta1 belong to the variational complex".into())),
        _ => {}
    }
    let mut out = Outcome::default();
    let slot = |i: usize| format!("[{}]", names[i]);
    let pair = |i: usize, j: usize| format!("[{}, {}]", names[i], names[j]);
    match op {
        ComplexOp::D0 | ComplexOp::Delta0 => {
            let form = if finite { complexes::d0_finite(&polys[0], l)? } else { complexes::delta0(&polys[0], l) };
            for (i, p) in form.iter().enumerate() {
                out.entries.push(ctx.poly_entry(slot(i), p, &names));
            }
        }
        ComplexOp::D1 => {
            let form = complexes::d1_finite(&polys)?;
            for i in 0..l {
                for j in 0..l {
                    out.entries.push(ctx.tensor_entry(pair(i, j), &form.a[i][j], &names));
                }
            }
        }
        ComplexOp::Delta1 => {
            let form = complexes::delta1(&polys);
            for i in 0..l {
                for j in 0..l {
                    out.entries.push(ctx.lambda_entry(pair(i, j), pair(i, j), &form.a[i][j], &names));
                }
            }
        }
        ComplexOp::Integrate => {
            let closed = complexes::is_closed_1form(&polys, case)?;
            out.checks.push("closed", closed, "");
            if closed {
                let f = complexes::integrate_closed_1form(&polys, case)?;
                let back = if finite { complexes::d0_finite(&f, l)? } else { complexes::delta0(&f, l) };
                out.checks.push("round trip", back == polys, "");
                out.entries.push(ctx.poly_entry("f".into(), &f, &names));
            }
        }
    }
    Ok(out)
}

fn cmd_functional_eq(ctx: &Ctx, finite: bool, f: &str, g: &str) -> Result<Outcome> {
    let names = ctx.names_or(if finite { &["x", "y"] } else { &["u"] });
    let scope = ctx.scope(&names)?;
    let (fp, gp) = (scope.poly(f)?, scope.poly(g)?);
    let case = if finite { Case::Finite } else { Case::Variational };
    let mut out = Outcome::default();
    out.checks.push(if finite { "tr f = tr g" } else { "∫f = ∫g" }, complexes::zero_forms_equal(&fp, &gp, case), "");
    Ok(out)
}
