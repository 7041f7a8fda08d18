//! Plain, LaTeX and JSON renderings of library values.
//!
//! Plain output of exact values parses back through [`super::expr::parse_expr`]; a truncated
//! λ-series gets a trailing `+ O(L^n)`.

use num_traits::{One, Signed};
use serde_json::{json, Value as Json};

use super::expr::{fmt_name, fmt_rational};
use crate::linear::Q;
use crate::ncpoly::{NcPoly, Word};
use crate::repmat::{CVar, CommPoly, Mono};
use crate::series::Laurent;
use crate::tensoralg::Tensor2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Plain,
    Latex,
}

fn latex_name(name: &str) -> String {
    if let Some(k) = name.strip_prefix("u_m").filter(|k| k.chars().all(|c| c.is_ascii_digit())) {
        return format!("u_{{-{k}}}");
    }
    match name.find(|c: char| c.is_ascii_digit()) {
        Some(i) if i > 0 && name[i..].chars().all(|c| c.is_ascii_digit()) => format!("{}_{{{}}}", &name[..i], &name[i..]),
        _ => name.replace('_', "\\_"),
    }
}

fn sym_name(names: &[String], var: u16, der: u16, style: Style) -> String {
    let base = names.get(var as usize).cloned().unwrap_or_else(|| format!("x{var}"));
    match style {
        Style::Plain => fmt_name(&base, der),
        Style::Latex if der <= 3 => format!("{}{}", latex_name(&base), "'".repeat(der as usize)),
        Style::Latex => format!("{}^{{({der})}}", latex_name(&base)),
    }
}

fn word_str(w: &Word, names: &[String], style: Style) -> String {
    if w.is_one() {
        return "1".into();
    }
    let parts: Vec<String> = w.0.iter().map(|s| sym_name(names, s.var, s.der, style)).collect();
    parts.join(if style == Style::Plain { "*" } else { " " })
}

fn coeff_str(c: &Q, style: Style) -> String {
    match style {
        Style::Plain => fmt_rational(c),
        Style::Latex if c.denom().is_one() => c.numer().to_string(),
        Style::Latex => format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom()),
    }
}

/// `|c|·body`, omitting a unit coefficient or a unit body.
fn scaled(c: &Q, body: &str, style: Style) -> String {
    let a = c.abs();
    if body == "1" {
        coeff_str(&a, style)
    } else if a.is_one() {
        body.to_string()
    } else if style == Style::Plain {
        format!("{}*{body}", coeff_str(&a, style))
    } else {
        format!("{} {body}", coeff_str(&a, style))
    }
}

/// Joins `(sign, magnitude text)` terms into a signed sum.
fn join_terms(terms: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (neg, body) in terms {
        match (out.is_empty(), neg) {
            (true, false) => out.push_str(&body),
            (true, true) => out = format!("-{body}"),
            (false, false) => out = format!("{out} + {body}"),
            (false, true) => out = format!("{out} - {body}"),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

pub fn poly(p: &NcPoly, names: &[String], style: Style) -> String {
    join_terms(p.iter().map(|(w, c)| (c.is_negative(), scaled(c, &word_str(w, names, style), style))))
}

fn tensor_term(c: &Q, l: &Word, r: &Word, names: &[String], style: Style) -> String {
    let op = if style == Style::Plain { " (*) " } else { " \\otimes " };
    format!("{}{op}{}", scaled(c, &word_str(l, names, style), style), word_str(r, names, style))
}

pub fn tensor(t: &Tensor2, names: &[String], style: Style) -> String {
    join_terms(t.iter().map(|((l, r), c)| (c.is_negative(), tensor_term(c, l, r, names, style))))
}

fn lam_power(n: i32, style: Style) -> String {
    match (style, n) {
        (Style::Plain, 1) => "L".into(),
        (Style::Plain, _) => format!("L^{n}"),
        (Style::Latex, 1) => "\\lambda".into(),
        (Style::Latex, _) => format!("\\lambda^{{{n}}}"),
    }
}

/// A λ-series with coefficients rendered by `coeff`; λ-free terms are spliced into the sum.
fn series_with<T: crate::linear::Module>(s: &Laurent<T>, style: Style, coeff: impl Fn(&T) -> String) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (&n, t) in &s.coeffs {
        let body = coeff(t);
        if n == 0 {
            parts.push(body);
        } else if body == "1" {
            parts.push(lam_power(n, style));
        } else if !body.contains(' ') && style == Style::Plain {
            parts.push(format!("{body}*{}", lam_power(n, style)));
        } else if !body.contains(' ') {
            parts.push(format!("{body} {}", lam_power(n, style)));
        } else if style == Style::Plain {
            parts.push(format!("({body})*{}", lam_power(n, style)));
        } else {
            parts.push(format!("\\left({body}\\right){}", lam_power(n, style)));
        }
    }
    if let Some(v) = s.valid_from {
        parts.push(format!("O({})", lam_power(v - 1, style)));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        match p.strip_prefix('-') {
            Some(rest) => out = format!("{out} - {rest}"),
            None => out = format!("{out} + {p}"),
        }
    }
    out
}

pub fn lambda_tensor(s: &Laurent<Tensor2>, names: &[String], style: Style) -> String {
    series_with(s, style, |t| tensor(t, names, style))
}

fn cvar_str(v: &CVar, names: &[String], style: Style) -> String {
    let base = names.get(v.var as usize).cloned().unwrap_or_else(|| format!("x{}", v.var));
    let (r, c) = (v.row as usize + 1, v.col as usize + 1);
    match style {
        Style::Plain => fmt_name(&format!("{base}{r}{c}"), v.der),
        Style::Latex => {
            let ticks = if v.der <= 3 { "'".repeat(v.der as usize) } else { format!("^{{({})}}", v.der) };
            format!("{}_{{{r}{c}}}{ticks}", latex_name(&base).split('_').next().unwrap_or(""))
        }
    }
}

fn mono_str(m: &Mono, names: &[String], style: Style) -> String {
    if m.0.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = m
        .0
        .iter()
        .map(|(v, e)| {
            let b = cvar_str(v, names, style);
            match (e, style) {
                (1, _) => b,
                (_, Style::Plain) => format!("{b}^{e}"),
                (_, Style::Latex) => format!("({b})^{{{e}}}"),
            }
        })
        .collect();
    parts.join(if style == Style::Plain { "*" } else { " " })
}

pub fn comm(p: &CommPoly, names: &[String], style: Style) -> String {
    join_terms(p.iter().map(|(m, c)| (c.is_negative(), scaled(c, &mono_str(m, names, style), style))))
}

pub fn comm_series(s: &Laurent<CommPoly>, names: &[String], style: Style) -> String {
    series_with(s, style, |p| comm(p, names, style))
}

/// `{{f λ g}}` in the notation of the style.
pub fn bracket_label(f: &str, g: &str, style: Style) -> String {
    match style {
        Style::Plain => format!("{{{{{f} L {g}}}}}"),
        Style::Latex => format!("\\{{\\!\\{{{f}{{}}_\\lambda {g}\\}}\\!\\}}"),
    }
}

/// `c^k ·` prefix for pencil parts.
pub fn cpow_prefix(k: u32, style: Style) -> String {
    match (k, style) {
        (0, _) => String::new(),
        (1, _) => "c: ".into(),
        (_, Style::Plain) => format!("c^{k}: "),
        (_, Style::Latex) => format!("c^{{{k}}}: "),
    }
}

fn word_json(w: &Word, names: &[String]) -> Json {
    Json::Array(w.0.iter().map(|s| Json::String(sym_name(names, s.var, s.der, Style::Plain))).collect())
}

pub fn poly_json(p: &NcPoly, names: &[String]) -> Json {
    Json::Array(p.iter().map(|(w, c)| json!({"coeff": fmt_rational(c), "word": word_json(w, names)})).collect())
}

fn tensor_terms_json(t: &Tensor2, names: &[String], lpow: i32, out: &mut Vec<Json>) {
    for ((l, r), c) in t.iter() {
        out.push(json!({"coeff": fmt_rational(c), "left": word_json(l, names), "right": word_json(r, names), "lpow": lpow}));
    }
}

pub fn tensor_json(t: &Tensor2, names: &[String]) -> Json {
    let mut out = Vec::new();
    tensor_terms_json(t, names, 0, &mut out);
    Json::Array(out)
}

pub fn lambda_tensor_json(s: &Laurent<Tensor2>, names: &[String]) -> Json {
    let mut out = Vec::new();
    for (&n, t) in &s.coeffs {
        tensor_terms_json(t, names, n, &mut out);
    }
    Json::Array(out)
}

pub fn comm_series_json(s: &Laurent<CommPoly>, names: &[String]) -> Json {
    let mut out = Vec::new();
    for (&n, p) in &s.coeffs {
        for (m, c) in p.iter() {
            let mono: Vec<Json> = m.0.iter().map(|(v, e)| json!([cvar_str(v, names, Style::Plain), e])).collect();
            out.push(json!({"coeff": fmt_rational(c), "mono": mono, "lpow": n}));
        }
    }
    Json::Array(out)
}

/// `{"depth": D, "valid_from": v}` for the λ-window of a result.
pub fn window_json(depth: i32, valid_from: Option<i32>) -> Json {
    json!({"depth": depth, "valid_from": valid_from})
}
