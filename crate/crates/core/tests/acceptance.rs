//! Acceptance criteria 1–10, one PASS/FAIL line each, all by exact equality.
//!
//! Criteria 5 and 8 compare against printed formulas that contain misprints. They report
//! FAIL with the offending coefficients, and the test pins the failing set to
//! [`KNOWN_ERRATA`] so that any other regression, or an erratum silently "fixed", is caught.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use common::rnd;
use common::*;
use ncham::adler::{self, AdlerSystem, Which};
use ncham::cli::print::{self, Style};
use ncham::complexes::{self, Case};
use ncham::doublepoisson::{self, fixtures as fin};
use ncham::dpva::{self, LambdaStructure, LambdaTensor2};
use ncham::linear::{q, qr, Q};
use ncham::psido;
use ncham::repmat::{self, CVar, CommLambdaPoly, CommPoly};
use ncham::series::Laurent;
use ncham::NcPoly;
use rand::Rng;

/// Criteria whose printed formulas contain misprints; see the per-criterion details.
const KNOWN_ERRATA: [u32; 2] = [5, 8];

struct Verdict {
    fails: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { fails: Vec::new(), notes: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.fails.push(what.into());
        }
    }
}

fn x() -> NcPoly {
    NcPoly::var(0)
}
fn y() -> NcPoly {
    NcPoly::var(1)
}
fn v(i: u16) -> NcPoly {
    NcPoly::var(i)
}
fn qs(n: i64, d: i64) -> Q {
    qr(n, d)
}
fn prod(ps: &[&NcPoly]) -> NcPoly {
    ps.iter().fold(NcPoly::one(), |acc, p| acc.mul(p))
}

fn criterion_1() -> Verdict {
    let mut out = Verdict::new();
    let (s0, s1) = (fin::euler_s0(), fin::euler_s1());
    let hs: Vec<NcPoly> = (0..=5).map(fin::euler_h).collect();
    let rep = doublepoisson::lenard_verify(&s0, &s1, &hs).unwrap();
    for c in rep.checks.iter().filter(|c| !c.passed) {
        out.fails.push(c.name.clone());
    }
    let xy = x() + y();
    for m in 0..=3u32 {
        let flow = s1.hamiltonian_flow(&hs[m as usize + 1]);
        let p = xy.pow(m);
        let want = prod(&[&x(), &p, &y()]) - prod(&[&y(), &p, &x()]);
        out.expect(flow[0] == want && flow[1].is_zero(), format!("dx/dt_{m}"));
        // the same flow through S0 and the next density
        out.expect(s0.hamiltonian_flow(&hs[m as usize + 2]) == flow, format!("S0 form of dx/dt_{m}"));
    }
    // homogeneous components displayed for n = 1, 2
    let count = |w: &ncham::Word, var: u16| w.0.iter().filter(|s| s.var == var).count();
    let f1 = s1.hamiltonian_flow(&hs[2]).remove(0);
    let f2 = s1.hamiltonian_flow(&hs[3]).remove(0);
    let (xx, yy) = (x().mul(&x()), y().mul(&y()));
    out.expect(f1.filter(|w| count(w, 0) == 2) == xx.mul(&y()) - y().mul(&xx), "(2,1) part at n=1");
    out.expect(f1.filter(|w| count(w, 1) == 2) == x().mul(&yy) - yy.mul(&x()), "(1,2) part at n=1");
    let want22 = xx.mul(&yy) + prod(&[&x(), &y(), &x(), &y()]) - prod(&[&y(), &x(), &y(), &x()]) - yy.mul(&xx);
    out.expect(f2.filter(|w| count(w, 0) == 2 && count(w, 1) == 2) == want22, "(2,2) part at n=2");
    out.notes.push(format!("{} recursion/involution checks", rep.checks.len()));
    out
}

fn criterion_2() -> Verdict {
    let mut out = Verdict::new();
    let s = fin::type_c();
    out.expect(s.check_skew(), "skew");
    out.expect(s.check_jacobi(), "jacobi");
    for n in 1..=4u32 {
        let flow = s.hamiltonian_flow(&fin::type_c_h(n));
        let xn1 = x().pow(n + 1);
        out.expect(flow[0] == prod(&[&xn1, &y(), &x()]) - prod(&[&x(), &y(), &xn1]) && flow[1].is_zero(), format!("h_{n} flow"));

        let flow = s.hamiltonian_flow(&fin::type_c_h_tilde(n));
        let mut want = NcPoly::zero();
        for k in 0..n.saturating_sub(1) {
            let (a, b) = (x().pow(n - k), x().pow(k + 1));
            want += &prod(&[&a, &y(), &b, &y(), &x()]);
            want -= &prod(&[&x(), &y(), &b, &y(), &a]);
        }
        out.expect(flow[0] == want && flow[1].is_zero(), format!("h~_{n} flow"));

        let flow = s.hamiltonian_flow(&fin::type_c_h_bar(n));
        let want = prod(&[&x(), &x().mul(&y()).pow(n + 1), &x()]) - prod(&[&x(), &y().mul(&x()).pow(n + 1), &x()]);
        out.expect(flow[0] == want && flow[1].is_zero(), format!("h-_{n} flow"));
    }
    out
}

fn criterion_3() -> Verdict {
    let mut out = Verdict::new();
    let p = dpva::fixtures::affine();
    out.expect(p.check_skew(), "skew (all c)");
    out.expect(p.check_jacobi().unwrap(), "jacobi (all c)");
    let d = |a: usize, b: usize| if a == b { q(1) } else { q(0) };
    let u = NcPoly::var(0);
    for m in [2usize, 3] {
        let e = |a: usize, b: usize| CommPoly::cvar(CVar::new(0, a as u8, b as u8));
        for (i, j, h, k) in (0..m).flat_map(|i| (0..m).flat_map(move |j| (0..m).flat_map(move |h| (0..m).map(move |k| (i, j, h, k))))) {
            let mut c0 = CommPoly::zero();
            c0.add_scaled(&e(i, k), &d(j, h));
            c0.add_scaled(&e(h, j), &-d(k, i));
            let want0 = CommLambdaPoly::term(0, c0);
            let want1 = CommLambdaPoly::term(1, CommPoly::scalar(d(j, h) * d(i, k)));
            let got0 = repmat::vm_lambda_bracket(&p.parts[0], (&u, i, j), (&u, h, k), m).unwrap();
            let got1 = repmat::vm_lambda_bracket(&p.parts[1], (&u, i, j), (&u, h, k), m).unwrap();
            out.expect(got0 == want0 && got1 == want1, format!("m={m} {{u{}{} λ u{}{}}}", i + 1, j + 1, h + 1, k + 1));
        }
    }
    let rep = repmat::vm_jacobi_check_pencil(&p, 2, &repmat::all_triples(1, 2)).unwrap();
    out.expect(rep.all_passed(), "V_2 Jacobi");
    out.notes.push(format!("{} entry triples at m=2", repmat::all_triples(1, 2).len()));
    out
}

fn criterion_4() -> Verdict {
    let mut out = Verdict::new();
    for n in 1..=3 {
        let sys = AdlerSystem::gelfand_dickey(n).unwrap();
        let (h, k) = (sys.structure(Which::H).unwrap(), sys.structure(Which::K).unwrap());
        out.expect(h.check_skew() && h.check_jacobi().unwrap(), format!("H, N={n}"));
        out.expect(k.check_skew() && k.check_jacobi().unwrap(), format!("K, N={n}"));
        let p = sys.pencil().unwrap();
        out.expect(p.check_skew() && p.check_jacobi().unwrap(), format!("H+cK, N={n}"));
    }
    out
}

fn show(p: &NcPoly, names: &[&str]) -> String {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    print::poly(p, &names, Style::Plain)
}

/// Compares displayed `∂^n` coefficients of a symbol; `fixed` lists corrected readings of
/// misprinted coefficients, which must match the computation.
fn compare_symbol(out: &mut Verdict, what: &str, names: &[&str], got: &Laurent<NcPoly>, shown: &[(i32, NcPoly)], fixed: &[(i32, NcPoly)]) {
    for (n, want) in shown {
        let have = got.coeff(*n);
        if got.valid_from.is_some_and(|vf| *n < vf) {
            out.fails.push(format!("{what}: ∂^{n} outside the computed window"));
        } else if &have != want {
            out.fails.push(format!("{what}, ∂^{n}: printed {}, computed {}", show(want, names), show(&have, names)));
        }
    }
    for (n, want) in fixed {
        let ok = got.coeff(*n) == *want;
        out.notes.push(format!("{what}, ∂^{n} reads {}: {}", show(want, names), if ok { "matches" } else { "differs" }));
        if !ok {
            out.fails.push(format!("{what}, corrected ∂^{n}"));
        }
    }
}

fn criterion_5() -> Verdict {
    let mut out = Verdict::new();
    // KdV, L = ∂² + u
    let sys = AdlerSystem::reduced_gd(2).unwrap();
    let names = ["u_m2", "u"];
    let l = sys.operator();
    let u = v(1);
    let half = psido::power_frac(&l, 1, -4).unwrap();
    compare_symbol(&mut out, "KdV L^(1/2)", &names, &half, &[
        (1, NcPoly::one()),
        (0, NcPoly::zero()),
        (-1, u.scale(&qs(1, 2))),
        (-2, u.d().scale(&qs(-1, 4))),
        (-3, (u.d_n(2) - u.mul(&u)).scale(&qs(1, 8))),
    ], &[]);
    let three_half = psido::power_frac(&l, 3, -2).unwrap();
    compare_symbol(&mut out, "KdV L^(3/2)", &names, &three_half, &[
        (3, NcPoly::one()),
        (2, NcPoly::zero()),
        (1, u.scale(&qs(3, 2))),
        (0, u.d().scale(&qs(3, 4))),
        (-1, (u.mul(&u).scale(&q(3)) + u.d_n(2)).scale(&qs(1, 8))),
    ], &[]);
    // Boussinesq, L = ∂³ + u∂ + v
    let sys = AdlerSystem::reduced_gd(3).unwrap();
    let names = ["u_m3", "u", "v"];
    let l = sys.operator();
    let (u, w) = (v(1), v(2));
    let third = psido::power_frac(&l, 1, -4).unwrap();
    compare_symbol(&mut out, "Boussinesq L^(1/3)", &names, &third, &[
        (1, NcPoly::one()),
        (0, NcPoly::zero()),
        (-1, u.scale(&qs(1, 3))),
        (-2, (w.clone() - u.d()).scale(&qs(1, 3))),
        (-3, (u.d_n(2).scale(&q(2)) - u.mul(&u) - w.d().scale(&q(3))).scale(&qs(1, 9))),
    ], &[]);
    let two_third = psido::power_frac(&l, 2, -3).unwrap();
    compare_symbol(&mut out, "Boussinesq L^(2/3)", &names, &two_third, &[
        (2, NcPoly::one()),
        (1, NcPoly::zero()),
        (0, u.scale(&qs(2, 3))),
        (-1, (w.scale(&q(2)) - u.d()).scale(&qs(1, 3))),
        (-2, (u.d_n(2).scale(&q(3)) - u.mul(&u) - w.d().scale(&q(3))).scale(&qs(1, 9))),
    ], &[(-2, (u.d_n(2) - u.mul(&u) - w.d().scale(&q(3))).scale(&qs(1, 9)))]);
    // KP, L = ∂ + Σ u_i ∂^{−i−1}; u_i is variable i+1
    let sys = AdlerSystem::kp(3).unwrap();
    let names = ["u_m1", "u0", "u1", "u2", "u3"];
    let l = sys.operator();
    let (u0, u1, u2) = (v(1), v(2), v(3));
    let sq = psido::pow(&l, 2, -3);
    compare_symbol(&mut out, "KP L^2", &names, &sq, &[
        (2, NcPoly::one()),
        (1, NcPoly::zero()),
        (0, u0.scale(&q(2))),
        (-1, u1.scale(&q(2)) - u0.d()),
        (-2, u2.scale(&q(2)) + u1.d() + u0.mul(&u0)),
    ], &[(-1, u1.scale(&q(2)) + u0.d())]);
    let cube = psido::pow(&l, 3, -3);
    // the last printed coefficient is the ∂^{-1} one, shown against ∂^{-2}
    let last = u2.scale(&q(3)) + u1.d().scale(&q(3)) + u0.mul(&u0).scale(&q(3)) + u0.d_n(2);
    compare_symbol(&mut out, "KP L^3", &names, &cube, &[
        (3, NcPoly::one()),
        (2, NcPoly::zero()),
        (1, u0.scale(&q(3))),
        (0, (u1.clone() + u0.d()).scale(&q(3))),
        (-2, last.clone()),
    ], &[(-1, last)]);
    out
}

fn criterion_6() -> Verdict {
    let mut out = Verdict::new();
    // KdV
    let sys = AdlerSystem::reduced_gd(2).unwrap();
    let u = v(1);
    let kdv = (u.d_n(3) + u.mul(&u.d()).scale(&q(3)) + u.d().mul(&u).scale(&q(3))).scale(&qs(1, 4));
    out.expect(sys.lax_flow(1).unwrap() == vec![(-1, u.d())], "KdV t_1");
    out.expect(sys.lax_flow(3).unwrap() == vec![(-1, kdv.clone())], "KdV t_3 (Lax)");
    // Boussinesq
    let sys = AdlerSystem::reduced_gd(3).unwrap();
    let (u, w) = (v(1), v(2));
    let du = w.d().scale(&q(2)) - u.d_n(2);
    let dv = w.d_n(2) - u.d_n(3).scale(&qs(2, 3)) - u.mul(&u.d()).scale(&qs(2, 3)) + (u.mul(&w) - w.mul(&u)).scale(&qs(2, 3));
    out.expect(sys.lax_flow(1).unwrap() == vec![(-2, u.d()), (-1, w.d())], "Boussinesq t_1");
    out.expect(sys.lax_flow(2).unwrap() == vec![(-2, du.clone()), (-1, dv.clone())], "Boussinesq t_2 (Lax)");
    // the Hamiltonian route: {∫h_k, u_i}_H on the full window, then u_{−N} = 0
    for (n, k, want) in [(2, 3, vec![kdv]), (3, 2, vec![du, dv])] {
        let full = AdlerSystem::gelfand_dickey(n).unwrap();
        let h = full.conserved_density(k).unwrap();
        let s = full.structure(Which::H).unwrap();
        let got: Vec<NcPoly> = (1..n as u16).map(|i| s.pair_bracket(&h, &v(i)).unwrap().kill_var(0)).collect();
        out.expect(got == want, format!("N={n} t_{k} (Hamiltonian)"));
    }
    // KP
    let sys = AdlerSystem::kp(4).unwrap();
    let (u0, u1, u2) = (v(1), v(2), v(3));
    let t2 = sys.lax_flow(2).unwrap();
    let t3 = sys.lax_flow(3).unwrap();
    let get = |f: &[(i32, NcPoly)], i: i32| f.iter().find(|(j, _)| *j == i).map(|(_, p)| p.clone());
    out.expect(get(&t2, 0) == Some(u0.d_n(2) + u1.d().scale(&q(2))), "KP du0/dt2");
    let two = q(2);
    out.expect(get(&t2, 1) == Some(u1.d_n(2) + u2.d().scale(&two) + u0.mul(&u0.d()).scale(&two) + u0.mul(&u1).scale(&two) - u1.mul(&u0).scale(&two)), "KP du1/dt2");
    let three = q(3);
    out.expect(get(&t3, 0) == Some(u0.d_n(3) + u1.d_n(2).scale(&three) + u2.d().scale(&three) + u0.mul(&u0.d()).scale(&three) + u0.d().mul(&u0).scale(&three)), "KP du0/dt3");
    let rep = adler::kp_subsystem(&sys).unwrap();
    out.expect(rep.all_passed(), "eliminated KP system");
    out
}

fn criterion_7() -> Verdict {
    let mut out = Verdict::new();
    for n in 2..=3 {
        let rep = adler::lenard_pde_verify(&AdlerSystem::gelfand_dickey(n).unwrap(), 4, 5).unwrap();
        for c in rep.checks.iter().filter(|c| !c.passed) {
            out.fails.push(format!("N={n} {}", c.name));
        }
        out.notes.push(format!("N={n}: {} checks", rep.checks.len()));
    }
    out
}

/// `p ⊗ (λ+∂)^{-1} q`
fn p_inv_q(p: &NcPoly, qq: &NcPoly) -> LambdaTensor2 {
    lift(&shift(-1, qq), |c| t(p, c))
}
/// `((λ+∂)^{-1} p) ⊗ q`
fn inv_p_q(p: &NcPoly, qq: &NcPoly) -> LambdaTensor2 {
    lift(&shift(-1, p), |c| t(c, qq))
}
/// `p · ((λ+∂)^{-1} q) ⊗ 1`
fn p_inv_q_one(p: &NcPoly, qq: &NcPoly) -> LambdaTensor2 {
    lift(&shift(-1, qq), |c| t(&p.mul(c), &one()))
}
/// `1 ⊗ ((λ+∂)^{-1} p) · q`
fn one_inv_p_q(p: &NcPoly, qq: &NcPoly) -> LambdaTensor2 {
    lift(&shift(-1, p), |c| t(&one(), &c.mul(qq)))
}

/// Coefficients at exponents `lo..=hi` that differ.
fn diff_exponents(a: &LambdaTensor2, b: &LambdaTensor2, lo: i32) -> Vec<i32> {
    let hi = a.coeffs.keys().chain(b.coeffs.keys()).copied().max().unwrap_or(lo);
    (lo..=hi).filter(|&n| a.coeff(n) != b.coeff(n)).collect()
}

fn criterion_8() -> Verdict {
    let mut out = Verdict::new();
    const LO: i32 = -6;
    let th = || qr(1, 3);
    let tt = || qr(2, 3);

    // N = 2
    let sys = AdlerSystem::gelfand_dickey(2).unwrap().with_depth(8);
    let d = adler::dirac_reduce(&sys).unwrap();
    let u = v(0);
    let uu2 = sum(&[
        (half(), lam(3, &t(&one(), &one()))),
        (q(1), lam(1, &(t(&u, &one()) + t(&one(), &u)))),
        (half(), lam(0, &(t(&u, &one()) + t(&one(), &u)).d())),
        (-half(), p_inv_q(&u, &u)),
        (-half(), inv_p_q(&u, &u)),
        (half(), p_inv_q_one(&u, &u)),
        (half(), one_inv_p_q(&u, &u)),
    ]);
    let bad = diff_exponents(&d.brackets[0][0], &uu2, LO);
    out.expect(bad.is_empty(), format!("N=2 {{{{u λ u}}}}_HD at λ^{bad:?}"));
    let k2 = adler::quotient(&sys.structure(Which::K).unwrap(), 0);
    out.expect(k2.brackets[0][0] == lam(1, &t(&one(), &one()).scale(&q(2))), "N=2 {{u λ u}}_K");

    // N = 3
    let sys = AdlerSystem::gelfand_dickey(3).unwrap().with_depth(8);
    let d = adler::dirac_reduce(&sys).unwrap();
    let (u, w) = (v(0), v(1));
    let nonlocal = |a: &NcPoly, b: &NcPoly| sum(&[(th(), p_inv_q_one(a, b)), (th(), one_inv_p_q(b, a)), (-th(), p_inv_q(a, b)), (-th(), inv_p_q(b, a))]);
    let uu = sum(&[
        (q(1), nonlocal(&u, &u)),
        (q(1), lam(0, &(t(&one(), &w) - t(&w, &one())))),
        (q(1), lam(1, &t(&one(), &u))),
        (q(1), shift_t(1, &t(&u, &one()))),
        (q(2), lam(3, &t(&one(), &one()))),
    ]);
    let uv = sum(&[
        (q(1), nonlocal(&w, &u)),
        (th(), lam(0, &(t(&u.mul(&u), &one()) - t(&u, &u)))),
        (q(2), lam(1, &t(&one(), &w))),
        (q(1), lam(0, &t(&one(), &w.d()))),
        (q(1), lam(1, &t(&w, &one()))),
        (th(), shift_t(2, &(t(&u, &one()) - t(&one(), &u)))),
        (q(1), lam(2, &t(&u, &one()))),
        (q(1), lam(4, &t(&one(), &one()))),
    ]);
    let vv_printed = sum(&[
        (th(), p_inv_q_one(&w, &w)),
        (th(), one_inv_p_q(&w, &w)),
        (tt(), lam(0, &(t(&u, &w) - t(&w, &u)))),
        (th(), lam(0, &(t(&u.mul(&w), &one()) - t(&one(), &u.mul(&w))))),
        (-tt(), lam(1, &t(&u, &u))),
        (-tt(), lam(0, &t(&u, &u.d()))),
        (tt(), shift_t(2, &t(&one(), &w))),
        (-tt(), lam(2, &t(&w, &one()))),
        (th(), shift_t(2, &t(&w, &one()))),
        (-th(), lam(2, &t(&one(), &w))),
        (-tt(), shift_t(3, &t(&one(), &u))),
        (tt(), lam(3, &t(&u, &one()))),
        (qr(-2, 5), lam(5, &t(&one(), &one()))),
    ]);
    // the printed formula with its three misprints corrected
    let vv_fixed = sum(&[
        (q(1), vv_printed.clone()),
        (-th(), p_inv_q(&w, &w)),
        (-th(), inv_p_q(&w, &w)),
        (-tt() - tt(), lam(3, &t(&u, &one()))),
        (qr(-2, 3) + qr(2, 5), lam(5, &t(&one(), &one()))),
    ]);
    for (name, got, want) in [("uu", &d.brackets[0][0], &uu), ("uv", &d.brackets[0][1], &uv)] {
        let bad = diff_exponents(got, want, LO);
        out.expect(bad.is_empty(), format!("N=3 {{{{{name}}}}}_HD at λ^{bad:?}"));
    }
    let bad = diff_exponents(&d.brackets[1][1], &vv_printed, LO);
    out.expect(bad.is_empty(), format!("N=3 {{{{v λ v}}}}_HD as printed differs at λ^{bad:?}"));
    let fixed_ok = diff_exponents(&d.brackets[1][1], &vv_fixed, LO).is_empty();
    out.notes.push(format!("N=3 {{{{v λ v}}}} with the three misprints corrected: {}", if fixed_ok { "matches" } else { "still differs" }));
    out.expect(fixed_ok, "N=3 {{v λ v}} corrected form");
    let k3 = adler::quotient(&sys.structure(Which::K).unwrap(), 0);
    out.expect(k3.brackets[0][0].is_zero(), "N=3 {{u λ u}}_K");
    out.expect(k3.brackets[0][1] == lam(1, &t(&one(), &one()).scale(&q(3))), "N=3 {{u λ v}}_K");
    out.expect(k3.brackets[1][1] == lam(0, &(t(&u, &one()) - t(&one(), &u))), "N=3 {{v λ v}}_K");

    // the generating-series specialization and centrality of the constraint
    for n in 2..=3 {
        let sys = AdlerSystem::gelfand_dickey(n).unwrap().with_depth(8);
        let a = adler::dirac_reduce(&sys).unwrap();
        let b = adler::dirac_series(&sys).unwrap();
        for (i, (ra, rb)) in a.brackets.iter().zip(&b.brackets).enumerate() {
            for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
                let bad = diff_exponents(x, y, LO);
                out.expect(bad.is_empty(), format!("N={n} series entry ({i},{j}) at λ^{bad:?}"));
            }
        }
        out.expect(adler::dirac_centrality(&sys).unwrap().all_passed(), format!("N={n} θ central"));
        out.expect(a.check_skew(), format!("N={n} reduced skew"));
    }
    out
}

fn criterion_9() -> Verdict {
    let mut out = Verdict::new();
    let mut r = rnd::rng(9);
    let (mut d2, mut dd2, mut trips, mut agree) = (0, 0, 0, 0);
    for _ in 0..200 {
        let f = rnd::poly(&mut r, 2, 4, 4, 0);
        let ff: Vec<NcPoly> = (0..2).map(|_| rnd::poly(&mut r, 2, 3, 3, 0)).collect();
        d2 += complexes::d1_finite(&complexes::d0_finite(&f, 2).unwrap()).unwrap().is_zero() as u32;
        d2 += complexes::d2_finite(&complexes::d1_finite(&ff).unwrap()).unwrap().is_zero() as u32;
        let g = rnd::poly(&mut r, 1, 3, 3, 2);
        let gg = vec![rnd::poly(&mut r, 1, 3, 3, 2)];
        dd2 += complexes::delta1(&complexes::delta0(&g, 1)).is_zero() as u32;
        dd2 += complexes::delta2(&complexes::delta1(&gg)).unwrap().is_zero() as u32;
    }
    out.expect(d2 == 400, format!("d² = 0 held on {d2}/400"));
    out.expect(dd2 == 400, format!("δ² = 0 held on {dd2}/400"));
    for i in 0..100 {
        let (case, f) = if i % 2 == 0 { (Case::Finite, rnd::poly_nc(&mut r, 2, 4, 4, 0)) } else { (Case::Variational, rnd::poly_nc(&mut r, 2, 3, 3, 2)) };
        let form = match case {
            Case::Finite => complexes::d0_finite(&f, 2).unwrap(),
            Case::Variational => complexes::delta0(&f, 2),
        };
        let ok = complexes::is_closed_1form(&form, case).unwrap()
            && complexes::integrate_closed_1form(&form, case).is_ok_and(|g| complexes::zero_forms_equal(&f, &g, case));
        trips += ok as u32;
    }
    out.expect(trips == 100, format!("round trips {trips}/100"));
    let (mut closed, mut open) = (0, 0);
    for i in 0..100 {
        let finite = i % 2 == 0;
        let exact = r.gen_bool(0.5);
        let form: Vec<NcPoly> = match (finite, exact) {
            (true, true) => complexes::d0_finite(&rnd::poly(&mut r, 2, 4, 4, 0), 2).unwrap(),
            (true, false) => (0..2).map(|_| rnd::poly(&mut r, 2, 3, 3, 0)).collect(),
            (false, true) => complexes::delta0(&rnd::poly(&mut r, 2, 3, 3, 2), 2),
            (false, false) => (0..2).map(|_| rnd::poly(&mut r, 2, 3, 3, 2)).collect(),
        };
        let (case, explicit) = if finite {
            (Case::Finite, complexes::d1_finite(&form).unwrap().is_zero())
        } else {
            (Case::Variational, complexes::delta1(&form).is_zero())
        };
        let criterion = complexes::is_closed_1form(&form, case).unwrap();
        agree += (criterion == explicit) as u32;
        if explicit {
            closed += 1;
        } else {
            open += 1;
        }
    }
    out.expect(agree == 100, format!("J† criterion agreed on {agree}/100"));
    out.notes.push(format!("{closed} closed and {open} non-closed forms in the J† sample"));
    out
}

fn criterion_10() -> Verdict {
    let mut out = Verdict::new();
    let mut r = rnd::rng(10);
    let mut count = [0u32; 4];
    let mut nonzero = [0u32; 4];
    for _ in 0..25 {
        let s = rnd::skew_finite_structure(&mut r, 2);
        let (a, b, c) = (rnd::poly(&mut r, 2, 2, 2, 0), rnd::poly(&mut r, 2, 2, 2, 0), rnd::poly(&mut r, 2, 2, 2, 0));
        let (l, rr) = s.single_double_identity(&a, &b, &c);
        count[0] += (l == rr) as u32;
        nonzero[0] += !l.is_zero() as u32;

        let s = rnd::skew_local_structure(&mut r, 2, 2);
        let (a, b, c) = (rnd::poly(&mut r, 2, 2, 2, 1), rnd::poly(&mut r, 2, 2, 2, 1), rnd::poly(&mut r, 2, 2, 2, 1));
        let (l, rr) = dpva::quasi_jacobi_sides(&s, &a, &b, &c).unwrap();
        count[1] += (l == rr) as u32;
        nonzero[1] += !l.is_zero() as u32;

        let s = rnd::skew_local_structure(&mut r, 2, 1);
        let (a, b, c) = (rnd::poly(&mut r, 2, 2, 2, 1), rnd::poly(&mut r, 2, 2, 2, 1), rnd::poly(&mut r, 2, 2, 2, 1));
        let mut ix = || r.gen_range(0..2usize);
        let (i, j, h, k, l2, n) = (ix(), ix(), ix(), ix(), ix(), ix());
        let (l, rr) = repmat::jacobiator_contraction_sides(&s, 2, (&a, i, j), (&b, h, k), (&c, l2, n)).unwrap();
        count[2] += (l == rr) as u32;
        nonzero[2] += !l.is_zero() as u32;

        let nn = r.gen_range(1..=3);
        let sys = AdlerSystem::gelfand_dickey(nn).unwrap();
        let s: LambdaStructure = rnd::local_structure(&mut r, sys.nvars(), 2);
        let k = r.gen_range(1..=4);
        let (l, rr) = adler::adler_lemma_sides(&sys, &s, k).unwrap();
        count[3] += (l == rr) as u32;
        nonzero[3] += l.iter().any(|p| !p.is_zero()) as u32;
    }
    let names = ["single/double bracket identity", "quasi-Jacobi", "V_m Jacobiator contraction", "Adler lemma"];
    for ((name, c), nz) in names.iter().zip(count).zip(nonzero) {
        out.expect(c == 25, format!("{name}: {c}/25"));
        out.notes.push(format!("{name}: {nz}/25 instances with nonzero sides"));
    }
    out
}

#[test]
fn acceptance_criteria() {
    let criteria: [(u32, fn() -> Verdict); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let verdicts: Vec<(u32, Verdict)> = std::thread::scope(|sc| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(id, f)| {
                (
                    id,
                    sc.spawn(move || {
                        let start = Instant::now();
                        let mut v = f();
                        v.notes.push(format!("{:.1}s", start.elapsed().as_secs_f64()));
                        v
                    }),
                )
            })
            .collect();
        handles.into_iter().map(|(id, h)| (id, h.join().expect("criterion panicked"))).collect()
    });
    let mut failing = BTreeSet::new();
    let mut report = String::new();
    for (id, v) in &verdicts {
        if v.fails.is_empty() {
            report += &format!("criterion {id}: PASS\n");
        } else {
            failing.insert(*id);
            report += &format!("criterion {id}: FAIL\n");
            for f in &v.fails {
                report += &format!("    {f}\n");
            }
        }
        for n in &v.notes {
            report += &format!("    note: {n}\n");
        }
    }
    // written to the raw handle so the report survives libtest's output capture
    std::io::stderr().write_all(report.as_bytes()).unwrap();
    assert_eq!(failing, BTreeSet::from(KNOWN_ERRATA), "failing criteria differ from the documented errata");
}
