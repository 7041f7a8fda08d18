//! Double Poisson brackets on free algebras `R_ℓ = F⟨x_1, …, x_ℓ⟩`.
//!
//! A structure is given by its values `{{x_i, x_j}}` on generators and extended
//! to all of `R_ℓ` by the master formula
//! `{{f, g}} = Σ_{i,j} ∂g/∂x_j • {{x_i, x_j}} • (∂f/∂x_i)^σ`.

use crate::error::{Error, Result};
use crate::linear::{qr, Q};
use crate::ncpoly::{trace_equal, NcPoly};
use crate::report::Report;
use crate::tensoralg::{Tensor2, Tensor3};

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteStructure {
    /// `brackets[i][j] = {{x_i, x_j}}`.
    pub brackets: Vec<Vec<Tensor2>>,
}

impl FiniteStructure {
    pub fn zero(nvars: usize) -> Self {
        FiniteStructure { brackets: vec![vec![Tensor2::zero(); nvars]; nvars] }
    }

    pub fn nvars(&self) -> usize {
        self.brackets.len()
    }

    /// Sets `{{x_i, x_j}}` and, for `i != j`, the skew partner `{{x_j, x_i}} = −{{x_i, x_j}}^σ`.
    pub fn with_skew(mut self, i: usize, j: usize, t: Tensor2) -> Self {
        if i != j {
            self.brackets[j][i] = -t.sigma();
        }
        self.brackets[i][j] = t;
        self
    }

    pub fn set(&mut self, i: usize, j: usize, t: Tensor2) {
        self.brackets[i][j] = t;
    }

    /// `{{f, g}}` by the master formula.
    pub fn bracket(&self, f: &NcPoly, g: &NcPoly) -> Tensor2 {
        let l = self.nvars() as u16;
        let df: Vec<Tensor2> = (0..l).map(|i| f.partial(i, 0).sigma()).collect();
        let mut out = Tensor2::zero();
        for j in 0..l {
            let dg = g.partial(j, 0);
            if dg.is_zero() {
                continue;
            }
            for (i, dfi) in df.iter().enumerate() {
                let b = &self.brackets[i][j as usize];
                if dfi.is_zero() || b.is_zero() {
                    continue;
                }
                out += &dg.bullet(b).bullet(dfi);
            }
        }
        out
    }

    /// `{f, g} = mult {{f, g}}`.
    pub fn trace_bracket(&self, f: &NcPoly, g: &NcPoly) -> NcPoly {
        self.bracket(f, g).mult()
    }

    /// `{{a, B}}_L = Σ {{a, B′}} ⊗ B″`.
    pub fn bracket_l(&self, a: &NcPoly, b: &Tensor2) -> Tensor3 {
        b.apply_first(|w| self.bracket(a, &NcPoly::word(w.clone())))
    }

    /// `{a, −}` extended to `V⊗V` as a derivation.
    pub fn single_on_tensor(&self, a: &NcPoly, b: &Tensor2) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((p, r), c) in b.iter() {
            let pp = NcPoly::word(p.clone());
            let rr = NcPoly::word(r.clone());
            let t = Tensor2::pure(&self.trace_bracket(a, &pp), &rr) + Tensor2::pure(&pp, &self.trace_bracket(a, &rr));
            out.add_scaled(&t, c);
        }
        out
    }

    /// The triple bracket `{{a,{{b,c}}}}_L + {{b,{{c,a}}}}_L^σ + {{c,{{a,b}}}}_L^{σ²}`.
    pub fn triple(&self, a: &NcPoly, b: &NcPoly, c: &NcPoly) -> Tensor3 {
        let t1 = self.bracket_l(a, &self.bracket(b, c));
        let t2 = self.bracket_l(b, &self.bracket(c, a)).sigma(1);
        let t3 = self.bracket_l(c, &self.bracket(a, b)).sigma(2);
        t1 + t2 + t3
    }

    pub fn check_skew(&self) -> bool {
        let l = self.nvars();
        (0..l).all(|i| (0..l).all(|j| (&self.brackets[i][j] + &self.brackets[j][i].sigma()).is_zero()))
    }

    pub fn check_jacobi(&self) -> bool {
        self.jacobi_failures().is_empty()
    }

    /// Generator triples on which the triple bracket does not vanish.
    pub fn jacobi_failures(&self) -> Vec<(usize, usize, usize)> {
        let l = self.nvars();
        let mut bad = Vec::new();
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    let (a, b, c) = (NcPoly::var(i as u16), NcPoly::var(j as u16), NcPoly::var(k as u16));
                    if !self.triple(&a, &b, &c).is_zero() {
                        bad.push((i, j, k));
                    }
                }
            }
        }
        bad
    }

    /// Both sides of `{a,{{b,c}}} − {{{a,b},c}} − {{b,{a,c}}} = (mult⊗1){{a,b,c}} − (1⊗mult){{b,a,c}}`.
    pub fn single_double_identity(&self, a: &NcPoly, b: &NcPoly, c: &NcPoly) -> (Tensor2, Tensor2) {
        let lhs = self.single_on_tensor(a, &self.bracket(b, c)) - self.bracket(&self.trace_bracket(a, b), c) - self.bracket(b, &self.trace_bracket(a, c));
        let rhs = self.triple(a, b, c).mult12() - self.triple(b, a, c).mult23();
        (lhs, rhs)
    }

    /// `dx_i/dt = mult Σ_j {{x_j, x_i}} • (∂h/∂x_j)^σ`.
    pub fn hamiltonian_flow(&self, h: &NcPoly) -> Vec<NcPoly> {
        let l = self.nvars();
        (0..l)
            .map(|i| {
                let mut acc = Tensor2::zero();
                for j in 0..l {
                    acc += &self.brackets[j][i].bullet(&h.partial(j as u16, 0).sigma());
                }
                acc.mult()
            })
            .collect()
    }
}

/// Checks `{tr h_n, x_i}_1 = {tr h_{n+1}, x_i}_0` for every consecutive pair,
/// `{tr h_0, x_i}_0 = 0`, and pairwise involution of all `tr h_n` under both brackets.
pub fn lenard_verify(s0: &FiniteStructure, s1: &FiniteStructure, hs: &[NcPoly]) -> Result<Report> {
    if s0.nvars() != s1.nvars() {
        return Err(Error::DimensionMismatch(format!("{} vs {} generators", s0.nvars(), s1.nvars())));
    }
    let l = s0.nvars();
    let mut rep = Report::new();
    if let Some(h0) = hs.first() {
        let ok = (0..l).all(|i| s0.trace_bracket(h0, &NcPoly::var(i as u16)).is_zero());
        rep.push("kernel of S0 at h_0", ok, "");
    }
    for n in 0..hs.len().saturating_sub(1) {
        for i in 0..l {
            let x = NcPoly::var(i as u16);
            let lhs = s1.trace_bracket(&hs[n], &x);
            let rhs = s0.trace_bracket(&hs[n + 1], &x);
            rep.push(format!("recursion n={n} x_{i}"), lhs == rhs, if lhs == rhs { String::new() } else { format!("pair ({n}, {})", n + 1) });
        }
    }
    for (si, s) in [s0, s1].iter().enumerate() {
        for a in 0..hs.len() {
            for b in a + 1..hs.len() {
                let v = s.trace_bracket(&hs[a], &hs[b]);
                rep.push(format!("involution S{si} ({a},{b})"), trace_equal(&v, &NcPoly::zero()), "");
            }
        }
    }
    Ok(rep)
}

/// Fixtures on `R_2 = F⟨x, y⟩` with `y` central.
pub mod fixtures {
    use super::*;

    fn x() -> NcPoly {
        NcPoly::var(0)
    }
    fn y() -> NcPoly {
        NcPoly::var(1)
    }

    /// `{{x,x}} = p⊗q − q⊗p`, all other generator brackets zero.
    pub fn pq(p: &NcPoly, q: &NcPoly) -> FiniteStructure {
        FiniteStructure::zero(2).with_skew(0, 0, Tensor2::pure(p, q) - Tensor2::pure(q, p))
    }

    pub fn euler_s0() -> FiniteStructure {
        pq(&NcPoly::one(), &y())
    }

    pub fn euler_s1() -> FiniteStructure {
        pq(&x(), &y())
    }

    /// `h_0 = 1`, `h_n = (x+y)^n / n`.
    pub fn euler_h(n: u32) -> NcPoly {
        if n == 0 {
            return NcPoly::one();
        }
        (x() + y()).pow(n).scale(&qr(1, n as i64))
    }

    /// Type (c): `{{x,x}} = x⊗xyx − xyx⊗x`.
    pub fn type_c() -> FiniteStructure {
        pq(&x(), &x().mul(&y()).mul(&x()))
    }

    pub fn type_c_h(n: u32) -> NcPoly {
        x().pow(n).scale(&Q::new(1.into(), n.into()))
    }

    pub fn type_c_h_tilde(n: u32) -> NcPoly {
        x().pow(n).mul(&y())
    }

    pub fn type_c_h_bar(n: u32) -> NcPoly {
        x().mul(&y().mul(&x()).pow(n))
    }
}
