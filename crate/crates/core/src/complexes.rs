//! Reduced de Rham complex of `R_ℓ` and variational complex of `𝓡_ℓ` in low degree.
//!
//! Forms are stored as arrays: a 1-form is `(F_i)`, a 2-form is `(A_ij)` with entries in
//! `V⊗V` (or `(V⊗V)[λ]`), a 3-form is `(A_ijk)` with entries in `V⊗V⊗V` (or `[λ, μ]`).

use crate::dpva::{Lambda2, LambdaTensor2};
use crate::error::{Error, Result};
use crate::linear::{binom, q, qr, Q};
use crate::ncpoly::{functional_is_zero, trace_equal, NcPoly, Word};
use crate::psido::adjoint_bullet;
use crate::tensoralg::{Tensor2, Tensor3};

pub type Form1 = Vec<NcPoly>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// Polynomials `R_ℓ` modulo commutators.
    Finite,
    /// Differential polynomials `𝓡_ℓ` modulo commutators and total derivatives.
    Variational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form2Finite {
    pub a: Vec<Vec<Tensor2>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form3Finite {
    pub a: Vec<Vec<Vec<Tensor3>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form2Var {
    pub a: Vec<Vec<LambdaTensor2>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form3Var {
    pub a: Vec<Vec<Vec<Lambda2<Tensor3>>>>,
}

fn require_finite(fs: &[&NcPoly]) -> Result<()> {
    for f in fs {
        if f.keys().any(|w| w.0.iter().any(|s| s.der > 0)) {
            return Err(Error::Unsupported("derivatives in the finite de Rham complex".into()));
        }
    }
    Ok(())
}

fn partial_word(w: &Word, i: u16, n: u16) -> Tensor2 {
    NcPoly::word(w.clone()).partial(i, n)
}

fn is_zero3(a: &[Vec<Vec<Tensor3>>]) -> bool {
    a.iter().flatten().flatten().all(|t| t.is_zero())
}

impl Form2Finite {
    pub fn is_zero(&self) -> bool {
        self.a.iter().flatten().all(|t| t.is_zero())
    }

    /// `A_ij = −(A_ji)^σ`.
    pub fn is_skew(&self) -> bool {
        let l = self.a.len();
        (0..l).all(|i| (0..l).all(|j| self.a[i][j] == -self.a[j][i].sigma()))
    }
}

impl Form3Finite {
    pub fn is_zero(&self) -> bool {
        is_zero3(&self.a)
    }

    /// `A_ijk = (A_jki)^σ`.
    pub fn is_skew(&self) -> bool {
        let l = self.a.len();
        (0..l).all(|i| (0..l).all(|j| (0..l).all(|k| self.a[i][j][k] == self.a[j][k][i].sigma(1))))
    }
}

impl Form2Var {
    pub fn is_zero(&self) -> bool {
        self.a.iter().flatten().all(|t| t.is_zero())
    }

    /// `A_ij(λ) = −(A_ji(−λ−∂))^σ`.
    pub fn is_skew(&self) -> bool {
        let l = self.a.len();
        (0..l).all(|i| (0..l).all(|j| self.a[i][j].agrees_with(&adjoint_bullet(&self.a[j][i], 0).scale(&q(-1)))))
    }
}

/// `Σ_{p,q} λ^p (−λ−μ−∂)^q T_{pq}` read with `λ ↦ μ`: returns `B(μ, −λ−μ−∂)`.
fn shift_second(b: &Lambda2<Tensor3>) -> Lambda2<Tensor3> {
    let mut out = Lambda2::zero();
    for (&(p, qe), t) in &b.coeffs {
        push_neg_sum(&mut out, t, qe, (0, p), &q(1));
    }
    out
}

/// Adds `c · (−λ−μ−∂)^n t` at offset `(λ^a, μ^b)`.
fn push_neg_sum(out: &mut Lambda2<Tensor3>, t: &Tensor3, n: i32, (a0, b0): (i32, i32), c: &Q) {
    let sign = if n % 2 == 0 { q(1) } else { q(-1) };
    let mut dt = t.clone();
    for dc in 0..=n {
        let rest = n - dc;
        for a in 0..=rest {
            let coef = &sign * binom(n as i64, dc as u32) * binom(rest as i64, a as u32) * c;
            out.add_at((a0 + a, b0 + rest - a), &dt, &coef);
        }
        dt = dt.d();
    }
}

impl Form3Var {
    pub fn is_zero(&self) -> bool {
        self.a.iter().flatten().flatten().all(|t| t.is_zero())
    }

    /// `A_ijk(λ, μ) = (A_jki(μ, −λ−μ−∂))^σ`.
    pub fn is_skew(&self) -> bool {
        let l = self.a.len();
        (0..l).all(|i| {
            (0..l).all(|j| (0..l).all(|k| self.a[i][j][k] == shift_second(&self.a[j][k][i]).map(|t| t.sigma(1))))
        })
    }
}

/// `d tr(f) = (mult (∂f/∂x_i)^σ)_i`.
pub fn d0_finite(f: &NcPoly, l: usize) -> Result<Form1> {
    require_finite(&[f])?;
    Ok((0..l).map(|i| f.partial(i as u16, 0).sigma().mult()).collect())
}

/// `(dF)_ij = ½(∂F_j/∂x_i − (∂F_i/∂x_j)^σ)`.
pub fn d1_finite(f: &[NcPoly]) -> Result<Form2Finite> {
    require_finite(&f.iter().collect::<Vec<_>>())?;
    let l = f.len();
    let half = qr(1, 2);
    let a = (0..l)
        .map(|i| (0..l).map(|j| (f[j].partial(i as u16, 0) - f[i].partial(j as u16, 0).sigma()).scale(&half)).collect())
        .collect();
    Ok(Form2Finite { a })
}

/// `(dA)_ijk = ⅔((∂_i)_L A_jk − (∂_j)_R A_ik + ((∂_k)_L A_ij)^{σ²})`.
pub fn d2_finite(a: &Form2Finite) -> Result<Form3Finite> {
    let l = a.a.len();
    let c = qr(2, 3);
    let mut out = vec![vec![vec![Tensor3::zero(); l]; l]; l];
    for (i, oi) in out.iter_mut().enumerate() {
        for (j, oij) in oi.iter_mut().enumerate() {
            for (k, slot) in oij.iter_mut().enumerate() {
                let mut t = a.a[j][k].apply_first(|w| partial_word(w, i as u16, 0));
                t -= &a.a[i][k].apply_second(|w| partial_word(w, j as u16, 0));
                t += &a.a[i][j].apply_first(|w| partial_word(w, k as u16, 0)).sigma(2);
                *slot = t.scale(&c);
            }
        }
    }
    Ok(Form3Finite { a: out })
}

/// `δ∫f = (mult (δf/δu_i)^σ)_i`.
pub fn delta0(f: &NcPoly, l: usize) -> Form1 {
    (0..l).map(|i| f.variational(i as u16).sigma().mult()).collect()
}

/// `(δF)_ij(λ) = ½ Σ_n (∂F_j/∂u_i^(n) λ^n − (−λ−∂)^n (∂F_i/∂u_j^(n))^σ)`.
pub fn delta1(f: &[NcPoly]) -> Form2Var {
    let l = f.len();
    let half = qr(1, 2);
    let mut a = vec![vec![LambdaTensor2::zero(); l]; l];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            for n in 0..=f[j].max_der(i as u16).unwrap_or(0) {
                slot.add_at(n as i32, &f[j].partial(i as u16, n), &half);
            }
            for n in 0..=f[i].max_der(j as u16).unwrap_or(0) {
                let x = f[i].partial(j as u16, n).sigma();
                let sign = if n % 2 == 0 { -&half } else { half.clone() };
                let mut dx = x;
                for t in 0..=n {
                    slot.add_at((n - t) as i32, &dx, &(&sign * binom(n as i64, t as u32)));
                    dx = dx.d();
                }
            }
        }
    }
    Form2Var { a }
}

/// `(δA)_ijk(λ, μ) = ⅔ Σ_n ((∂/∂u_i^(n))_L A_jk(μ) λ^n − (∂/∂u_j^(n))_R A_ik(λ) μ^n
/// + (−λ−μ−∂)^n ((∂/∂u_k^(n))_L A_ij(λ))^{σ²})`.
pub fn delta2(a: &Form2Var) -> Result<Form3Var> {
    let l = a.a.len();
    for b in a.a.iter().flatten() {
        if !b.is_exact() || b.low().is_some_and(|v| v < 0) {
            return Err(Error::Unsupported("δ of non-polynomial 2-forms".into()));
        }
    }
    let c = qr(2, 3);
    let max_der = |v: u16| -> u16 {
        a.a.iter()
            .flatten()
            .flat_map(|b| b.coeffs.values())
            .flat_map(|t| t.keys())
            .flat_map(|(x, y)| x.0.iter().chain(y.0.iter()))
            .filter(|s| s.var == v)
            .map(|s| s.der)
            .max()
            .unwrap_or(0)
    };
    let mut out = vec![vec![vec![Lambda2::zero(); l]; l]; l];
    for (i, oi) in out.iter_mut().enumerate() {
        for (j, oij) in oi.iter_mut().enumerate() {
            for (k, slot) in oij.iter_mut().enumerate() {
                let acc: &mut Lambda2<Tensor3> = slot;
                for n in 0..=max_der(i as u16) {
                    for (&qe, t) in &a.a[j][k].coeffs {
                        let x = t.apply_first(|w| partial_word(w, i as u16, n));
                        acc.add_at((n as i32, qe), &x, &c);
                    }
                }
                for n in 0..=max_der(j as u16) {
                    for (&p, t) in &a.a[i][k].coeffs {
                        let x = t.apply_second(|w| partial_word(w, j as u16, n));
                        acc.add_at((p, n as i32), &x, &-&c);
                    }
                }
                for n in 0..=max_der(k as u16) {
                    for (&p, t) in &a.a[i][j].coeffs {
                        let x = t.apply_first(|w| partial_word(w, k as u16, n)).sigma(2);
                        push_neg_sum(acc, &x, n as i32, (p, 0), &c);
                    }
                }
            }
        }
    }
    Ok(Form3Var { a: out })
}

/// `J_F = (∂F_i/∂x_j)` in the finite case, the Frechet derivative `D_F(λ)` otherwise.
pub fn jacobian(f: &[NcPoly], case: Case) -> Vec<Vec<LambdaTensor2>> {
    let l = f.len();
    (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let top = match case {
                        Case::Finite => 0,
                        Case::Variational => f[i].max_der(j as u16).unwrap_or(0),
                    };
                    LambdaTensor2::from_coeffs((0..=top).map(|n| (n as i32, f[i].partial(j as u16, n))))
                })
                .collect()
        })
        .collect()
}

/// Closedness through self-adjointness: `J_F = J_F^†` (finite) or `D_F(∂)` selfadjoint.
pub fn is_closed_1form(f: &[NcPoly], case: Case) -> Result<bool> {
    if case == Case::Finite {
        require_finite(&f.iter().collect::<Vec<_>>())?;
    }
    let j = jacobian(f, case);
    let l = f.len();
    Ok((0..l).all(|a| (0..l).all(|b| j[b][a].agrees_with(&adjoint_bullet(&j[a][b], 0)))))
}

/// A density `f` with `d tr f = F` (finite) or `δ∫f = F` (variational), built from the
/// homotopy `ι_Δ`: the degree-`k` part of `f` is `(1/k) Σ_i x_i F_i^{(k−1)}`.
pub fn integrate_closed_1form(f: &[NcPoly], case: Case) -> Result<NcPoly> {
    if !is_closed_1form(f, case)? {
        return Err(Error::NotClosed);
    }
    let mut out = NcPoly::zero();
    for (i, fi) in f.iter().enumerate() {
        let xi = NcPoly::var(i as u16);
        for (deg, part) in fi.by_degree() {
            let k = deg as i64 + 1;
            out.add_scaled(&xi.mul(&part), &qr(1, k));
        }
    }
    let back = match case {
        Case::Finite => d0_finite(&out, f.len())?,
        Case::Variational => delta0(&out, f.len()),
    };
    if back != f {
        return Err(Error::Inconsistent("homotopy integral does not re-differentiate to the input".into()));
    }
    Ok(out)
}

/// Equality of 0-forms in the respective quotient.
pub fn zero_forms_equal(f: &NcPoly, g: &NcPoly, case: Case) -> bool {
    match case {
        Case::Finite => trace_equal(f, g),
        Case::Variational => functional_is_zero(&(f - g)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> NcPoly {
        NcPoly::var(0)
    }
    fn y() -> NcPoly {
        NcPoly::var(1)
    }

    #[test]
    fn finite_examples() {
        assert_eq!(d0_finite(&x().mul(&x()), 1).unwrap(), vec![x().scale(&q(2))]);
        let f = vec![y(), x()];
        assert_eq!(d0_finite(&x().mul(&y()), 2).unwrap(), f);
        assert!(d1_finite(&f).unwrap().is_zero());
        assert!(!is_closed_1form(&[y(), NcPoly::zero()], Case::Finite).unwrap());
        assert!(!d1_finite(&[y(), NcPoly::zero()]).unwrap().is_zero());
        let g = integrate_closed_1form(&[x().scale(&q(2))], Case::Finite).unwrap();
        assert!(trace_equal(&g, &x().mul(&x())));
        assert_eq!(integrate_closed_1form(&[NcPoly::zero()], Case::Finite).unwrap(), NcPoly::zero());
        assert_eq!(integrate_closed_1form(&[y(), NcPoly::zero()], Case::Finite), Err(Error::NotClosed));
    }

    #[test]
    fn finite_d_squared() {
        let f = x().mul(&y()).mul(&x()).mul(&y()) + y().mul(&y()).mul(&x()).scale(&q(3)) - x();
        let one = d0_finite(&f, 2).unwrap();
        assert!(d1_finite(&one).unwrap().is_zero());
        let g = vec![x().mul(&y()).mul(&y()), y().mul(&x()) + x().mul(&x()).mul(&x())];
        let two = d1_finite(&g).unwrap();
        assert!(!two.is_zero() && two.is_skew());
        let three = d2_finite(&two).unwrap();
        assert!(three.is_zero());
    }

    #[test]
    fn finite_d2_nonzero_and_skew() {
        let mut a = Form2Finite { a: vec![vec![Tensor2::zero(); 2]; 2] };
        let t = Tensor2::pure(&x(), &y());
        a.a[0][1] = t.clone();
        a.a[1][0] = -t.sigma();
        let three = d2_finite(&a).unwrap();
        assert!(!three.is_zero() && three.is_skew());
    }

    #[test]
    fn variational_examples() {
        let u = x();
        assert_eq!(delta0(&u.mul(&u).scale(&qr(1, 2)), 1), vec![u.clone()]);
        assert_eq!(delta0(&u.d(), 1), vec![NcPoly::zero()]);
        let h3 = u.d().d() + u.mul(&u).mul(&u);
        let f = delta0(&h3, 1);
        assert!(delta1(&f).is_zero());
        let back = integrate_closed_1form(&f, Case::Variational).unwrap();
        assert!(functional_is_zero(&(back - h3)));
    }

    #[test]
    fn variational_delta_squared() {
        let (u, v) = (x(), y());
        let f = vec![u.d().mul(&v).mul(&u), v.d().d().mul(&u) + u.mul(&u)];
        let two = delta1(&f);
        assert!(!two.is_zero() && two.is_skew());
        assert!(!is_closed_1form(&f, Case::Variational).unwrap());
        let three = delta2(&two).unwrap();
        assert!(three.is_zero());
    }

    #[test]
    fn variational_delta2_skew() {
        let (u, v) = (x(), y());
        let mut a = Form2Var { a: vec![vec![LambdaTensor2::zero(); 2]; 2] };
        let b = LambdaTensor2::from_coeffs([(0, Tensor2::pure(&u.d(), &v)), (1, Tensor2::pure(&NcPoly::one(), &u))]);
        a.a[1][0] = adjoint_bullet(&b, 0).scale(&q(-1));
        a.a[0][1] = b;
        assert!(a.is_skew());
        let three = delta2(&a).unwrap();
        assert!(!three.is_zero() && three.is_skew());
    }
}
