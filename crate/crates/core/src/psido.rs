//! Pseudodifferential operators `Σ a_n ∂^n` as symbols in a formal variable.
//!
//! Coefficients live in any [`DiffRing`]: [`NcPoly`] for ordinary operators, or
//! [`Tensor2`] with the bullet product ("bullet mode").

use num_traits::One;

use crate::error::{Error, Result};
use crate::linear::{binom, q, DiffRing, Q};
use crate::ncpoly::NcPoly;
use crate::series::Laurent;
use crate::tensoralg::Tensor2;

pub type PsiDO<T> = Laurent<T>;

/// `A* = Σ (−∂)^n ∘ t(a_n)` where `t` is applied to each coefficient first;
/// exponents below `floor` are dropped.
pub fn adjoint_with<T: DiffRing>(a: &PsiDO<T>, floor: i32, t: impl Fn(&T) -> T) -> PsiDO<T> {
    let floor = a.valid_from.map_or(floor, |v| v.max(floor));
    let mut out = PsiDO::zero();
    let mut dropped = a.valid_from.is_some();
    for (&n, c) in &a.coeffs {
        let mut dk = t(c);
        let sign = if n.rem_euclid(2) == 0 { q(1) } else { q(-1) };
        let mut k: u32 = 0;
        while n < 0 || k as i32 <= n {
            let e = n - k as i32;
            if e < floor {
                dropped = true;
                break;
            }
            out.add_at(e, &dk, &(&sign * binom(n as i64, k)));
            dk = dk.d();
            k += 1;
        }
    }
    if dropped {
        out.valid_from = Some(floor);
        out.coeffs = out.coeffs.split_off(&floor);
    }
    out
}

/// Formal adjoint for ordinary coefficients.
pub fn adjoint(a: &PsiDO<NcPoly>, floor: i32) -> PsiDO<NcPoly> {
    adjoint_with(a, floor, |c| c.clone())
}

/// Formal adjoint in bullet mode: `Σ (−∂)^n ∘ a_n^σ`.
pub fn adjoint_bullet(a: &PsiDO<Tensor2>, floor: i32) -> PsiDO<Tensor2> {
    adjoint_with(a, floor, |c| c.sigma())
}

pub fn residue<T: DiffRing>(a: &PsiDO<T>) -> Result<T> {
    if a.valid_from.is_some_and(|v| v > -1) {
        return Err(Error::DepthExhausted("residue lies outside the exact window".into()));
    }
    Ok(a.coeff(-1))
}

/// Differential part `(A)₊`, exponents `>= 0`.
pub fn positive_part<T: DiffRing>(a: &PsiDO<T>) -> Result<PsiDO<T>> {
    if a.valid_from.is_some_and(|v| v > 0) {
        return Err(Error::DepthExhausted("positive part lies outside the exact window".into()));
    }
    let mut out = PsiDO::zero();
    for (&n, c) in a.coeffs.range(0..) {
        out.coeffs.insert(n, c.clone());
    }
    Ok(out)
}

pub fn negative_part<T: DiffRing>(a: &PsiDO<T>) -> PsiDO<T> {
    let mut out = PsiDO::zero();
    out.valid_from = a.valid_from;
    for (&n, c) in a.coeffs.range(..0) {
        out.coeffs.insert(n, c.clone());
    }
    out
}

/// `A^k`, exact for exponents `>= floor`. Intermediate products keep enough
/// extra depth that the final window is not eroded by the positive order of `A`.
pub fn pow<T: DiffRing>(a: &PsiDO<T>, k: u32, floor: i32) -> PsiDO<T> {
    if k == 0 {
        return PsiDO::one();
    }
    let ord = a.order().unwrap_or(0).max(0);
    let k = k as i32;
    let mut out = a.truncated(floor - (k - 1) * ord);
    for i in 1..k {
        out = out.compose(a, floor - (k - 1 - i) * ord);
    }
    out
}

/// Checks that `L` is monic of positive order and returns that order.
pub fn monic_order<T: DiffRing>(l: &PsiDO<T>) -> Result<i32> {
    match l.leading_scalar() {
        Some((n, c)) if c.is_one() && n >= 1 => Ok(n),
        Some((n, _)) if n < 1 => Err(Error::NotMonic(format!("order {n} is not positive"))),
        _ => Err(Error::NotMonic("leading coefficient is not the unit".into())),
    }
}

/// The monic N-th root `L^{1/N} = ∂ + Σ_{j≤0} m_j ∂^j`, exact for exponents `>= floor`.
///
/// The unknown `m_j` first appears in `[M^N]_{N−1+j}` as `N·m_j`, so each step is a
/// division by `N` even for noncommuting coefficients.
pub fn nth_root<T: DiffRing>(l: &PsiDO<T>, floor: i32) -> Result<PsiDO<T>> {
    let n = monic_order(l)?;
    let needed = floor + n - 1;
    if l.valid_from.is_some_and(|v| v > needed) {
        return Err(Error::DepthExhausted(format!("operator exact from {:?}, root needs {needed}", l.valid_from)));
    }
    let inv_n = Q::new(1.into(), n.into());
    let mut m = PsiDO::term(1, T::one());
    for j in (floor..=0).rev() {
        let e = n - 1 + j;
        let p = pow(&m, n as u32, e);
        let mut mj = l.coeff(e);
        mj.add_scaled(&p.coeff(e), &q(-1));
        m.add_at(j, &mj, &inv_n);
    }
    m.valid_from = Some(floor);
    Ok(m)
}

/// `L^{k/N}`, exact for exponents `>= floor`.
pub fn power_frac<T: DiffRing>(l: &PsiDO<T>, k: u32, floor: i32) -> Result<PsiDO<T>> {
    if k == 0 {
        return Ok(PsiDO::one());
    }
    let root = nth_root(l, floor - (k as i32 - 1))?;
    let mut out = pow(&root, k, floor);
    out.truncate(floor);
    Ok(out)
}

/// Commutator symbol `A∘B − B∘A`.
pub fn commutator<T: DiffRing>(a: &PsiDO<T>, b: &PsiDO<T>, floor: i32) -> PsiDO<T> {
    &a.compose(b, floor) - &b.compose(a, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::qr;

    fn u(n: u16) -> NcPoly {
        NcPoly::sym(0, n)
    }
    fn v(n: u16) -> NcPoly {
        NcPoly::sym(1, n)
    }
    fn one() -> NcPoly {
        NcPoly::one()
    }

    fn kdv() -> PsiDO<NcPoly> {
        PsiDO::from_coeffs([(2, one()), (0, u(0))])
    }

    #[test]
    fn kdv_root_and_powers() {
        let r = nth_root(&kdv(), -3).unwrap();
        assert_eq!(r.coeff(1), one());
        assert!(r.coeff(0).is_zero());
        assert_eq!(r.coeff(-1), u(0).scale(&qr(1, 2)));
        assert_eq!(r.coeff(-2), u(1).scale(&qr(-1, 4)));
        assert_eq!(r.coeff(-3), (u(2) - u(0).mul(&u(0))).scale(&qr(1, 8)));
        let p = power_frac(&kdv(), 3, -1).unwrap();
        assert_eq!(p.coeff(3), one());
        assert_eq!(p.coeff(1), u(0).scale(&qr(3, 2)));
        assert_eq!(p.coeff(0), u(1).scale(&qr(3, 4)));
        assert_eq!(p.coeff(-1), (u(0).mul(&u(0)).scale(&q(3)) + u(2)).scale(&qr(1, 8)));
        assert_eq!(residue(&r).unwrap(), u(0).scale(&qr(1, 2)));
        let sq = power_frac(&kdv(), 2, -4).unwrap();
        assert!(sq.agrees_with(&kdv()));
    }

    #[test]
    fn boussinesq_root() {
        let l = PsiDO::from_coeffs([(3, one()), (1, u(0)), (0, v(0))]);
        let r = nth_root(&l, -3).unwrap();
        let third = qr(1, 3);
        assert_eq!(r.coeff(-1), u(0).scale(&third));
        assert_eq!(r.coeff(-2), (v(0) - u(1)).scale(&third));
        let c3 = u(2).scale(&q(2)) - u(0).mul(&u(0)) - v(1).scale(&q(3));
        assert_eq!(r.coeff(-3), c3.scale(&qr(1, 9)));
        let r2 = power_frac(&l, 2, -2).unwrap();
        assert_eq!(r2.coeff(0), u(0).scale(&qr(2, 3)));
        assert_eq!(r2.coeff(-1), (v(0).scale(&q(2)) - u(1)).scale(&third));
        // b′ + 2c + a² with a, b, c the root coefficients above.
        let c2 = u(2) - u(0).mul(&u(0)) - v(1).scale(&q(3));
        assert_eq!(r2.coeff(-2), c2.scale(&qr(1, 9)));
    }

    #[test]
    fn adjoint_examples() {
        let d = PsiDO::term(1, one());
        assert_eq!(adjoint(&d, -5), PsiDO::term(1, -one()));
        let f = PsiDO::term(0, u(0));
        assert_eq!(adjoint(&f, -5), f);
        assert_eq!(adjoint(&kdv(), -5), kdv());
        let a = PsiDO::from_coeffs([(1, u(0)), (-1, v(0))]);
        let back = adjoint(&adjoint(&a, -6), -6);
        assert!(back.agrees_with(&a));
    }

    #[test]
    fn non_monic_rejected() {
        let l = PsiDO::from_coeffs([(2, u(0))]);
        assert!(matches!(nth_root(&l, -2), Err(Error::NotMonic(_))));
        let l = PsiDO::from_coeffs([(2, NcPoly::scalar(q(2)))]);
        assert!(nth_root(&l, -2).is_err());
    }
}
