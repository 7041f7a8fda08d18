//! Truncated Laurent series in a formal variable λ (equivalently ∂ for symbols of
//! pseudodifferential operators), with composition
//! `(A∘B)(λ) = Σ_n a_n (λ+∂)^n B(λ)`.
//!
//! A series records the lowest exponent from which its coefficients are exact.
//! Terms below that exponent have been dropped.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linear::{binom, DiffRing, Module, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<T> {
    pub coeffs: BTreeMap<i32, T>,
    /// `None`: exact. `Some(v)`: coefficients at exponents `>= v` are exact.
    pub valid_from: Option<i32>,
}

impl<T: Module> Default for Laurent<T> {
    fn default() -> Self {
        Laurent { coeffs: BTreeMap::new(), valid_from: None }
    }
}

impl<T: Module> Laurent<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(n: i32, t: T) -> Self {
        let mut out = Self::zero();
        out.add_at(n, &t, &Q::from_integer(1.into()));
        out
    }

    pub fn from_coeffs(it: impl IntoIterator<Item = (i32, T)>) -> Self {
        let mut out = Self::zero();
        for (n, t) in it {
            out.add_at(n, &t, &Q::from_integer(1.into()));
        }
        out
    }

    pub fn add_at(&mut self, n: i32, t: &T, c: &Q) {
        if let Some(v) = self.valid_from {
            if n < v {
                return;
            }
        }
        let slot = self.coeffs.entry(n).or_insert_with(T::zero);
        slot.add_scaled(t, c);
        if slot.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn coeff(&self, n: i32) -> T {
        self.coeffs.get(&n).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_exact(&self) -> bool {
        self.valid_from.is_none()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    /// Upper bound for the order, including an unknown tail.
    fn effective_order(&self) -> Option<i32> {
        match (self.order(), self.valid_from) {
            (Some(o), Some(v)) => Some(o.max(v - 1)),
            (o, None) => o,
            (None, Some(v)) => Some(v - 1),
        }
    }

    /// Zero on every exponent where it is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&mut self, floor: i32) {
        if self.valid_from.map_or(true, |v| v < floor) {
            let dropped = self.coeffs.keys().any(|&n| n < floor);
            self.coeffs = self.coeffs.split_off(&floor);
            if dropped || self.valid_from.is_some() {
                self.valid_from = Some(floor);
            }
        }
    }

    pub fn truncated(&self, floor: i32) -> Self {
        let mut out = self.clone();
        out.truncate(floor);
        out
    }

    pub fn add_series(&mut self, other: &Self, c: &Q) {
        self.valid_from = match (self.valid_from, other.valid_from) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, None) => a,
            (None, b) => b,
        };
        if let Some(v) = self.valid_from {
            self.coeffs = self.coeffs.split_off(&v);
        }
        for (n, t) in &other.coeffs {
            self.add_at(*n, t, c);
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Laurent { coeffs: BTreeMap::new(), valid_from: self.valid_from };
        for (n, t) in &self.coeffs {
            out.add_at(*n, t, c);
        }
        out
    }

    pub fn map_coeffs<U: Module>(&self, mut f: impl FnMut(&T) -> U) -> Laurent<U> {
        let mut out = Laurent { coeffs: BTreeMap::new(), valid_from: self.valid_from };
        let one = Q::from_integer(1.into());
        for (n, t) in &self.coeffs {
            out.add_at(*n, &f(t), &one);
        }
        out
    }

    /// Equality on the common exact range.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let floor = match (self.valid_from, other.valid_from) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let mut d = self.clone();
        d.valid_from = None;
        let mut o = other.clone();
        o.valid_from = None;
        d.add_series(&o, &-Q::from_integer(1.into()));
        d.coeffs.keys().all(|&n| floor.is_some_and(|f| n < f))
    }
}

impl<T: Module> std::ops::Add for &Laurent<T> {
    type Output = Laurent<T>;
    fn add(self, rhs: &Laurent<T>) -> Laurent<T> {
        let mut out = self.clone();
        out.add_series(rhs, &Q::from_integer(1.into()));
        out
    }
}

impl<T: Module> std::ops::Sub for &Laurent<T> {
    type Output = Laurent<T>;
    fn sub(self, rhs: &Laurent<T>) -> Laurent<T> {
        let mut out = self.clone();
        out.add_series(rhs, &-Q::from_integer(1.into()));
        out
    }
}

impl<T: DiffRing> Laurent<T> {
    pub fn one() -> Self {
        Self::term(0, T::one())
    }

    /// Applies ∂ to every coefficient.
    pub fn d(&self) -> Self {
        self.map_coeffs(|t| t.d())
    }

    /// `(A∘B)(λ) = Σ_n a_n (λ+∂)^n B(λ)`, keeping exponents `>= floor`.
    pub fn compose(&self, other: &Self, floor: i32) -> Self {
        self.compose_by(other, floor, |a, b| a.mul(b))
    }

    /// [`Laurent::compose`] with an explicit coefficient product.
    pub fn compose_by(&self, other: &Self, floor: i32, mul: impl Fn(&T, &T) -> T) -> Self {
        let mut out = Self::zero();
        let mut dropped = false;
        let mut derivs: BTreeMap<i32, Vec<T>> = BTreeMap::new();
        for (&n, a) in &self.coeffs {
            for (&m, b) in &other.coeffs {
                let ds = derivs.entry(m).or_insert_with(|| vec![b.clone()]);
                let mut k: u32 = 0;
                loop {
                    if n >= 0 && k as i32 > n {
                        break;
                    }
                    let e = n + m - k as i32;
                    if e < floor {
                        dropped = true;
                        break;
                    }
                    while ds.len() <= k as usize {
                        let next = ds.last().unwrap().d();
                        ds.push(next);
                    }
                    let bin = binom(n as i64, k);
                    let prod = mul(a, &ds[k as usize]);
                    out.add_at(e, &prod, &bin);
                    k += 1;
                }
            }
        }
        let mut valid: Option<i32> = if dropped { Some(floor) } else { None };
        let mut bump = |c: i32| valid = Some(valid.map_or(c, |v: i32| v.max(c)));
        if let Some(va) = self.valid_from {
            if let Some(ob) = other.effective_order() {
                bump(va + ob);
            }
        }
        if let Some(vb) = other.valid_from {
            if let Some(oa) = self.effective_order() {
                bump(vb + oa);
            }
        }
        out.valid_from = valid;
        if let Some(v) = valid {
            out.coeffs = out.coeffs.split_off(&v);
        }
        out
    }

    /// Leading coefficient as a scalar, if it is one.
    pub fn leading_scalar(&self) -> Option<(i32, Q)> {
        let n = self.order()?;
        let c = self.coeffs[&n].as_scalar()?;
        Some((n, c))
    }

    /// Two-sided inverse for a series whose leading coefficient is a nonzero scalar.
    pub fn inverse(&self, floor: i32) -> Result<Self> {
        use num_traits::Zero;
        let (m, c) = self
            .leading_scalar()
            .filter(|(_, c)| !c.is_zero())
            .ok_or_else(|| Error::NotInvertible("leading coefficient is not a nonzero scalar".into()))?;
        if let Some(v) = self.valid_from {
            if v > m {
                return Err(Error::NotInvertible("leading term not exact".into()));
            }
        }
        let cinv = num_traits::Inv::inv(c.clone());
        let lead_inv = Self::term(-m, T::one()).scale(&cinv);
        let mut rest = self.clone();
        rest.add_at(m, &T::one(), &-c);
        // self = cλ^m ∘ (1 + r)
        let inner_floor = floor + m;
        let r = lead_inv.compose(&rest, inner_floor - 1);
        let mut sum = Self::one();
        let mut term = Self::one();
        loop {
            term = r.compose(&term, inner_floor).scale(&-Q::from_integer(1.into()));
            if term.coeffs.is_empty() {
                sum.add_series(&term, &Q::from_integer(1.into()));
                break;
            }
            sum.add_series(&term, &Q::from_integer(1.into()));
            if term.order().is_some_and(|o| o < inner_floor) {
                break;
            }
        }
        sum.truncate(inner_floor);
        Ok(sum.compose(&lead_inv, floor))
    }
}
