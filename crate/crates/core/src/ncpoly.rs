//! Free associative polynomials in the symbols `u_i^(n)` over ℚ.
//!
//! The finite (ODE) case uses the same kernel with every derivative order equal
//! to zero and the derivation switched off at the [`Algebra`] level.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Mul;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linear::{q, DiffRing, Lin, Q};
use crate::tensoralg::Tensor2;

/// The generator `u_var^(der)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym {
    pub var: u16,
    pub der: u16,
}

impl Sym {
    pub fn new(var: u16, der: u16) -> Self {
        Sym { var, der }
    }
}

/// A monomial; the empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Sym>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn sym(s: Sym) -> Self {
        Word(vec![s])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn concat3(a: &Word, b: &Word, c: &Word) -> Word {
        let mut v = Vec::with_capacity(a.0.len() + b.0.len() + c.0.len());
        v.extend_from_slice(&a.0);
        v.extend_from_slice(&b.0);
        v.extend_from_slice(&c.0);
        Word(v)
    }

    /// Lexicographically least cyclic rotation.
    pub fn least_rotation(&self) -> Word {
        let n = self.0.len();
        (0..n.max(1))
            .map(|r| {
                let mut v = self.0[r.min(n)..].to_vec();
                v.extend_from_slice(&self.0[..r.min(n)]);
                Word(v)
            })
            .min()
            .unwrap_or_default()
    }

    pub fn contains_var(&self, var: u16) -> bool {
        self.0.iter().any(|s| s.var == var)
    }

    /// Leibniz rule: sum over positions of the word with one order raised.
    pub fn d(&self) -> Lin<Word> {
        let mut out = Lin::zero();
        for p in 0..self.0.len() {
            let mut v = self.0.clone();
            v[p].der += 1;
            out.add_term(Word(v), q(1));
        }
        out
    }
}

/// Element of the free (differential) algebra.
pub type NcPoly = Lin<Word>;

impl Lin<Word> {
    pub fn one() -> NcPoly {
        Lin::term(Word::one(), q(1))
    }

    pub fn scalar(c: Q) -> NcPoly {
        Lin::term(Word::one(), c)
    }

    pub fn var(i: u16) -> NcPoly {
        Lin::term(Word::sym(Sym::new(i, 0)), q(1))
    }

    pub fn sym(i: u16, n: u16) -> NcPoly {
        Lin::term(Word::sym(Sym::new(i, n)), q(1))
    }

    pub fn word(w: Word) -> NcPoly {
        Lin::term(w, q(1))
    }

    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        let mut out = Lin::zero();
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> NcPoly {
        let mut out = NcPoly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Total derivative ∂.
    pub fn d(&self) -> NcPoly {
        self.flat_map(|w| w.d())
    }

    pub fn d_n(&self, n: usize) -> NcPoly {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.d();
        }
        out
    }

    /// 2-fold partial derivative ∂f/∂u_i^(n): sum over occurrences of (left)⊗(right).
    pub fn partial(&self, i: u16, n: u16) -> Tensor2 {
        let s = Sym::new(i, n);
        let mut out = Tensor2::zero();
        for (w, c) in self.iter() {
            for (p, t) in w.0.iter().enumerate() {
                if *t == s {
                    out.add_term((Word(w.0[..p].to_vec()), Word(w.0[p + 1..].to_vec())), c.clone());
                }
            }
        }
        out
    }

    /// Variational derivative Σ_n (−∂)^n ∂f/∂u_i^(n).
    pub fn variational(&self, i: u16) -> Tensor2 {
        let mut out = Tensor2::zero();
        let top = self.max_der(i);
        if let Some(top) = top {
            for n in (0..=top).rev() {
                // Horner: out = −∂(out) + ∂f/∂u^(n)
                out = -out.d();
                out += &self.partial(i, n);
            }
        }
        out
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Word::one())
    }

    pub fn vars(&self) -> BTreeSet<u16> {
        self.keys().flat_map(|w| w.0.iter().map(|s| s.var)).collect()
    }

    pub fn max_der(&self, var: u16) -> Option<u16> {
        self.keys().flat_map(|w| w.0.iter().filter(|s| s.var == var).map(|s| s.der)).max()
    }

    /// Image in the quotient by the differential ideal generated by `var`.
    pub fn kill_var(&self, var: u16) -> NcPoly {
        self.filter(|w| !w.contains_var(var))
    }

    /// Homogeneous components by number of letters.
    pub fn by_degree(&self) -> BTreeMap<usize, NcPoly> {
        let mut out: BTreeMap<usize, NcPoly> = BTreeMap::new();
        for (w, c) in self.iter() {
            out.entry(w.len()).or_default().add_term(w.clone(), c.clone());
        }
        out
    }

    /// Substitutes every occurrence of `u_var^(n)` by `∂^n image`.
    pub fn substitute(&self, var: u16, image: &NcPoly) -> NcPoly {
        let mut derivs: Vec<NcPoly> = vec![image.clone()];
        let mut out = NcPoly::zero();
        for (w, c) in self.iter() {
            let mut acc = NcPoly::one();
            for s in &w.0 {
                let f = if s.var == var {
                    while derivs.len() <= s.der as usize {
                        let next = derivs.last().unwrap().d();
                        derivs.push(next);
                    }
                    derivs[s.der as usize].clone()
                } else {
                    NcPoly::word(Word::sym(*s))
                };
                acc = acc.mul(&f);
            }
            out.add_scaled(&acc, c);
        }
        out
    }
}

impl Mul for &NcPoly {
    type Output = NcPoly;
    fn mul(self, rhs: &NcPoly) -> NcPoly {
        NcPoly::mul(self, rhs)
    }
}

impl DiffRing for NcPoly {
    fn one() -> Self {
        NcPoly::one()
    }
    fn mul(&self, other: &Self) -> Self {
        NcPoly::mul(self, other)
    }
    fn d(&self) -> Self {
        NcPoly::d(self)
    }
    fn as_scalar(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.len() == 1 {
            let (w, c) = self.iter().next().unwrap();
            if w.is_one() {
                return Some(c.clone());
            }
        }
        None
    }
}

/// Generator names and mode of an ambient algebra `R_ℓ` (finite) or `𝓡_ℓ` (differential).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    pub names: Vec<String>,
    pub differential: bool,
}

impl Algebra {
    pub fn finite<S: AsRef<str>>(names: &[S]) -> Self {
        Algebra { names: names.iter().map(|s| s.as_ref().to_string()).collect(), differential: false }
    }

    pub fn differential<S: AsRef<str>>(names: &[S]) -> Self {
        Algebra { names: names.iter().map(|s| s.as_ref().to_string()).collect(), differential: true }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn gen(&self, name: &str) -> Result<NcPoly> {
        self.index_of(name).map(NcPoly::var).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn check_var(&self, i: usize) -> Result<()> {
        if i < self.nvars() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, expected: format!("< {}", self.nvars()) })
        }
    }

    pub fn total_derivative(&self, f: &NcPoly) -> Result<NcPoly> {
        if !self.differential {
            return Err(Error::Unsupported("∂ on a finite-case algebra".into()));
        }
        Ok(f.d())
    }

    pub fn partial_derivative(&self, f: &NcPoly, i: usize, n: u16) -> Result<Tensor2> {
        self.check_var(i)?;
        if !self.differential && n > 0 {
            return Err(Error::Unsupported("derivative orders in a finite-case algebra".into()));
        }
        Ok(f.partial(i as u16, n))
    }

    pub fn variational_derivative(&self, f: &NcPoly, i: usize) -> Result<Tensor2> {
        self.check_var(i)?;
        if !self.differential {
            return Err(Error::Unsupported("variational derivative in a finite-case algebra".into()));
        }
        Ok(f.variational(i as u16))
    }
}

/// Equality in V/[V,V]: coefficient sums over cyclic classes agree.
pub fn trace_equal(f: &NcPoly, g: &NcPoly) -> bool {
    trace_zero(&(f - g))
}

pub fn trace_zero(f: &NcPoly) -> bool {
    trace_normal_form(f).is_zero()
}

/// Canonical representative in V/[V,V]: each word replaced by its least rotation.
pub fn trace_normal_form(f: &NcPoly) -> NcPoly {
    f.map_keys(|w| w.least_rotation())
}

/// Membership of `f` in ∂𝓡 + [𝓡,𝓡].
pub fn functional_is_zero(f: &NcPoly) -> bool {
    if !f.constant_term().is_zero() {
        return false;
    }
    f.vars().into_iter().all(|i| f.variational(i).sigma().mult().is_zero())
}

/// X_P(f) = Σ_{i,n} A'(∂^n P_i)A'' where ∂f/∂u_i^(n) = A'⊗A''.
pub fn evolutionary_vf_apply(p: &[NcPoly], f: &NcPoly) -> NcPoly {
    let mut out = NcPoly::zero();
    for (i, pi) in p.iter().enumerate() {
        let i = i as u16;
        let Some(top) = f.max_der(i) else { continue };
        let mut dpi = pi.clone();
        for n in 0..=top {
            let a = f.partial(i, n);
            for ((l, r), c) in a.iter() {
                let term = NcPoly::word(l.clone()).mul(&dpi).mul(&NcPoly::word(r.clone()));
                out.add_scaled(&term, c);
            }
            dpi = dpi.d();
        }
    }
    out
}

/// Characteristics of the commutator [X_P, X_Q].
pub fn vf_commutator(p: &[NcPoly], qv: &[NcPoly]) -> Result<Vec<NcPoly>> {
    if p.len() != qv.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", p.len(), qv.len())));
    }
    Ok((0..p.len()).map(|i| evolutionary_vf_apply(p, &qv[i]) - evolutionary_vf_apply(qv, &p[i])).collect())
}

/// Class in V/[V,V], compared through [`trace_equal`].
#[derive(Clone, Debug)]
pub struct TraceClass(pub NcPoly);

impl PartialEq for TraceClass {
    fn eq(&self, other: &Self) -> bool {
        trace_equal(&self.0, &other.0)
    }
}

/// Local functional ∫f, compared through [`functional_is_zero`].
#[derive(Clone, Debug)]
pub struct LocalFunctional(pub NcPoly);

impl LocalFunctional {
    pub fn is_zero(&self) -> bool {
        functional_is_zero(&self.0)
    }
}

impl PartialEq for LocalFunctional {
    fn eq(&self, other: &Self) -> bool {
        functional_is_zero(&(&self.0 - &other.0))
    }
}
