//! Double λ-brackets on free differential algebras `𝓡_ℓ`.
//!
//! A [`LambdaStructure`] stores `{{u_i λ u_j}}` and extends to all of `𝓡_ℓ` by
//!
//! `{{f λ g}} = Σ ∂g/∂u_j^(n) • (λ+∂)^n {{u_i λ+∂ u_j}}_→ (−λ−∂)^m • (∂f/∂u_i^(m))^σ`.
//!
//! Every `(λ+∂)` expansion goes through [`Laurent::compose`], so local and
//! truncated non-local structures share one code path.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::linear::{binom, q, Module, Q};
use crate::ncpoly::{functional_is_zero, NcPoly, Word};
use crate::psido::adjoint_bullet;
use crate::series::Laurent;
use crate::tensoralg::{Tensor2, Tensor3};

pub type LambdaTensor2 = Laurent<Tensor2>;

pub const DEFAULT_DEPTH: i32 = 8;

/// Coefficients of a polynomial in two variables `λ, μ`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Lambda2<T> {
    pub coeffs: BTreeMap<(i32, i32), T>,
}

pub type LambdaTensor3 = Lambda2<Tensor3>;

impl<T: Module> Lambda2<T> {
    pub fn zero() -> Self {
        Lambda2 { coeffs: BTreeMap::new() }
    }

    pub fn add_at(&mut self, key: (i32, i32), t: &T, c: &Q) {
        let slot = self.coeffs.entry(key).or_insert_with(T::zero);
        slot.add_scaled(t, c);
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn add(&mut self, other: &Self, c: &Q) {
        for (k, t) in &other.coeffs {
            self.add_at(*k, t, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exchanges the roles of the two variables.
    pub fn swap(&self) -> Self {
        Lambda2 { coeffs: self.coeffs.iter().map(|((a, b), t)| ((*b, *a), t.clone())).collect() }
    }

    pub fn map<U: Module>(&self, mut f: impl FnMut(&T) -> U) -> Lambda2<U> {
        let mut out = Lambda2::zero();
        let one = q(1);
        for (k, t) in &self.coeffs {
            out.add_at(*k, &f(t), &one);
        }
        out
    }
}

/// `Σ_t binom(s, t) λ^t μ^{s−t}` for `(λ+μ)^s`, `s >= 0`.
fn binomial_split(s: i32) -> impl Iterator<Item = (i32, i32, Q)> {
    (0..=s).map(move |t| (t, s - t, binom(s as i64, t as u32)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaStructure {
    /// `brackets[i][j] = {{u_i λ u_j}}`; the matrix of the structure is `H_{ij} = brackets[j][i]`.
    pub brackets: Vec<Vec<LambdaTensor2>>,
    /// Lowest λ-exponent kept when non-local entries are expanded.
    pub floor: i32,
}

impl LambdaStructure {
    pub fn zero(nvars: usize) -> Self {
        LambdaStructure { brackets: vec![vec![LambdaTensor2::zero(); nvars]; nvars], floor: -DEFAULT_DEPTH }
    }

    /// Beltrami structure `{{u_i λ u_j}} = δ_ij (1⊗1)`.
    pub fn beltrami(nvars: usize) -> Self {
        let mut s = Self::zero(nvars);
        for i in 0..nvars {
            s.brackets[i][i] = LambdaTensor2::term(0, Tensor2::one_one());
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.brackets.len()
    }

    pub fn with_depth(mut self, depth: i32) -> Self {
        self.floor = -depth;
        self
    }

    pub fn set(&mut self, i: usize, j: usize, b: LambdaTensor2) {
        self.brackets[i][j] = b;
    }

    /// Sets `{{u_i λ u_j}}` and, for `i != j`, the skew partner `−{{u_i −λ−∂ u_j}}^σ`.
    pub fn with_skew(mut self, i: usize, j: usize, b: LambdaTensor2) -> Self {
        if i != j {
            self.brackets[j][i] = adjoint_bullet(&b, self.floor).scale(&q(-1));
        }
        self.brackets[i][j] = b;
        self
    }

    pub fn is_local(&self) -> bool {
        self.brackets.iter().flatten().all(|b| b.is_exact() && b.low().map_or(true, |l| l >= 0))
    }

    /// `Σ_{i,m} Q_{im} ∘ (∂f/∂u_i^(m))^σ` with `Q_{im}(μ) = {{u_i μ u_j}}(−μ)^m`.
    fn inner(&self, f: &NcPoly, j: usize) -> LambdaTensor2 {
        let mut out = LambdaTensor2::zero();
        for i in 0..self.nvars() {
            let b = &self.brackets[i][j];
            if b.coeffs.is_empty() && b.is_exact() {
                continue;
            }
            let Some(top) = f.max_der(i as u16) else { continue };
            for m in 0..=top {
                let x = f.partial(i as u16, m).sigma();
                if x.is_zero() {
                    continue;
                }
                let sign = if m % 2 == 0 { q(1) } else { q(-1) };
                let mut shifted = LambdaTensor2::zero();
                shifted.valid_from = b.valid_from.map(|v| v + m as i32);
                for (&k, c) in &b.coeffs {
                    shifted.add_at(k + m as i32, c, &sign);
                }
                out.add_series(&shifted.compose(&LambdaTensor2::term(0, x), self.floor), &q(1));
            }
        }
        out
    }

    /// `{{f λ g}}` by the master formula.
    pub fn lambda_bracket(&self, f: &NcPoly, g: &NcPoly) -> LambdaTensor2 {
        let mut out = LambdaTensor2::zero();
        for j in 0..self.nvars() {
            let Some(top) = g.max_der(j as u16) else { continue };
            let mut inner: Option<LambdaTensor2> = None;
            for n in 0..=top {
                let gj = g.partial(j as u16, n);
                if gj.is_zero() {
                    continue;
                }
                let inn = inner.get_or_insert_with(|| self.inner(f, j));
                out.add_series(&LambdaTensor2::term(n as i32, gj).compose(inn, self.floor), &q(1));
            }
        }
        out
    }

    /// `{a λ b} = mult {{a λ b}}`.
    pub fn single_bracket(&self, a: &NcPoly, b: &NcPoly) -> Laurent<NcPoly> {
        self.lambda_bracket(a, b).map_coeffs(|t| t.mult())
    }

    pub fn skew_failures(&self) -> Vec<(usize, usize)> {
        let l = self.nvars();
        let mut bad = Vec::new();
        for i in 0..l {
            for j in 0..l {
                let s = &self.brackets[i][j] + &adjoint_bullet(&self.brackets[j][i], self.floor);
                if !s.is_zero() {
                    bad.push((i, j));
                }
            }
        }
        bad
    }

    /// `{{u_i λ u_j}} = −{{u_j −λ−∂ u_i}}^σ` on all generator pairs, within the exact window.
    pub fn check_skew(&self) -> bool {
        self.skew_failures().is_empty()
    }

    pub fn check_jacobi(&self) -> Result<bool> {
        Ok(jacobi_failures(self, self)?.is_empty())
    }

    pub fn triple(&self, a: &NcPoly, b: &NcPoly, c: &NcPoly) -> Result<LambdaTensor3> {
        triple_bilinear(self, self, a, b, c)
    }

    /// `du_i/dt = mult Σ_j H_ij(∂) • (δh/δu_j)^σ`.
    pub fn hamiltonian_pde(&self, h: &NcPoly) -> Result<Vec<NcPoly>> {
        self.require_local()?;
        let l = self.nvars();
        let vd: Vec<Tensor2> = (0..l).map(|j| h.variational(j as u16).sigma()).collect();
        Ok((0..l)
            .map(|i| {
                let mut acc = Tensor2::zero();
                for (j, x) in vd.iter().enumerate() {
                    acc += &apply_at_zero(&self.brackets[j][i], x);
                }
                acc.mult()
            })
            .collect())
    }

    /// `mult {{f λ g}}|_{λ=0}`, a density for `{∫f, g}` and for `{∫f, ∫g}`.
    pub fn pair_bracket(&self, f: &NcPoly, g: &NcPoly) -> Result<NcPoly> {
        self.require_local()?;
        Ok(self.lambda_bracket(f, g).coeff(0).mult())
    }

    /// `{∫f, ∫g}` via variational derivatives: `Σ_{i,j} (δg)_j · H_ji(∂)(δf)_i`.
    pub fn functional_bracket_var(&self, f: &NcPoly, g: &NcPoly) -> Result<NcPoly> {
        self.require_local()?;
        let l = self.nvars();
        let df: Vec<NcPoly> = (0..l).map(|i| f.variational(i as u16).sigma().mult()).collect();
        let mut out = NcPoly::zero();
        for j in 0..l {
            let dg = g.variational(j as u16).sigma().mult();
            if dg.is_zero() {
                continue;
            }
            for (i, dfi) in df.iter().enumerate() {
                let y = apply_op_poly(&self.brackets[i][j], dfi);
                out += &dg.mul(&y);
            }
        }
        Ok(out)
    }

    /// `{∫f, ∫g}` computed both ways; disagreement is an internal error.
    pub fn functional_bracket(&self, f: &NcPoly, g: &NcPoly) -> Result<NcPoly> {
        let a = self.pair_bracket(f, g)?;
        let b = self.functional_bracket_var(f, g)?;
        if !functional_is_zero(&(&a - &b)) {
            return Err(Error::Inconsistent("functional bracket formulas disagree".into()));
        }
        Ok(a)
    }

    fn require_local(&self) -> Result<()> {
        if self.is_local() {
            Ok(())
        } else {
            Err(Error::Unsupported("operation requires a local structure".into()))
        }
    }
}

/// `Σ_n b_n • ∂^n X`, i.e. the symbol `B(λ)` applied to `X` at `λ = 0`.
pub fn apply_at_zero(b: &LambdaTensor2, x: &Tensor2) -> Tensor2 {
    let mut acc = Tensor2::zero();
    for (&n, c) in &b.coeffs {
        acc += &c.bullet(&x.d_n(n as usize));
    }
    acc
}

/// `Σ_n b′_n (∂^n F) b″_n`.
pub fn apply_op_poly(b: &LambdaTensor2, f: &NcPoly) -> NcPoly {
    let mut acc = NcPoly::zero();
    for (&n, c) in &b.coeffs {
        acc += &c.otimes_right(1, &f.d_n(n as usize)).mult();
    }
    acc
}

/// Memoized `{{a λ w}}` (fixed left argument) or `{{w λ c}}` (fixed right argument).
struct Memo<'a> {
    s: &'a LambdaStructure,
    fixed: NcPoly,
    fixed_left: bool,
    cache: HashMap<Word, LambdaTensor2>,
}

impl<'a> Memo<'a> {
    fn new(s: &'a LambdaStructure, fixed: &NcPoly, fixed_left: bool) -> Self {
        Memo { s, fixed: fixed.clone(), fixed_left, cache: HashMap::new() }
    }

    fn get(&mut self, w: &Word) -> &LambdaTensor2 {
        if !self.cache.contains_key(w) {
            let p = NcPoly::word(w.clone());
            let v = if self.fixed_left { self.s.lambda_bracket(&self.fixed, &p) } else { self.s.lambda_bracket(&p, &self.fixed) };
            self.cache.insert(w.clone(), v);
        }
        &self.cache[w]
    }
}

fn require_local_pair(a: &LambdaStructure, b: &LambdaStructure) -> Result<()> {
    if a.is_local() && b.is_local() {
        Ok(())
    } else {
        Err(Error::Unsupported("triple λ-brackets of non-local structures".into()))
    }
}

/// `{{a λ {{b μ c}}}}_L − {{b μ {{a λ c}}}}_R − {{{{a λ b}} λ+μ c}}_L` with the outer
/// brackets from `outer` and the inner ones from `inner`. Bilinear in the pair.
pub fn triple_bilinear(outer: &LambdaStructure, inner: &LambdaStructure, a: &NcPoly, b: &NcPoly, c: &NcPoly) -> Result<LambdaTensor3> {
    require_local_pair(outer, inner)?;
    let mut out = LambdaTensor3::zero();

    let mut ma = Memo::new(outer, a, true);
    for (&qe, cq) in &inner.lambda_bracket(b, c).coeffs {
        for ((c1, c2), k) in cq.iter() {
            for (&p, ep) in &ma.get(c1).coeffs {
                for ((e1, e2), ke) in ep.iter() {
                    out.add_at((p, qe), &Tensor3::term((e1.clone(), e2.clone(), c2.clone()), k * ke), &q(1));
                }
            }
        }
    }

    let mut mb = Memo::new(outer, b, true);
    for (&p, ap) in &inner.lambda_bracket(a, c).coeffs {
        for ((a1, a2), k) in ap.iter() {
            for (&qe, eq) in &mb.get(a2).coeffs {
                for ((e1, e2), ke) in eq.iter() {
                    out.add_at((p, qe), &Tensor3::term((a1.clone(), e1.clone(), e2.clone()), k * ke), &q(-1));
                }
            }
        }
    }

    let mut mc = Memo::new(outer, c, false);
    for (&p, dp) in &inner.lambda_bracket(a, b).coeffs {
        for ((d1, d2), k) in dp.iter() {
            let e = mc.get(d1).clone();
            let mut dd = NcPoly::word(d2.clone());
            let maxs = e.order().unwrap_or(0);
            let mut derivs = vec![dd.clone()];
            for _ in 0..maxs {
                dd = dd.d();
                derivs.push(dd.clone());
            }
            for (&s, es) in &e.coeffs {
                for r in 0..=s {
                    let br = binom(s as i64, r as u32);
                    let mid = &derivs[r as usize];
                    let tens = es.otimes_right(1, mid);
                    for (t, u, bt) in binomial_split(s - r) {
                        out.add_at((p + t, u), &tens, &-(k * &br * bt));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `{a λ X}` on `V⊗V`, acting as a derivation on each slot.
fn single_on_tensor(s: &LambdaStructure, a: &NcPoly, x: &Tensor2) -> Laurent<Tensor2> {
    let mut out = Laurent::zero();
    for ((p, r), k) in x.iter() {
        let (pp, rr) = (NcPoly::word(p.clone()), NcPoly::word(r.clone()));
        for (&n, c) in &s.single_bracket(a, &pp).coeffs {
            out.add_at(n, &Tensor2::pure(c, &rr), k);
        }
        for (&n, c) in &s.single_bracket(a, &rr).coeffs {
            out.add_at(n, &Tensor2::pure(&pp, c), k);
        }
    }
    out
}

/// Both sides of
/// `{a λ {{b μ c}}} − {{b μ {a λ c}}} − {{{a λ b} λ+μ c}} = (mult⊗1){{a λ b μ c}} − (1⊗mult){{b μ a λ c}}`.
pub fn quasi_jacobi_sides(s: &LambdaStructure, a: &NcPoly, b: &NcPoly, c: &NcPoly) -> Result<(Lambda2<Tensor2>, Lambda2<Tensor2>)> {
    require_local_pair(s, s)?;
    let one = q(1);
    let mut lhs = Lambda2::zero();
    for (&qe, x) in &s.lambda_bracket(b, c).coeffs {
        for (&p, t) in &single_on_tensor(s, a, x).coeffs {
            lhs.add_at((p, qe), t, &one);
        }
    }
    for (&p, y) in &s.single_bracket(a, c).coeffs {
        for (&qe, t) in &s.lambda_bracket(b, y).coeffs {
            lhs.add_at((p, qe), t, &q(-1));
        }
    }
    for (&p, d) in &s.single_bracket(a, b).coeffs {
        for (&n, t) in &s.lambda_bracket(d, c).coeffs {
            for (i, j, bin) in binomial_split(n) {
                lhs.add_at((p + i, j), t, &-bin);
            }
        }
    }
    let mut rhs = s.triple(a, b, c)?.map(|t| t.mult12());
    rhs.add(&s.triple(b, a, c)?.swap().map(|t| t.mult23()), &q(-1));
    Ok((lhs, rhs))
}

/// Generator triples violating Jacobi for the bilinear pair `(outer, inner)`.
pub fn jacobi_failures(outer: &LambdaStructure, inner: &LambdaStructure) -> Result<Vec<(usize, usize, usize)>> {
    let l = outer.nvars();
    let mut bad = Vec::new();
    for i in 0..l {
        for j in 0..l {
            for k in 0..l {
                let (a, b, c) = (NcPoly::var(i as u16), NcPoly::var(j as u16), NcPoly::var(k as u16));
                if !triple_bilinear(outer, inner, &a, &b, &c)?.is_zero() {
                    bad.push((i, j, k));
                }
            }
        }
    }
    Ok(bad)
}

/// `Σ_k c^k S_k` for a central parameter `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    pub parts: Vec<LambdaStructure>,
}

impl Pencil {
    pub fn new(parts: Vec<LambdaStructure>) -> Self {
        Pencil { parts }
    }

    pub fn check_skew(&self) -> bool {
        self.parts.iter().all(|p| p.check_skew())
    }

    /// Jacobi for every value of `c`: each coefficient `Σ_{k+l=d} J(S_k, S_l)` vanishes.
    pub fn check_jacobi(&self) -> Result<bool> {
        let n = self.parts.len();
        if n == 0 {
            return Ok(true);
        }
        let l = self.parts[0].nvars();
        for d in 0..(2 * n - 1) {
            for i in 0..l {
                for j in 0..l {
                    for k in 0..l {
                        let (a, b, c) = (NcPoly::var(i as u16), NcPoly::var(j as u16), NcPoly::var(k as u16));
                        let mut acc = LambdaTensor3::zero();
                        for x in 0..n {
                            if d < x || d - x >= n {
                                continue;
                            }
                            acc.add(&triple_bilinear(&self.parts[x], &self.parts[d - x], &a, &b, &c)?, &q(1));
                        }
                        if !acc.is_zero() {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Specializes `c` to a number.
    pub fn at(&self, c: &Q) -> LambdaStructure {
        let mut out = self.parts[0].clone();
        let mut pw = c.clone();
        for p in &self.parts[1..] {
            for (i, row) in p.brackets.iter().enumerate() {
                for (j, b) in row.iter().enumerate() {
                    out.brackets[i][j].add_series(b, &pw);
                }
            }
            pw = &pw * c;
        }
        out
    }
}

/// Built-in structures.
pub mod fixtures {
    use super::*;

    /// Affine structure on `𝓡_1`: `{{u λ u}} = 1⊗u − u⊗1 + c(1⊗1)λ`, as a pencil in `c`.
    pub fn affine() -> Pencil {
        affine_on(1)
    }

    /// The affine bracket on `u = u_0` inside `𝓡_ℓ`, other generators central.
    pub fn affine_on(nvars: usize) -> Pencil {
        let u = NcPoly::var(0);
        let mut s0 = LambdaStructure::zero(nvars);
        s0.set(0, 0, LambdaTensor2::term(0, Tensor2::pure(&NcPoly::one(), &u) - Tensor2::pure(&u, &NcPoly::one())));
        let mut s1 = LambdaStructure::zero(nvars);
        s1.set(0, 0, LambdaTensor2::term(1, Tensor2::one_one()));
        Pencil::new(vec![s0, s1])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn u(n: u16) -> NcPoly {
        NcPoly::sym(0, n)
    }
    fn one() -> NcPoly {
        NcPoly::one()
    }
    fn t(a: &NcPoly, b: &NcPoly) -> Tensor2 {
        Tensor2::pure(a, b)
    }

    fn affine_at(c: i64) -> LambdaStructure {
        affine().at(&q(c))
    }

    #[test]
    fn affine_generator_bracket() {
        let s = affine_at(3);
        let b = s.lambda_bracket(&u(0), &u(0));
        assert_eq!(b.coeff(0), t(&one(), &u(0)) - t(&u(0), &one()));
        assert_eq!(b.coeff(1), Tensor2::one_one().scale(&q(3)));
        assert!(s.lambda_bracket(&u(0), &one()).is_zero());
        assert!(s.lambda_bracket(&one(), &u(2)).is_zero());
    }

    #[test]
    fn left_leibniz_oracle() {
        // {{u λ u²}} = {{u λ u}}u + u{{u λ u}}
        let s = affine_at(2);
        let h = s.lambda_bracket(&u(0), &u(0));
        let expect = h.map_coeffs(|c| c.rmul(&u(0)) + c.lmul(&u(0)));
        assert_eq!(s.lambda_bracket(&u(0), &u(0).mul(&u(0))), expect);
    }

    #[test]
    fn sesquilinearity() {
        let s = affine_at(1);
        let a = u(0).mul(&u(1));
        let b = u(2).mul(&u(0)).mul(&u(0));
        let ab = s.lambda_bracket(&a, &b);
        // {{∂a λ b}} = −λ{{a λ b}}
        let lhs = s.lambda_bracket(&a.d(), &b);
        let mut rhs = LambdaTensor2::zero();
        for (&n, c) in &ab.coeffs {
            rhs.add_at(n + 1, c, &q(-1));
        }
        assert_eq!(lhs, rhs);
        // {{a λ ∂b}} = (λ+∂){{a λ b}}
        let lhs = s.lambda_bracket(&a, &b.d());
        let rhs = &LambdaTensor2::term(1, Tensor2::one_one()).compose(&ab, -10) + &LambdaTensor2::zero();
        let mut rhs2 = LambdaTensor2::zero();
        for (&n, c) in &ab.coeffs {
            rhs2.add_at(n + 1, c, &q(1));
            rhs2.add_at(n, &c.d(), &q(1));
        }
        assert_eq!(lhs, rhs2);
        assert_eq!(rhs, rhs2);
    }

    #[test]
    fn affine_axioms() {
        let p = affine();
        assert!(p.check_skew());
        assert!(p.check_jacobi().unwrap());
        let mut bad = LambdaStructure::zero(1);
        bad.set(0, 0, LambdaTensor2::term(2, Tensor2::one_one()));
        assert!(!bad.check_skew());
    }

    #[test]
    fn flows_and_functionals() {
        let s = affine_at(5);
        let f = s.hamiltonian_pde(&u(0).mul(&u(0)).scale(&crate::linear::qr(1, 2))).unwrap();
        assert_eq!(f[0], u(1).scale(&q(5)));
        assert!(s.hamiltonian_pde(&u(0)).unwrap()[0].is_zero());
        assert!(s.hamiltonian_pde(&one()).unwrap()[0].is_zero());
        let h = u(0).mul(&u(0)).mul(&u(1)) + u(2).mul(&u(0));
        let pde = s.hamiltonian_pde(&h).unwrap();
        assert_eq!(pde[0], s.pair_bracket(&h, &u(0)).unwrap());
        let g = u(1).mul(&u(0)).mul(&u(0));
        let fb = s.functional_bracket(&h, &g).unwrap();
        let fb2 = s.functional_bracket(&g, &h).unwrap();
        assert!(functional_is_zero(&(&fb + &fb2)));
        assert!(functional_is_zero(&s.functional_bracket(&h.d(), &g).unwrap()));
    }

    #[test]
    fn affine_hierarchy_with_central_v() {
        let p = affine_on(2);
        assert!(p.check_skew());
        assert!(p.check_jacobi().unwrap());
        let c = q(7);
        let s = p.at(&c);
        let (uu, vv) = (u(0), NcPoly::var(1));
        let w = &uu + &vv;
        for n in 0..4u32 {
            let h = w.pow(n + 1).scale(&Q::new(1.into(), (n + 1).into()));
            let f = s.hamiltonian_pde(&h).unwrap();
            let expect = vv.mul(&w.pow(n)) - w.pow(n).mul(&vv) + w.pow(n).d().scale(&c);
            assert_eq!(f[0], expect);
            assert!(f[1].is_zero());
            for m in 0..n {
                let g = w.pow(m + 1);
                assert!(functional_is_zero(&s.functional_bracket(&h, &g).unwrap()));
            }
        }
    }

    #[test]
    fn euler_type_affine_is_not_poisson() {
        // v⊗u − u⊗v is a double PVA on its own, but not compatible with (1⊗1)λ.
        let (uu, vv) = (u(0), NcPoly::var(1));
        let mut s0 = LambdaStructure::zero(2);
        s0.set(0, 0, LambdaTensor2::term(0, t(&vv, &uu) - t(&uu, &vv)));
        let mut s1 = LambdaStructure::zero(2);
        s1.set(0, 0, LambdaTensor2::term(1, Tensor2::one_one()));
        assert!(s0.check_jacobi().unwrap());
        assert!(!Pencil::new(vec![s0, s1]).check_jacobi().unwrap());
    }

    #[test]
    fn quasi_jacobi_on_monomials() {
        // skew but not Jacobi, so both sides are nonzero
        let (uu, vv) = (u(0), NcPoly::var(1));
        let s = LambdaStructure::zero(2).with_skew(0, 0, LambdaTensor2::from_coeffs([(0, t(&vv, &uu) - t(&uu, &vv)), (1, Tensor2::one_one())]));
        assert!(s.check_skew());
        let (a, b, c) = (u(1).mul(&u(0)), u(0).mul(&vv), u(2));
        let (l, r) = quasi_jacobi_sides(&s, &a, &b, &c).unwrap();
        assert_eq!(l, r);
        assert!(!l.is_zero());
    }

    #[test]
    fn nonlocal_triple_refused() {
        let mut s = LambdaStructure::zero(1);
        s.set(0, 0, LambdaTensor2::term(-1, Tensor2::one_one()));
        assert!(s.triple(&u(0), &u(0), &u(0)).is_err());
    }
}
