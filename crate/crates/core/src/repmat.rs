//! The `V_m` functor: matrix entries of non-commutative elements as commutative
//! differential polynomials, with the induced λ-bracket
//!
//! `{a_ij λ b_hk} = Σ_n (a_n b)'_hj (a_n b)''_ik λ^n`.
//!
//! Matrix indices are 0-based throughout the library.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;

use crate::adler::{AdlerSystem, Which, Window};
use crate::dpva::{Lambda2, LambdaStructure, Pencil};
use crate::error::{Error, Result};
use crate::linear::{binom, q, DiffRing, Lin, Q};
use crate::ncpoly::{NcPoly, Word};
use crate::report::Report;
use crate::series::Laurent;
use crate::tensoralg::Tensor2;

/// Largest number of index paths expanded for a single word.
pub const MAX_PATHS: usize = 1 << 16;

/// The commuting generator `u_{var,row col}^{(der)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CVar {
    pub var: u16,
    pub row: u8,
    pub col: u8,
    pub der: u16,
}

impl CVar {
    pub fn new(var: u16, row: u8, col: u8) -> Self {
        CVar { var, row, col, der: 0 }
    }

    pub fn base(self) -> Self {
        CVar { der: 0, ..self }
    }

    fn bump(self) -> Self {
        CVar { der: self.der + 1, ..self }
    }
}

/// A commutative monomial as a sorted exponent list.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(pub Vec<(CVar, u32)>);

impl Mono {
    fn mul(&self, other: &Mono) -> Mono {
        let mut m: BTreeMap<CVar, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *m.entry(v).or_insert(0) += e;
        }
        Mono(m.into_iter().collect())
    }

    fn without_one(&self, v: CVar) -> Option<(u32, Mono)> {
        let pos = self.0.iter().position(|&(x, _)| x == v)?;
        let mut rest = self.0.clone();
        let e = rest[pos].1;
        if e == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 -= 1;
        }
        Some((e, Mono(rest)))
    }
}

pub type CommPoly = Lin<Mono>;

/// λ-polynomials with commutative coefficients.
pub type CommLambdaPoly = Laurent<CommPoly>;

impl Lin<Mono> {
    pub fn one() -> CommPoly {
        Lin::term(Mono::default(), q(1))
    }

    pub fn scalar(c: Q) -> CommPoly {
        Lin::term(Mono::default(), c)
    }

    pub fn cvar(v: CVar) -> CommPoly {
        Lin::term(Mono(vec![(v, 1)]), q(1))
    }

    pub fn mul(&self, other: &CommPoly) -> CommPoly {
        let mut out = CommPoly::zero();
        for (a, x) in self.iter() {
            for (b, y) in other.iter() {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }

    pub fn d(&self) -> CommPoly {
        let mut out = CommPoly::zero();
        for (m, c) in self.iter() {
            for (i, &(v, e)) in m.0.iter().enumerate() {
                let mut rest = m.clone();
                if e == 1 {
                    rest.0.remove(i);
                } else {
                    rest.0[i].1 -= 1;
                }
                let t = rest.mul(&Mono(vec![(v.bump(), 1)]));
                out.add_term(t, c * Q::from_integer(e.into()));
            }
        }
        out
    }

    /// Ordinary partial derivative in `v`.
    pub fn partial(&self, v: CVar) -> CommPoly {
        let mut out = CommPoly::zero();
        for (m, c) in self.iter() {
            if let Some((e, rest)) = m.without_one(v) {
                out.add_term(rest, c * Q::from_integer(e.into()));
            }
        }
        out
    }

    pub fn cvars(&self) -> BTreeSet<CVar> {
        self.keys().flat_map(|m| m.0.iter().map(|&(v, _)| v)).collect()
    }
}

impl DiffRing for CommPoly {
    fn one() -> Self {
        CommPoly::one()
    }
    fn mul(&self, other: &Self) -> Self {
        CommPoly::mul(self, other)
    }
    fn d(&self) -> Self {
        CommPoly::d(self)
    }
    fn as_scalar(&self) -> Option<Q> {
        match self.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.iter().next().unwrap();
                m.0.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }
}

fn expand_word(w: &Word, a: usize, b: usize, m: usize) -> Result<CommPoly> {
    if w.len() > 1 && (w.len() - 1) as f64 * (m as f64).log2() > (MAX_PATHS as f64).log2() {
        return Err(Error::Unsupported(format!("entry expansion of a word of length {} at m = {m}", w.len())));
    }
    let mut cur: Vec<CommPoly> = (0..m).map(|i| if i == a { CommPoly::one() } else { CommPoly::zero() }).collect();
    for s in &w.0 {
        let mut next = vec![CommPoly::zero(); m];
        for (i, p) in cur.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, slot) in next.iter_mut().enumerate() {
                let v = CVar { var: s.var, row: i as u8, col: j as u8, der: s.der };
                *slot += &p.mul(&CommPoly::cvar(v));
            }
        }
        cur = next;
    }
    Ok(cur.swap_remove(b))
}

/// The `(a, b)` entry of `f` viewed as an `m × m` matrix.
pub fn expand_entry(f: &NcPoly, a: usize, b: usize, m: usize) -> Result<CommPoly> {
    if a >= m || b >= m {
        return Err(Error::IndexOutOfRange { index: a.max(b), expected: format!("< {m}") });
    }
    let mut out = CommPoly::zero();
    for (w, c) in f.iter() {
        out.add_scaled(&expand_word(w, a, b, m)?, c);
    }
    Ok(out)
}

/// `Σ (x')_{p} (x'')_{r}` for index pairs `p`, `r`.
fn contract2(x: &Tensor2, p: (usize, usize), r: (usize, usize), m: usize) -> Result<CommPoly> {
    let mut out = CommPoly::zero();
    for ((w1, w2), c) in x.iter() {
        let e = expand_word(w1, p.0, p.1, m)?.mul(&expand_word(w2, r.0, r.1, m)?);
        out.add_scaled(&e, c);
    }
    Ok(out)
}

/// `{a_ij λ b_hk}` read off directly from `{{a λ b}}`.
pub fn vm_lambda_bracket(s: &LambdaStructure, a: (&NcPoly, usize, usize), b: (&NcPoly, usize, usize), m: usize) -> Result<CommLambdaPoly> {
    require_local(s)?;
    let (f, i, j) = a;
    let (g, h, k) = b;
    let mut out = CommLambdaPoly::zero();
    for (&n, x) in &s.lambda_bracket(f, g).coeffs {
        out.add_at(n, &contract2(x, (h, j), (i, k), m)?, &q(1));
    }
    Ok(out)
}

fn require_local(s: &LambdaStructure) -> Result<()> {
    if s.is_local() {
        Ok(())
    } else {
        Err(Error::Unsupported("V_m brackets of non-local structures".into()))
    }
}

fn lam_pow_shift(p: &CommLambdaPoly, m: u16) -> CommLambdaPoly {
    let sign = if m % 2 == 0 { q(1) } else { q(-1) };
    let mut out = CommLambdaPoly::zero();
    for (&n, c) in &p.coeffs {
        out.add_at(n + m as i32, c, &sign);
    }
    out
}

/// The λ-bracket on `V_m` determined by a local double λ-bracket, extended to all of
/// `V_m` by sesquilinearity and the two Leibniz rules.
pub struct VmBracket<'a> {
    s: &'a LambdaStructure,
    pub m: usize,
    table: HashMap<(CVar, CVar), CommLambdaPoly>,
}

impl<'a> VmBracket<'a> {
    pub fn new(s: &'a LambdaStructure, m: usize) -> Result<Self> {
        require_local(s)?;
        Ok(VmBracket { s, m, table: HashMap::new() })
    }

    /// `{x λ y}` on undifferentiated generators.
    pub fn generator(&mut self, x: CVar, y: CVar) -> Result<CommLambdaPoly> {
        let key = (x.base(), y.base());
        if let Some(v) = self.table.get(&key) {
            return Ok(v.clone());
        }
        let (x, y) = key;
        let mut out = CommLambdaPoly::zero();
        for (&n, t) in &self.s.brackets[x.var as usize][y.var as usize].coeffs {
            let e = contract2(t, (y.row as usize, x.col as usize), (x.row as usize, y.col as usize), self.m)?;
            out.add_at(n, &e, &q(1));
        }
        self.table.insert(key, out.clone());
        Ok(out)
    }

    /// `{x λ g}` for a (possibly differentiated) generator `x`.
    fn left_generator(&mut self, x: CVar, g: &CommPoly) -> Result<CommLambdaPoly> {
        let mut out = CommLambdaPoly::zero();
        for y in g.cvars() {
            let gy = g.partial(y);
            let b = self.generator(x, y)?;
            out.add_series(&CommLambdaPoly::term(y.der as i32, gy).compose(&b, 0), &q(1));
        }
        Ok(lam_pow_shift(&out, x.der))
    }

    /// `{f λ g}`.
    pub fn bracket(&mut self, f: &CommPoly, g: &CommPoly) -> Result<CommLambdaPoly> {
        let mut out = CommLambdaPoly::zero();
        for x in f.cvars() {
            let b = self.left_generator(x, g)?;
            out.add_series(&b.compose(&CommLambdaPoly::term(0, f.partial(x)), 0), &q(1));
        }
        Ok(out)
    }
}

/// `{a λ {b μ c}} − {b μ {a λ c}} − {{a λ b} λ+μ c}`, outer brackets from `outer`.
pub fn jacobiator_bilinear(outer: &mut VmBracket, inner: &mut VmBracket, a: &CommPoly, b: &CommPoly, c: &CommPoly) -> Result<Lambda2<CommPoly>> {
    let mut out = Lambda2::zero();
    for (&qe, g) in &inner.bracket(b, c)?.coeffs {
        for (&p, t) in &outer.bracket(a, g)?.coeffs {
            out.add_at((p, qe), t, &q(1));
        }
    }
    for (&p, f) in &inner.bracket(a, c)?.coeffs {
        for (&qe, t) in &outer.bracket(b, f)?.coeffs {
            out.add_at((p, qe), t, &q(-1));
        }
    }
    for (&p, e) in &inner.bracket(a, b)?.coeffs {
        for (&r, t) in &outer.bracket(e, c)?.coeffs {
            for s in 0..=r {
                out.add_at((p + s, r - s), t, &-binom(r as i64, s as u32));
            }
        }
    }
    Ok(out)
}

/// Generator entries `u_{var, ab}` for every variable of `s` and every index pair.
pub fn generator_entries(nvars: usize, m: usize) -> Vec<CVar> {
    let mut out = Vec::new();
    for v in 0..nvars {
        for a in 0..m {
            for b in 0..m {
                out.push(CVar::new(v as u16, a as u8, b as u8));
            }
        }
    }
    out
}

/// Commutative PVA Jacobi for a pencil `Σ c^k S_k` on the given generator triples.
pub fn vm_jacobi_check_pencil(p: &Pencil, m: usize, triples: &[(CVar, CVar, CVar)]) -> Result<Report> {
    let n = p.parts.len();
    let fresh = || p.parts.iter().map(|s| VmBracket::new(s, m)).collect::<Result<Vec<_>>>();
    let (mut outers, mut inners) = (fresh()?, fresh()?);
    let mut rep = Report::new();
    for &(x, y, z) in triples {
        let (a, b, c) = (CommPoly::cvar(x), CommPoly::cvar(y), CommPoly::cvar(z));
        let mut ok = true;
        for d in 0..(2 * n).saturating_sub(1) {
            let mut acc = Lambda2::zero();
            for k in 0..n {
                if d < k || d - k >= n {
                    continue;
                }
                acc.add(&jacobiator_bilinear(&mut outers[k], &mut inners[d - k], &a, &b, &c)?, &q(1));
            }
            ok &= acc.is_zero();
        }
        rep.push(format!("Jacobi on ({x:?}, {y:?}, {z:?})"), ok, "");
    }
    Ok(rep)
}

/// Commutative PVA Jacobi for `S` on the given generator triples.
pub fn vm_jacobi_check(s: &LambdaStructure, m: usize, triples: &[(CVar, CVar, CVar)]) -> Result<bool> {
    Ok(vm_jacobi_check_pencil(&Pencil::new(vec![s.clone()]), m, triples)?.all_passed())
}

/// Every generator-entry triple.
pub fn all_triples(nvars: usize, m: usize) -> Vec<(CVar, CVar, CVar)> {
    let g = generator_entries(nvars, m);
    let mut out = Vec::new();
    for &x in &g {
        for &y in &g {
            for &z in &g {
                out.push((x, y, z));
            }
        }
    }
    out
}

fn delta(a: usize, b: usize) -> Q {
    if a == b {
        q(1)
    } else {
        q(0)
    }
}

/// The affine `gl_m` table `{u_ij λ u_hk} = δ_jh u_ik − δ_ki u_hj + δ_jh δ_ik cλ`,
/// as its `c^0` and `c^1` parts.
pub fn affine_table(i: usize, j: usize, h: usize, k: usize) -> [CommLambdaPoly; 2] {
    let u = |a: usize, b: usize| CommPoly::cvar(CVar::new(0, a as u8, b as u8));
    let mut c0 = CommPoly::zero();
    c0.add_scaled(&u(i, k), &delta(j, h));
    c0.add_scaled(&u(h, j), &-delta(k, i));
    let mut c1 = CommLambdaPoly::zero();
    c1.add_at(1, &CommPoly::one(), &(delta(j, h) * delta(i, k)));
    [CommLambdaPoly::term(0, c0), c1]
}

/// Compares the `V_m` image of the affine pencil with [`affine_table`] on all index quadruples.
pub fn vm_affine_check(m: usize) -> Result<Report> {
    let p = crate::dpva::fixtures::affine();
    let mut rep = Report::new();
    let mut brs: Vec<VmBracket> = p.parts.iter().map(|s| VmBracket::new(s, m)).collect::<Result<_>>()?;
    for x in generator_entries(1, m) {
        for y in generator_entries(1, m) {
            let want = affine_table(x.row as usize, x.col as usize, y.row as usize, y.col as usize);
            let mut ok = true;
            for (br, w) in brs.iter_mut().zip(&want) {
                ok &= br.generator(x, y)?.agrees_with(w);
            }
            rep.push(format!("u_{}{} λ u_{}{}", x.row + 1, x.col + 1, y.row + 1, y.col + 1), ok, "");
        }
    }
    Ok(rep)
}

/// `(ℓ_α)_{cb}`, reading the leading unit as `δ_cb` unless `literal_unit` is set.
fn ell_entry(sys: &AdlerSystem, alpha: i32, c: usize, b: usize, m: usize, literal_unit: bool) -> Result<CommPoly> {
    if alpha == sys.n && literal_unit {
        return Ok(CommPoly::one());
    }
    expand_entry(&sys.ell(alpha)?, c, b, m)
}

/// Coefficients of `L*(z) = Σ_α (−z+∂)^α ∘ ℓ_α` as `(α, p, (−1)^α C(α,p))`: the term
/// `(−1)^α C(α,p) ℓ_α^{(p)} z^{α−p}`.
fn adjoint_terms(n: i32) -> Vec<(i32, u32, Q)> {
    let mut out = Vec::new();
    for alpha in 0..=n {
        let sign = if alpha % 2 == 0 { q(1) } else { q(-1) };
        for p in 0..=alpha as u32 {
            out.push((alpha, p, &sign * binom(alpha as i64, p)));
        }
    }
    out
}

fn derived(x: &CommPoly, k: i32) -> CommPoly {
    (0..k).fold(x.clone(), |acc, _| acc.d())
}

/// `{u_{i,ab} λ u_{j,cd}}` read off from the matrix generating series of the
/// Adler brackets on `V_m`; Gelfand–Dickey windows only.
pub fn adler_series_entry(sys: &AdlerSystem, which: Which, (i, a, b): (i32, usize, usize), (j, c, d): (i32, usize, usize), m: usize) -> Result<CommLambdaPoly> {
    adler_series_entry_with(sys, which, (i, a, b), (j, c, d), m, false)
}

fn adler_series_entry_with(sys: &AdlerSystem, which: Which, (i, a, b): (i32, usize, usize), (j, c, d): (i32, usize, usize), m: usize, literal_unit: bool) -> Result<CommLambdaPoly> {
    if sys.window != Window::GelfandDickey || sys.reduced {
        return Err(Error::Unsupported("matrix generating series need a full Gelfand–Dickey window".into()));
    }
    sys.var(i)?;
    sys.var(j)?;
    let n = sys.n;
    let lcb = |al: i32| ell_entry(sys, al, c, b, m, literal_unit);
    let lad = |al: i32| ell_entry(sys, al, a, d, m, literal_unit);
    let mut out = CommLambdaPoly::zero();
    match which {
        Which::H => {
            // L_cb(z) i_z(z−w−λ−∂)^{-1} L_ad(w)
            for al in 0..=n {
                let k = al + i;
                if k < 0 {
                    continue;
                }
                let x = lcb(al)?;
                for be in 0..=n {
                    let r = -j - 1 - be;
                    if r < 0 || r > k {
                        continue;
                    }
                    let y = lad(be)?;
                    for s in 0..=(k - r) {
                        let coef = binom(k as i64, r as u32) * binom((k - r) as i64, s as u32);
                        out.add_at(s, &x.mul(&derived(&y, k - r - s)), &coef);
                    }
                }
            }
            // −L_cb(w+λ+∂) i_z(z−w−λ−∂)^{-1} L*_ad(λ−z)
            for be in 0..=n {
                let x = lcb(be)?;
                for (al, p, c1) in adjoint_terms(n) {
                    let e = al - p as i32;
                    let y = lad(al)?;
                    for t in 0..=e {
                        let zsign = if (e - t) % 2 == 0 { q(1) } else { q(-1) };
                        let k = e - t + i;
                        if k < 0 {
                            continue;
                        }
                        let r = be + k + j + 1;
                        if r < 0 || r > be + k {
                            continue;
                        }
                        for s in 0..=r {
                            let coef = -(&c1 * &zsign * binom(e as i64, t as u32) * binom((be + k) as i64, r as u32) * binom(r as i64, s as u32));
                            out.add_at(t + s, &x.mul(&derived(&y, r - s + p as i32)), &coef);
                        }
                    }
                }
            }
        }
        Which::K => {
            // δ_ad i_z(z−w−λ)^{-1} L_cb(z); the L_cb(w+λ) part has no z^{-i-1} term.
            if a == d {
                let r = -j - 1;
                for al in 0..=n {
                    let k = al + i;
                    if k < 0 || r > k {
                        continue;
                    }
                    out.add_at(k - r, &lcb(al)?, &binom(k as i64, r as u32));
                }
            }
            // −δ_cb i_z(z−w−λ−∂)^{-1} L*_ad(λ−z); the L_ad(w) part has no z^{-i-1} term.
            if c == b {
                let r = -j - 1;
                for (al, p, c1) in adjoint_terms(n) {
                    let e = al - p as i32;
                    let y = lad(al)?;
                    for t in 0..=e {
                        let zsign = if (e - t) % 2 == 0 { q(1) } else { q(-1) };
                        let k = e - t + i;
                        if k < 0 || r > k {
                            continue;
                        }
                        for s in 0..=(k - r) {
                            let coef = -(&c1 * &zsign * binom(e as i64, t as u32) * binom(k as i64, r as u32) * binom((k - r) as i64, s as u32));
                            out.add_at(t + s, &derived(&y, k - r - s + p as i32), &coef);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Compares the `V_m` image of the Adler `H` or `K` bracket with the matrix generating
/// series on every generator entry pair of the window.
pub fn vm_adler_series_check(sys: &AdlerSystem, which: Which, m: usize) -> Result<Report> {
    vm_adler_series_check_with(sys, which, m, false)
}

fn vm_adler_series_check_with(sys: &AdlerSystem, which: Which, m: usize, literal_unit: bool) -> Result<Report> {
    let s = sys.structure(which)?;
    let mut br = VmBracket::new(&s, m)?;
    let mut rep = Report::new();
    for i in sys.indices() {
        for j in sys.indices() {
            for x in generator_entries(1, m) {
                for y in generator_entries(1, m) {
                    let (a, b, c, d) = (x.row as usize, x.col as usize, y.row as usize, y.col as usize);
                    let got = br.generator(CVar::new(sys.var(i)?, a as u8, b as u8), CVar::new(sys.var(j)?, c as u8, d as u8))?;
                    let want = adler_series_entry_with(sys, which, (i, a, b), (j, c, d), m, literal_unit)?;
                    rep.push(format!("u_{i},{}{} λ u_{j},{}{}", a + 1, b + 1, c + 1, d + 1), got.agrees_with(&want), "");
                }
            }
        }
    }
    Ok(rep)
}

/// Both sides of the identity expressing the `V_m` Jacobiator on `a_ij, b_hk, c_ln`
/// through the triple λ-bracket: `(h')_lj (h'')_ik (h''')_hn − (g')_lk (g'')_hj (g''')_in`.
pub fn jacobiator_contraction_sides(s: &LambdaStructure, m: usize, (a, i, j): (&NcPoly, usize, usize), (b, h, k): (&NcPoly, usize, usize), (c, l, n): (&NcPoly, usize, usize)) -> Result<(Lambda2<CommPoly>, Lambda2<CommPoly>)> {
    let mut outer = VmBracket::new(s, m)?;
    let mut inner = VmBracket::new(s, m)?;
    let lhs = jacobiator_bilinear(&mut outer, &mut inner, &expand_entry(a, i, j, m)?, &expand_entry(b, h, k, m)?, &expand_entry(c, l, n, m)?)?;
    let contract3 = |t: &crate::tensoralg::Tensor3, p: (usize, usize), r: (usize, usize), u: (usize, usize)| -> Result<CommPoly> {
        let mut out = CommPoly::zero();
        for ((w1, w2, w3), coef) in t.iter() {
            let e = expand_word(w1, p.0, p.1, m)?.mul(&expand_word(w2, r.0, r.1, m)?).mul(&expand_word(w3, u.0, u.1, m)?);
            out.add_scaled(&e, coef);
        }
        Ok(out)
    };
    let mut rhs = Lambda2::zero();
    for (&key, t) in &s.triple(a, b, c)?.coeffs {
        rhs.add_at(key, &contract3(t, (l, j), (i, k), (h, n))?, &q(1));
    }
    for (&key, t) in &s.triple(b, a, c)?.swap().coeffs {
        rhs.add_at(key, &contract3(t, (l, k), (h, j), (i, n))?, &q(-1));
    }
    Ok((lhs, rhs))
}
