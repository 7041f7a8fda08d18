//! The compatible pair `(H, K)` attached to the generic operator
//! `L(z) = z^N + Σ_{i∈I} u_i z^{−i−1}`, its hierarchy, and Dirac reduction by `u_{−N}`.
//!
//! Generator brackets are coefficients of the generating series
//!
//! `{{L(z) λ L(w)}}_H = L(z) ⊗ i_z(z−w−λ−∂)^{−1} L(w) − L(w+λ+∂) ⊗ i_z(z−w−λ−∂)^{−1} L*(−z+λ)`
//!
//! `{{L(z) λ L(w)}}_K = i_z(z−w−λ)^{−1}(L(z) − L(w+λ)) ⊗ 1 + 1 ⊗ i_z(z−w−λ−∂)^{−1}(L(w) − L*(−z+λ))`
//!
//! extracted one pair at a time. Variable `k` of the ambient algebra is `u_{k−N}`.

use std::collections::BTreeSet;

use crate::dpva::{LambdaStructure, LambdaTensor2, Pencil};
use crate::error::{Error, Result};
use crate::linear::{binom, q, qr, Q};
use crate::ncpoly::{functional_is_zero, NcPoly};
use crate::psido::{self, PsiDO};
use crate::report::Report;
use crate::tensoralg::Tensor2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    /// `I₋ = {−N, …, −1}`: `L` is a differential operator.
    GelfandDickey,
    /// `{−N, …, max}`, a truncation of `I = {i ≥ −N}`.
    Truncated(i32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    H,
    K,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdlerSystem {
    pub n: i32,
    pub window: Window,
    /// Work modulo the differential ideal generated by `u_{−N}`.
    pub reduced: bool,
    pub depth: i32,
}

impl AdlerSystem {
    pub fn new(n: i32, window: Window) -> Result<Self> {
        if n < 1 {
            return Err(Error::Unsupported(format!("order {n} must be positive")));
        }
        if let Window::Truncated(m) = window {
            if m < -1 {
                return Err(Error::WindowOverflow(format!("window maximum {m} below −1")));
            }
        }
        Ok(AdlerSystem { n, window, reduced: false, depth: crate::dpva::DEFAULT_DEPTH })
    }

    pub fn gelfand_dickey(n: i32) -> Result<Self> {
        Self::new(n, Window::GelfandDickey)
    }

    /// `L = ∂^N + u ∂^{N−2} + …` with `u_{−N} = 0`: KdV for `N = 2`, Boussinesq for `N = 3`.
    pub fn reduced_gd(n: i32) -> Result<Self> {
        Ok(Self::gelfand_dickey(n)?.into_reduced())
    }

    /// KP: `L = ∂ + Σ_{i=0}^{max} u_i ∂^{−i−1}`.
    pub fn kp(max: i32) -> Result<Self> {
        Ok(Self::new(1, Window::Truncated(max))?.into_reduced())
    }

    pub fn into_reduced(mut self) -> Self {
        self.reduced = true;
        self
    }

    pub fn with_depth(mut self, depth: i32) -> Self {
        self.depth = depth;
        self
    }

    pub fn hi(&self) -> i32 {
        match self.window {
            Window::GelfandDickey => -1,
            Window::Truncated(m) => m,
        }
    }

    /// All generator indices of the window, including `−N`.
    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        -self.n..=self.hi()
    }

    /// Generator indices that survive the reduction.
    pub fn live_indices(&self) -> Vec<i32> {
        self.indices().filter(|&i| !(self.reduced && i == -self.n)).collect()
    }

    pub fn nvars(&self) -> usize {
        (self.hi() + self.n + 1) as usize
    }

    pub fn var(&self, i: i32) -> Result<u16> {
        if i < -self.n || i > self.hi() {
            return Err(Error::WindowOverflow(format!("u_{i} lies outside {}..={}", -self.n, self.hi())));
        }
        Ok((i + self.n) as u16)
    }

    pub fn gen(&self, i: i32) -> Result<NcPoly> {
        Ok(NcPoly::var(self.var(i)?))
    }

    pub fn theta(&self) -> u16 {
        0
    }

    pub fn name(&self, i: i32) -> String {
        match (self.window, self.n, self.reduced, i) {
            (Window::GelfandDickey, 2, true, -1) => "u".into(),
            (Window::GelfandDickey, 3, true, -2) => "u".into(),
            (Window::GelfandDickey, 3, true, -1) => "v".into(),
            _ if i < 0 => format!("u_m{}", -i),
            _ => format!("u{i}"),
        }
    }

    /// Names of all ambient variables, in variable order.
    pub fn names(&self) -> Vec<String> {
        self.indices().map(|i| self.name(i)).collect()
    }

    fn finish(&self, p: &NcPoly) -> NcPoly {
        if self.reduced {
            p.kill_var(self.theta())
        } else {
            p.clone()
        }
    }

    /// Coefficient `ℓ_a` of `z^a` in `L(z)` (never reduced).
    pub fn ell(&self, a: i32) -> Result<NcPoly> {
        if a > self.n {
            return Ok(NcPoly::zero());
        }
        if a == self.n {
            return Ok(NcPoly::one());
        }
        let i = -a - 1;
        match self.window {
            Window::GelfandDickey if i >= 0 => Ok(NcPoly::zero()),
            _ => self.gen(i),
        }
    }

    /// `L(∂)` over the whole window, exact above the window for truncated systems.
    pub fn operator_full(&self) -> PsiDO<NcPoly> {
        let mut l = PsiDO::term(self.n, NcPoly::one());
        for i in self.indices() {
            l.add_at(-i - 1, &NcPoly::var((i + self.n) as u16), &q(1));
        }
        if let Window::Truncated(m) = self.window {
            l.valid_from = Some(-m - 1);
        }
        l
    }

    pub fn operator(&self) -> PsiDO<NcPoly> {
        let l = self.operator_full();
        if self.reduced {
            l.map_coeffs(|c| c.kill_var(self.theta()))
        } else {
            l
        }
    }

    fn adjoint_full(&self) -> PsiDO<NcPoly> {
        let l = self.operator_full();
        psido::adjoint(&l, l.valid_from.unwrap_or(-self.depth - self.n - 2) - 1)
    }

    fn ell_star(&self, adj: &PsiDO<NcPoly>, c: i32) -> Result<NcPoly> {
        if adj.valid_from.is_some_and(|v| c < v) {
            return Err(Error::WindowOverflow(format!("L* coefficient at ∂^{c} needs generators beyond u_{}", self.hi())));
        }
        Ok(adj.coeff(c))
    }

    /// `{{u_i λ u_j}}_H`.
    pub fn adler_h(&self, i: i32, j: i32) -> Result<LambdaTensor2> {
        self.var(i)?;
        self.var(j)?;
        let n = self.n;
        let adj = self.adjoint_full();
        let mut out = LambdaTensor2::zero();
        for a in (-i).max(self.lowest_a())..=n {
            let la = self.ell(a)?;
            if la.is_zero() {
                continue;
            }
            let k = a + i;
            for p in 0..=k {
                let lb = self.ell(-j - 1 - p)?;
                push_shift(&mut out, &la, &lb, k - p, 0, &binom(k as i64, p as u32));
            }
        }
        for p in 0..=(n + i).max(-1) {
            for c in (p - i).max(self.lowest_a())..=n {
                let k = c - p + i;
                let lc = self.ell_star(&adj, c)?;
                if lc.is_zero() {
                    continue;
                }
                let sign = if (c + p).rem_euclid(2) == 0 { q(-1) } else { q(1) };
                for b in (-k - j - 1).max(self.lowest_a())..=n {
                    let qq = b + k + j + 1;
                    let coef = &sign * binom(c as i64, p as u32) * binom((b + k) as i64, qq as u32);
                    if coef == q(0) {
                        continue;
                    }
                    let lb = self.ell(b)?;
                    push_shift(&mut out, &lb, &lc, qq, p, &coef);
                }
            }
        }
        Ok(out)
    }

    /// `{{u_i λ u_j}}_K`.
    pub fn adler_k(&self, i: i32, j: i32) -> Result<LambdaTensor2> {
        self.var(i)?;
        self.var(j)?;
        let n = self.n;
        let one = NcPoly::one();
        let mut out = LambdaTensor2::zero();
        if j <= -1 {
            let s = -j - 1;
            for a in (-i).max(self.lowest_a())..=n {
                let k = a + i;
                if s <= k {
                    push_shift(&mut out, &self.ell(a)?, &one, 0, k - s, &binom(k as i64, s as u32));
                }
            }
            let adj = self.adjoint_full();
            for p in 0..=(n + i).max(-1) {
                for c in (p - i).max(self.lowest_a())..=n {
                    let k = c - p + i;
                    let s = k + j + 1;
                    if s < 0 {
                        continue;
                    }
                    let sign = if (c + p).rem_euclid(2) == 0 { q(-1) } else { q(1) };
                    let coef = sign * binom(c as i64, p as u32) * binom(k as i64, s as u32);
                    push_shift(&mut out, &one, &self.ell_star(&adj, c)?, s, p, &coef);
                }
            }
        }
        if i >= 0 {
            for b in (-i - j - 1).max(self.lowest_a())..=n {
                let qq = b + i + j + 1;
                push_shift(&mut out, &self.ell(b)?, &one, 0, qq, &-binom((b + i) as i64, qq as u32));
            }
            for p in 0..=i {
                push_shift(&mut out, &one, &self.ell(-j - 1 - p)?, i - p, 0, &binom(i as i64, p as u32));
            }
        }
        Ok(out)
    }

    /// Lowest `a` with a possibly nonzero `ℓ_a` (an `ℓ_a` below the window errors on access).
    fn lowest_a(&self) -> i32 {
        match self.window {
            Window::GelfandDickey => 0,
            Window::Truncated(_) => i32::MIN / 4,
        }
    }

    pub fn entry(&self, which: Which, i: i32, j: i32) -> Result<LambdaTensor2> {
        match which {
            Which::H => self.adler_h(i, j),
            Which::K => self.adler_k(i, j),
        }
    }

    /// The structure on the full window (`u_{−N}` included).
    pub fn structure(&self, which: Which) -> Result<LambdaStructure> {
        let all: Vec<i32> = self.indices().collect();
        self.partial_structure(which, &all, &all)
    }

    /// A structure with only the entries `{{u_i λ u_j}}`, `i ∈ rows`, `j ∈ cols`, filled in.
    pub fn partial_structure(&self, which: Which, rows: &[i32], cols: &[i32]) -> Result<LambdaStructure> {
        let mut s = LambdaStructure::zero(self.nvars()).with_depth(self.depth);
        for &i in rows {
            for &j in cols {
                s.set(self.var(i)? as usize, self.var(j)? as usize, self.entry(which, i, j)?);
            }
        }
        Ok(s)
    }

    /// `H + cK` as a pencil in `c`.
    pub fn pencil(&self) -> Result<Pencil> {
        Ok(Pencil::new(vec![self.structure(Which::H)?, self.structure(Which::K)?]))
    }

    /// The structure on the quotient by `u_{−N}`, generators renumbered from 0.
    pub fn reduced_structure(&self, which: Which) -> Result<LambdaStructure> {
        Ok(quotient(&self.structure(which)?, self.theta()))
    }

    fn density_full(&self, k: u32) -> Result<NcPoly> {
        if k == 0 {
            return Err(Error::Unsupported("densities start at k = 1".into()));
        }
        let p = psido::power_frac(&self.operator_full(), k, -1)?;
        Ok(psido::residue(&p)?.scale(&qr(self.n as i64, k as i64)))
    }

    /// `h_k = (N/k) res L^{k/N}`.
    pub fn conserved_density(&self, k: u32) -> Result<NcPoly> {
        Ok(self.finish(&self.density_full(k)?))
    }

    /// `du_i/dt_k` from `[(L^{k/N})₊, L]`, cross-checked against `mult {{h_k λ u_i}}_H |_{λ=0}`.
    /// Truncated windows yield only the flows their window determines.
    pub fn lax_flow(&self, k: u32) -> Result<Vec<(i32, NcPoly)>> {
        let l = self.operator();
        let p = psido::positive_part(&psido::power_frac(&l, k, 0)?)?;
        let comm = psido::commutator(&p, &l, -self.hi() - 1);
        let h = self.density_full(k)?;
        let rows: Vec<i32> = h.vars().into_iter().map(|v| v as i32 - self.n).collect();
        let live: Vec<i32> = self.live_indices().into_iter().filter(|&i| comm.valid_from.map_or(true, |v| -i - 1 >= v)).collect();
        if live.is_empty() {
            return Err(Error::DepthExhausted(format!("window up to u_{} determines no t_{k} flow", self.hi())));
        }
        let s = self.partial_structure(Which::H, &rows, &live)?;
        let mut out = Vec::new();
        for i in live {
            let lax = comm.coeff(-i - 1);
            let ham = self.finish(&s.pair_bracket(&h, &self.gen(i)?)?);
            if lax != ham {
                return Err(Error::Inconsistent(format!("Lax and Hamiltonian forms of du_{i}/dt_{k} differ")));
            }
            out.push((i, lax));
        }
        Ok(out)
    }
}

/// `c·λ^lam · A ⊗ (λ+∂)^s B`, `s >= 0`, with `∂` acting on `B`.
fn push_shift(out: &mut LambdaTensor2, a: &NcPoly, b: &NcPoly, s: i32, lam: i32, c: &Q) {
    if a.is_zero() || b.is_zero() || s < 0 {
        return;
    }
    let mut db = b.clone();
    for t in 0..=s {
        let coef = c * binom(s as i64, t as u32);
        out.add_at(lam + s - t, &Tensor2::pure(a, &db), &coef);
        db = db.d();
    }
}

/// Kills `var` and shifts the higher variables down by one.
pub fn quotient(s: &LambdaStructure, var: u16) -> LambdaStructure {
    let l = s.nvars();
    let rename = |t: &Tensor2| {
        let mut t = t.kill_var(var);
        for v in var as usize + 1..l {
            t = t.substitute(v as u16, &NcPoly::var(v as u16 - 1));
        }
        t
    };
    let keep: Vec<usize> = (0..l).filter(|&k| k != var as usize).collect();
    let mut out = LambdaStructure::zero(keep.len());
    out.floor = s.floor;
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            out.brackets[a][b] = s.brackets[i][j].map_coeffs(&rename);
        }
    }
    out
}

/// Checks on a Gelfand–Dickey window:
/// `{∫h_ε, u_i}_K = 0` for `ε ≤ N`, `{∫h_k, u_i}_H = {∫h_{k+N}, u_i}_K` for `k ≤ k_max`,
/// and involution of `∫h_1, …, ∫h_{inv_max}` under both brackets.
pub fn lenard_pde_verify(sys: &AdlerSystem, k_max: u32, inv_max: u32) -> Result<Report> {
    let hs = (1..=(k_max + sys.n as u32).max(inv_max)).map(|k| sys.density_full(k)).collect::<Result<Vec<_>>>()?;
    lenard_verify_densities(sys, &hs, k_max, inv_max as usize)
}

/// [`lenard_pde_verify`] with explicit densities `hs[k−1] = h_k`.
pub fn lenard_verify_densities(sys: &AdlerSystem, hs: &[NcPoly], k_max: u32, inv_max: usize) -> Result<Report> {
    if sys.window != Window::GelfandDickey {
        return Err(Error::Unsupported("Lenard–Magri checks need a Gelfand–Dickey window".into()));
    }
    let h = sys.structure(Which::H)?;
    let k = sys.structure(Which::K)?;
    let n = sys.n as usize;
    let gens: Vec<NcPoly> = sys.indices().map(|i| sys.gen(i)).collect::<Result<_>>()?;
    let mut rep = Report::new();
    for e in 1..=n.min(hs.len()) {
        let ok = gens.iter().try_fold(true, |acc, g| Ok::<_, Error>(acc && k.pair_bracket(&hs[e - 1], g)?.is_zero()))?;
        rep.push(format!("K-kernel h_{e}"), ok, "");
    }
    for kk in 1..=k_max as usize {
        if kk + n > hs.len() {
            break;
        }
        for (i, g) in sys.indices().zip(&gens) {
            let lhs = h.pair_bracket(&hs[kk - 1], g)?;
            let rhs = k.pair_bracket(&hs[kk + n - 1], g)?;
            let ok = lhs == rhs;
            rep.push(format!("recursion k={kk} u_{i}"), ok, if ok { String::new() } else { format!("H-side {} terms, K-side {} terms", lhs.len(), rhs.len()) });
        }
    }
    for (name, s) in [("H", &h), ("K", &k)] {
        let top = inv_max.min(hs.len());
        for a in 0..top {
            for b in a + 1..top {
                let v = s.pair_bracket(&hs[a], &hs[b])?;
                rep.push(format!("involution {name} (h_{}, h_{})", a + 1, b + 1), functional_is_zero(&v), "");
            }
        }
    }
    Ok(rep)
}

/// Both sides of
/// `res_z mult {{L^{k/N}(z) λ L(w)}}|_{λ=0} = (k/N) res_z mult({{L(z+x) x L(w)}} ⋆₁ (|_{x=∂} L^{k/N−1}(z)))`
/// for an arbitrary local structure `s` on the generators, one entry per `u_j`.
pub fn adler_lemma_sides(sys: &AdlerSystem, s: &LambdaStructure, k: u32) -> Result<(Vec<NcPoly>, Vec<NcPoly>)> {
    if sys.window != Window::GelfandDickey || !s.is_local() {
        return Err(Error::Unsupported("the identity is evaluated on Gelfand–Dickey windows with local brackets".into()));
    }
    let n = sys.n;
    let l = sys.operator_full();
    // only res L^{k/N} and the ∂^{-1}..∂^{-N} part of L^{k/N−1} enter
    let lk = psido::power_frac(&l, k, -2)?;
    let m = lk.compose(&l.inverse(-n - k as i32 - 2)?, -n - 1);
    if m.valid_from.is_some_and(|v| v > -n - 1) {
        return Err(Error::DepthExhausted("L^{k/N−1} window".into()));
    }
    let res = psido::residue(&lk)?;
    let ratio = qr(k as i64, n as i64);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for j in sys.indices() {
        let uj = sys.gen(j)?;
        lhs.push(s.lambda_bracket(&res, &uj).coeff(0).mult());
        let mut acc = NcPoly::zero();
        for a in 0..n {
            let e = s.lambda_bracket(&sys.ell(a)?, &uj);
            for (&pw, ea) in &e.coeffs {
                for t in 0..=a {
                    let mb = m.coeff(t - a - 1);
                    if mb.is_zero() {
                        continue;
                    }
                    let term = ea.otimes_right(1, &mb.d_n((pw + t) as usize)).mult();
                    acc.add_scaled(&term, &binom(a as i64, t as u32));
                }
            }
        }
        rhs.push(acc.scale(&ratio));
    }
    Ok((lhs, rhs))
}

/// KP reduction check: from the `t_2`, `t_3` flows of `u_0, u_1`, with `u = 2u_0`,
/// `w = 4u_1 + 2u_0′`, verifies `u_y = w′` and `3w_y = 4u_t − u‴ − 3(u²)′ + 3[u,w]`.
pub fn kp_subsystem(sys: &AdlerSystem) -> Result<Report> {
    if sys.n != 1 || !sys.reduced || sys.hi() < 4 {
        return Err(Error::Unsupported("needs a reduced N = 1 system with window u_0..u_4 at least".into()));
    }
    let get = |flows: &[(i32, NcPoly)], i: i32| flows.iter().find(|(j, _)| *j == i).map(|(_, f)| f.clone()).unwrap();
    let t2 = sys.lax_flow(2)?;
    let t3 = sys.lax_flow(3)?;
    let (u0, u1) = (sys.gen(0)?, sys.gen(1)?);
    let u = u0.scale(&q(2));
    let w = u1.scale(&q(4)) + u0.d().scale(&q(2));
    let u_y = get(&t2, 0).scale(&q(2));
    let w_y = get(&t2, 1).scale(&q(4)) + get(&t2, 0).d().scale(&q(2));
    let u_t = get(&t3, 0).scale(&q(2));
    let mut rep = Report::new();
    rep.push("u_y = w′", u_y == w.d(), "");
    let rhs = u_t.scale(&q(4)) - u.d_n(3) - u.mul(&u).d().scale(&q(3)) + (u.mul(&w) - w.mul(&u)).scale(&q(3));
    let resid = w_y.scale(&q(3)) - rhs;
    rep.push("3w_y = 4u_t − u‴ − 3(u²)′ + 3[u,w]", resid.is_zero(), if resid.is_zero() { String::new() } else { format!("residual has {} terms", resid.len()) });
    Ok(rep)
}

/// Constraints `θ_α` with `C_{αβ}(λ) = {{θ_β λ θ_α}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub thetas: Vec<NcPoly>,
    pub c: Vec<Vec<LambdaTensor2>>,
}

impl Constraint {
    pub fn new(s: &LambdaStructure, thetas: Vec<NcPoly>) -> Result<Self> {
        if thetas.len() != 1 {
            // TODO: block back-substitution for several constraints
            return Err(Error::Unsupported(format!("{} constraints; only one is supported", thetas.len())));
        }
        let c = vec![vec![s.lambda_bracket(&thetas[0], &thetas[0])]];
        Ok(Constraint { thetas, c })
    }
}

fn ord(a: &LambdaTensor2) -> i32 {
    a.order().unwrap_or(0).max(0)
}

/// `{{a λ b}}^D = {{a λ b}} − {{θ λ+∂ b}}_→ • C^{−1}(λ+∂) • {{a λ θ}}`, exact from `λ^{s.floor}`.
pub fn dirac_modify(s: &LambdaStructure, con: &Constraint, a: &NcPoly, b: &NcPoly) -> Result<LambdaTensor2> {
    let floor = s.floor;
    let theta = &con.thetas[0];
    let p = s.lambda_bracket(theta, b);
    let r = s.lambda_bracket(a, theta);
    let mut out = s.lambda_bracket(a, b);
    out.truncate(floor);
    if p.is_zero() || r.is_zero() {
        return Ok(out);
    }
    let cinv = con.c[0][0].inverse(floor - ord(&p) - ord(&r))?;
    let corr = p.compose(&cinv, floor - ord(&r)).compose(&r, floor);
    if corr.valid_from.is_some_and(|v| v > floor) {
        return Err(Error::DepthExhausted(format!("Dirac correction exact only from λ^{:?}", corr.valid_from)));
    }
    out.add_series(&corr, &q(-1));
    Ok(out)
}

/// Dirac reduction of `H` by `θ = u_{−N}`, generators of the quotient renumbered from 0.
pub fn dirac_reduce(sys: &AdlerSystem) -> Result<LambdaStructure> {
    let (s, con) = dirac_setup(sys)?;
    let theta = sys.theta();
    let mut full = LambdaStructure::zero(sys.nvars()).with_depth(sys.depth);
    for i in 0..sys.nvars() {
        for j in 0..sys.nvars() {
            if i == theta as usize || j == theta as usize {
                continue;
            }
            full.brackets[i][j] = dirac_modify(&s, &con, &NcPoly::var(i as u16), &NcPoly::var(j as u16))?;
        }
    }
    Ok(quotient(&full, theta))
}

fn dirac_setup(sys: &AdlerSystem) -> Result<(LambdaStructure, Constraint)> {
    let s = sys.structure(Which::H)?.with_depth(sys.depth);
    let con = Constraint::new(&s, vec![NcPoly::var(sys.theta())])?;
    Ok((s, con))
}

/// `{{a λ θ}}^D` and `{{θ λ a}}^D` vanish to depth for every generator `a`.
pub fn dirac_centrality(sys: &AdlerSystem) -> Result<Report> {
    let (s, con) = dirac_setup(sys)?;
    let theta = NcPoly::var(sys.theta());
    let mut rep = Report::new();
    for i in sys.indices() {
        let a = sys.gen(i)?;
        let l = dirac_modify(&s, &con, &a, &theta)?;
        let r = dirac_modify(&s, &con, &theta, &a)?;
        rep.push(format!("θ central against u_{i}"), l.is_zero() && r.is_zero(), "");
    }
    Ok(rep)
}

/// `c·λ^lam · (λ+∂)^s p` with `∂` acting on `p`; negative `s` is expanded down to `floor`.
fn lam_shift(s: i32, lam: i32, p: &NcPoly, floor: i32) -> Vec<(i32, Q, NcPoly)> {
    let mut out = Vec::new();
    let mut dp = p.clone();
    let mut t = 0u32;
    while (s >= 0 && t as i32 <= s) || (s < 0 && lam + s - t as i32 >= floor) {
        out.push((lam + s - t as i32, binom(s as i64, t), dp.clone()));
        dp = dp.d();
        t += 1;
    }
    out
}

/// The Dirac-reduced `H` read off directly from its closed generating series
///
/// `{{L(z) λ L(w)}}_H − (1/N) L(w+λ+∂) ⊗ (λ+∂)^{−1} L*(−z+λ) − (1/N) ((λ+∂)^{−1} L(z)) ⊗ L(w)`
/// `+ (1/N) L(w+λ+∂)(λ+∂)^{−1} L(z) ⊗ 1 + (1/N) 1 ⊗ ((λ+∂)^{−1} L*(−z+λ)) L(w)`
///
/// with `u_{−N} = 0`. Independent of [`dirac_reduce`], which goes through `C^{−1}`.
pub fn dirac_series(sys: &AdlerSystem) -> Result<LambdaStructure> {
    let n = sys.n;
    let floor = -sys.depth;
    let theta = sys.theta();
    let red = |p: NcPoly| p.kill_var(theta);
    let l = sys.operator();
    let adj = psido::adjoint(&l, l.valid_from.unwrap_or(floor - n - 2) - 1);
    let ell = |a: i32| sys.ell(a).map(red);
    let ell_star = |c: i32| sys.ell_star(&adj, c);
    let inv_n = qr(1, n as i64);
    let one = NcPoly::one();
    let lo = sys.lowest_a();
    let mut full = LambdaStructure::zero(sys.nvars()).with_depth(sys.depth);
    let live = sys.live_indices();
    for &i in &live {
        for &j in &live {
            let mut out = sys.adler_h(i, j)?.map_coeffs(|t| t.kill_var(theta));
            out.valid_from = Some(floor);
            let sign_i = if i % 2 == 0 { q(-1) } else { q(1) };
            for b in (-j - 1).max(lo)..=n {
                let qq = b + j + 1;
                let lb = ell(b)?;
                if lb.is_zero() {
                    continue;
                }
                let bb = binom(b as i64, qq as u32);
                for c in (-i - 1).max(lo)..=n {
                    let p = c + i + 1;
                    let coef = &bb * binom(c as i64, p as u32) * &sign_i * &inv_n;
                    for (e, k, x) in lam_shift(qq - 1, p, &ell_star(c)?, floor) {
                        out.add_at(e, &Tensor2::pure(&lb, &x), &-(&coef * k));
                    }
                }
                for (e, k, x) in lam_shift(qq - 1, 0, &ell(-i - 1)?, floor) {
                    out.add_at(e, &Tensor2::pure(&lb.mul(&x), &one), &(&bb * k * &inv_n));
                }
            }
            let lb = ell(-j - 1)?;
            for (e, k, x) in lam_shift(-1, 0, &ell(-i - 1)?, floor) {
                out.add_at(e, &Tensor2::pure(&x, &lb), &-(k * &inv_n));
            }
            for c in (-i - 1).max(lo)..=n {
                let p = c + i + 1;
                let coef = binom(c as i64, p as u32) * &sign_i * &inv_n;
                for (e, k, x) in lam_shift(-1, p, &ell_star(c)?, floor) {
                    out.add_at(e, &Tensor2::pure(&one, &x.mul(&lb)), &(&coef * k));
                }
            }
            full.brackets[sys.var(i)? as usize][sys.var(j)? as usize] = out;
        }
    }
    Ok(quotient(&full, theta))
}

/// Variables appearing in a structure's entries, for diagnostics.
pub fn support(s: &LambdaStructure) -> BTreeSet<u16> {
    let mut out = BTreeSet::new();
    for b in s.brackets.iter().flatten() {
        for t in b.coeffs.values() {
            for ((x, y), _) in t.iter() {
                out.extend(x.0.iter().chain(y.0.iter()).map(|s| s.var));
            }
        }
    }
    out
}
