//! Helpers shared by the integration tests: hand-built Laurent oracles for
//! expressions such as `u ⊗ (λ+∂)^{-1} u` or `(2λ+∂)(u⊗1)`.
#![allow(dead_code)]

use ncham::dpva::LambdaTensor2;
use ncham::linear::{binom, q, qr, Q};
use ncham::series::Laurent;
use ncham::{NcPoly, Tensor2};

pub const FLOOR: i32 = -8;

pub fn t(a: &NcPoly, b: &NcPoly) -> Tensor2 {
    Tensor2::pure(a, b)
}

pub fn one() -> NcPoly {
    NcPoly::one()
}

/// `(λ+∂)^s p` with `∂` acting on `p`, as a Laurent series in λ.
pub fn shift(s: i32, p: &NcPoly) -> Laurent<NcPoly> {
    let mut out = Laurent::zero();
    let mut dp = p.clone();
    let mut k = 0u32;
    while (s >= 0 && k as i32 <= s) || (s < 0 && s - k as i32 >= FLOOR) {
        out.add_at(s - k as i32, &dp, &binom(s as i64, k));
        dp = dp.d();
        k += 1;
    }
    if s < 0 {
        out.valid_from = Some(FLOOR);
    }
    out
}

/// `(λ+∂)^s T` with `∂` acting on both slots of `T`.
pub fn shift_t(s: i32, x: &Tensor2) -> LambdaTensor2 {
    let mut out = LambdaTensor2::zero();
    let mut dx = x.clone();
    for k in 0..=s as u32 {
        out.add_at(s - k as i32, &dx, &binom(s as i64, k));
        dx = dx.d();
    }
    out
}

/// `a · F(λ) ⊗ b`-style assembly: `left(c) ⊗ right(c)` for every coefficient `c` of `f`.
pub fn lift(f: &Laurent<NcPoly>, mut place: impl FnMut(&NcPoly) -> Tensor2) -> LambdaTensor2 {
    let mut out = LambdaTensor2::zero();
    out.valid_from = f.valid_from;
    for (&n, c) in &f.coeffs {
        out.add_at(n, &place(c), &q(1));
    }
    out
}

pub fn lam(n: i32, x: &Tensor2) -> LambdaTensor2 {
    LambdaTensor2::term(n, x.clone())
}

pub fn sum(parts: &[(Q, LambdaTensor2)]) -> LambdaTensor2 {
    let mut out = LambdaTensor2::zero();
    for (c, p) in parts {
        out.add_series(p, c);
    }
    out
}

pub fn half() -> Q {
    qr(1, 2)
}

pub mod rnd {
    //! Seeded random elements for identity checks.

    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use ncham::doublepoisson::FiniteStructure;
    use ncham::dpva::{LambdaStructure, LambdaTensor2};
    use ncham::linear::{qr, Q};
    use ncham::psido::adjoint_bullet;
    use ncham::{NcPoly, Sym, Tensor2, Word};

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn coeff(r: &mut ChaCha8Rng) -> Q {
        let n = r.gen_range(1..=4) * if r.gen_bool(0.5) { 1 } else { -1 };
        qr(n, r.gen_range(1..=3))
    }

    pub fn word(r: &mut ChaCha8Rng, nvars: u16, max_len: usize, max_der: u16) -> Word {
        let len = r.gen_range(0..=max_len);
        Word((0..len).map(|_| Sym::new(r.gen_range(0..nvars), r.gen_range(0..=max_der))).collect())
    }

    pub fn poly(r: &mut ChaCha8Rng, nvars: u16, terms: usize, max_len: usize, max_der: u16) -> NcPoly {
        let mut out = NcPoly::zero();
        for _ in 0..r.gen_range(1..=terms) {
            out.add_term(word(r, nvars, max_len, max_der), coeff(r));
        }
        out
    }

    /// A polynomial without constant term.
    pub fn poly_nc(r: &mut ChaCha8Rng, nvars: u16, terms: usize, max_len: usize, max_der: u16) -> NcPoly {
        let p = poly(r, nvars, terms, max_len, max_der);
        p.filter(|w| !w.is_one())
    }

    pub fn tensor(r: &mut ChaCha8Rng, nvars: u16, terms: usize, max_len: usize, max_der: u16) -> Tensor2 {
        let mut out = Tensor2::zero();
        for _ in 0..r.gen_range(1..=terms) {
            let (a, b) = (word(r, nvars, max_len, max_der), word(r, nvars, max_len, max_der));
            out.add_term((a, b), coeff(r));
        }
        out
    }

    /// Arbitrary local 2-fold λ-bracket on generators (no axioms imposed).
    pub fn local_structure(r: &mut ChaCha8Rng, nvars: usize, max_lam: i32) -> LambdaStructure {
        sparse_local_structure(r, nvars, max_lam, 0.6)
    }

    /// As [`local_structure`], each `λ^n` coefficient present with probability `density`.
    pub fn sparse_local_structure(r: &mut ChaCha8Rng, nvars: usize, max_lam: i32, density: f64) -> LambdaStructure {
        let mut s = LambdaStructure::zero(nvars);
        for i in 0..nvars {
            for j in 0..nvars {
                let mut b = LambdaTensor2::zero();
                for n in 0..=max_lam {
                    if r.gen_bool(density) {
                        b.add_at(n, &tensor(r, nvars as u16, 2, 1, 1), &Q::from_integer(1.into()));
                    }
                }
                s.set(i, j, b);
            }
        }
        s
    }

    /// Random skew local structure: upper entries are random, the rest is forced by skewsymmetry.
    pub fn skew_local_structure(r: &mut ChaCha8Rng, nvars: usize, max_lam: i32) -> LambdaStructure {
        let raw = local_structure(r, nvars, max_lam);
        let mut s = LambdaStructure::zero(nvars);
        for i in 0..nvars {
            for j in i..nvars {
                let b = raw.brackets[i][j].clone();
                let b = if i == j { &b - &adjoint_bullet(&b, s.floor) } else { b };
                s = s.with_skew(i, j, b);
            }
        }
        s
    }

    /// Random skew finite structure.
    pub fn skew_finite_structure(r: &mut ChaCha8Rng, nvars: usize) -> FiniteStructure {
        let mut s = FiniteStructure::zero(nvars);
        for i in 0..nvars {
            for j in i..nvars {
                let t = tensor(r, nvars as u16, 2, 2, 0);
                if i == j {
                    s.set(i, i, t.clone() - t.sigma());
                } else {
                    s.set(j, i, t.sigma().scale(&qr(-1, 1)));
                    s.set(i, j, t);
                }
            }
        }
        s
    }

    pub fn finite_structure(r: &mut ChaCha8Rng, nvars: usize) -> FiniteStructure {
        let mut s = FiniteStructure::zero(nvars);
        for i in 0..nvars {
            for j in 0..nvars {
                s.set(i, j, tensor(r, nvars as u16, 2, 2, 0));
            }
        }
        s
    }
}
