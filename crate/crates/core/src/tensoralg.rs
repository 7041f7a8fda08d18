//! V⊗V and V⊗V⊗V: the bullet product, cyclic permutations, the ⋆ᵢ / ⊗ᵢ module
//! structures, the •ᵢ actions, and matrices over (V⊗V, •).

use crate::error::{Error, Result};
use crate::linear::{q, DiffRing, Lin, Module, Q};
use crate::ncpoly::{trace_normal_form, NcPoly, Word};

pub type Tensor2 = Lin<(Word, Word)>;
pub type Tensor3 = Lin<(Word, Word, Word)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Lin<(Word, Word)> {
    pub fn pure(a: &NcPoly, b: &NcPoly) -> Tensor2 {
        let mut out = Tensor2::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                out.add_term((x.clone(), y.clone()), cx * cy);
            }
        }
        out
    }

    pub fn one_one() -> Tensor2 {
        Lin::term((Word::one(), Word::one()), q(1))
    }

    /// A•B = A′B′ ⊗ B″A″.
    pub fn bullet(&self, other: &Tensor2) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((a1, a2), ca) in self.iter() {
            for ((b1, b2), cb) in other.iter() {
                out.add_term((a1.concat(b1), b2.concat(a2)), ca * cb);
            }
        }
        out
    }

    pub fn sigma(&self) -> Tensor2 {
        self.map_keys(|(a, b)| (b.clone(), a.clone()))
    }

    pub fn mult(&self) -> NcPoly {
        self.map_keys(|(a, b)| a.concat(b))
    }

    /// ∂ acting as a derivation on both slots.
    pub fn d(&self) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((a, b), c) in self.iter() {
            for (da, cd) in a.d().iter() {
                out.add_term((da.clone(), b.clone()), c * cd);
            }
            for (db, cd) in b.d().iter() {
                out.add_term((a.clone(), db.clone()), c * cd);
            }
        }
        out
    }

    pub fn d_n(&self, n: usize) -> Tensor2 {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.d();
        }
        out
    }

    /// Outer bimodule: f·A = fA′⊗A″.
    pub fn lmul(&self, f: &NcPoly) -> Tensor2 {
        self.star_left(f, 0)
    }

    /// Outer bimodule: A·f = A′⊗A″f.
    pub fn rmul(&self, f: &NcPoly) -> Tensor2 {
        self.star_right(0, f)
    }

    /// a ⋆ᵢ A, `i` jumps from the left.
    pub fn star_left(&self, a: &NcPoly, i: usize) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((x, y), c) in self.iter() {
            for (w, cw) in a.iter() {
                let key = if i == 0 { (w.concat(x), y.clone()) } else { (x.clone(), w.concat(y)) };
                out.add_term(key, c * cw);
            }
        }
        out
    }

    /// A ⋆ᵢ b, `i` jumps from the right.
    pub fn star_right(&self, i: usize, b: &NcPoly) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((x, y), c) in self.iter() {
            for (w, cw) in b.iter() {
                let key = if i == 0 { (x.clone(), y.concat(w)) } else { (x.concat(w), y.clone()) };
                out.add_term(key, c * cw);
            }
        }
        out
    }

    /// a ⊗ᵢ A: insert `a` after the first `i` slots.
    pub fn otimes_left(&self, a: &NcPoly, i: usize) -> Tensor3 {
        let mut out = Tensor3::zero();
        for ((x, y), c) in self.iter() {
            for (w, cw) in a.iter() {
                let key = match i {
                    0 => (w.clone(), x.clone(), y.clone()),
                    1 => (x.clone(), w.clone(), y.clone()),
                    _ => (x.clone(), y.clone(), w.clone()),
                };
                out.add_term(key, c * cw);
            }
        }
        out
    }

    /// A ⊗ᵢ b: insert `b` before the last `i` slots.
    pub fn otimes_right(&self, i: usize, b: &NcPoly) -> Tensor3 {
        let mut out = Tensor3::zero();
        for ((x, y), c) in self.iter() {
            for (w, cw) in b.iter() {
                let key = match i {
                    0 => (x.clone(), y.clone(), w.clone()),
                    1 => (x.clone(), w.clone(), y.clone()),
                    _ => (w.clone(), x.clone(), y.clone()),
                };
                out.add_term(key, c * cw);
            }
        }
        out
    }

    /// Σ D(A′) ⊗ A″ for a linear map D: V → V⊗V given on words.
    pub fn apply_first(&self, mut f: impl FnMut(&Word) -> Tensor2) -> Tensor3 {
        let mut out = Tensor3::zero();
        for ((x, y), c) in self.iter() {
            for ((p, r), cp) in f(x).iter() {
                out.add_term((p.clone(), r.clone(), y.clone()), c * cp);
            }
        }
        out
    }

    /// Σ A′ ⊗ D(A″).
    pub fn apply_second(&self, mut f: impl FnMut(&Word) -> Tensor2) -> Tensor3 {
        let mut out = Tensor3::zero();
        for ((x, y), c) in self.iter() {
            for ((p, r), cp) in f(y).iter() {
                out.add_term((x.clone(), p.clone(), r.clone()), c * cp);
            }
        }
        out
    }

    pub fn kill_var(&self, var: u16) -> Tensor2 {
        self.filter(|(a, b)| !a.contains_var(var) && !b.contains_var(var))
    }

    /// Substitutes u_var^(n) ↦ ∂^n image in both slots.
    pub fn substitute(&self, var: u16, image: &NcPoly) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((a, b), c) in self.iter() {
            let pa = NcPoly::word(a.clone()).substitute(var, image);
            let pb = NcPoly::word(b.clone()).substitute(var, image);
            out.add_scaled(&Tensor2::pure(&pa, &pb), c);
        }
        out
    }
}

impl DiffRing for Tensor2 {
    fn one() -> Self {
        Tensor2::one_one()
    }
    /// The ring structure is (V⊗V, •).
    fn mul(&self, other: &Self) -> Self {
        self.bullet(other)
    }
    fn d(&self) -> Self {
        Tensor2::d(self)
    }
    fn as_scalar(&self) -> Option<Q> {
        if Module::is_zero(self) {
            return Some(q(0));
        }
        if self.len() == 1 {
            let ((a, b), c) = self.iter().next().unwrap();
            if a.is_one() && b.is_one() {
                return Some(c.clone());
            }
        }
        None
    }
}

impl Lin<(Word, Word, Word)> {
    pub fn pure3(a: &NcPoly, b: &NcPoly, c: &NcPoly) -> Tensor3 {
        let mut out = Tensor3::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                for (z, cz) in c.iter() {
                    out.add_term((x.clone(), y.clone(), z.clone()), cx * cy * cz);
                }
            }
        }
        out
    }

    /// σ^s with σ(a⊗b⊗c) = c⊗a⊗b.
    pub fn sigma(&self, s: usize) -> Tensor3 {
        match s % 3 {
            0 => self.clone(),
            1 => self.map_keys(|(a, b, c)| (c.clone(), a.clone(), b.clone())),
            _ => self.map_keys(|(a, b, c)| (b.clone(), c.clone(), a.clone())),
        }
    }

    pub fn mult(&self) -> NcPoly {
        self.map_keys(|(a, b, c)| Word::concat3(a, b, c))
    }

    /// (mult ⊗ 1).
    pub fn mult12(&self) -> Tensor2 {
        self.map_keys(|(a, b, c)| (a.concat(b), c.clone()))
    }

    /// (1 ⊗ mult).
    pub fn mult23(&self) -> Tensor2 {
        self.map_keys(|(a, b, c)| (a.clone(), b.concat(c)))
    }

    pub fn d(&self) -> Tensor3 {
        let mut out = Tensor3::zero();
        for ((a, b, c), k) in self.iter() {
            for (w, cw) in a.d().iter() {
                out.add_term((w.clone(), b.clone(), c.clone()), k * cw);
            }
            for (w, cw) in b.d().iter() {
                out.add_term((a.clone(), w.clone(), c.clone()), k * cw);
            }
            for (w, cw) in c.d().iter() {
                out.add_term((a.clone(), b.clone(), w.clone()), k * cw);
            }
        }
        out
    }

    /// a ⋆ᵢ X.
    pub fn star_left(&self, a: &NcPoly, i: usize) -> Tensor3 {
        let mut out = Tensor3::zero();
        for ((x, y, z), c) in self.iter() {
            for (w, cw) in a.iter() {
                let key = match i {
                    0 => (w.concat(x), y.clone(), z.clone()),
                    1 => (x.clone(), w.concat(y), z.clone()),
                    _ => (x.clone(), y.clone(), w.concat(z)),
                };
                out.add_term(key, c * cw);
            }
        }
        out
    }

    /// X ⋆ᵢ b.
    pub fn star_right(&self, i: usize, b: &NcPoly) -> Tensor3 {
        let mut out = Tensor3::zero();
        for ((x, y, z), c) in self.iter() {
            for (w, cw) in b.iter() {
                let key = match i {
                    0 => (x.clone(), y.clone(), z.concat(w)),
                    1 => (x.clone(), y.concat(w), z.clone()),
                    _ => (x.concat(w), y.clone(), z.clone()),
                };
                out.add_term(key, c * cw);
            }
        }
        out
    }

    pub fn kill_var(&self, var: u16) -> Tensor3 {
        self.filter(|(a, b, c)| !a.contains_var(var) && !b.contains_var(var) && !c.contains_var(var))
    }
}

/// Left action A •ᵢ X (subscript = the slot left untouched).
pub fn bullet_left(a: &Tensor2, x: &Tensor3, i: usize) -> Tensor3 {
    let mut out = Tensor3::zero();
    for ((p, r), ca) in a.iter() {
        for ((x1, x2, x3), cx) in x.iter() {
            let key = match i {
                1 => (x1.clone(), p.concat(x2), x3.concat(r)),
                2 => (p.concat(x1), x2.clone(), x3.concat(r)),
                _ => (p.concat(x1), x2.concat(r), x3.clone()),
            };
            out.add_term(key, ca * cx);
        }
    }
    out
}

/// Right action X •ᵢ A.
pub fn bullet_right(x: &Tensor3, a: &Tensor2, i: usize) -> Tensor3 {
    let mut out = Tensor3::zero();
    for ((x1, x2, x3), cx) in x.iter() {
        for ((p, r), ca) in a.iter() {
            let key = match i {
                1 => (x1.clone(), x2.concat(p), r.concat(x3)),
                2 => (x1.concat(p), x2.clone(), r.concat(x3)),
                _ => (x1.concat(p), r.concat(x2), x3.clone()),
            };
            out.add_term(key, ca * cx);
        }
    }
    out
}

pub fn bullet_i(a: &Tensor2, x: &Tensor3, i: usize, side: Side) -> Result<Tensor3> {
    if !(1..=3).contains(&i) {
        return Err(Error::IndexOutOfRange { index: i, expected: "1..=3".into() });
    }
    Ok(match side {
        Side::Left => bullet_left(a, x, i),
        Side::Right => bullet_right(x, a, i),
    })
}

/// Dense ℓ×ℓ' matrix with entries in V⊗V.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Tensor2>,
}

impl TensorMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        TensorMatrix { rows, cols, entries: vec![Tensor2::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Tensor2) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        TensorMatrix { rows, cols, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &Tensor2 {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, t: Tensor2) {
        self.entries[i * self.cols + j] = t;
    }

    /// (H†)_{ij} = (H_{ji})^σ.
    pub fn adjoint(&self) -> TensorMatrix {
        TensorMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).sigma())
    }

    /// (HF)_i = Σ_j (H_{ij} • F_j^σ)^σ on (V⊗V)^ℓ.
    pub fn act_tensor(&self, f: &[Tensor2]) -> Result<Vec<Tensor2>> {
        self.check_len(f.len())?;
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Tensor2::zero();
                for (j, fj) in f.iter().enumerate() {
                    acc += &self.get(i, j).bullet(&fj.sigma()).sigma();
                }
                acc
            })
            .collect())
    }

    /// (HF)_i = Σ_j H′_{ij} F_j H″_{ij} on V^ℓ.
    pub fn act_poly(&self, f: &[NcPoly]) -> Result<Vec<NcPoly>> {
        self.check_len(f.len())?;
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = NcPoly::zero();
                for (j, fj) in f.iter().enumerate() {
                    acc += &self.get(i, j).otimes_right(1, fj).mult();
                }
                acc
            })
            .collect())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.cols {
            return Err(Error::DimensionMismatch(format!("matrix has {} columns, vector has {n} entries", self.cols)));
        }
        Ok(())
    }
}

/// (F|G) = Σ F_i • G_i^σ.
pub fn inner(f: &[Tensor2], g: &[Tensor2]) -> Result<Tensor2> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", f.len(), g.len())));
    }
    let mut acc = Tensor2::zero();
    for (a, b) in f.iter().zip(g) {
        acc += &a.bullet(&b.sigma());
    }
    Ok(acc)
}

/// (F|G) = Σ tr(F_i G_i), returned as the canonical trace representative.
pub fn inner_reduced(f: &[NcPoly], g: &[NcPoly]) -> Result<NcPoly> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", f.len(), g.len())));
    }
    let mut acc = NcPoly::zero();
    for (a, b) in f.iter().zip(g) {
        acc += &a.mul(b);
    }
    Ok(trace_normal_form(&acc))
}
