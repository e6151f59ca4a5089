use std::fmt;

use num_traits::Zero;

use crate::courant::Endomorphism;
use crate::error::{Error, Result};
use crate::gca::BasisSpec;
use crate::rational::Rational;
use crate::report::Witness;

/// Bilinear map `Γ(E) × Γ(E) → Γ(E)` stored by its values on basis pairs:
/// `entry(i, j, k)` is the `k`-th coordinate of `T(e_i, e_j)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TrilinearTensor {
    basis: BasisSpec,
    n: usize,
    entries: Vec<Rational>,
}

impl TrilinearTensor {
    pub fn zero(basis: &BasisSpec) -> Self {
        let n = basis.double_dim();
        TrilinearTensor {
            basis: basis.clone(),
            n,
            entries: vec![Rational::zero(); n * n * n],
        }
    }

    /// Tabulates `f(i, j)`, which must return a coordinate vector of length `2d`.
    pub fn from_fn(basis: &BasisSpec, mut f: impl FnMut(usize, usize) -> Result<Vec<Rational>>) -> Result<Self> {
        let mut t = TrilinearTensor::zero(basis);
        let n = t.n;
        for i in 0..n {
            for j in 0..n {
                let v = f(i, j)?;
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        left: n,
                        right: v.len(),
                    });
                }
                for (k, x) in v.into_iter().enumerate() {
                    t.entries[(i * n + j) * n + k] = x;
                }
            }
        }
        Ok(t)
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.entries[(i * self.n + j) * self.n + k]
    }

    /// `T(e_i, e_j)` as a coordinate vector.
    pub fn on_basis(&self, i: usize, j: usize) -> &[Rational] {
        let start = (i * self.n + j) * self.n;
        &self.entries[start..start + self.n]
    }

    pub fn eval(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let n = self.n;
        let mut out = vec![Rational::zero(); n];
        for (i, ui) in u.iter().enumerate().take(n) {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate().take(n) {
                if vj.is_zero() {
                    continue;
                }
                let c = ui * vj;
                for (k, o) in out.iter_mut().enumerate() {
                    let e = self.entry(i, j, k);
                    if !e.is_zero() {
                        *o += &c * e;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &TrilinearTensor) -> TrilinearTensor {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TrilinearTensor) -> TrilinearTensor {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> TrilinearTensor {
        TrilinearTensor {
            basis: self.basis.clone(),
            n: self.n,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    fn zip(&self, other: &TrilinearTensor, f: impl Fn(&Rational, &Rational) -> Rational) -> TrilinearTensor {
        assert_eq!(self.n, other.n, "tensors over different bases");
        TrilinearTensor {
            basis: self.basis.clone(),
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `(X, Y) ↦ I(T(X, Y))`.
    pub fn post_compose(&self, i: &Endomorphism) -> TrilinearTensor {
        let n = self.n;
        let mut out = TrilinearTensor::zero(&self.basis);
        for a in 0..n {
            for b in 0..n {
                let img = i.apply(self.on_basis(a, b));
                let start = (a * n + b) * n;
                out.entries[start..start + n].clone_from_slice(&img);
            }
        }
        out
    }

    /// `(X, Y) ↦ T(I X, Y)`.
    pub fn precompose_left(&self, i: &Endomorphism) -> TrilinearTensor {
        let n = self.n;
        let m = i.matrix();
        let mut out = TrilinearTensor::zero(&self.basis);
        for a in 0..n {
            for c in 0..n {
                let coef = m.get(c, a);
                if coef.is_zero() {
                    continue;
                }
                for b in 0..n {
                    for k in 0..n {
                        let e = self.entry(c, b, k);
                        if !e.is_zero() {
                            out.entries[(a * n + b) * n + k] += coef * e;
                        }
                    }
                }
            }
        }
        out
    }

    /// `(X, Y) ↦ T(X, I Y)`.
    pub fn precompose_right(&self, i: &Endomorphism) -> TrilinearTensor {
        let n = self.n;
        let m = i.matrix();
        let mut out = TrilinearTensor::zero(&self.basis);
        for b in 0..n {
            for c in 0..n {
                let coef = m.get(c, b);
                if coef.is_zero() {
                    continue;
                }
                for a in 0..n {
                    for k in 0..n {
                        let e = self.entry(a, c, k);
                        if !e.is_zero() {
                            out.entries[(a * n + b) * n + k] += coef * e;
                        }
                    }
                }
            }
        }
        out
    }

    /// Deformation of a bracket: `[X, Y]_I = [IX, Y] + [X, IY] − I[X, Y]`.
    pub fn deform(&self, i: &Endomorphism) -> TrilinearTensor {
        self.precompose_left(i)
            .add(&self.precompose_right(i))
            .sub(&self.post_compose(i))
    }

    /// First nonzero entry, as a witness.
    pub fn nonzero_witness(&self) -> Option<Witness> {
        self.difference_witness(&TrilinearTensor::zero(&self.basis))
    }

    /// First entry where `self` differs from `expected`.
    pub fn difference_witness(&self, expected: &TrilinearTensor) -> Option<Witness> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let f = self.entry(i, j, k);
                    let e = expected.entry(i, j, k);
                    if f != e {
                        return Some(Witness::entry(vec![i, j, k], e.clone(), f.clone()));
                    }
                }
            }
        }
        None
    }
}

impl fmt::Debug for TrilinearTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz = self.entries.iter().filter(|x| !x.is_zero()).count();
        write!(f, "TrilinearTensor[{}^3, {} nonzero]", self.n, nz)
    }
}
