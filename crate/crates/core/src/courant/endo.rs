use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gca::{BasisSpec, Generator, GradedElement, Monomial};
use crate::matrix::QMatrix;
use crate::rational::Rational;

/// Linear map on `E = A ⊕ A*`, as a `2d × 2d` matrix acting on coordinate
/// columns ordered `(A-block, A*-block)`. Column `k` is the image of the
/// `k`-th basis section.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    basis: BasisSpec,
    matrix: QMatrix,
}

/// Gram matrix of the pairing in section coordinates.
pub fn pairing_gram(dim: usize) -> QMatrix {
    let n = 2 * dim;
    let mut k = QMatrix::zeros(n, n);
    for a in 0..dim {
        k.set(a, dim + a, Rational::from_integer(1.into()));
        k.set(dim + a, a, Rational::from_integer(1.into()));
    }
    k
}

fn dual_index(k: usize, dim: usize) -> usize {
    if k < dim {
        k + dim
    } else {
        k - dim
    }
}

impl Endomorphism {
    pub fn new(basis: &BasisSpec, matrix: QMatrix) -> Result<Self> {
        let n = basis.double_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Shape(format!(
                "endomorphism needs a {n}x{n} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Endomorphism {
            basis: basis.clone(),
            matrix,
        })
    }

    pub fn identity(basis: &BasisSpec) -> Self {
        Endomorphism {
            basis: basis.clone(),
            matrix: QMatrix::identity(basis.double_dim()),
        }
    }

    pub fn zero(basis: &BasisSpec) -> Self {
        let n = basis.double_dim();
        Endomorphism {
            basis: basis.clone(),
            matrix: QMatrix::zeros(n, n),
        }
    }

    pub fn scalar(basis: &BasisSpec, lambda: &Rational) -> Self {
        Endomorphism {
            basis: basis.clone(),
            matrix: QMatrix::scalar(basis.double_dim(), lambda),
        }
    }

    /// `[[a, b], [c, d]]` with `a: A→A`, `b: A*→A`, `c: A→A*`, `d: A*→A*`.
    pub fn from_blocks(basis: &BasisSpec, a: &QMatrix, b: &QMatrix, c: &QMatrix, d: &QMatrix) -> Result<Self> {
        let n = basis.dim();
        for m in [a, b, c, d] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Shape(format!("blocks must be {n}x{n}")));
            }
        }
        Endomorphism::new(basis, QMatrix::from_blocks(a, b, c, d))
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> QMatrix {
        self.matrix
    }

    /// One of the four `d × d` blocks, indexed `(row_block, col_block)` with
    /// `0` for `A` and `1` for `A*`.
    pub fn block(&self, row_block: usize, col_block: usize) -> QMatrix {
        let d = self.basis.dim();
        self.matrix.block(row_block * d, col_block * d, d, d)
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.apply(v)
    }

    /// Image of a degree-one element.
    pub fn apply_section(&self, u: &GradedElement) -> Result<GradedElement> {
        self.basis.ensure_same(u.basis())?;
        let v = self.apply(&u.to_section()?);
        GradedElement::from_section(&self.basis, &v)
    }

    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism {
            basis: self.basis.clone(),
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn scale(&self, c: &Rational) -> Endomorphism {
        Endomorphism {
            basis: self.basis.clone(),
            matrix: self.matrix.scale(c),
        }
    }

    pub fn square(&self) -> Endomorphism {
        self.compose(self)
    }

    /// Transpose with respect to the pairing: `⟨I* u, v⟩ = ⟨u, I v⟩`.
    pub fn transpose(&self) -> Endomorphism {
        let k = pairing_gram(self.basis.dim());
        Endomorphism {
            basis: self.basis.clone(),
            matrix: &(&k * &self.matrix.transpose()) * &k,
        }
    }

    pub fn is_skew(&self) -> bool {
        self.skew_violation().is_none()
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose() == *self
    }

    pub fn is_orthogonal(&self) -> bool {
        self.compose(&self.transpose()).matrix.is_identity()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `Some(λ)` when `self² = λ·id`.
    pub fn square_scalar(&self) -> Option<Rational> {
        let sq = self.square();
        let lambda = sq.matrix.get(0, 0).clone();
        (sq.matrix == QMatrix::scalar(sq.matrix.rows(), &lambda)).then_some(lambda)
    }

    pub fn commutes_with(&self, other: &Endomorphism) -> bool {
        self.compose(other) == other.compose(self)
    }

    pub fn anticommutes_with(&self, other: &Endomorphism) -> bool {
        self.compose(other) == -&other.compose(self)
    }

    /// First basis pair `(row, col)` where `I* + I` is nonzero.
    pub fn skew_violation(&self) -> Option<(usize, usize)> {
        let s = &self.transpose().matrix + &self.matrix;
        s.diff_entries(&QMatrix::zeros(s.rows(), s.cols()))
            .first()
            .map(|(r, c, _)| (*r, *c))
    }

    /// First entry where `self` and `other` differ, as `(row, col, expected, found)`
    /// with `other` taken as the expected value.
    pub fn first_difference(&self, expected: &Endomorphism) -> Option<(usize, usize, Rational, Rational)> {
        for r in 0..self.matrix.rows() {
            for c in 0..self.matrix.cols() {
                let f = self.matrix.get(r, c);
                let e = expected.matrix.get(r, c);
                if f != e {
                    return Some((r, c, e.clone(), f.clone()));
                }
            }
        }
        None
    }
}

/// Matrix of `u ↦ {u, e2}` for a degree-two element `e2`.
pub fn endo_from_function(e2: &GradedElement) -> Result<Endomorphism> {
    e2.ensure_degree(2)?;
    let basis = e2.basis().clone();
    let d = basis.dim();
    let n = 2 * d;
    let mut m = QMatrix::zeros(n, n);
    for k in 0..n {
        let u = GradedElement::generator(&basis, Generator::from_section_index(k, d));
        let img = u.bracket(e2)?.to_section()?;
        for (r, v) in img.into_iter().enumerate() {
            m.set(r, k, v);
        }
    }
    Endomorphism::new(&basis, m)
}

/// Inverse of [`endo_from_function`] on pairing-skew maps.
pub fn function_from_skew_endo(m: &Endomorphism) -> Result<GradedElement> {
    if let Some((row, col)) = m.skew_violation() {
        return Err(Error::NotSkew { row, col });
    }
    let basis = m.basis().clone();
    let d = basis.dim();
    let n = 2 * d;
    // coefficient of g_k g_l (k < l in section order, which is canonical order)
    // is M[l][k*]
    let mut terms = Vec::new();
    for k in 0..n {
        for l in (k + 1)..n {
            let c = m.matrix().get(l, dual_index(k, d)).clone();
            if c.is_zero() {
                continue;
            }
            let gk = Generator::from_section_index(k, d);
            let gl = Generator::from_section_index(l, d);
            let mono = match (gk, gl) {
                (Generator::Theta(a), Generator::Theta(b)) => Monomial::from_indices(&[a, b], &[]),
                (Generator::Theta(a), Generator::Xi(b)) => Monomial::from_indices(&[a], &[b]),
                (Generator::Xi(a), Generator::Xi(b)) => Monomial::from_indices(&[], &[a, b]),
                (Generator::Xi(_), Generator::Theta(_)) => unreachable!("section order puts A first"),
            }
            .expect("indices within basis");
            terms.push((mono, c));
        }
    }
    GradedElement::from_terms(&basis, terms)
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endomorphism{:?}", self.matrix)
    }
}

impl Mul for &Endomorphism {
    type Output = Endomorphism;

    fn mul(self, rhs: &Endomorphism) -> Endomorphism {
        self.compose(rhs)
    }
}

impl Add for &Endomorphism {
    type Output = Endomorphism;

    fn add(self, rhs: &Endomorphism) -> Endomorphism {
        Endomorphism {
            basis: self.basis.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Endomorphism {
    type Output = Endomorphism;

    fn sub(self, rhs: &Endomorphism) -> Endomorphism {
        Endomorphism {
            basis: self.basis.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Neg for &Endomorphism {
    type Output = Endomorphism;

    fn neg(self) -> Endomorphism {
        Endomorphism {
            basis: self.basis.clone(),
            matrix: -&self.matrix,
        }
    }
}
