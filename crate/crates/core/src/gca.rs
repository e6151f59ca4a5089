//! The graded commutative algebra `Λ(A ⊕ A*)` with the big bracket.
//!
//! Generators are odd: `θ^a` (bidegree (1,0), a vector of `A`) and `ξ_a`
//! (bidegree (0,1), a covector of `A*`). A [`Monomial`] is stored as two
//! bitmasks with the sign absorbed into the coefficient; the canonical order
//! puts every `θ` factor before every `ξ` factor, each in increasing index
//! order.
//!
//! The bracket has bidegree (−1,−1) and is fixed on generators by
//! `{θ^a, ξ_b} = {ξ_b, θ^a} = δ^a_b`. On monomials it is evaluated as
//!
//! ```text
//! {f, g} = Σ_a (f ∂←/∂θ^a)(∂→/∂ξ_a g) + (f ∂←/∂ξ_a)(∂→/∂θ^a g)
//! ```
//!
//! with right derivatives on the left argument and left derivatives on the
//! right one. This realizes the graded biderivation rule
//! `{a, b∧c} = {a,b}∧c + (−1)^{(|a|−2)|b|} b∧{a,c}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest supported dimension of `A`.
pub const MAX_DIM: usize = 32;

const XI_OFFSET: u32 = 32;

/// Dimension of `A` plus optional labels for its basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    dim: usize,
    names: Option<Arc<[String]>>,
}

impl BasisSpec {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBasis("dimension must be at least 1".into()));
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidBasis(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        Ok(BasisSpec { dim, names: None })
    }

    pub fn with_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut spec = BasisSpec::new(names.len())?;
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidBasis(format!("duplicate basis label {n:?}")));
            }
        }
        spec.names = Some(names.into());
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of `E = A ⊕ A*`.
    pub fn double_dim(&self) -> usize {
        2 * self.dim
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn label(&self, a: usize) -> String {
        match &self.names {
            Some(n) => n[a].clone(),
            None => format!("θ{}", a + 1),
        }
    }

    pub fn dual_label(&self, a: usize) -> String {
        match &self.names {
            Some(n) => format!("{}*", n[a]),
            None => format!("ξ{}", a + 1),
        }
    }

    pub(crate) fn ensure_same(&self, other: &BasisSpec) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

/// One odd generator of the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `θ^a`, a basis vector of `A`.
    Theta(usize),
    /// `ξ_a`, a basis covector of `A*`.
    Xi(usize),
}

impl Generator {
    fn bit(self) -> u32 {
        match self {
            Generator::Theta(a) => a as u32,
            Generator::Xi(a) => XI_OFFSET + a as u32,
        }
    }

    /// Index of this generator in the coordinates of `E = A ⊕ A*`.
    pub fn section_index(self, dim: usize) -> usize {
        match self {
            Generator::Theta(a) => a,
            Generator::Xi(a) => dim + a,
        }
    }

    pub fn from_section_index(k: usize, dim: usize) -> Self {
        if k < dim {
            Generator::Theta(k)
        } else {
            Generator::Xi(k - dim)
        }
    }

    /// The generator paired with this one by the bracket.
    pub fn dual(self) -> Self {
        match self {
            Generator::Theta(a) => Generator::Xi(a),
            Generator::Xi(a) => Generator::Theta(a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub p: usize,
    pub q: usize,
}

impl Bidegree {
    pub fn new(p: usize, q: usize) -> Self {
        Bidegree { p, q }
    }

    pub fn total(&self) -> usize {
        self.p + self.q
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Wedge of distinct generators in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    up: u32,
    down: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { up: 0, down: 0 };

    /// Monomial `θ^{i_1}…θ^{i_p} ξ_{j_1}…ξ_{j_q}` from strictly increasing
    /// index lists. Returns `None` if a list is unsorted, repeats an index, or
    /// exceeds [`MAX_DIM`].
    pub fn from_indices(up: &[usize], down: &[usize]) -> Option<Self> {
        Some(Monomial {
            up: strictly_increasing_mask(up)?,
            down: strictly_increasing_mask(down)?,
        })
    }

    pub fn up_indices(&self) -> Vec<usize> {
        bits(self.up as u64).map(|b| b as usize).collect()
    }

    pub fn down_indices(&self) -> Vec<usize> {
        bits(self.down as u64).map(|b| b as usize).collect()
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree::new(self.up.count_ones() as usize, self.down.count_ones() as usize)
    }

    pub fn degree(&self) -> usize {
        (self.up.count_ones() + self.down.count_ones()) as usize
    }

    /// Largest index referenced, plus one.
    fn span(&self) -> usize {
        (32 - (self.up | self.down).leading_zeros()) as usize
    }

    fn mask(&self) -> u64 {
        self.up as u64 | ((self.down as u64) << XI_OFFSET)
    }

    fn from_mask(m: u64) -> Self {
        Monomial {
            up: (m & 0xffff_ffff) as u32,
            down: (m >> XI_OFFSET) as u32,
        }
    }

    pub fn generators(&self) -> Vec<Generator> {
        let mut g: Vec<Generator> = bits(self.up as u64).map(|a| Generator::Theta(a as usize)).collect();
        g.extend(bits(self.down as u64).map(|a| Generator::Xi(a as usize)));
        g
    }
}

fn strictly_increasing_mask(idx: &[usize]) -> Option<u32> {
    let mut mask = 0u32;
    for w in idx.windows(2) {
        if w[0] >= w[1] {
            return None;
        }
    }
    for &i in idx {
        if i >= MAX_DIM {
            return None;
        }
        mask |= 1 << i;
    }
    Some(mask)
}

fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros();
            m &= m - 1;
            Some(b)
        }
    })
}

/// Sign and mask of `m1 ∧ m2`, or `None` if a generator repeats.
fn wedge_masks(m1: u64, m2: u64) -> Option<(bool, u64)> {
    if m1 & m2 != 0 {
        return None;
    }
    let mut swaps = 0u32;
    for j in bits(m2) {
        // generators of m1 that sit after position j must cross it
        let above = if j == 63 { 0 } else { m1 & (!0u64 << (j + 1)) };
        swaps += above.count_ones();
    }
    Some((swaps % 2 == 1, m1 | m2))
}

/// Right derivative: sign from moving bit `b` to the right end.
fn right_derivative(m: u64, b: u32) -> (bool, u64) {
    let above = if b == 63 { 0 } else { m & (!0u64 << (b + 1)) };
    (above.count_ones() % 2 == 1, m & !(1u64 << b))
}

/// Left derivative: sign from moving bit `b` to the left end.
fn left_derivative(m: u64, b: u32) -> (bool, u64) {
    let below = m & ((1u64 << b) - 1);
    (below.count_ones() % 2 == 1, m & !(1u64 << b))
}

fn accumulate(acc: &mut HashMap<u64, Rational>, mask: u64, negative: bool, coeff: Rational) {
    let c = if negative { -coeff } else { coeff };
    let slot = acc.entry(mask).or_insert_with(Rational::zero);
    *slot += c;
}

/// Finite linear combination of monomials with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedElement {
    basis: BasisSpec,
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedElement {
    pub fn zero(basis: &BasisSpec) -> Self {
        GradedElement {
            basis: basis.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(basis: &BasisSpec, c: Rational) -> Self {
        Self::monomial(basis, Monomial::ONE, c)
    }

    pub fn one(basis: &BasisSpec) -> Self {
        Self::scalar(basis, Rational::one())
    }

    pub fn monomial(basis: &BasisSpec, m: Monomial, c: Rational) -> Self {
        assert!(m.span() <= basis.dim(), "monomial references an index beyond the basis");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GradedElement {
            basis: basis.clone(),
            terms,
        }
    }

    pub fn generator(basis: &BasisSpec, g: Generator) -> Self {
        let m = Monomial::from_mask(1u64 << g.bit());
        Self::monomial(basis, m, Rational::one())
    }

    /// `θ^a` (zero-based index).
    pub fn theta(basis: &BasisSpec, a: usize) -> Self {
        Self::generator(basis, Generator::Theta(a))
    }

    /// `ξ_a` (zero-based index).
    pub fn xi(basis: &BasisSpec, a: usize) -> Self {
        Self::generator(basis, Generator::Xi(a))
    }

    /// Product of generators in the given (arbitrary) order.
    pub fn product_of(basis: &BasisSpec, gens: &[Generator]) -> Self {
        let mut acc = Self::one(basis);
        for &g in gens {
            acc = acc.wedge(&Self::generator(basis, g)).expect("same basis");
        }
        acc
    }

    /// Builds an element from `(monomial, coefficient)` pairs, summing repeats.
    pub fn from_terms(basis: &BasisSpec, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (m, c) in terms {
            if m.span() > basis.dim() {
                return Err(Error::InvalidBasis(format!(
                    "monomial references index {} beyond dimension {}",
                    m.span(),
                    basis.dim()
                )));
            }
            *out.entry(m).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(GradedElement {
            basis: basis.clone(),
            terms: out,
        })
    }

    /// Degree-one element with the given coordinates on `E = A ⊕ A*`
    /// (the `A` block first).
    pub fn from_section(basis: &BasisSpec, coords: &[Rational]) -> Result<Self> {
        let n = basis.double_dim();
        if coords.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: coords.len(),
            });
        }
        let terms = coords.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
            let g = Generator::from_section_index(k, basis.dim());
            (Monomial::from_mask(1u64 << g.bit()), c.clone())
        });
        Self::from_terms(basis, terms)
    }

    /// Coordinates of a degree-one element on `E = A ⊕ A*`.
    pub fn to_section(&self) -> Result<Vec<Rational>> {
        self.ensure_degree(1)?;
        let d = self.basis.dim();
        let mut v = vec![Rational::zero(); 2 * d];
        for (m, c) in &self.terms {
            let g = m.generators()[0];
            v[g.section_index(d)] = c.clone();
        }
        Ok(v)
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Common bidegree of all terms; `None` for mixed elements and for zero.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(Monomial::bidegree);
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Decomposition by bidegree; the zero element has no components.
    pub fn homogeneous_components(&self) -> BTreeMap<Bidegree, GradedElement> {
        let mut out: BTreeMap<Bidegree, GradedElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.bidegree())
                .or_insert_with(|| GradedElement::zero(&self.basis))
                .terms
                .insert(*m, c.clone());
        }
        out
    }

    /// Component of the given bidegree (possibly zero).
    pub fn component(&self, b: Bidegree) -> GradedElement {
        GradedElement {
            basis: self.basis.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.bidegree() == b)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// True when every term has total degree `k` (vacuously true for zero).
    pub fn is_of_degree(&self, k: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == k)
    }

    pub(crate) fn ensure_degree(&self, k: usize) -> Result<()> {
        if self.is_of_degree(k) {
            Ok(())
        } else {
            Err(Error::degree(format!("total degree {k}"), self.degree_summary()))
        }
    }

    /// Human-readable list of the total degrees present.
    pub fn degree_summary(&self) -> String {
        let degs: std::collections::BTreeSet<usize> = self.terms.keys().map(Monomial::degree).collect();
        if degs.is_empty() {
            "zero element".into()
        } else {
            format!(
                "degrees {{{}}}",
                degs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
            )
        }
    }

    /// Total degree if homogeneous (by total degree) and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return GradedElement::zero(&self.basis);
        }
        GradedElement {
            basis: self.basis.clone(),
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.basis.ensure_same(&other.basis)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let slot = terms.entry(*m).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(m);
            }
        }
        Ok(GradedElement {
            basis: self.basis.clone(),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    /// Graded commutative product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.basis.ensure_same(&other.basis)?;
        let mut acc: HashMap<u64, Rational> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((neg, m)) = wedge_masks(m1.mask(), m2.mask()) {
                    accumulate(&mut acc, m, neg, c1 * c2);
                }
            }
        }
        Ok(self.collect(acc))
    }

    /// The big bracket `{self, other}`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.basis.ensure_same(&other.basis)?;
        let mut acc: HashMap<u64, Rational> = HashMap::new();
        for (mf, cf) in &self.terms {
            for (mg, cg) in &other.terms {
                bracket_monomials(*mf, *mg, cf, cg, &mut acc);
            }
        }
        Ok(self.collect(acc))
    }

    /// Image under the involution exchanging `θ^a ↔ ξ_a`; this is an
    /// automorphism of both the product and the bracket, and identifies the
    /// `A*`-side structures with `A`-side ones.
    pub fn swap_roles(&self) -> Self {
        let mut acc: HashMap<u64, Rational> = HashMap::new();
        for (m, c) in &self.terms {
            // ξ_I θ^J reordered to θ^J ξ_I
            let p = m.up.count_ones();
            let q = m.down.count_ones();
            let neg = (p * q) % 2 == 1;
            let swapped = Monomial { up: m.down, down: m.up };
            accumulate(&mut acc, swapped.mask(), neg, c.clone());
        }
        self.collect(acc)
    }

    fn collect(&self, acc: HashMap<u64, Rational>) -> Self {
        GradedElement {
            basis: self.basis.clone(),
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (Monomial::from_mask(m), c))
                .collect(),
        }
    }
}

fn bracket_monomials(mf: Monomial, mg: Monomial, cf: &Rational, cg: &Rational, acc: &mut HashMap<u64, Rational>) {
    let f = mf.mask();
    let g = mg.mask();
    // θ^a in f against ξ_a in g, then ξ_a in f against θ^a in g
    for (left, right) in [(mf.up & mg.down, true), (mf.down & mg.up, false)] {
        for a in bits(left as u64) {
            let (fb, gb) = if right { (a, XI_OFFSET + a) } else { (XI_OFFSET + a, a) };
            let (s1, f1) = right_derivative(f, fb);
            let (s2, g1) = left_derivative(g, gb);
            if let Some((s3, m)) = wedge_masks(f1, g1) {
                accumulate(acc, m, s1 ^ s2 ^ s3, cf * cg);
            }
        }
    }
}

/// The element representing `id_A`, normalized so that
/// `{id_A, χ} = (q − p) χ` for every `χ` of bidegree `(p, q)`.
pub fn identity_element(basis: &BasisSpec) -> GradedElement {
    // ξ_a θ^a = −θ^a ξ_a in canonical order
    let terms = (0..basis.dim()).map(|a| {
        (
            Monomial::from_indices(&[a], &[a]).expect("valid index"),
            -Rational::one(),
        )
    });
    GradedElement::from_terms(basis, terms).expect("indices within basis")
}

/// The pairing `⟨u, v⟩ = α(Y) + β(X)` of two sections, computed as `{u, v}`.
pub fn pairing(u: &GradedElement, v: &GradedElement) -> Result<Rational> {
    u.ensure_degree(1)?;
    v.ensure_degree(1)?;
    let b = u.bracket(v)?;
    Ok(b.coefficient(&Monomial::ONE))
}

/// Pairing on coordinate vectors of `E = A ⊕ A*`.
pub fn pairing_vectors(dim: usize, u: &[Rational], v: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for a in 0..dim {
        acc += &u[a] * &v[dim + a];
        acc += &u[dim + a] * &v[a];
    }
    acc
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let (neg, mag) = if c < &Rational::zero() {
                (true, -c.clone())
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors: Vec<String> = m.up_indices().into_iter().map(|a| self.basis.label(a)).collect();
            factors.extend(m.down_indices().into_iter().map(|a| self.basis.dual_label(a)));
            if factors.is_empty() {
                write!(f, "{}", rational::format(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("∧"))?;
            } else {
                write!(f, "{}·{}", rational::format(&mag), factors.join("∧"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedElement[d={}]({})", self.basis.dim(), self)
    }
}

impl Add for &GradedElement {
    type Output = GradedElement;

    /// Panics on mismatched bases; use [`GradedElement::checked_add`] otherwise.
    fn add(self, rhs: &GradedElement) -> GradedElement {
        self.checked_add(rhs).expect("adding elements over different bases")
    }
}

impl Sub for &GradedElement {
    type Output = GradedElement;

    fn sub(self, rhs: &GradedElement) -> GradedElement {
        self.checked_sub(rhs)
            .expect("subtracting elements over different bases")
    }
}

impl Neg for &GradedElement {
    type Output = GradedElement;

    fn neg(self) -> GradedElement {
        GradedElement {
            basis: self.basis.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul<&GradedElement> for &Rational {
    type Output = GradedElement;

    fn mul(self, rhs: &GradedElement) -> GradedElement {
        rhs.scale(self)
    }
}
