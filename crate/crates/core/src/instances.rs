//! Constructed instances: flat quaternionic and para-quaternionic triples,
//! seeded random data for fuzzing, and a budgeted search for torsion
//! instances over `ℝ ⋉_A ℝ^{d-1}`.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{build_psi, Bivector, FormTriple, LieStructure, Side, StructureConstants, TwoForm};
use crate::courant::{tensor_torsion, CourantStructure, Endomorphism};
use crate::error::{Error, Result};
use crate::gca::{BasisSpec, GradedElement, Monomial};
use crate::hyper::{EpsilonTriple, Z3};
use crate::matrix::QMatrix;
use crate::rational::{int, rat, Rational};

/// What generated an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Quaternionic,
    Para,
    RandomSkew,
    SearchedTorsion,
}

/// Reproducible from `(kind, dim, seed)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub dim: usize,
    pub seed: u64,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn kron(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut m = QMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    m.set(i * br + k, j * bc + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    m
}

/// The standard `J₁, J₂, J₃ = J₁J₂` on `ℝ⁴`.
pub fn quaternion_units() -> [QMatrix; 3] {
    let j1 = QMatrix::from_i64(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    let j2 = QMatrix::from_i64(&[&[0, 0, -1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, -1, 0, 0]]);
    let j3 = &j1 * &j2;
    [j1, j2, j3]
}

fn block_forms(n: usize, units: [QMatrix; 3]) -> Result<[TwoForm; 3]> {
    if n == 0 {
        return Err(Error::InvalidBasis("block count must be positive".into()));
    }
    let forms = units.map(|u| QMatrix::block_diag(&vec![u; n]));
    Ok([
        TwoForm::new(forms[0].clone())?,
        TwoForm::new(forms[1].clone())?,
        TwoForm::new(forms[2].clone())?,
    ])
}

/// Abelian `ℝ^{4n}` with `ω_i = ⟨J_i ·, ·⟩` blockwise, signs `(-1, -1, -1)`.
pub fn quaternionic_triple(n: usize) -> Result<(LieStructure, FormTriple)> {
    let basis = BasisSpec::new(4 * n)?;
    let forms = block_forms(n, quaternion_units())?;
    let t = FormTriple::from_omegas(&basis, forms, EpsilonTriple::HYPER)?;
    Ok((LieStructure::zero(&basis, Side::A), t))
}

/// Abelian `ℝ^{4n}` with `ω₁ = j⊗k₁`, `ω₂ = j⊗k₂`, `ω₃ = j⊗1` blockwise,
/// where `j` is the rotation and `k₁, k₂` anticommuting reflections.
/// Signs `(1, 1, -1)`.
pub fn para_triple(n: usize) -> Result<(LieStructure, FormTriple)> {
    let basis = BasisSpec::new(4 * n)?;
    let j = QMatrix::from_i64(&[&[0, -1], &[1, 0]]);
    let k1 = QMatrix::from_i64(&[&[1, 0], &[0, -1]]);
    let k2 = QMatrix::from_i64(&[&[0, 1], &[1, 0]]);
    let units = [kron(&j, &k1), kron(&j, &k2), kron(&j, &QMatrix::identity(2))];
    let forms = block_forms(n, units)?;
    let t = FormTriple::from_omegas(&basis, forms, EpsilonTriple::PARA)?;
    Ok((LieStructure::zero(&basis, Side::A), t))
}

/// Both fixtures at `n = 1`.
pub fn fixture(kind: InstanceKind) -> Result<(LieStructure, FormTriple)> {
    match kind {
        InstanceKind::Para => para_triple(1),
        _ => quaternionic_triple(1),
    }
}

fn small_rational(r: &mut ChaCha8Rng) -> Rational {
    let n = r.gen_range(-4i64..=4);
    let d = if r.gen_bool(0.25) { 2 } else { 1 };
    rat(n, d)
}

fn random_skew(r: &mut ChaCha8Rng, d: usize) -> QMatrix {
    let mut m = QMatrix::zeros(d, d);
    for a in 0..d {
        for b in (a + 1)..d {
            let v = small_rational(r);
            m.set(b, a, v.clone());
            m.set(a, b, -v);
        }
    }
    m
}

const RETRIES: usize = 64;

/// Independent nondegenerate skew forms with `π_i = ω_i⁻¹`; the sign triple
/// is only attached, so these generically violate the commutation axiom.
pub fn random_form_triple(seed: u64, d: usize, eps: EpsilonTriple) -> Result<FormTriple> {
    if d % 2 == 1 {
        return Err(Error::Generation(format!(
            "odd dimension {d} has no nondegenerate 2-form"
        )));
    }
    let basis = BasisSpec::new(d)?;
    let mut r = rng(seed);
    let mut draw = || -> Result<TwoForm> {
        for _ in 0..RETRIES {
            let m = random_skew(&mut r, d);
            if !m.determinant().is_zero() {
                return TwoForm::new(m);
            }
        }
        Err(Error::Generation("no nondegenerate form within the retry bound".into()))
    };
    let forms = [draw()?, draw()?, draw()?];
    FormTriple::from_omegas(&basis, forms, eps)
}

fn random_invertible(r: &mut ChaCha8Rng, d: usize) -> Result<QMatrix> {
    for _ in 0..RETRIES {
        let mut m = QMatrix::identity(d);
        for a in 0..d {
            for b in 0..d {
                if r.gen_bool(0.4) {
                    m.set(a, b, m.get(a, b) + small_rational(r));
                }
            }
        }
        if !m.determinant().is_zero() {
            return Ok(m);
        }
    }
    Err(Error::Generation("no invertible matrix within the retry bound".into()))
}

/// A fixture transported by a random change of basis `M`:
/// `ω ↦ Mᵀ ω M`, `π ↦ M⁻¹ π M⁻ᵀ`, `N ↦ M⁻¹ N M`. Valid whenever the source is.
pub fn transported_triple(seed: u64, t: &FormTriple) -> Result<FormTriple> {
    let d = t.basis().dim();
    let mut r = rng(seed);
    let m = random_invertible(&mut r, d)?;
    let inv = m.inverse().ok_or(Error::Singular)?;
    let omegas = Z3::all().map(|i| &(&m.transpose() * t.omega(i).matrix()) * &m);
    let pis = Z3::all().map(|i| &(&inv * t.pi(i).matrix()) * &inv.transpose());
    let [w1, w2, w3] = omegas;
    let [p1, p2, p3] = pis;
    FormTriple::new(
        t.basis(),
        [TwoForm::new(w1)?, TwoForm::new(w2)?, TwoForm::new(w3)?],
        [Bivector::new(p1)?, Bivector::new(p2)?, Bivector::new(p3)?],
        t.eps(),
    )
}

/// Sparse degree-3 element with small integer coefficients.
pub fn random_theta(seed: u64, d: usize) -> Result<CourantStructure> {
    let basis = BasisSpec::new(d)?;
    let mut r = rng(seed);
    let mut terms = Vec::new();
    let count = r.gen_range(1..=6);
    let idx: Vec<usize> = (0..d).collect();
    while terms.len() < count {
        let p = r.gen_range(0..=3usize);
        if p > d || 3 - p > d {
            continue;
        }
        let mut up: Vec<usize> = idx.choose_multiple(&mut r, p).copied().collect();
        let mut down: Vec<usize> = idx.choose_multiple(&mut r, 3 - p).copied().collect();
        up.sort_unstable();
        down.sort_unstable();
        let c = r.gen_range(-3i64..=3);
        if c != 0 {
            terms.push((Monomial::from_indices(&up, &down).expect("sorted distinct"), int(c)));
        }
    }
    CourantStructure::new(GradedElement::from_terms(&basis, terms)?)
}

/// `[e_0, e_j] = Σ_k A[k][j-1] e_{k+1}` on `ℝ ⋉_A ℝ^{d-1}`; Lie for every `A`.
pub fn semidirect_constants(a: &QMatrix) -> StructureConstants {
    let d = a.rows() + 1;
    let mut c = StructureConstants::zero(d);
    for j in 0..d - 1 {
        for k in 0..d - 1 {
            let v = a.get(k, j);
            if !v.is_zero() {
                c.set_bracket(k + 1, 0, j + 1, v.clone());
            }
        }
    }
    c
}

/// Constants after the change of basis `f_i = Σ_j M[j][i] e_j`.
pub fn change_basis(c: &StructureConstants, m: &QMatrix) -> Result<StructureConstants> {
    let d = c.dim();
    let inv = m.inverse().ok_or(Error::Singular)?;
    let mut out = StructureConstants::zero(d);
    for b in 0..d {
        for cc in 0..d {
            // [f_b, f_c] in e-coordinates
            let mut v = vec![Rational::zero(); d];
            for j in 0..d {
                for k in 0..d {
                    let s = m.get(j, b) * m.get(k, cc);
                    if s.is_zero() {
                        continue;
                    }
                    for (a, va) in v.iter_mut().enumerate() {
                        *va += &s * c.get(a, j, k);
                    }
                }
            }
            let w = inv.apply(&v);
            for (a, wa) in w.into_iter().enumerate() {
                out.set(a, b, cc, wa);
            }
        }
    }
    Ok(out)
}

/// A random Lie bracket on `ℝ^d`: a random semidirect product, then a
/// random change of basis.
pub fn random_lie(seed: u64, d: usize) -> Result<StructureConstants> {
    if d < 2 {
        return Ok(StructureConstants::zero(d));
    }
    let mut r = rng(seed);
    let mut a = QMatrix::zeros(d - 1, d - 1);
    for k in 0..d - 1 {
        for j in 0..d - 1 {
            if r.gen_bool(0.5) {
                a.set(k, j, int(r.gen_range(-2i64..=2)));
            }
        }
    }
    let m = random_invertible(&mut r, d)?;
    change_basis(&semidirect_constants(&a), &m)
}

fn coefficients_on(e: &GradedElement, monos: &mut Vec<Monomial>) -> Vec<(usize, Rational)> {
    let mut out = Vec::new();
    for (m, v) in e.terms() {
        let k = match monos.iter().position(|x| x == m) {
            Some(k) => k,
            None => {
                monos.push(*m);
                monos.len() - 1
            }
        };
        out.push((k, v.clone()));
    }
    out
}

/// Nullspace of a linear map given by its images of basis parameters.
fn linear_solutions(images: &[Vec<GradedElement>]) -> Vec<Vec<Rational>> {
    let mut monos = Vec::new();
    let cols: Vec<Vec<Vec<(usize, Rational)>>> = images
        .iter()
        .map(|blocks| blocks.iter().map(|e| coefficients_on(e, &mut monos)).collect())
        .collect();
    let blocks = images.first().map_or(0, Vec::len);
    let rows = monos.len() * blocks;
    let mut m = QMatrix::zeros(rows.max(1), images.len());
    for (j, col) in cols.iter().enumerate() {
        for (b, entries) in col.iter().enumerate() {
            for (k, v) in entries {
                m.set(b * monos.len() + k, j, v.clone());
            }
        }
    }
    m.nullspace()
}

fn elementary(d1: usize, k: usize, j: usize) -> QMatrix {
    let mut e = QMatrix::zeros(d1, d1);
    e.set(k, j, int(1));
    e
}

/// Integer combinations of `basis` with coefficients in `-r..=r`, not all
/// zero, shuffled deterministically by seed.
fn candidates(dim: usize, radius: i64, seed: u64, budget: usize) -> Vec<Vec<i64>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let span = (2 * radius + 1) as u64;
    let total = span.checked_pow(dim as u32).unwrap_or(u64::MAX);
    if total <= 4 * budget as u64 {
        for code in 0..total {
            let mut c = code;
            let v: Vec<i64> = (0..dim)
                .map(|_| {
                    let x = (c % span) as i64 - radius;
                    c /= span;
                    x
                })
                .collect();
            if v.iter().any(|&x| x != 0) {
                out.push(v);
            }
        }
        out.shuffle(&mut r);
    } else {
        while out.len() < budget {
            let v: Vec<i64> = (0..dim).map(|_| r.gen_range(-radius..=radius)).collect();
            if v.iter().any(|&x| x != 0) {
                out.push(v);
            }
        }
    }
    out.truncate(budget);
    out
}

fn combine(basis: &[Vec<Rational>], coef: &[i64]) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); basis[0].len()];
    for (b, &c) in basis.iter().zip(coef) {
        if c != 0 {
            for (x, y) in v.iter_mut().zip(b) {
                *x += y * int(c);
            }
        }
    }
    v
}

fn matrix_from_vec(d1: usize, v: &[Rational]) -> QMatrix {
    let mut a = QMatrix::zeros(d1, d1);
    for (idx, x) in v.iter().enumerate() {
        a.set(idx / d1, idx % d1, x.clone());
    }
    a
}

fn degree3_monomials(d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for up in 0u32..(1 << d) {
        for down in 0u32..(1 << d) {
            if up.count_ones() + down.count_ones() == 3 {
                let u: Vec<usize> = (0..d).filter(|k| up >> k & 1 == 1).collect();
                let w: Vec<usize> = (0..d).filter(|k| down >> k & 1 == 1).collect();
                out.push(Monomial::from_indices(&u, &w).expect("distinct"));
            }
        }
    }
    out
}

/// A basis of the degree-3 `Θ` for which every map in `maps` is Nijenhuis.
/// The torsion is linear in `Θ`, so this is a nullspace.
pub fn nijenhuis_structures(basis: &BasisSpec, maps: &[Endomorphism]) -> Result<Vec<GradedElement>> {
    let monos = degree3_monomials(basis.dim());
    let mut cols = Vec::with_capacity(monos.len());
    for m in &monos {
        let th = CourantStructure::new(GradedElement::monomial(basis, *m, int(1)))?;
        let bracket = th.bracket_tensor();
        let mut v = Vec::new();
        for i in maps {
            let t = tensor_torsion(&bracket, i);
            let n = t.size();
            for a in 0..n {
                for b in 0..n {
                    v.extend_from_slice(t.on_basis(a, b));
                }
            }
        }
        cols.push(v);
    }
    let rows = cols.first().map_or(0, Vec::len).max(1);
    let mut a = QMatrix::zeros(rows, monos.len());
    for (j, c) in cols.iter().enumerate() {
        for (r, x) in c.iter().enumerate() {
            if !x.is_zero() {
                a.set(r, j, x.clone());
            }
        }
    }
    a.nullspace()
        .into_iter()
        .map(|v| GradedElement::from_terms(basis, monos.iter().copied().zip(v)))
        .collect()
}

/// A found torsion instance.
#[derive(Clone, Debug)]
pub struct TorsionInstance {
    pub mu: LieStructure,
    pub triple: FormTriple,
    /// Candidates examined before acceptance.
    pub tried: usize,
}

fn semidirect_mu(basis: &BasisSpec, a: &QMatrix) -> Result<LieStructure> {
    LieStructure::from_constants(basis, &semidirect_constants(a))
}

fn semidirect_on(basis: &BasisSpec, a: &QMatrix, side: Side) -> Result<LieStructure> {
    let mu = semidirect_mu(basis, a)?;
    Ok(match side {
        Side::A => mu,
        Side::Dual => mu.swapped(),
    })
}

/// Basis of the matrices `A` for which the semidirect bracket on `side`
/// satisfies the linear conditions `f(element) = 0`.
fn semidirect_space(
    basis: &BasisSpec,
    side: Side,
    f: impl Fn(&GradedElement) -> Result<Vec<GradedElement>>,
) -> Result<Vec<QMatrix>> {
    let d1 = basis.dim() - 1;
    let mut images = Vec::new();
    for k in 0..d1 {
        for j in 0..d1 {
            let e = semidirect_on(basis, &elementary(d1, k, j), side)?;
            images.push(f(e.element())?);
        }
    }
    Ok(linear_solutions(&images)
        .iter()
        .map(|v| matrix_from_vec(d1, v))
        .collect())
}

fn equal_squares(fs: &[GradedElement], x: &GradedElement) -> Result<Vec<GradedElement>> {
    let sq: Vec<GradedElement> = fs.iter().map(|p| p.bracket(&p.bracket(x)?)).collect::<Result<_>>()?;
    Ok(vec![&sq[0] - &sq[1], &sq[0] - &sq[2]])
}

/// `A` with equal squares `{π_i, {π_i, μ_A}}`.
pub fn torsion_semidirect_space(t: &FormTriple) -> Result<Vec<QMatrix>> {
    let pis: Vec<GradedElement> = Z3::all().iter().map(|&i| t.pi_element(i)).collect();
    semidirect_space(t.basis(), Side::A, |m| equal_squares(&pis, m))
}

/// `A` with `{μ_A, ω_i} = 0` for every `i`.
pub fn hypersymplectic_semidirect_space(t: &FormTriple) -> Result<Vec<QMatrix>> {
    let omegas: Vec<GradedElement> = Z3::all().iter().map(|&i| t.omega_element(i)).collect();
    semidirect_space(t.basis(), Side::A, |m| omegas.iter().map(|w| m.bracket(w)).collect())
}

fn combinations(space: &[QMatrix], seed: u64, budget: usize) -> Vec<QMatrix> {
    if space.is_empty() {
        return Vec::new();
    }
    let flat: Vec<Vec<Rational>> = space
        .iter()
        .map(|m| m.to_rows().into_iter().flatten().collect())
        .collect();
    let d1 = space[0].rows();
    candidates(space.len(), 1, seed, budget)
        .into_iter()
        .map(|c| matrix_from_vec(d1, &combine(&flat, &c)))
        .collect()
}

/// Searches `ℝ ⋉_A ℝ^{d-1}` with the quaternionic forms fixed. Equality of
/// the squares `{π_i, {π_i, μ}}` is linear in `A`, so the candidates are
/// small integer points of that solution space; the first with nonzero `ψ`
/// is returned. `None` after `budget` candidates.
pub fn search_torsion_instance(d: usize, seed: u64, budget: usize) -> Result<Option<TorsionInstance>> {
    if d < 4 || !d.is_multiple_of(4) {
        return Err(Error::InvalidBasis(format!(
            "torsion search needs d a positive multiple of 4, got {d}"
        )));
    }
    let (_, t) = quaternionic_triple(d / 4)?;
    let space = torsion_semidirect_space(&t)?;
    for (n, a) in combinations(&space, seed, budget).into_iter().enumerate() {
        let mu = semidirect_mu(t.basis(), &a)?;
        let psi = build_psi(&mu, t.pi(Z3::ONE))?;
        if !psi.is_zero() {
            return Ok(Some(TorsionInstance {
                mu,
                triple: t,
                tried: n + 1,
            }));
        }
    }
    Ok(None)
}

/// What the partner bracket on `A*` must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualCondition {
    /// `{γ, π_i} = 0`.
    Hypersymplectic,
    /// Equal squares `{ω_i, {ω_i, γ}}`.
    Torsion,
}

/// `γ = σ(μ_B)` with `μ_B` semidirect, `{μ, γ} = 0` and the given condition.
/// Nonzero `γ` is preferred, with nonzero `φ` first under
/// [`DualCondition::Torsion`]; `γ = 0` when the solution space is trivial.
pub fn search_dual_partner(
    mu: &LieStructure,
    t: &FormTriple,
    cond: DualCondition,
    seed: u64,
    budget: usize,
) -> Result<LieStructure> {
    let basis = t.basis().clone();
    let m = mu.element().clone();
    let omegas: Vec<GradedElement> = Z3::all().iter().map(|&i| t.omega_element(i)).collect();
    let pis: Vec<GradedElement> = Z3::all().iter().map(|&i| t.pi_element(i)).collect();
    let space = semidirect_space(&basis, Side::Dual, |g| {
        let mut out = vec![m.bracket(g)?];
        match cond {
            DualCondition::Hypersymplectic => {
                for p in &pis {
                    out.push(g.bracket(p)?);
                }
            }
            DualCondition::Torsion => out.extend(equal_squares(&omegas, g)?),
        }
        Ok(out)
    })?;
    let mut fallback = None;
    for b in combinations(&space, seed, budget) {
        let gamma = semidirect_on(&basis, &b, Side::Dual)?;
        let wanted = match cond {
            DualCondition::Torsion => !crate::algebroid::build_phi(&gamma, t.omega(Z3::ONE))?.is_zero(),
            DualCondition::Hypersymplectic => true,
        };
        if wanted {
            return Ok(gamma);
        }
        fallback.get_or_insert(gamma);
    }
    Ok(fallback.unwrap_or_else(|| LieStructure::zero(&basis, Side::Dual)))
}

fn permutation_to_front(k: usize, d: usize) -> QMatrix {
    let mut m = QMatrix::zeros(d, d);
    let order = std::iter::once(k).chain((0..d).filter(|&x| x != k));
    for (i, o) in order.enumerate() {
        m.set(o, i, int(1));
    }
    m
}

/// A nonzero pair `(μ, γ)` with `{μ, γ} = 0`, both semidirect products
/// with randomly chosen distinguished directions.
pub fn random_bialgebroid(seed: u64, d: usize) -> Result<(LieStructure, LieStructure)> {
    if d < 2 {
        return Err(Error::Generation("bialgebroid search needs d >= 2".into()));
    }
    let basis = BasisSpec::new(d)?;
    let mut r = rng(seed);
    let draw = |r: &mut ChaCha8Rng| -> Result<StructureConstants> {
        let mut a = QMatrix::zeros(d - 1, d - 1);
        for k in 0..d - 1 {
            for j in 0..d - 1 {
                if r.gen_bool(0.3) {
                    a.set(k, j, int(r.gen_range(-1i64..=1)));
                }
            }
        }
        let k = r.gen_range(0..d);
        change_basis(&semidirect_constants(&a), &permutation_to_front(k, d))
    };
    for _ in 0..RETRIES * 64 {
        let mu = LieStructure::from_constants(&basis, &draw(&mut r)?)?;
        let gamma = LieStructure::dual_from_constants(&basis, &draw(&mut r)?)?;
        if mu.element().is_zero() || gamma.element().is_zero() {
            continue;
        }
        if mu.element().bracket(gamma.element())?.is_zero() {
            return Ok((mu, gamma));
        }
    }
    Err(Error::Generation("no bialgebroid pair within the retry bound".into()))
}
