//! Pre-Courant structures on `E = A ⊕ A*` as degree-three elements, their
//! Dorfman brackets, deformations and Nijenhuis torsion.

mod endo;
mod tensor;

pub use endo::{endo_from_function, function_from_skew_endo, pairing_gram, Endomorphism};
pub use tensor::TrilinearTensor;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gca::{pairing_vectors, BasisSpec, Bidegree, Generator, GradedElement};
use crate::rational::{half, Rational};
use crate::report::{CheckReport, Witness};

/// A degree-three element `Θ = μ + γ + φ + ψ` together with its bidegree
/// components `μ ∈ (1,2)`, `γ ∈ (2,1)`, `φ ∈ (0,3)`, `ψ ∈ (3,0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourantStructure {
    theta: GradedElement,
    mu: GradedElement,
    gamma: GradedElement,
    phi: GradedElement,
    psi: GradedElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CourantStatus {
    Courant,
    /// `{Θ, Θ}` is the attached nonzero element.
    NotCourant(GradedElement),
}

impl CourantStatus {
    pub fn is_courant(&self) -> bool {
        matches!(self, CourantStatus::Courant)
    }
}

impl CourantStructure {
    pub fn new(theta: GradedElement) -> Result<Self> {
        theta.ensure_degree(3)?;
        Ok(CourantStructure {
            mu: theta.component(Bidegree::new(1, 2)),
            gamma: theta.component(Bidegree::new(2, 1)),
            phi: theta.component(Bidegree::new(0, 3)),
            psi: theta.component(Bidegree::new(3, 0)),
            theta,
        })
    }

    pub fn zero(basis: &BasisSpec) -> Self {
        CourantStructure::new(GradedElement::zero(basis)).expect("zero has every degree")
    }

    /// Sums the four parts, checking each has the expected bidegree.
    pub fn from_parts(
        mu: &GradedElement,
        gamma: &GradedElement,
        phi: &GradedElement,
        psi: &GradedElement,
    ) -> Result<Self> {
        for (e, b) in [
            (mu, Bidegree::new(1, 2)),
            (gamma, Bidegree::new(2, 1)),
            (phi, Bidegree::new(0, 3)),
            (psi, Bidegree::new(3, 0)),
        ] {
            if !e.is_zero() && e.bidegree() != Some(b) {
                return Err(Error::degree(format!("bidegree {b}"), e.degree_summary()));
            }
        }
        let theta = mu.checked_add(gamma)?.checked_add(phi)?.checked_add(psi)?;
        CourantStructure::new(theta)
    }

    pub fn theta(&self) -> &GradedElement {
        &self.theta
    }

    pub fn basis(&self) -> &BasisSpec {
        self.theta.basis()
    }

    pub fn mu(&self) -> &GradedElement {
        &self.mu
    }

    pub fn gamma(&self) -> &GradedElement {
        &self.gamma
    }

    pub fn phi(&self) -> &GradedElement {
        &self.phi
    }

    pub fn psi(&self) -> &GradedElement {
        &self.psi
    }

    /// Dorfman bracket `[X, Y] = {{X, Θ}, Y}`.
    pub fn dorfman(&self, x: &GradedElement, y: &GradedElement) -> Result<GradedElement> {
        x.ensure_degree(1)?;
        y.ensure_degree(1)?;
        x.bracket(&self.theta)?.bracket(y)
    }

    /// `ρ(X)·f`. Over a point every function is constant, so this is zero.
    pub fn anchor_action(&self, x: &GradedElement, _f: &Rational) -> Result<Rational> {
        x.ensure_degree(1)?;
        Ok(Rational::zero())
    }

    /// The Dorfman bracket tabulated on basis sections.
    pub fn bracket_tensor(&self) -> TrilinearTensor {
        let basis = self.basis().clone();
        let d = basis.dim();
        let n = 2 * d;
        let gens: Vec<GradedElement> = (0..n)
            .map(|k| GradedElement::generator(&basis, Generator::from_section_index(k, d)))
            .collect();
        let partial: Vec<GradedElement> = gens
            .iter()
            .map(|g| g.bracket(&self.theta).expect("same basis"))
            .collect();
        TrilinearTensor::from_fn(&basis, |i, j| partial[i].bracket(&gens[j])?.to_section())
            .expect("derived bracket of sections is a section")
    }

    /// Metric compatibility of the derived bracket on all basis triples.
    /// Over a point both sides of the anchor terms vanish.
    pub fn axioms_pre_courant(&self) -> CheckReport {
        let t = self.bracket_tensor();
        let d = self.basis().dim();
        let n = 2 * d;
        let unit = |k: usize| {
            let mut v = vec![Rational::zero(); n];
            v[k] = Rational::from_integer(1.into());
            v
        };
        let mut first_a = None;
        let mut first_b = None;
        'outer: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let a =
                        pairing_vectors(d, t.on_basis(x, y), &unit(z)) + pairing_vectors(d, &unit(y), t.on_basis(x, z));
                    if first_a.is_none() && !a.is_zero() {
                        first_a = Some(Witness::entry(vec![x, y, z], Rational::zero(), a));
                    }
                    let sym: Vec<Rational> = t
                        .on_basis(y, z)
                        .iter()
                        .zip(t.on_basis(z, y))
                        .map(|(p, q)| p + q)
                        .collect();
                    let b = pairing_vectors(d, &unit(x), &sym);
                    if first_b.is_none() && !b.is_zero() {
                        first_b = Some(Witness::entry(vec![x, y, z], Rational::zero(), b));
                    }
                    if first_a.is_some() && first_b.is_some() {
                        break 'outer;
                    }
                }
            }
        }
        let mut r = CheckReport::new("pre-Courant axioms");
        let ok_a = first_a.is_none();
        let ok_b = first_b.is_none();
        r.record("invariance", "<[X,Y],Z> + <Y,[X,Z]> = 0 on basis triples", ok_a, || {
            first_a
        });
        r.record("symmetric-part", "<X,[Y,Z] + [Z,Y]> = 0 on basis triples", ok_b, || {
            first_b
        });
        r
    }

    pub fn is_courant(&self) -> CourantStatus {
        let sq = self.theta.bracket(&self.theta).expect("same basis");
        if sq.is_zero() {
            CourantStatus::Courant
        } else {
            CourantStatus::NotCourant(sq)
        }
    }

    /// `Θ_I = {I, Θ}`.
    pub fn deform(&self, i_fun: &GradedElement) -> Result<CourantStructure> {
        i_fun.ensure_degree(2)?;
        CourantStructure::new(i_fun.bracket(&self.theta)?)
    }

    /// `Θ_{I,J} = {J, {I, Θ}}`.
    pub fn deform2(&self, i_fun: &GradedElement, j_fun: &GradedElement) -> Result<CourantStructure> {
        self.deform(i_fun)?.deform(j_fun)
    }
}

/// Tensor of `[X, Y]_I = [IX, Y] + [X, IY] − I[X, Y]`.
pub fn deformed_bracket(theta: &CourantStructure, i: &Endomorphism) -> Result<TrilinearTensor> {
    theta.basis().ensure_same(i.basis())?;
    Ok(theta.bracket_tensor().deform(i))
}

/// Tensor of `[X, Y]_{I,J}`, the deformation of `[·,·]_I` by `J`.
pub fn deformed_bracket2(theta: &CourantStructure, i: &Endomorphism, j: &Endomorphism) -> Result<TrilinearTensor> {
    theta.basis().ensure_same(j.basis())?;
    Ok(deformed_bracket(theta, i)?.deform(j))
}

/// Torsion `[IX, IY] − I[X, Y]_I` of `I` with respect to an arbitrary bracket.
pub fn tensor_torsion(bracket: &TrilinearTensor, i: &Endomorphism) -> TrilinearTensor {
    bracket
        .precompose_left(i)
        .precompose_right(i)
        .sub(&bracket.deform(i).post_compose(i))
}

/// Nijenhuis torsion of `I` on `(E, Θ)`.
///
/// Also computed as `½([X,Y]_{I,I} − [X,Y]_{I²})` and, for skew `I` with
/// `I² = λ id`, from the element `½(Θ_{I,I} − λΘ)`; any disagreement is
/// reported as a consistency error.
pub fn nijenhuis_torsion(theta: &CourantStructure, i: &Endomorphism) -> Result<TrilinearTensor> {
    theta.basis().ensure_same(i.basis())?;
    let bracket = theta.bracket_tensor();
    let direct = tensor_torsion(&bracket, i);
    let twice = bracket
        .deform(i)
        .deform(i)
        .sub(&bracket.deform(&i.square()))
        .scale(&half());
    if direct != twice {
        return Err(Error::Consistency(format!(
            "torsion routes disagree: {}",
            twice
                .difference_witness(&direct)
                .map(|w| w.to_string())
                .unwrap_or_default()
        )));
    }
    if let (true, Some(lambda)) = (i.is_skew(), i.square_scalar()) {
        let f = function_from_skew_endo(i)?;
        let element = &theta.deform2(&f, &f)?.theta - &theta.theta.scale(&lambda);
        let via_element = CourantStructure::new(element.scale(&half()))?.bracket_tensor();
        if via_element != direct {
            return Err(Error::Consistency(format!(
                "torsion disagrees with ½(Θ_II − λΘ): {}",
                via_element
                    .difference_witness(&direct)
                    .map(|w| w.to_string())
                    .unwrap_or_default()
            )));
        }
    }
    Ok(direct)
}

/// Concomitant `C_Θ(I, J) = [·,·]_{I,J} + [·,·]_{J,I}`; for skew `I`, `J`
/// it is cross-checked against the element `Θ_{I,J} + Θ_{J,I}`.
pub fn concomitant(theta: &CourantStructure, i: &Endomorphism, j: &Endomorphism) -> Result<TrilinearTensor> {
    let c = deformed_bracket2(theta, i, j)?.add(&deformed_bracket2(theta, j, i)?);
    if i.is_skew() && j.is_skew() {
        let fi = function_from_skew_endo(i)?;
        let fj = function_from_skew_endo(j)?;
        let element = &theta.deform2(&fi, &fj)?.theta + &theta.deform2(&fj, &fi)?.theta;
        let via_element = CourantStructure::new(element)?.bracket_tensor();
        if via_element != c {
            return Err(Error::Consistency(format!(
                "concomitant disagrees with Θ_IJ + Θ_JI: {}",
                via_element
                    .difference_witness(&c)
                    .map(|w| w.to_string())
                    .unwrap_or_default()
            )));
        }
    }
    Ok(c)
}

/// Concomitant as an element, for skew `I` and `J`.
pub fn concomitant_element(
    theta: &CourantStructure,
    i_fun: &GradedElement,
    j_fun: &GradedElement,
) -> Result<GradedElement> {
    Ok(&theta.deform2(i_fun, j_fun)?.theta + &theta.deform2(j_fun, i_fun)?.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::Monomial;
    use crate::rational::int;

    fn b(d: usize) -> BasisSpec {
        BasisSpec::new(d).unwrap()
    }

    /// μ for [e1, e2] = e2 on a 2-dimensional algebra.
    fn affine_mu(s: &BasisSpec) -> GradedElement {
        GradedElement::from_terms(s, [(Monomial::from_indices(&[1], &[0, 1]).unwrap(), int(-1))]).unwrap()
    }

    #[test]
    fn dorfman_reproduces_lie_bracket() {
        let s = b(2);
        let theta = CourantStructure::new(affine_mu(&s)).unwrap();
        let e1 = GradedElement::theta(&s, 0);
        let e2 = GradedElement::theta(&s, 1);
        assert_eq!(theta.dorfman(&e1, &e2).unwrap(), e2);
        assert!(theta.dorfman(&e2, &e2).unwrap().is_zero());
        let z = GradedElement::zero(&s);
        assert!(theta.dorfman(&z, &z).unwrap().is_zero());
    }

    #[test]
    fn zero_structure_is_courant() {
        let theta = CourantStructure::zero(&b(2));
        assert!(theta.is_courant().is_courant());
        assert!(theta.axioms_pre_courant().passed());
    }

    #[test]
    fn components_sum_to_theta() {
        let s = b(2);
        let psi = GradedElement::zero(&s);
        let gamma = affine_mu(&s).swap_roles();
        let theta = CourantStructure::from_parts(&affine_mu(&s), &gamma, &GradedElement::zero(&s), &psi).unwrap();
        assert_eq!(theta.mu(), &affine_mu(&s));
        assert_eq!(theta.gamma(), &gamma);
        assert!(CourantStructure::from_parts(&gamma, &gamma, &psi, &psi).is_err());
    }

    #[test]
    fn degree_two_is_rejected() {
        let s = b(2);
        let e = GradedElement::theta(&s, 0).wedge(&GradedElement::xi(&s, 1)).unwrap();
        assert!(matches!(CourantStructure::new(e), Err(Error::Degree { .. })));
    }

    #[test]
    fn identity_and_scalars_have_zero_torsion() {
        let s = b(2);
        let theta = CourantStructure::new(affine_mu(&s)).unwrap();
        let id = Endomorphism::identity(&s);
        assert!(nijenhuis_torsion(&theta, &id).unwrap().is_zero());
        let l = Endomorphism::scalar(&s, &int(3));
        assert!(nijenhuis_torsion(&theta, &l).unwrap().is_zero());
        assert_eq!(deformed_bracket(&theta, &id).unwrap(), theta.bracket_tensor());
        assert!(deformed_bracket(&theta, &Endomorphism::zero(&s)).unwrap().is_zero());
    }

    #[test]
    fn deformation_matches_deformed_bracket_for_skew_maps() {
        let s = b(2);
        let theta = CourantStructure::new(affine_mu(&s)).unwrap();
        let f = &GradedElement::theta(&s, 0).wedge(&GradedElement::xi(&s, 1)).unwrap()
            + &GradedElement::xi(&s, 0).wedge(&GradedElement::xi(&s, 1)).unwrap();
        let i = endo_from_function(&f).unwrap();
        let via_element = theta.deform(&f).unwrap().bracket_tensor();
        assert_eq!(via_element, deformed_bracket(&theta, &i).unwrap());
    }

    #[test]
    fn deforming_abelian_structure_gives_zero() {
        let s = b(2);
        let omega = GradedElement::xi(&s, 0).wedge(&GradedElement::xi(&s, 1)).unwrap();
        assert!(CourantStructure::zero(&s).deform(&omega).unwrap().theta().is_zero());
    }

    #[test]
    fn concomitant_is_symmetric() {
        let s = b(2);
        let theta = CourantStructure::new(affine_mu(&s)).unwrap();
        let i = endo_from_function(&GradedElement::theta(&s, 0).wedge(&GradedElement::xi(&s, 1)).unwrap()).unwrap();
        let j = endo_from_function(&GradedElement::xi(&s, 0).wedge(&GradedElement::xi(&s, 1)).unwrap()).unwrap();
        assert_eq!(
            concomitant(&theta, &i, &j).unwrap(),
            concomitant(&theta, &j, &i).unwrap()
        );
        assert_eq!(
            concomitant(&theta, &i, &i).unwrap(),
            deformed_bracket2(&theta, &i, &i).unwrap().scale(&int(2))
        );
    }
}
