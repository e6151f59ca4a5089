//! Exact computer algebra for (pre-)Courant structures on `A ⊕ A*`, with
//! checkers for ε-hypersymplectic, hyperkähler and torsion structures.
//!
//! The base is a point: `A` is a finite-dimensional real vector space and
//! functions live in `Λ(A ⊕ A*)`. All arithmetic is over exact rationals.

pub mod algebroid;
pub mod courant;
pub mod error;
pub mod gca;
pub mod hyper;
pub mod instances;
pub mod matrix;
pub mod rational;
pub mod report;

pub use algebroid::{
    Bivector, FormTriple, LieStructure, Side, StructureConstants, TheoremInputs, TheoremKind, TwoForm,
};
pub use courant::{CourantStatus, CourantStructure, Endomorphism, TrilinearTensor};
pub use error::{Error, Result};
pub use gca::{identity_element, pairing, BasisSpec, Bidegree, Generator, GradedElement, Monomial};
pub use hyper::{Classification, EpsilonTriple, HermitianKind, HyperTriple, HyperkahlerQuad, Sign, SwapOutcome, Z3};

pub use matrix::QMatrix;
pub use rational::Rational;
pub use report::{AxiomVerdict, CheckReport, EquivalenceReport, Status, Witness};
