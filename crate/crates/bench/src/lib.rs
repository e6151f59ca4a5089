//! Inputs shared by the benchmarks.

use hypercourant::instances::{quaternionic_triple, random_theta, search_torsion_instance};
use hypercourant::{CourantStructure, FormTriple, HyperTriple, LieStructure};

/// A random degree-3 structure at dimension `d`.
pub fn theta(d: usize) -> CourantStructure {
    random_theta(7, d).expect("random structure")
}

/// Quaternionic triple on `R^{4n}`, assembled.
pub fn quaternionic(n: usize) -> (FormTriple, HyperTriple) {
    let (_, t) = quaternionic_triple(n).expect("fixture");
    let h = t.assemble().expect("assembles");
    (t, h)
}

/// The first searched torsion instance at `d = 4`.
pub fn torsion_instance() -> (LieStructure, FormTriple) {
    let inst = search_torsion_instance(4, 0, 50)
        .expect("search runs")
        .expect("instance found");
    (inst.mu, inst.triple)
}
