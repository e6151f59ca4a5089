//! Built-in instance documents.

use hypercourant::algebroid::{build_psi, Bivector, FormTriple, LieStructure, Side};
use hypercourant::instances::{
    hypersymplectic_semidirect_space, para_triple, quaternionic_triple, search_dual_partner, search_torsion_instance,
    semidirect_constants, DualCondition,
};
use hypercourant::rational::int;
use hypercourant::{QMatrix, Z3};

use crate::document::{terms_doc, InstanceDocument, ThetaExtra, Q};
use crate::error::{CliError, CliResult};

pub const NAMES: [&str; 9] = [
    "quaternionic",
    "para",
    "para-lie",
    "torsion",
    "torsion-audit",
    "broken-inverse",
    "broken-closed",
    "malformed",
    "product-plus",
];

fn core<T>(r: hypercourant::Result<T>) -> CliResult<T> {
    r.map_err(CliError::from_core)
}

fn document(mu: Option<&LieStructure>, gamma: Option<&LieStructure>, t: &FormTriple) -> CliResult<InstanceDocument> {
    let mut doc = InstanceDocument::empty(t.basis().dim());
    doc.set_forms(t)?;
    if let Some(m) = mu {
        doc.set_mu(m)?;
    }
    if let Some(g) = gamma {
        doc.set_gamma(g)?;
    }
    Ok(doc)
}

/// The named fixture; `seed` and `budget` steer the searched ones.
pub fn fixture(name: &str, seed: u64, budget: usize) -> CliResult<InstanceDocument> {
    match name {
        "quaternionic" => {
            let (_, t) = core(quaternionic_triple(1))?;
            document(None, None, &t)
        }
        "para" => {
            let (_, t) = core(para_triple(1))?;
            document(None, None, &t)
        }
        "para-lie" => {
            let (_, t) = core(para_triple(1))?;
            let space = core(hypersymplectic_semidirect_space(&t))?;
            let a = space.iter().fold(QMatrix::zeros(3, 3), |acc, m| &acc + m);
            let mu = core(LieStructure::from_constants(t.basis(), &semidirect_constants(&a)))?;
            let gamma = core(search_dual_partner(
                &mu,
                &t,
                DualCondition::Hypersymplectic,
                seed,
                budget,
            ))?;
            document(Some(&mu), Some(&gamma), &t)
        }
        "torsion" | "torsion-audit" => {
            let inst = core(search_torsion_instance(4, seed, budget))?
                .ok_or_else(|| CliError::invalid(format!("no torsion instance within budget {budget}")))?;
            let gamma = LieStructure::zero(inst.triple.basis(), Side::Dual);
            let mut doc = document(Some(&inst.mu), Some(&gamma), &inst.triple)?;
            if name == "torsion-audit" {
                let psi = core(build_psi(&inst.mu, inst.triple.pi(Z3::ONE)))?;
                doc.theta_extra = Some(ThetaExtra {
                    psi: Some(terms_doc(&psi)?),
                    phi: Some(Vec::new()),
                });
            }
            Ok(doc)
        }
        "broken-inverse" => {
            let (_, t) = core(quaternionic_triple(1))?;
            let p = core(Bivector::new(t.pi(Z3::ONE).matrix().scale(&int(2))))?;
            document(None, None, &t.with_pi(Z3::ONE, p))
        }
        "broken-closed" => {
            let (_, t) = core(para_triple(1))?;
            let a = QMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 2], &[0, 1, 0]]);
            let mu = core(LieStructure::from_constants(t.basis(), &semidirect_constants(&a)))?;
            document(Some(&mu), None, &t)
        }
        "malformed" => {
            let (_, t) = core(quaternionic_triple(1))?;
            let mut doc = document(None, None, &t)?;
            doc.omega1.as_mut().expect("forms set")[0][1] = Q { n: 7, d: 1 };
            Ok(doc)
        }
        "product-plus" => {
            let (_, t) = core(quaternionic_triple(1))?;
            let mut doc = document(None, None, &t)?;
            doc.epsilon = Some([1, 1, 1]);
            Ok(doc)
        }
        other => Err(CliError::invalid(format!(
            "unknown fixture `{other}` (known: {})",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::Instance;

    #[test]
    fn every_fixture_builds_and_round_trips() {
        for name in NAMES {
            let doc = fixture(name, 0, 50).unwrap();
            let text = doc.emit();
            assert_eq!(InstanceDocument::parse(&text).unwrap().emit(), text, "{name}");
        }
    }

    #[test]
    fn only_the_malformed_fixture_is_invalid() {
        for name in NAMES {
            let doc = fixture(name, 0, 50).unwrap();
            let loaded = Instance::load(&doc, true);
            assert_eq!(loaded.is_err(), name == "malformed", "{name}");
        }
    }
}
