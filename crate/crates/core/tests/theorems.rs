use std::sync::OnceLock;

use hypercourant::algebroid::{
    build_phi, build_psi, check_hyper_with_torsion, is_weak_poisson, lemma_9_2_verify, theorem_suite,
};
use hypercourant::hyper::check_eps_hypersymplectic;
use hypercourant::instances::{
    hypersymplectic_semidirect_space, para_triple, quaternionic_triple, random_bialgebroid, random_form_triple,
    search_dual_partner, search_torsion_instance, semidirect_constants, transported_triple, DualCondition,
};
use hypercourant::rational::int;
use hypercourant::{
    Bivector, CourantStructure, EpsilonTriple, FormTriple, GradedElement, LieStructure, Monomial, QMatrix, Side,
    TheoremInputs, TheoremKind, Z3,
};

struct Case {
    label: String,
    mu: LieStructure,
    gamma: LieStructure,
    triple: FormTriple,
}

fn zero_dual(t: &FormTriple) -> LieStructure {
    LieStructure::zero(t.basis(), Side::Dual)
}

/// Valid hypersymplectic data: both fixtures with `μ = 0`, and non-abelian
/// solutions on the para fixture and the `d = 8` quaternionic triple.
fn positives() -> Vec<Case> {
    let mut out = Vec::new();
    for (label, (mu, t)) in [
        ("quaternionic", quaternionic_triple(1).unwrap()),
        ("para", para_triple(1).unwrap()),
    ] {
        out.push(Case {
            label: label.into(),
            gamma: zero_dual(&t),
            mu,
            triple: t,
        });
    }
    for (label, (_, t)) in [
        ("para-lie", para_triple(1).unwrap()),
        ("quaternionic8-lie", quaternionic_triple(2).unwrap()),
    ] {
        let space = hypersymplectic_semidirect_space(&t).unwrap();
        assert!(!space.is_empty(), "{label}");
        let a = space
            .iter()
            .fold(QMatrix::zeros(space[0].rows(), space[0].rows()), |acc, m| &acc + m);
        let mu = LieStructure::from_constants(t.basis(), &semidirect_constants(&a)).unwrap();
        assert!(!mu.element().is_zero());
        let gamma = search_dual_partner(&mu, &t, DualCondition::Hypersymplectic, 0, 50).unwrap();
        out.push(Case {
            label: label.into(),
            mu,
            gamma,
            triple: t,
        });
    }
    out
}

/// Broken closedness, broken inverses, broken commutation.
fn negatives() -> Vec<Case> {
    let mut out = Vec::new();
    for (name, (_, t)) in [
        ("quaternionic", quaternionic_triple(1).unwrap()),
        ("para", para_triple(1).unwrap()),
    ] {
        let basis = t.basis().clone();
        for seed in 0..4i64 {
            let mut a = QMatrix::zeros(3, 3);
            a.set(0, 0, int(1 + seed));
            a.set(1, 2, int(seed - 1));
            a.set(2, 1, int(2));
            let mu = LieStructure::from_constants(&basis, &semidirect_constants(&a)).unwrap();
            out.push(Case {
                label: format!("{name}-closedness-{seed}"),
                gamma: zero_dual(&t),
                mu,
                triple: t.clone(),
            });
        }
        for i in Z3::all() {
            let p = Bivector::new(t.pi(i).matrix().scale(&int(2))).unwrap();
            out.push(Case {
                label: format!("{name}-inverse-{i}"),
                mu: LieStructure::zero(&basis, Side::A),
                gamma: zero_dual(&t),
                triple: t.with_pi(i, p),
            });
        }
        let w = t.omega(Z3::ONE).clone();
        let broken = t
            .with_omega(Z3::THREE, w.clone())
            .with_pi(Z3::THREE, w.invert().unwrap());
        out.push(Case {
            label: format!("{name}-commutation"),
            mu: LieStructure::zero(&basis, Side::A),
            gamma: zero_dual(&t),
            triple: broken,
        });
        for seed in 0..2 {
            out.push(Case {
                label: format!("{name}-random-{seed}"),
                mu: LieStructure::zero(&basis, Side::A),
                gamma: zero_dual(&t),
                triple: random_form_triple(seed, 4, t.eps()).unwrap(),
            });
        }
    }
    out
}

fn run(kind: TheoremKind, c: &Case) -> hypercourant::EquivalenceReport {
    let inputs = TheoremInputs {
        mu: c.mu.clone(),
        gamma: Some(c.gamma.clone()),
        triple: c.triple.clone(),
    };
    theorem_suite(kind, &inputs).unwrap_or_else(|e| panic!("{kind} on {}: {e}", c.label))
}

#[test]
fn lie_level_equivalences_on_positives() {
    for c in positives() {
        for kind in [TheoremKind::Thm7_2, TheoremKind::Thm8_1, TheoremKind::Cor8_2] {
            let r = run(kind, &c);
            assert!(r.left.passed() && r.right.passed(), "{kind} {}: {r}", c.label);
            assert!(r.agree(), "{kind} {}: {r}", c.label);
        }
    }
}

#[test]
fn lie_level_equivalences_on_negatives() {
    let cases = negatives();
    assert!(cases.len() >= 20);
    for c in &cases {
        for kind in [TheoremKind::Thm7_2, TheoremKind::Thm8_1, TheoremKind::Cor8_2] {
            let r = run(kind, c);
            assert!(!r.left.passed() && !r.right.passed(), "{kind} {}: {r}", c.label);
            assert!(r.agree(), "{kind} {}: {r}", c.label);
        }
    }
}

#[test]
fn transported_fixtures_stay_positive() {
    for seed in 0..4 {
        let (mu, t) = quaternionic_triple(1).unwrap();
        let moved = transported_triple(seed, &t).unwrap();
        let c = Case {
            label: format!("moved-{seed}"),
            gamma: zero_dual(&moved),
            mu,
            triple: moved,
        };
        let r = run(TheoremKind::Thm7_2, &c);
        assert!(r.left.passed() && r.right.passed() && r.agree(), "{r}");
    }
}

#[test]
fn missing_dual_bracket_is_a_precondition_error() {
    let (mu, t) = quaternionic_triple(1).unwrap();
    let inputs = TheoremInputs {
        mu,
        gamma: None,
        triple: t,
    };
    assert!(matches!(
        theorem_suite(TheoremKind::Thm8_1, &inputs),
        Err(hypercourant::Error::Precondition { .. })
    ));
}

#[test]
fn psi_and_phi_biconditionals_on_twenty_instances() {
    let mut seen = 0;
    for seed in 0..20u64 {
        let (mu, gamma) = random_bialgebroid(seed, 4).unwrap();
        let forms = random_form_triple(100 + seed, 4, EpsilonTriple::HYPER).unwrap();
        let (w, p) = (forms.omega(Z3::ONE), forms.pi(Z3::ONE));
        let psi = build_psi(&mu, p).unwrap();
        let phi = build_phi(&gamma, w).unwrap();
        let r = lemma_9_2_verify(&mu, &gamma, &psi, &phi, w, p).unwrap();
        assert!(r.passed(), "seed {seed}: {r}");
        // perturbed ψ, φ falsify both sides
        let basis = mu.basis().clone();
        let bump_psi = GradedElement::monomial(&basis, Monomial::from_indices(&[0, 1, 2], &[]).unwrap(), int(1));
        let bump_phi = bump_psi.swap_roles();
        let r2 = lemma_9_2_verify(&mu, &gamma, &(&psi + &bump_psi), &(&phi + &bump_phi), w, p).unwrap();
        assert!(r2.passed(), "seed {seed}: {r2}");
        assert!(r2
            .items
            .iter()
            .any(|v| v.id == "i.left" && v.description.ends_with("false")));
        seen += 1;
    }
    assert_eq!(seen, 20);
}

fn searched() -> Vec<(LieStructure, FormTriple)> {
    static FOUND: OnceLock<Vec<(LieStructure, FormTriple)>> = OnceLock::new();
    FOUND.get_or_init(search).clone()
}

fn search() -> Vec<(LieStructure, FormTriple)> {
    let mut out = Vec::new();
    for (d, seeds) in [(4usize, 0..3u64), (8, 0..3)] {
        for seed in seeds {
            if let Some(inst) = search_torsion_instance(d, seed, 50).unwrap() {
                out.push((inst.mu, inst.triple));
            }
        }
    }
    out
}

#[test]
fn torsion_search_finds_nonzero_psi() {
    let found = searched();
    assert!(!found.is_empty());
    for (mu, t) in &found {
        let r = check_hyper_with_torsion(mu, t).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.classification.as_deref(), Some("torsion"));
        assert!(!build_psi(mu, t.pi(Z3::ONE)).unwrap().is_zero());
    }
}

#[test]
fn forced_psi() {
    for (mu, t) in searched() {
        let r = run(
            TheoremKind::Prop9_3,
            &Case {
                label: "searched".into(),
                gamma: zero_dual(&t),
                mu: mu.clone(),
                triple: t.clone(),
            },
        );
        assert!(r.left.passed() && r.right.passed() && r.agree(), "{r}");
        let psi = build_psi(&mu, t.pi(Z3::ONE)).unwrap();
        let bump = GradedElement::monomial(t.basis(), Monomial::from_indices(&[0, 1, 2], &[]).unwrap(), int(1));
        let wrong = CourantStructure::new(&(mu.element() + &psi) + &bump).unwrap();
        let h = t.assemble().unwrap();
        assert!(!check_eps_hypersymplectic(&wrong, &h).unwrap().passed());
        let right = CourantStructure::new(mu.element() + &psi).unwrap();
        assert!(check_eps_hypersymplectic(&right, &h).unwrap().passed());
    }
}

#[test]
fn weak_poisson_matches_courant_on_searched_instances() {
    let mut cases = searched();
    cases.push({
        let (mu, t) = quaternionic_triple(1).unwrap();
        (mu, t)
    });
    for (mu, t) in cases {
        let psi = build_psi(&mu, t.pi(Z3::ONE)).unwrap();
        let weak = Z3::all().iter().all(|&i| is_weak_poisson(&mu, t.pi(i)).unwrap());
        let sum = mu.element() + &psi;
        assert_eq!(weak, sum.bracket(&sum).unwrap().is_zero());
        let r = run(
            TheoremKind::Thm9_4,
            &Case {
                label: "searched".into(),
                gamma: zero_dual(&t),
                mu,
                triple: t,
            },
        );
        assert!(r.agree(), "{r}");
        assert_eq!(r.left.passed(), weak);
    }
}

fn torsion_bialgebroids() -> Vec<Case> {
    let mut out = Vec::new();
    for (mu, t) in searched().into_iter().take(3) {
        // torsion on A, partner on A*
        let gamma = search_dual_partner(&mu, &t, DualCondition::Torsion, 0, 50).unwrap();
        out.push(Case {
            label: "A-side".into(),
            mu: mu.clone(),
            gamma,
            triple: t.clone(),
        });
        // the same bracket moved to A*
        out.push(Case {
            label: "A*-side".into(),
            mu: LieStructure::zero(t.basis(), Side::A),
            gamma: mu.swapped(),
            triple: t,
        });
    }
    let (mu, t) = quaternionic_triple(1).unwrap();
    out.push(Case {
        label: "abelian".into(),
        gamma: zero_dual(&t),
        mu,
        triple: t,
    });
    out
}

#[test]
fn proto_bialgebroid_equivalences() {
    let cases = torsion_bialgebroids();
    let mut nonzero_phi = 0;
    for c in &cases {
        for kind in [TheoremKind::Prop9_5, TheoremKind::Thm9_6] {
            let r = run(kind, c);
            assert!(r.agree(), "{kind} {}: {r}", c.label);
            if kind == TheoremKind::Prop9_5 {
                assert!(r.left.passed() && r.right.passed(), "{}: {r}", c.label);
            }
            if kind == TheoremKind::Thm9_6 {
                assert!(r.consistency.item_passed("expansion"));
            }
        }
        if !build_phi(&c.gamma, c.triple.omega(Z3::ONE)).unwrap().is_zero() {
            nonzero_phi += 1;
        }
    }
    assert!(nonzero_phi > 0);
}

/// `{Θ, Θ}` split by bidegree, against the five component brackets.
#[test]
fn expansion_of_the_square_by_components() {
    for c in torsion_bialgebroids() {
        let m = c.mu.element();
        let g = c.gamma.element();
        let psi = build_psi(&c.mu, c.triple.pi(Z3::ONE)).unwrap();
        let phi = build_phi(&c.gamma, c.triple.omega(Z3::ONE)).unwrap();
        let theta = &(&(m + g) + &psi) + &phi;
        let sq = theta.bracket(&theta).unwrap();
        let two = int(2);
        let b = |x: &GradedElement, y: &GradedElement| x.bracket(y).unwrap();
        let parts = [
            (1, 3, &b(m, m) + &b(g, &phi).scale(&two)),
            (3, 1, &b(g, g) + &b(m, &psi).scale(&two)),
            (2, 2, (&b(m, g) + &b(&psi, &phi)).scale(&two)),
            (4, 0, b(g, &psi).scale(&two)),
            (0, 4, b(m, &phi).scale(&two)),
        ];
        let mut total = GradedElement::zero(m.basis());
        for (p, q, e) in &parts {
            assert_eq!(
                sq.component(hypercourant::Bidegree::new(*p, *q)),
                *e,
                "{} ({p},{q})",
                c.label
            );
            total = &total + e;
        }
        assert_eq!(total, sq);
    }
}

/// With `φ = 0`: the hypotheses on a torsion `A` side and a hypersymplectic
/// `A*` side give a Courant `μ + γ + ψ`.
#[test]
fn quasi_lie_remark() {
    for c in torsion_bialgebroids() {
        let phi = build_phi(&c.gamma, c.triple.omega(Z3::ONE)).unwrap();
        if !phi.is_zero() {
            continue;
        }
        let r = run(TheoremKind::Thm9_6, &c);
        let psi = build_psi(&c.mu, c.triple.pi(Z3::ONE)).unwrap();
        let theta = &(c.mu.element() + c.gamma.element()) + &psi;
        if r.left.passed() {
            assert!(theta.bracket(&theta).unwrap().is_zero());
        }
    }
}

#[test]
fn gamma_psi_identity_needs_more_than_the_bialgebroid_condition() {
    // {μ, γ} = 0 alone does not force {γ, ψ} = 0 for an arbitrary π
    let basis = hypercourant::BasisSpec::new(4).unwrap();
    let mu = LieStructure::from_element(
        GradedElement::monomial(&basis, Monomial::from_indices(&[2], &[1, 2]).unwrap(), int(1)),
        Side::A,
    )
    .unwrap();
    let gamma = LieStructure::from_element(
        GradedElement::monomial(&basis, Monomial::from_indices(&[0, 3], &[3]).unwrap(), int(-1)),
        Side::Dual,
    )
    .unwrap();
    assert!(mu.element().bracket(gamma.element()).unwrap().is_zero());
    let p = Bivector::from_element(
        &GradedElement::from_terms(
            &basis,
            [
                (Monomial::from_indices(&[0, 1], &[]).unwrap(), int(1)),
                (Monomial::from_indices(&[0, 2], &[]).unwrap(), int(2)),
                (Monomial::from_indices(&[1, 2], &[]).unwrap(), int(1)),
                (Monomial::from_indices(&[0, 3], &[]).unwrap(), int(-2)),
                (Monomial::from_indices(&[1, 3], &[]).unwrap(), int(2)),
            ],
        )
        .unwrap(),
    )
    .unwrap();
    let psi = build_psi(&mu, &p).unwrap();
    assert!(!gamma.element().bracket(&psi).unwrap().is_zero());
}
