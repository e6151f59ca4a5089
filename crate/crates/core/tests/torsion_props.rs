use hypercourant::courant::{concomitant, nijenhuis_torsion, tensor_torsion, TrilinearTensor};
use hypercourant::gca::{BasisSpec, GradedElement, Monomial};
use hypercourant::instances::{para_triple, quaternionic_triple, random_theta};
use hypercourant::rational::{int, Rational};
use hypercourant::{CourantStructure, Endomorphism, QMatrix, Z3};
use num_traits::Zero;

/// `S_i` and `T_i` from both fixtures, with their squares.
fn fixture_maps() -> Vec<Endomorphism> {
    let mut out = Vec::new();
    for (_, t) in [quaternionic_triple(1).unwrap(), para_triple(1).unwrap()] {
        let h = t.assemble().unwrap();
        for i in Z3::all() {
            out.push(h.s(i).clone());
            out.push(h.transition(i));
        }
    }
    out
}

/// Anticommuting pairs among the fixture maps.
fn anticommuting_pairs() -> Vec<(Endomorphism, Endomorphism)> {
    let maps = fixture_maps();
    let mut out = Vec::new();
    for (a, i) in maps.iter().enumerate() {
        for j in &maps[a + 1..] {
            if i.anticommutes_with(j) {
                out.push((i.clone(), j.clone()));
            }
        }
    }
    out
}

fn section(basis: &BasisSpec, v: &[Rational]) -> GradedElement {
    GradedElement::from_section(basis, v).unwrap()
}

/// Torsion of `I` evaluated pointwise through the Dorfman bracket.
fn oracle_torsion(theta: &CourantStructure, i: &Endomorphism) -> TrilinearTensor {
    let basis = theta.basis().clone();
    let n = basis.double_dim();
    let br = |x: &[Rational], y: &[Rational]| -> Vec<Rational> {
        theta
            .dorfman(&section(&basis, x), &section(&basis, y))
            .unwrap()
            .to_section()
            .unwrap()
    };
    let add = |a: Vec<Rational>, b: Vec<Rational>| -> Vec<Rational> { a.iter().zip(&b).map(|(x, y)| x + y).collect() };
    let sub = |a: Vec<Rational>, b: Vec<Rational>| -> Vec<Rational> { a.iter().zip(&b).map(|(x, y)| x - y).collect() };
    TrilinearTensor::from_fn(&basis, |a, b| {
        let mut x = vec![Rational::zero(); n];
        let mut y = vec![Rational::zero(); n];
        x[a] = int(1);
        y[b] = int(1);
        let ix = i.apply(&x);
        let iy = i.apply(&y);
        let deformed = sub(add(br(&ix, &y), br(&x, &iy)), i.apply(&br(&x, &y)));
        Ok(sub(br(&ix, &iy), i.apply(&deformed)))
    })
    .unwrap()
}

fn degree3_monomials(d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for up in 0u32..(1 << d) {
        for down in 0u32..(1 << d) {
            if up.count_ones() + down.count_ones() == 3 {
                let u: Vec<usize> = (0..d).filter(|k| up >> k & 1 == 1).collect();
                let w: Vec<usize> = (0..d).filter(|k| down >> k & 1 == 1).collect();
                out.push(Monomial::from_indices(&u, &w).unwrap());
            }
        }
    }
    out
}

/// Degree-3 elements killed by every map in `maps` (each linear in `Θ`).
fn solve_linear(d: usize, maps: &[&dyn Fn(&CourantStructure) -> TrilinearTensor]) -> Vec<GradedElement> {
    let basis = BasisSpec::new(d).unwrap();
    let monos = degree3_monomials(d);
    let cols: Vec<Vec<Rational>> = monos
        .iter()
        .map(|m| {
            let th = CourantStructure::new(GradedElement::monomial(&basis, *m, int(1))).unwrap();
            let n = basis.double_dim();
            let mut v = Vec::new();
            for f in maps {
                let t = f(&th);
                for a in 0..n {
                    for b in 0..n {
                        v.extend_from_slice(t.on_basis(a, b));
                    }
                }
            }
            v
        })
        .collect();
    let rows = cols[0].len();
    let mut m = QMatrix::zeros(rows, monos.len());
    for (j, c) in cols.iter().enumerate() {
        for (r, x) in c.iter().enumerate() {
            if !x.is_zero() {
                m.set(r, j, x.clone());
            }
        }
    }
    m.nullspace()
        .into_iter()
        .map(|v| GradedElement::from_terms(&basis, monos.iter().zip(v).map(|(m, c)| (*m, c))).unwrap())
        .collect()
}

fn structures(elements: &[GradedElement]) -> Vec<CourantStructure> {
    let mut out: Vec<CourantStructure> = elements
        .iter()
        .map(|e| CourantStructure::new(e.clone()).unwrap())
        .collect();
    if elements.len() > 1 {
        let sum = elements
            .iter()
            .fold(GradedElement::zero(elements[0].basis()), |a, b| &a + b);
        out.push(CourantStructure::new(sum).unwrap());
    }
    out
}

fn torsion(theta: &CourantStructure, i: &Endomorphism) -> TrilinearTensor {
    tensor_torsion(&theta.bracket_tensor(), i)
}

/// Torsion of `J` for the bracket deformed by `I`.
fn torsion_deformed(theta: &CourantStructure, i: &Endomorphism, j: &Endomorphism) -> TrilinearTensor {
    tensor_torsion(&theta.bracket_tensor().deform(i), j)
}

#[test]
fn torsion_routes_agree_on_fifty_instances() {
    let maps = fixture_maps();
    let mut skew_involutive = 0;
    let mut nonzero = 0;
    for seed in 0..50u64 {
        let theta = random_theta(seed, 4).unwrap();
        let i = &maps[seed as usize % maps.len()];
        let t = nijenhuis_torsion(&theta, i).expect("routes agree");
        assert_eq!(t, oracle_torsion(&theta, i), "seed {seed}");
        if i.is_skew() && matches!(i.square_scalar(), Some(l) if l == int(1) || l == int(-1)) {
            skew_involutive += 1;
        }
        if !t.is_zero() {
            nonzero += 1;
        }
    }
    assert!(skew_involutive >= 25, "{skew_involutive}");
    assert!(nonzero > 10);
}

#[test]
fn element_route_on_fifty_skew_instances() {
    let maps: Vec<Endomorphism> = fixture_maps().into_iter().filter(|m| m.is_skew()).collect();
    assert!(maps.len() >= 6);
    for seed in 0..50u64 {
        let theta = random_theta(1000 + seed, 4).unwrap();
        let i = &maps[seed as usize % maps.len()];
        let lambda = i.square_scalar().unwrap();
        let f = hypercourant::courant::function_from_skew_endo(i).unwrap();
        let element = &theta.deform2(&f, &f).unwrap().theta().clone() - &theta.theta().scale(&lambda);
        let via = CourantStructure::new(element.scale(&hypercourant::rational::half())).unwrap();
        assert_eq!(via.bracket_tensor(), oracle_torsion(&theta, i), "seed {seed}");
    }
}

#[test]
fn composite_torsion_identity() {
    for (k, (i, j)) in anticommuting_pairs().iter().enumerate().take(8) {
        let theta = random_theta(k as u64, 4).unwrap();
        let ti = torsion(&theta, i);
        let tj = torsion(&theta, j);
        let half_side = |t: &TrilinearTensor, a: &Endomorphism| {
            t.precompose_left(a)
                .precompose_right(a)
                .sub(&t.precompose_left(a).add(&t.precompose_right(a)).post_compose(a))
                .sub(&t.post_compose(&a.square()))
        };
        let rhs = half_side(&ti, j).add(&half_side(&tj, i));
        let lhs = torsion(&theta, &i.compose(j)).scale(&int(2));
        assert_eq!(lhs, rhs, "pair {k}");
    }
}

#[test]
fn composite_of_nijenhuis_pair_is_nijenhuis() {
    let pairs = anticommuting_pairs();
    let (i, j) = &pairs[0];
    let fi = |t: &CourantStructure| torsion(t, i);
    let fj = |t: &CourantStructure| torsion(t, j);
    let sols = solve_linear(4, &[&fi, &fj]);
    assert!(!sols.is_empty());
    for th in structures(&sols) {
        assert!(torsion(&th, i).is_zero() && torsion(&th, j).is_zero());
        assert!(torsion(&th, &i.compose(j)).is_zero());
    }
}

#[test]
fn deformation_by_involution_preserves_nijenhuis_both_ways() {
    let maps = fixture_maps();
    let mut zero_cases = 0;
    let mut nonzero_cases = 0;
    for (k, i) in maps.iter().enumerate() {
        let lambda = i.square_scalar().expect("fixture maps square to scalars");
        assert!(!lambda.is_zero());
        // identity relating the two torsions
        let theta = random_theta(200 + k as u64, 4).unwrap();
        let t = torsion(&theta, i);
        let rhs = t.precompose_left(i).add(&t.precompose_right(i)).sub(&t.post_compose(i));
        assert_eq!(torsion_deformed(&theta, i, i), rhs);
        // the biconditional on a nonzero and a zero branch
        let a = t.is_zero();
        let b = torsion_deformed(&theta, i, i).is_zero();
        assert_eq!(a, b);
        nonzero_cases += usize::from(!a);
        if k < 4 {
            let f = |t: &CourantStructure| torsion(t, i);
            let sols = solve_linear(4, &[&f]);
            assert!(!sols.is_empty());
            for th in structures(&sols) {
                assert!(torsion(&th, i).is_zero());
                assert!(torsion_deformed(&th, i, i).is_zero());
                zero_cases += 1;
            }
        }
    }
    assert!(zero_cases > 0 && nonzero_cases > 0);
}

#[test]
fn vanishing_concomitant_transfers_torsion_both_ways() {
    let pairs = anticommuting_pairs();
    let mut both_zero = 0;
    for (i, j) in pairs.iter().take(6) {
        let c = |t: &CourantStructure| concomitant(t, i, j).unwrap();
        let sols = solve_linear(4, &[&c]);
        assert!(!sols.is_empty());
        for th in structures(&sols) {
            let c_t = concomitant(&th, i, j).unwrap();
            assert!(c_t.is_zero());
            let t = torsion(&th, j);
            let rhs = t
                .precompose_left(i)
                .add(&t.precompose_right(i))
                .add(&t.post_compose(i))
                .scale(&int(-1));
            assert_eq!(torsion_deformed(&th, i, j), rhs);
            let a = t.is_zero();
            let b = torsion_deformed(&th, i, j).is_zero();
            assert_eq!(a, b);
            both_zero += usize::from(a);
        }
    }
    assert!(both_zero > 0, "no instance with vanishing torsion");
}

#[test]
fn nijenhuis_anticommuting_pairs_have_vanishing_concomitant() {
    for (i, j) in anticommuting_pairs().iter().take(4) {
        let fi = |t: &CourantStructure| torsion(t, i);
        let fj = |t: &CourantStructure| torsion(t, j);
        let sols = solve_linear(4, &[&fi, &fj]);
        for th in structures(&sols) {
            let c = concomitant(&th, i, j).unwrap();
            let c_ij = concomitant(&th, i, &i.compose(j)).unwrap();
            assert_eq!(c_ij, c.post_compose(i));
            assert!(c.is_zero());
        }
    }
    // contrapositive on random data: a nonzero concomitant forces torsion
    let mut seen = 0;
    for (k, (i, j)) in anticommuting_pairs().iter().enumerate().take(6) {
        let th = random_theta(500 + k as u64, 4).unwrap();
        if !concomitant(&th, i, j).unwrap().is_zero() {
            seen += 1;
            assert!(!torsion(&th, i).is_zero() || !torsion(&th, j).is_zero());
        }
    }
    assert!(seen > 0);
}
