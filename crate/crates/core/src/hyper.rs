//! ε-hypersymplectic triples on `(E, Θ)`: axioms, transition morphisms
//! `T_i`, the metric `G`, and the hyperkähler correspondence.

use std::fmt;
use std::ops::Neg;

use crate::courant::{
    concomitant, endo_from_function, function_from_skew_endo, nijenhuis_torsion, pairing_gram, CourantStructure,
    Endomorphism,
};
use crate::error::{Error, Result};
use crate::gca::{BasisSpec, GradedElement};
use crate::matrix::QMatrix;
use crate::rational::{half, int, Rational};
use crate::report::{AxiomVerdict, CheckReport, Status, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn rational(self) -> Rational {
        int(self.value())
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.times(Sign::Minus)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// An index in `Z₃`, displayed as `1`, `2` or `3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z3(u8);

impl Z3 {
    pub const ONE: Z3 = Z3(0);
    pub const TWO: Z3 = Z3(1);
    pub const THREE: Z3 = Z3(2);

    /// From a label in `1..=3`.
    pub fn new(label: usize) -> Option<Z3> {
        (1..=3).contains(&label).then(|| Z3((label - 1) as u8))
    }

    pub fn all() -> [Z3; 3] {
        [Z3::ONE, Z3::TWO, Z3::THREE]
    }

    pub fn label(self) -> usize {
        self.0 as usize + 1
    }

    /// Zero-based position.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn next(self) -> Z3 {
        self.shift(1)
    }

    pub fn prev(self) -> Z3 {
        self.shift(2)
    }

    pub fn shift(self, k: usize) -> Z3 {
        Z3(((self.0 as usize + k) % 3) as u8)
    }
}

impl fmt::Display for Z3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Hypersymplectic,
    /// `shift` is the cyclic relabelling `i ↦ i + shift` that brings the
    /// signs to `(1, 1, -1)`.
    ParaHypersymplectic {
        shift: usize,
    },
    Other,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Hypersymplectic => f.write_str("hypersymplectic"),
            Classification::ParaHypersymplectic { shift: 0 } => f.write_str("para-hypersymplectic"),
            Classification::ParaHypersymplectic { shift } => {
                write!(f, "para-hypersymplectic (normal form after cyclic shift by {shift})")
            }
            Classification::Other => f.write_str("other (sign product +1)"),
        }
    }
}

/// The signs `(ε₁, ε₂, ε₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EpsilonTriple([Sign; 3]);

impl EpsilonTriple {
    pub const HYPER: EpsilonTriple = EpsilonTriple([Sign::Minus, Sign::Minus, Sign::Minus]);
    pub const PARA: EpsilonTriple = EpsilonTriple([Sign::Plus, Sign::Plus, Sign::Minus]);

    pub fn new(e1: Sign, e2: Sign, e3: Sign) -> Self {
        EpsilonTriple([e1, e2, e3])
    }

    pub fn from_values(v: [i64; 3]) -> Option<Self> {
        Some(EpsilonTriple([
            Sign::from_i64(v[0])?,
            Sign::from_i64(v[1])?,
            Sign::from_i64(v[2])?,
        ]))
    }

    pub fn get(&self, i: Z3) -> Sign {
        self.0[i.index()]
    }

    /// `ε_i` as a rational.
    pub fn eps(&self, i: Z3) -> Rational {
        self.get(i).rational()
    }

    pub fn values(&self) -> [i64; 3] {
        self.0.map(Sign::value)
    }

    pub fn product(&self) -> Sign {
        self.0[0].times(self.0[1]).times(self.0[2])
    }

    /// `ε'_i = ε_{i+k}`.
    pub fn shifted(&self, k: usize) -> Self {
        EpsilonTriple(Z3::all().map(|i| self.get(i.shift(k))))
    }

    pub fn classify(&self) -> Classification {
        if *self == EpsilonTriple::HYPER {
            return Classification::Hypersymplectic;
        }
        if self.product() == Sign::Plus {
            return Classification::Other;
        }
        let shift = (0..3)
            .find(|&k| self.shifted(k) == EpsilonTriple::PARA)
            .expect("product -1 with a +1 entry has a normal form");
        Classification::ParaHypersymplectic { shift }
    }

    /// `(-1,-1,-1)` or `(1,1,-1)`.
    pub fn is_normal_form(&self) -> bool {
        *self == EpsilonTriple::HYPER || *self == EpsilonTriple::PARA
    }
}

impl fmt::Display for EpsilonTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

pub fn classify(eps: &EpsilonTriple) -> Classification {
    eps.classify()
}

/// Three endomorphisms `S₁, S₂, S₃` of `E` with their signs, and optional
/// degree-two function representatives. Equality ignores the
/// representatives.
#[derive(Clone, Debug)]
pub struct HyperTriple {
    s: [Endomorphism; 3],
    eps: EpsilonTriple,
    functions: Option<[GradedElement; 3]>,
}

impl PartialEq for HyperTriple {
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && self.eps == other.eps
    }
}

impl Eq for HyperTriple {}

impl HyperTriple {
    pub fn new(s: [Endomorphism; 3], eps: EpsilonTriple) -> Result<Self> {
        s[0].basis().ensure_same(s[1].basis())?;
        s[0].basis().ensure_same(s[2].basis())?;
        Ok(HyperTriple {
            s,
            eps,
            functions: None,
        })
    }

    /// `S_i = {·, f_i}`.
    pub fn from_functions(f: [GradedElement; 3], eps: EpsilonTriple) -> Result<Self> {
        let s = [
            endo_from_function(&f[0])?,
            endo_from_function(&f[1])?,
            endo_from_function(&f[2])?,
        ];
        let mut h = HyperTriple::new(s, eps)?;
        h.functions = Some(f);
        Ok(h)
    }

    pub fn basis(&self) -> &BasisSpec {
        self.s[0].basis()
    }

    pub fn s(&self, i: Z3) -> &Endomorphism {
        &self.s[i.index()]
    }

    pub fn endomorphisms(&self) -> &[Endomorphism; 3] {
        &self.s
    }

    pub fn eps(&self) -> EpsilonTriple {
        self.eps
    }

    pub fn classification(&self) -> Classification {
        self.eps.classify()
    }

    /// Function representative of `S_i`, stored or recovered from a skew `S_i`.
    pub fn function(&self, i: Z3) -> Result<GradedElement> {
        match &self.functions {
            Some(f) => Ok(f[i.index()].clone()),
            None => function_from_skew_endo(self.s(i)),
        }
    }

    /// Relabels `S'_i = S_{i+k}`, `ε'_i = ε_{i+k}`.
    pub fn shifted(&self, k: usize) -> HyperTriple {
        HyperTriple {
            s: Z3::all().map(|i| self.s(i.shift(k)).clone()),
            eps: self.eps.shifted(k),
            functions: self
                .functions
                .as_ref()
                .map(|f| Z3::all().map(|i| f[i.shift(k).index()].clone())),
        }
    }

    /// `T_i = ε_{i-1} S_{i-1} S_{i+1}`.
    pub fn transition(&self, i: Z3) -> Endomorphism {
        self.s(i.prev())
            .compose(self.s(i.next()))
            .scale(&self.eps.eps(i.prev()))
    }

    pub fn transitions(&self) -> [Endomorphism; 3] {
        Z3::all().map(|i| self.transition(i))
    }

    /// `G = S_{i+1} S_i S_{i-1}`, required to be independent of `i`.
    pub fn metric(&self) -> Result<Endomorphism> {
        let products: Vec<Endomorphism> = Z3::all()
            .iter()
            .map(|&i| self.s(i.next()).compose(self.s(i)).compose(self.s(i.prev())))
            .collect();
        for k in 1..3 {
            if products[k] != products[0] {
                return Err(Error::CyclicMismatch {
                    first: 1,
                    second: k + 1,
                });
            }
        }
        Ok(products.into_iter().next().expect("three products"))
    }
}

pub fn transition(h: &HyperTriple, i: Z3) -> Endomorphism {
    h.transition(i)
}

pub fn metric(h: &HyperTriple) -> Result<Endomorphism> {
    h.metric()
}

fn endo_witness(found: &Endomorphism, expected: &Endomorphism) -> Option<Witness> {
    found
        .first_difference(expected)
        .map(|(r, c, e, f)| Witness::entry(vec![r, c], e, f))
}

fn record_equal(r: &mut CheckReport, id: String, desc: String, found: &Endomorphism, expected: &Endomorphism) {
    let ok = found == expected;
    r.record(id, desc, ok, || endo_witness(found, expected));
}

fn twisted_pairs() -> [(Z3, Z3); 3] {
    [(Z3::ONE, Z3::TWO), (Z3::ONE, Z3::THREE), (Z3::TWO, Z3::THREE)]
}

/// Skewness, `S_i² = ε_i id` and `S_i S_j = ε₁ε₂ε₃ S_j S_i`.
pub fn algebraic_axioms(h: &HyperTriple) -> CheckReport {
    let mut r = CheckReport::new("algebraic axioms");
    let basis = h.basis();
    let eps = h.eps();
    for i in Z3::all() {
        let s = h.s(i);
        let viol = s.skew_violation();
        r.record(format!("skew.S{i}"), format!("S{i}* = -S{i}"), viol.is_none(), || {
            viol.map(|(a, b)| Witness::Note(format!("basis pair ({a}, {b})")))
        });
    }
    for i in Z3::all() {
        let expected = Endomorphism::scalar(basis, &eps.eps(i));
        record_equal(
            &mut r,
            format!("square.S{i}"),
            format!("S{i}^2 = eps{i} id"),
            &h.s(i).square(),
            &expected,
        );
    }
    let prod = eps.product().rational();
    for (i, j) in twisted_pairs() {
        let lhs = h.s(i).compose(h.s(j));
        let rhs = h.s(j).compose(h.s(i)).scale(&prod);
        record_equal(
            &mut r,
            format!("commute.S{i}S{j}"),
            format!("S{i}S{j} = e1e2e3 S{j}S{i}"),
            &lhs,
            &rhs,
        );
    }
    r
}

fn algebraic_ok(r: &CheckReport) -> bool {
    r.items
        .iter()
        .filter(|v| v.id.starts_with("skew.") || v.id.starts_with("square.") || v.id.starts_with("commute."))
        .all(AxiomVerdict::passed)
}

/// Checks a triple against `(E, Θ)`: skewness, squares, twisted
/// commutation, and `Θ_{S_i,S_i} = ε_i Θ` by both the element route and the
/// torsion route. When `S_i² = ε_i id` the two routes must agree; a
/// disagreement is a [`Error::Consistency`].
pub fn check_eps_hypersymplectic(theta: &CourantStructure, h: &HyperTriple) -> Result<CheckReport> {
    theta.basis().ensure_same(h.basis())?;
    let mut r = algebraic_axioms(h);
    r.title = "eps-hypersymplectic".into();
    let eps = h.eps();
    for i in Z3::all() {
        let s = h.s(i);
        let square_ok = r.item_passed(&format!("square.S{i}"));
        let deform_ok = if s.is_skew() {
            let f = h.function(i)?;
            let diff = &theta.deform2(&f, &f)?.theta().clone() - &theta.theta().scale(&eps.eps(i));
            let ok = diff.is_zero();
            r.record(
                format!("deformation.S{i}"),
                format!("Theta_(S{i},S{i}) = eps{i} Theta"),
                ok,
                || Some(Witness::Element(diff.clone())),
            );
            Some(ok)
        } else {
            r.push(AxiomVerdict::new(
                format!("deformation.S{i}"),
                format!("Theta_(S{i},S{i}) = eps{i} Theta (needs a skew S{i})"),
                Status::Skipped,
            ));
            None
        };
        let torsion = nijenhuis_torsion(theta, s)?;
        let torsion_ok = torsion.is_zero();
        r.record(
            format!("torsion.S{i}"),
            format!("torsion of S{i} vanishes"),
            torsion_ok,
            || torsion.nonzero_witness(),
        );
        if let (true, Some(d)) = (square_ok, deform_ok) {
            if d != torsion_ok {
                return Err(Error::Consistency(format!(
                    "S{i}: deformation route says {d}, torsion route says {torsion_ok}"
                )));
            }
        }
    }
    r.classification = Some(h.classification().to_string());
    Ok(r)
}

fn require_algebraic(h: &HyperTriple) -> Result<()> {
    let r = algebraic_axioms(h);
    if algebraic_ok(&r) {
        Ok(())
    } else {
        Err(Error::Precondition {
            what: "triple fails skewness, squares or twisted commutation".into(),
            report: Some(Box::new(r)),
        })
    }
}

/// Gram matrix of `(X, Y) ↦ ⟨A X, B Y⟩` on basis sections.
fn pairing_form(a: &Endomorphism, b: &Endomorphism) -> QMatrix {
    let k = pairing_gram(a.basis().dim());
    &(&a.matrix().transpose() * &k) * b.matrix()
}

fn matrix_witness(found: &QMatrix, expected: &QMatrix) -> Option<Witness> {
    found
        .diff_entries(expected)
        .first()
        .map(|(r, c, _)| Witness::entry(vec![*r, *c], expected.get(*r, *c).clone(), found.get(*r, *c).clone()))
}

/// Every identity relating `S_i`, `T_i` and `G` that follows from the
/// algebraic axioms, as exact matrix identities.
pub fn verify_structure_relations(h: &HyperTriple) -> Result<CheckReport> {
    require_algebraic(h)?;
    let basis = h.basis();
    let eps = h.eps();
    let e = |i: Z3| eps.eps(i);
    let prod = eps.product().rational();
    let id = Endomorphism::identity(basis);
    let t = h.transitions();
    let tt = |i: Z3| &t[i.index()];
    let s = |i: Z3| h.s(i);
    let mut r = CheckReport::new("structure relations");

    for i in Z3::all() {
        let (p, n) = (i.prev(), i.next());
        record_equal(
            &mut r,
            format!("transition.S{p}T{i}"),
            format!("S{p}T{i} = S{n}"),
            &s(p).compose(tt(i)),
            s(n),
        );
        record_equal(
            &mut r,
            format!("T{i}.transpose"),
            format!("T{i}* = e1e2e3 T{i}"),
            &tt(i).transpose(),
            &tt(i).scale(&prod),
        );
        record_equal(
            &mut r,
            format!("T{i}.square"),
            format!("T{i}^2 = eps{i} id"),
            &tt(i).square(),
            &id.scale(&e(i)),
        );
        let lhs = tt(p).compose(tt(n));
        record_equal(
            &mut r,
            format!("T{p}T{n}.product"),
            format!("T{p}T{n} = eps{i} T{i}"),
            &lhs,
            &tt(i).scale(&e(i)),
        );
        record_equal(
            &mut r,
            format!("T{p}T{n}.twisted"),
            format!("T{p}T{n} = e1e2e3 T{n}T{p}"),
            &lhs,
            &tt(n).compose(tt(p)).scale(&prod),
        );
    }
    let t321 = tt(Z3::THREE).compose(tt(Z3::TWO)).compose(tt(Z3::ONE));
    let t123 = tt(Z3::ONE).compose(tt(Z3::TWO)).compose(tt(Z3::THREE));
    record_equal(&mut r, "T3T2T1".into(), "T3T2T1 = id".into(), &t321, &id);
    record_equal(
        &mut r,
        "T1T2T3".into(),
        "e1e2e3 T1T2T3 = id".into(),
        &t123.scale(&prod),
        &id,
    );

    let g = match h.metric() {
        Ok(g) => {
            r.record("G.cyclic", "S3S2S1 = S1S3S2 = S2S1S3", true, || None);
            g
        }
        Err(err) => {
            r.push(
                AxiomVerdict::new("G.cyclic", "S3S2S1 = S1S3S2 = S2S1S3", Status::Fail)
                    .with_witness(Some(Witness::Note(err.to_string()))),
            );
            return Ok(r);
        }
    };
    record_equal(
        &mut r,
        "G.transpose".into(),
        "G* = -e1e2e3 G".into(),
        &g.transpose(),
        &g.scale(&-&prod),
    );
    record_equal(&mut r, "G.square".into(), "G^2 = id".into(), &g.square(), &id);

    for i in Z3::all() {
        let (p, n) = (i.prev(), i.next());
        let ep = e(p);
        let epi = &e(p) * &e(i);
        record_equal(
            &mut r,
            format!("T{i}S{i}"),
            format!("T{i}S{i} = eps{p} G"),
            &tt(i).compose(s(i)),
            &g.scale(&ep),
        );
        record_equal(
            &mut r,
            format!("S{i}T{i}"),
            format!("S{i}T{i} = eps{p} G"),
            &s(i).compose(tt(i)),
            &g.scale(&ep),
        );
        record_equal(
            &mut r,
            format!("GS{i}"),
            format!("GS{i} = eps{p}eps{i} T{i}"),
            &g.compose(s(i)),
            &tt(i).scale(&epi),
        );
        record_equal(
            &mut r,
            format!("S{i}G"),
            format!("S{i}G = eps{p}eps{i} T{i}"),
            &s(i).compose(&g),
            &tt(i).scale(&epi),
        );
        record_equal(
            &mut r,
            format!("GT{i}"),
            format!("GT{i} = eps{p}eps{i} S{i}"),
            &g.compose(tt(i)),
            &s(i).scale(&epi),
        );
        record_equal(
            &mut r,
            format!("T{i}G"),
            format!("T{i}G = eps{p}eps{i} S{i}"),
            &tt(i).compose(&g),
            &s(i).scale(&epi),
        );
        // j = i - 1 gives S_{i+1}; j = i + 1 gives ε_i S_{i-1}
        for (j, expected) in [(p, s(n).clone()), (n, s(p).scale(&e(i)))] {
            record_equal(
                &mut r,
                format!("S{j}T{i}"),
                format!("S{j}T{i} expansion"),
                &s(j).compose(tt(i)),
                &expected,
            );
            record_equal(
                &mut r,
                format!("T{i}S{j}"),
                format!("e1e2e3 T{i}S{j} expansion"),
                &tt(i).compose(s(j)).scale(&prod),
                &expected,
            );
        }
        let lhs = pairing_form(&g.compose(tt(i)), tt(i));
        let rhs = pairing_form(&g, &id).scale(&(&e(p) * &e(n)));
        let w = matrix_witness(&lhs, &rhs);
        r.record(
            format!("pairing.T{i}"),
            format!("<GT{i}X, T{i}Y> = eps{p}eps{n} <GX, Y> on basis pairs"),
            w.is_none(),
            || w,
        );
    }
    r.classification = Some(h.classification().to_string());
    Ok(r)
}

/// Symmetric and orthogonal. The equivalent form "symmetric and `G² = id`"
/// is computed too and must agree.
pub fn is_pseudo_metric(g: &Endomorphism) -> bool {
    let sym = g.is_symmetric();
    let orth = sym && g.is_orthogonal();
    let square = sym && g.square().is_identity();
    debug_assert_eq!(orth, square);
    orth
}

/// `⟨G u, u⟩ > 0` for `u ≠ 0`, by leading principal minors.
pub fn is_positive_definite(g: &Endomorphism) -> bool {
    let gram = pairing_form(g, &Endomorphism::identity(g.basis()));
    let sym = (&gram + &gram.transpose()).scale(&half());
    sym.is_positive_definite()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HermitianKind {
    Hermitian,
    ParaHermitian,
    Neither,
}

/// `torsion = None` skips the integrability part of "complex".
fn hermitian_kind(torsion_zero: Option<bool>, j: &Endomorphism, g: &Endomorphism) -> Result<HermitianKind> {
    let lambda = j.square_scalar();
    let minus = int(-1);
    let plus = int(1);
    let integrable = torsion_zero.unwrap_or(true);
    if !integrable || !is_pseudo_metric(g) {
        return Ok(HermitianKind::Neither);
    }
    let lhs = pairing_form(&g.compose(j), j);
    let rhs = pairing_form(g, &Endomorphism::identity(g.basis()));
    let kind = match &lambda {
        Some(l) if *l == minus && lhs == rhs => HermitianKind::Hermitian,
        Some(l) if *l == plus && lhs == -&rhs => HermitianKind::ParaHermitian,
        _ => HermitianKind::Neither,
    };
    if j.is_skew() && (lambda == Some(minus) || lambda == Some(plus)) {
        let via_commute = g.commutes_with(j);
        if via_commute != (kind != HermitianKind::Neither) {
            return Err(Error::Consistency(
                "pairing condition and GJ = JG disagree for a skew (para-)complex J".into(),
            ));
        }
    }
    Ok(kind)
}

/// Hermitian when `J² = -id`, `J` Nijenhuis, `G` a pseudo-metric and
/// `⟨GJX, JY⟩ = ⟨GX, Y⟩`; para-hermitian with `J² = id` and the opposite sign.
pub fn is_hermitian_pair(theta: &CourantStructure, j: &Endomorphism, g: &Endomorphism) -> Result<HermitianKind> {
    let torsion_zero = nijenhuis_torsion(theta, j)?.is_zero();
    hermitian_kind(Some(torsion_zero), j, g)
}

/// `(T₁, T₂, T₃, G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperkahlerQuad {
    t: [Endomorphism; 3],
    g: Endomorphism,
}

impl HyperkahlerQuad {
    pub fn new(t: [Endomorphism; 3], g: Endomorphism) -> Result<Self> {
        for x in &t {
            g.basis().ensure_same(x.basis())?;
        }
        Ok(HyperkahlerQuad { t, g })
    }

    pub fn t(&self, i: Z3) -> &Endomorphism {
        &self.t[i.index()]
    }

    pub fn transitions(&self) -> &[Endomorphism; 3] {
        &self.t
    }

    pub fn g(&self) -> &Endomorphism {
        &self.g
    }

    pub fn basis(&self) -> &BasisSpec {
        self.g.basis()
    }

    /// `-1` for the hyperkähler flavour, `+1` for para, from `T₁²`.
    pub fn flavour(&self) -> Option<Sign> {
        let l = self.t(Z3::ONE).square_scalar()?;
        if l == int(-1) {
            Some(Sign::Minus)
        } else if l == int(1) {
            Some(Sign::Plus)
        } else {
            None
        }
    }
}

fn hyperkahler_report(theta: Option<&CourantStructure>, q: &HyperkahlerQuad) -> Result<CheckReport> {
    if let Some(th) = theta {
        th.basis().ensure_same(q.basis())?;
    }
    let mut r = CheckReport::new("hyperkahler");
    let flavour = q.flavour();
    let lambda = flavour.unwrap_or(Sign::Minus).rational();
    let expected_kind = match flavour {
        Some(Sign::Plus) => HermitianKind::ParaHermitian,
        _ => HermitianKind::Hermitian,
    };
    let g = q.g();
    let id = Endomorphism::identity(q.basis());
    let torsion_zero = |e: &Endomorphism| -> Result<Option<bool>> {
        match theta {
            Some(th) => Ok(Some(nijenhuis_torsion(th, e)?.is_zero())),
            None => Ok(None),
        }
    };

    r.record(
        "pseudo-metric",
        "G symmetric and orthogonal",
        is_pseudo_metric(g),
        || None,
    );
    let mut t_torsion = Vec::new();
    for j in [Z3::ONE, Z3::TWO] {
        let t = q.t(j);
        record_equal(
            &mut r,
            format!("T{j}.square"),
            format!("T{j}^2 = {} id", crate::rational::format(&lambda)),
            &t.square(),
            &id.scale(&lambda),
        );
        let tz = torsion_zero(t)?;
        if let Some(z) = tz {
            r.record(
                format!("T{j}.nijenhuis"),
                format!("torsion of T{j} vanishes"),
                z,
                || None,
            );
        }
        t_torsion.push(tz);
    }
    r.record(
        "anticommute.T1T2",
        "T1T2 = -T2T1",
        q.t(Z3::ONE).anticommutes_with(q.t(Z3::TWO)),
        || None,
    );
    record_equal(
        &mut r,
        "T3=T1T2".into(),
        "T3 = T1T2".into(),
        q.t(Z3::THREE),
        &q.t(Z3::ONE).compose(q.t(Z3::TWO)),
    );
    for (k, j) in [Z3::ONE, Z3::TWO].into_iter().enumerate() {
        let kind = hermitian_kind(t_torsion[k], q.t(j), g)?;
        r.record(
            format!("pair.G,T{j}"),
            format!("(T{j}, G) is a {}", kind_name(expected_kind)),
            kind == expected_kind,
            || Some(Witness::Note(format!("found {}", kind_name(kind)))),
        );
    }
    if let Some(theta) = theta {
        for j in Z3::all() {
            let gt = g.compose(q.t(j));
            let tor = nijenhuis_torsion(theta, &gt)?;
            r.record(
                format!("torsion.GT{j}"),
                format!("torsion of GT{j} vanishes"),
                tor.is_zero(),
                || tor.nonzero_witness(),
            );
        }
    }
    let t3_kind = hermitian_kind(torsion_zero(q.t(Z3::THREE))?, q.t(Z3::THREE), g)?;
    r.record(
        "consequence.pair.G,T3",
        "(T3, G) is a hermitian pair",
        t3_kind == HermitianKind::Hermitian,
        || Some(Witness::Note(format!("found {}", kind_name(t3_kind)))),
    );
    for (a, b) in [(Z3::ONE, Z3::THREE), (Z3::TWO, Z3::THREE)] {
        r.record(
            format!("consequence.anticommute.T{a}T{b}"),
            format!("T{a}T{b} = -T{b}T{a}"),
            q.t(a).anticommutes_with(q.t(b)),
            || None,
        );
    }
    for j in Z3::all() {
        let skew = q.t(j).is_skew();
        r.push(AxiomVerdict::new(
            format!("info.T{j}.skew"),
            format!("T{j} is skew: {skew}"),
            Status::Info,
        ));
    }
    r.classification = Some(match flavour {
        Some(Sign::Minus) => "hyperkahler".into(),
        Some(Sign::Plus) => "para-hyperkahler".into(),
        None => "undetermined (T1^2 is not +-id)".into(),
    });
    Ok(r)
}

fn kind_name(k: HermitianKind) -> &'static str {
    match k {
        HermitianKind::Hermitian => "hermitian pair",
        HermitianKind::ParaHermitian => "para-hermitian pair",
        HermitianKind::Neither => "neither",
    }
}

/// All hyperkähler (or para-hyperkähler) axioms on `(E, Θ)`; the flavour is
/// read off `T₁²`. Skewness of each `T_j` is recorded for information.
pub fn check_hyperkahler(theta: &CourantStructure, q: &HyperkahlerQuad) -> Result<CheckReport> {
    hyperkahler_report(Some(theta), q)
}

fn require_normal(eps: &EpsilonTriple) -> Result<()> {
    if eps.product() == Sign::Plus {
        return Err(Error::ProductPlusOne);
    }
    if !eps.is_normal_form() {
        return Err(Error::NotNormalForm);
    }
    Ok(())
}

/// `(T₁, T₂, T₃, G)` from a triple with signs `(-1,-1,-1)` or `(1,1,-1)`.
pub fn to_hyperkahler(h: &HyperTriple) -> Result<HyperkahlerQuad> {
    require_normal(&h.eps())?;
    require_algebraic(h)?;
    HyperkahlerQuad::new(h.transitions(), h.metric()?)
}

/// `S_i = ε_i ε_{i-1} G T_i`.
pub fn from_hyperkahler(q: &HyperkahlerQuad, eps: EpsilonTriple) -> Result<HyperTriple> {
    require_normal(&eps)?;
    let r = hyperkahler_report(None, q)?;
    let expected = if eps == EpsilonTriple::HYPER {
        Sign::Minus
    } else {
        Sign::Plus
    };
    if !r.passed() || q.flavour() != Some(expected) {
        return Err(Error::Precondition {
            what: format!("quadruple is not a matching hyperkahler structure for signs {eps}"),
            report: Some(Box::new(r)),
        });
    }
    let s = Z3::all().map(|i| q.g().compose(q.t(i)).scale(&(&eps.eps(i) * &eps.eps(i.prev()))));
    HyperTriple::new(s, eps)
}

/// Output of [`swap_structure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapOutcome {
    pub triple: HyperTriple,
    /// `G' = sign · G`.
    pub metric_sign: Sign,
}

/// Replaces `S_j` by `T_j` for `j` in `pattern`, which must be one of
/// `{}`, `{2,3}`, `{1,3}`, `{1,2}`.
pub fn swap_structure(h: &HyperTriple, pattern: &[usize]) -> Result<SwapOutcome> {
    let mut p = pattern.to_vec();
    p.sort_unstable();
    p.dedup();
    if !matches!(p.as_slice(), [] | [2, 3] | [1, 3] | [1, 2]) {
        return Err(Error::UnsupportedSwapPattern(pattern.to_vec()));
    }
    if h.eps().product() == Sign::Plus {
        return Err(Error::ProductPlusOne);
    }
    require_algebraic(h)?;
    let g = h.metric()?;
    let s = Z3::all().map(|i| {
        if p.contains(&i.label()) {
            h.transition(i)
        } else {
            h.s(i).clone()
        }
    });
    let triple = if p.is_empty() {
        h.clone()
    } else {
        HyperTriple::new(s, h.eps())?
    };
    let check = algebraic_axioms(&triple);
    if !algebraic_ok(&check) {
        return Err(Error::Consistency(format!(
            "swapped triple {p:?} fails the algebraic axioms"
        )));
    }
    let g2 = triple.metric()?;
    let metric_sign = if g2 == g {
        Sign::Plus
    } else if g2 == -&g {
        Sign::Minus
    } else {
        return Err(Error::Consistency("swapped metric is neither G nor -G".into()));
    };
    Ok(SwapOutcome { triple, metric_sign })
}

/// Runs [`check_eps_hypersymplectic`] on `Θ` and on the six deformations
/// `Θ_{S_i}`, `Θ_{T_j}`; the item `agreement` records whether all seven
/// verdicts coincide.
pub fn check_deformed(h: &HyperTriple, theta: &CourantStructure) -> Result<CheckReport> {
    if h.eps().product() == Sign::Plus {
        return Err(Error::ProductPlusOne);
    }
    let mut r = CheckReport::new("deformed structures");
    let original = check_eps_hypersymplectic(theta, h)?;
    let mut verdicts = vec![original.passed()];
    r.absorb("original", original);
    let mut deformers: Vec<(String, Result<GradedElement>)> = Vec::new();
    for i in Z3::all() {
        deformers.push((format!("Theta_S{i}"), h.function(i)));
    }
    for j in Z3::all() {
        deformers.push((format!("Theta_T{j}"), function_from_skew_endo(&h.transition(j))));
    }
    for (name, f) in deformers {
        match f {
            Ok(f) => {
                let deformed = theta.deform(&f)?;
                let sub = check_eps_hypersymplectic(&deformed, h)?;
                verdicts.push(sub.passed());
                r.absorb(&name, sub);
            }
            Err(err) => {
                verdicts.push(false);
                r.push(
                    AxiomVerdict::new(name, "deformation needs a skew endomorphism", Status::Skipped)
                        .with_witness(Some(Witness::Note(err.to_string()))),
                );
            }
        }
    }
    let agree = verdicts.iter().all(|&v| v == verdicts[0]);
    r.record("agreement", "all seven verdicts coincide", agree, || {
        Some(Witness::Note(format!("{verdicts:?}")))
    });
    r.classification = Some(h.classification().to_string());
    Ok(r)
}

/// Each `T_i` is Nijenhuis, complex when `ε_i = -1` and para-complex when
/// `ε_i = 1`.
pub fn check_transition_morphisms(theta: &CourantStructure, h: &HyperTriple) -> Result<CheckReport> {
    let mut r = CheckReport::new("transition morphisms");
    for i in Z3::all() {
        let t = h.transition(i);
        let tor = nijenhuis_torsion(theta, &t)?;
        r.record(
            format!("T{i}.nijenhuis"),
            format!("torsion of T{i} vanishes"),
            tor.is_zero(),
            || tor.nonzero_witness(),
        );
        let want = h.eps().eps(i);
        let kind = if h.eps().get(i) == Sign::Minus {
            "complex"
        } else {
            "para-complex"
        };
        record_equal(
            &mut r,
            format!("T{i}.{kind}"),
            format!("T{i}^2 = eps{i} id ({kind})"),
            &t.square(),
            &Endomorphism::scalar(h.basis(), &want),
        );
    }
    Ok(r)
}

/// `(S_i,S_j)`, `(T_i,T_j)`, `(S_i,T_j)`, `i ≠ j`: anti-commuting
/// Nijenhuis morphisms with vanishing concomitant.
pub fn check_nijenhuis_pairs(theta: &CourantStructure, h: &HyperTriple) -> Result<CheckReport> {
    let mut r = CheckReport::new("nijenhuis pairs");
    let t = h.transitions();
    let mut named: Vec<(String, &Endomorphism)> = Vec::new();
    for i in Z3::all() {
        named.push((format!("S{i}"), h.s(i)));
    }
    for i in Z3::all() {
        named.push((format!("T{i}"), &t[i.index()]));
    }
    let mut nijenhuis = Vec::new();
    for (name, e) in &named {
        let z = nijenhuis_torsion(theta, e)?.is_zero();
        r.record(
            format!("{name}.nijenhuis"),
            format!("torsion of {name} vanishes"),
            z,
            || None,
        );
        nijenhuis.push(z);
    }
    for a in 0..6 {
        for b in (a + 1)..6 {
            // same index across the S and T families is not a pair
            if a % 3 == b % 3 {
                continue;
            }
            let (na, ea) = &named[a];
            let (nb, eb) = &named[b];
            r.record(
                format!("anticommute.{na}{nb}"),
                format!("{na}{nb} = -{nb}{na}"),
                ea.anticommutes_with(eb),
                || None,
            );
            let c = concomitant(theta, ea, eb)?;
            r.record(
                format!("concomitant.{na}{nb}"),
                format!("C({na}, {nb}) = 0"),
                c.is_zero(),
                || c.nonzero_witness(),
            );
        }
    }
    Ok(r)
}
