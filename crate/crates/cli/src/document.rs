//! The JSON instance schema: parsing, validation and canonical emission.

use hypercourant::algebroid::{Bivector, FormTriple, LieStructure, Side, StructureConstants, TwoForm};
use hypercourant::{
    BasisSpec, Endomorphism, EpsilonTriple, GradedElement, HyperTriple, HyperkahlerQuad, Monomial, QMatrix, Rational,
    Z3,
};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Exact rational as an integer pair; `d` must be nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Q {
    pub n: i64,
    pub d: i64,
}

impl Q {
    pub fn to_rational(&self) -> CliResult<Rational> {
        if self.d == 0 {
            return Err(CliError::invalid("rational with zero denominator"));
        }
        Ok(hypercourant::rational::rat(self.n, self.d))
    }

    pub fn from_rational(q: &Rational) -> CliResult<Q> {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => Ok(Q { n, d }),
            _ => Err(CliError::invalid(format!(
                "value {q} does not fit in 64-bit integer pairs"
            ))),
        }
    }
}

pub type Matrix = Vec<Vec<Q>>;

/// One term `c · θ^{up} ξ_{down}`, indices zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub coeff: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaExtra {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Term>>,
}

/// `S₁, S₂, S₃` as `2d × 2d` matrices on `A ⊕ A*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSection {
    pub s1: Matrix,
    pub s2: Matrix,
    pub s3: Matrix,
}

/// `T₁, T₂, T₃` and `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperkahlerSection {
    pub t1: Matrix,
    pub t2: Matrix,
    pub t3: Matrix,
    pub g: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema_version: u32,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<[i64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<Vec<Vec<Q>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_structure_constants: Option<Vec<Vec<Vec<Q>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega2: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega3: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi1: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi2: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi3: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperkahler: Option<HyperkahlerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_extra: Option<ThetaExtra>,
}

impl InstanceDocument {
    pub fn empty(dim: usize) -> Self {
        InstanceDocument {
            schema_version: SCHEMA_VERSION,
            dim,
            epsilon: None,
            structure_constants: None,
            dual_structure_constants: None,
            omega1: None,
            omega2: None,
            omega3: None,
            pi1: None,
            pi2: None,
            pi3: None,
            triple: None,
            hyperkahler: None,
            theta_extra: None,
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| CliError::invalid(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    /// Canonical text: two-space indent, rows of a matrix on one line,
    /// trailing newline.
    pub fn emit(&self) -> String {
        let v = serde_json::to_value(self).expect("document serializes");
        render(&v)
    }

    fn omegas(&self) -> [&Option<Matrix>; 3] {
        [&self.omega1, &self.omega2, &self.omega3]
    }

    fn pis(&self) -> [&Option<Matrix>; 3] {
        [&self.pi1, &self.pi2, &self.pi3]
    }

    /// Drops every structure section (forms, triple, quadruple).
    pub fn clear_structure(&mut self) {
        self.omega1 = None;
        self.omega2 = None;
        self.omega3 = None;
        self.pi1 = None;
        self.pi2 = None;
        self.pi3 = None;
        self.triple = None;
        self.hyperkahler = None;
    }

    /// Writes the forms; `π_i` only where it is not `ω_i⁻¹`.
    pub fn set_forms(&mut self, t: &FormTriple) -> CliResult<()> {
        let mut w = Vec::new();
        let mut p = Vec::new();
        for i in Z3::all() {
            let omega = t.omega(i);
            w.push(Some(matrix_doc(omega.matrix())?));
            let inverse = omega.invert().ok();
            p.push(if inverse.as_ref() == Some(t.pi(i)) {
                None
            } else {
                Some(matrix_doc(t.pi(i).matrix())?)
            });
        }
        let mut w = w.into_iter();
        let mut p = p.into_iter();
        self.omega1 = w.next().flatten();
        self.omega2 = w.next().flatten();
        self.omega3 = w.next().flatten();
        self.pi1 = p.next().flatten();
        self.pi2 = p.next().flatten();
        self.pi3 = p.next().flatten();
        self.epsilon = Some(t.eps().values());
        Ok(())
    }

    /// Forms when every `S_i` has the block shape `[[0, επ], [ω, 0]]`,
    /// otherwise the raw triple.
    pub fn set_triple(&mut self, h: &HyperTriple) -> CliResult<()> {
        self.epsilon = Some(h.eps().values());
        if let Some(t) = forms_of(h) {
            return self.set_forms(&t);
        }
        let m = |i: Z3| matrix_doc(h.s(i).matrix());
        self.triple = Some(TripleSection {
            s1: m(Z3::ONE)?,
            s2: m(Z3::TWO)?,
            s3: m(Z3::THREE)?,
        });
        Ok(())
    }

    pub fn set_hyperkahler(&mut self, q: &HyperkahlerQuad) -> CliResult<()> {
        let m = |i: Z3| matrix_doc(q.t(i).matrix());
        self.hyperkahler = Some(HyperkahlerSection {
            t1: m(Z3::ONE)?,
            t2: m(Z3::TWO)?,
            t3: m(Z3::THREE)?,
            g: matrix_doc(q.g().matrix())?,
        });
        Ok(())
    }

    pub fn set_mu(&mut self, mu: &LieStructure) -> CliResult<()> {
        self.structure_constants = Some(constants_doc(&mu.constants())?);
        Ok(())
    }

    pub fn set_gamma(&mut self, gamma: &LieStructure) -> CliResult<()> {
        self.dual_structure_constants = Some(constants_doc(&gamma.constants())?);
        Ok(())
    }
}

fn forms_of(h: &HyperTriple) -> Option<FormTriple> {
    let basis = h.basis();
    let d = basis.dim();
    let mut omegas = Vec::new();
    let mut pis = Vec::new();
    for i in Z3::all() {
        let s = h.s(i).matrix();
        if !s.block(0, 0, d, d).is_zero() || !s.block(d, d, d, d).is_zero() {
            return None;
        }
        omegas.push(TwoForm::new(s.block(d, 0, d, d)).ok()?);
        pis.push(Bivector::new(s.block(0, d, d, d).scale(&h.eps().eps(i))).ok()?);
    }
    let omegas: [TwoForm; 3] = omegas.try_into().ok()?;
    let pis: [Bivector; 3] = pis.try_into().ok()?;
    FormTriple::new(basis, omegas, pis, h.eps()).ok()
}

pub fn matrix_doc(m: &QMatrix) -> CliResult<Matrix> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(Q::from_rational).collect())
        .collect()
}

fn constants_doc(c: &StructureConstants) -> CliResult<Vec<Vec<Vec<Q>>>> {
    c.to_nested()
        .iter()
        .map(|a| a.iter().map(|b| b.iter().map(Q::from_rational).collect()).collect())
        .collect()
}

pub fn terms_doc(e: &GradedElement) -> CliResult<Vec<Term>> {
    e.terms()
        .map(|(m, c)| {
            Ok(Term {
                up: m.up_indices(),
                down: m.down_indices(),
                coeff: Q::from_rational(c)?,
            })
        })
        .collect()
}

/// A validated document.
#[derive(Clone, Debug)]
pub struct Instance {
    pub basis: BasisSpec,
    pub eps: EpsilonTriple,
    pub mu: LieStructure,
    pub gamma: Option<LieStructure>,
    pub forms: Option<FormTriple>,
    pub triple: Option<HyperTriple>,
    pub hyperkahler: Option<HyperkahlerQuad>,
    pub psi: Option<GradedElement>,
    pub phi: Option<GradedElement>,
}

impl Instance {
    pub fn load(doc: &InstanceDocument, audit: bool) -> CliResult<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(CliError::invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        let d = doc.dim;
        let basis = BasisSpec::new(d).map_err(|e| CliError::invalid(e.to_string()))?;
        let eps = match doc.epsilon {
            None => EpsilonTriple::HYPER,
            Some(v) => EpsilonTriple::from_values(v)
                .ok_or_else(|| CliError::invalid(format!("epsilon entries must be 1 or -1, got {v:?}")))?,
        };
        let mu = match &doc.structure_constants {
            None => LieStructure::zero(&basis, Side::A),
            Some(c) => LieStructure::from_constants(&basis, &constants(c, d, "structure_constants")?)
                .map_err(|e| CliError::invalid(format!("structure_constants: {e}")))?,
        };
        let gamma = match &doc.dual_structure_constants {
            None => None,
            Some(c) => Some(
                LieStructure::dual_from_constants(&basis, &constants(c, d, "dual_structure_constants")?)
                    .map_err(|e| CliError::invalid(format!("dual_structure_constants: {e}")))?,
            ),
        };
        let given_forms = doc.omegas().iter().filter(|w| w.is_some()).count();
        let sections =
            usize::from(given_forms > 0) + usize::from(doc.triple.is_some()) + usize::from(doc.hyperkahler.is_some());
        if sections > 1 {
            return Err(CliError::invalid("give at most one of omega1..3, triple, hyperkahler"));
        }
        if given_forms > 0 && given_forms < 3 {
            return Err(CliError::invalid("omega1, omega2 and omega3 must be given together"));
        }
        if given_forms == 0 && doc.pis().iter().any(|p| p.is_some()) {
            return Err(CliError::invalid("pi1..3 given without omega1..3"));
        }
        let forms = if given_forms == 3 {
            let mut omegas = Vec::new();
            let mut pis = Vec::new();
            for (k, (w, p)) in doc.omegas().iter().zip(doc.pis()).enumerate() {
                let name = format!("omega{}", k + 1);
                let w = TwoForm::new(matrix(w.as_ref().expect("counted"), d, &name)?)
                    .map_err(|e| CliError::invalid(format!("{name}: {e}")))?;
                let p = match p {
                    Some(p) => Bivector::new(matrix(p, d, &format!("pi{}", k + 1))?)
                        .map_err(|e| CliError::invalid(format!("pi{}: {e}", k + 1)))?,
                    None => w
                        .invert()
                        .map_err(|_| CliError::invalid(format!("{name} is singular; supply pi{} explicitly", k + 1)))?,
                };
                omegas.push(w);
                pis.push(p);
            }
            let omegas: [TwoForm; 3] = omegas.try_into().expect("three");
            let pis: [Bivector; 3] = pis.try_into().expect("three");
            Some(FormTriple::new(&basis, omegas, pis, eps).map_err(|e| CliError::invalid(e.to_string()))?)
        } else {
            None
        };
        let triple = match (&forms, &doc.triple) {
            (Some(t), _) => Some(t.assemble().map_err(CliError::from_core)?),
            (None, Some(s)) => {
                let mut maps = Vec::new();
                for (k, m) in [&s.s1, &s.s2, &s.s3].into_iter().enumerate() {
                    let e = endomorphism(&basis, m, &format!("triple.s{}", k + 1))?;
                    if let Some((r, c)) = e.skew_violation() {
                        return Err(CliError::invalid(format!(
                            "triple.s{} is not skew with respect to the pairing at ({r}, {c})",
                            k + 1
                        )));
                    }
                    maps.push(e);
                }
                let maps: [Endomorphism; 3] = maps.try_into().expect("three");
                Some(HyperTriple::new(maps, eps).map_err(CliError::from_core)?)
            }
            (None, None) => None,
        };
        let hyperkahler = match &doc.hyperkahler {
            None => None,
            Some(s) => {
                let t = [
                    endomorphism(&basis, &s.t1, "hyperkahler.t1")?,
                    endomorphism(&basis, &s.t2, "hyperkahler.t2")?,
                    endomorphism(&basis, &s.t3, "hyperkahler.t3")?,
                ];
                let g = endomorphism(&basis, &s.g, "hyperkahler.g")?;
                Some(HyperkahlerQuad::new(t, g).map_err(CliError::from_core)?)
            }
        };
        let (mut psi, mut phi) = (None, None);
        if let Some(extra) = &doc.theta_extra {
            if !audit {
                return Err(CliError::invalid("theta_extra is accepted only with --audit"));
            }
            if let Some(ts) = &extra.psi {
                psi = Some(element(&basis, ts, "theta_extra.psi")?);
            }
            if let Some(ts) = &extra.phi {
                phi = Some(element(&basis, ts, "theta_extra.phi")?);
            }
        }
        Ok(Instance {
            basis,
            eps,
            mu,
            gamma,
            forms,
            triple,
            hyperkahler,
            psi,
            phi,
        })
    }

    /// `μ + γ`.
    pub fn theta(&self) -> GradedElement {
        match &self.gamma {
            Some(g) => self.mu.element() + g.element(),
            None => self.mu.element().clone(),
        }
    }

    pub fn gamma_or_zero(&self) -> LieStructure {
        self.gamma
            .clone()
            .unwrap_or_else(|| LieStructure::zero(&self.basis, Side::Dual))
    }

    pub fn require_forms(&self) -> CliResult<&FormTriple> {
        self.forms
            .as_ref()
            .ok_or_else(|| CliError::invalid("this command needs omega1..3"))
    }

    pub fn require_triple(&self) -> CliResult<&HyperTriple> {
        self.triple
            .as_ref()
            .ok_or_else(|| CliError::invalid("this command needs omega1..3 or a triple section"))
    }
}

fn rational(q: &Q, what: &str) -> CliResult<Rational> {
    q.to_rational()
        .map_err(|_| CliError::invalid(format!("{what}: zero denominator")))
}

fn matrix(m: &Matrix, d: usize, what: &str) -> CliResult<QMatrix> {
    if m.len() != d || m.iter().any(|r| r.len() != d) {
        return Err(CliError::invalid(format!("{what} must be {d}x{d}")));
    }
    let rows = m
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, q)| rational(q, &format!("{what}[{r}][{c}]")))
                .collect()
        })
        .collect::<CliResult<Vec<Vec<Rational>>>>()?;
    Ok(QMatrix::from_rows(rows).expect("square rows"))
}

fn endomorphism(basis: &BasisSpec, m: &Matrix, what: &str) -> CliResult<Endomorphism> {
    let q = matrix(m, basis.double_dim(), what)?;
    Endomorphism::new(basis, q).map_err(|e| CliError::invalid(format!("{what}: {e}")))
}

fn constants(c: &[Vec<Vec<Q>>], d: usize, what: &str) -> CliResult<StructureConstants> {
    if c.len() != d || c.iter().any(|a| a.len() != d || a.iter().any(|b| b.len() != d)) {
        return Err(CliError::invalid(format!("{what} must be {d}x{d}x{d}")));
    }
    let nested = c
        .iter()
        .map(|a| {
            a.iter()
                .map(|b| b.iter().map(|q| rational(q, what)).collect())
                .collect()
        })
        .collect::<CliResult<Vec<Vec<Vec<Rational>>>>>()?;
    StructureConstants::from_nested(&nested).map_err(|e| CliError::invalid(format!("{what}: {e}")))
}

fn element(basis: &BasisSpec, terms: &[Term], what: &str) -> CliResult<GradedElement> {
    let mut out = Vec::new();
    for t in terms {
        if t.up.iter().chain(&t.down).any(|&k| k >= basis.dim()) {
            return Err(CliError::invalid(format!("{what}: index out of range")));
        }
        let m = Monomial::from_indices(&t.up, &t.down)
            .ok_or_else(|| CliError::invalid(format!("{what}: repeated index in {:?}/{:?}", t.up, t.down)))?;
        let c = rational(&t.coeff, what)?;
        if !c.is_zero() {
            out.push((m, c));
        }
    }
    GradedElement::from_terms(basis, out).map_err(|e| CliError::invalid(format!("{what}: {e}")))
}

fn inline(v: &serde_json::Value) -> bool {
    use serde_json::Value;
    match v {
        Value::Object(m) => m.values().all(|x| !x.is_object() && !x.is_array()),
        Value::Array(a) => a.iter().all(|x| !x.is_array() && (!x.is_object() || inline(x))),
        _ => true,
    }
}

fn render_into(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    if inline(v) {
        out.push_str(&compact(v));
        return;
    }
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Object(m) => {
            out.push_str("{\n");
            for (k, (key, x)) in m.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(key).expect("string"));
                out.push_str(": ");
                render_into(x, indent + 1, out);
                out.push_str(if k + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (k, x) in a.iter().enumerate() {
                out.push_str(&pad);
                render_into(x, indent + 1, out);
                out.push_str(if k + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        _ => unreachable!("scalars are inline"),
    }
}

fn compact(v: &serde_json::Value) -> String {
    use serde_json::Value;
    match v {
        Value::Object(m) => {
            let parts: Vec<String> = m
                .iter()
                .map(|(k, x)| format!("{}: {}", serde_json::to_string(k).expect("string"), compact(x)))
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        Value::Array(a) => format!("[{}]", a.iter().map(compact).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Deterministic layout used for every emitted JSON document.
pub fn render(v: &serde_json::Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out.push('\n');
    out
}
