//! The three document-driven commands.

use std::str::FromStr;
use std::time::Instant;

use clap::ValueEnum;
use hypercourant::algebroid::{build_phi, build_psi, check_eps_hyper_lie, check_hyper_with_torsion, theorem_suite};
use hypercourant::hyper::{
    check_eps_hypersymplectic, check_hyperkahler, from_hyperkahler, swap_structure, to_hyperkahler,
};
use hypercourant::report::Witness;
use hypercourant::{
    CheckReport, Classification, CourantStatus, CourantStructure, EpsilonTriple, GradedElement, Sign, TheoremInputs,
    TheoremKind, Z3,
};

use crate::document::{Instance, InstanceDocument};
use crate::error::{CliError, CliResult};
use crate::report::ReportDocument;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Hyper,
    HyperLie,
    Torsion,
    Hyperkahler,
    Courant,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Hyper => "hyper",
            Suite::HyperLie => "hyper-lie",
            Suite::Torsion => "torsion",
            Suite::Hyperkahler => "hyperkahler",
            Suite::Courant => "courant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    ToHyperkahler,
    FromHyperkahler,
    Swap(Vec<usize>),
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "to-hk" => Ok(Direction::ToHyperkahler),
            "from-hk" => Ok(Direction::FromHyperkahler),
            _ => {
                let digits = s
                    .strip_prefix("swap:")
                    .ok_or_else(|| format!("unknown direction `{s}` (to-hk, from-hk, swap:<pattern>)"))?;
                digits
                    .chars()
                    .map(|c| match c.to_digit(10) {
                        Some(k @ 1..=3) => Ok(k as usize),
                        _ => Err(format!("swap pattern `{digits}` may only use the digits 1, 2, 3")),
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map(Direction::Swap)
            }
        }
    }
}

impl Direction {
    pub fn name(&self) -> String {
        match self {
            Direction::ToHyperkahler => "to-hk".into(),
            Direction::FromHyperkahler => "from-hk".into(),
            Direction::Swap(p) => format!("swap:{}", p.iter().map(|k| k.to_string()).collect::<String>()),
        }
    }
}

/// A report plus, for `correspond`, the emitted document.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: ReportDocument,
    pub document: Option<String>,
}

fn load(input: &[u8], audit: bool) -> CliResult<(InstanceDocument, Instance)> {
    let text = std::str::from_utf8(input).map_err(|e| CliError::invalid(format!("input is not UTF-8: {e}")))?;
    let doc = InstanceDocument::parse(text)?;
    let inst = Instance::load(&doc, audit)?;
    Ok((doc, inst))
}

fn courant(e: GradedElement) -> CliResult<CourantStructure> {
    CourantStructure::new(e).map_err(CliError::from_core)
}

/// Compares `theta_extra` with the derived `ψ = ½{π₁,{π₁,μ}}` and `φ`.
fn audit_section(inst: &Instance) -> CliResult<Option<CheckReport>> {
    if inst.psi.is_none() && inst.phi.is_none() {
        return Ok(None);
    }
    let t = inst.require_forms()?;
    let mut r = CheckReport::new("audit of supplied psi/phi");
    if let Some(given) = &inst.psi {
        let derived = build_psi(&inst.mu, t.pi(Z3::ONE)).map_err(CliError::from_core)?;
        r.record(
            "psi",
            "supplied psi equals 1/2 {pi1, {pi1, mu}}",
            *given == derived,
            || Some(Witness::Element(&derived - given)),
        );
    }
    if let Some(given) = &inst.phi {
        let derived = build_phi(&inst.gamma_or_zero(), t.omega(Z3::ONE)).map_err(CliError::from_core)?;
        r.record(
            "phi",
            "supplied phi equals 1/2 {omega1, {omega1, gamma}}",
            *given == derived,
            || Some(Witness::Element(&derived - given)),
        );
    }
    Ok(Some(r))
}

fn finish(mut report: ReportDocument, start: Instant) -> ReportDocument {
    report.timing_ms = start.elapsed().as_millis() as u64;
    report
}

pub fn check(input: &[u8], suite: Suite, audit: bool) -> CliResult<Outcome> {
    let start = Instant::now();
    let (_, inst) = load(input, audit)?;
    let mut report = ReportDocument::new(format!("check --suite {}", suite.name()), input);
    let theta = courant(inst.theta())?;
    let core = |r: hypercourant::Result<CheckReport>| r.map_err(CliError::from_core);
    let main = match suite {
        Suite::Hyper => core(check_eps_hypersymplectic(&theta, inst.require_triple()?))?,
        Suite::HyperLie => core(check_eps_hyper_lie(&inst.mu, inst.require_forms()?))?,
        Suite::Torsion => core(check_hyper_with_torsion(&inst.mu, inst.require_forms()?))?,
        Suite::Hyperkahler => {
            let q = match &inst.hyperkahler {
                Some(q) => q.clone(),
                None => to_hyperkahler(inst.require_triple()?).map_err(CliError::from_core)?,
            };
            core(check_hyperkahler(&theta, &q))?
        }
        Suite::Courant => {
            let mut r = theta.axioms_pre_courant();
            let status = theta.is_courant();
            r.record("courant", "{Theta, Theta} = 0", status.is_courant(), || match status {
                CourantStatus::NotCourant(e) => Some(Witness::Element(e)),
                CourantStatus::Courant => None,
            });
            r
        }
    };
    report.push(suite.name(), &main)?;
    if audit {
        if let Some(a) = audit_section(&inst)? {
            report.push("audit", &a)?;
        }
    }
    report.conclude_checks();
    Ok(Outcome {
        report: finish(report, start),
        document: None,
    })
}

pub fn theorem(input: &[u8], kind: TheoremKind, audit: bool) -> CliResult<Outcome> {
    let start = Instant::now();
    let (_, inst) = load(input, audit)?;
    let mut report = ReportDocument::new(format!("theorem --theorem {}", kind.name()), input);
    let inputs = TheoremInputs {
        mu: inst.mu.clone(),
        gamma: inst.gamma.clone(),
        triple: inst.require_forms()?.clone(),
    };
    let e = theorem_suite(kind, &inputs).map_err(CliError::from_core)?;
    report.conclude_equivalence(&e)?;
    if audit {
        if let Some(a) = audit_section(&inst)? {
            let ok = a.passed();
            report.push("audit", &a)?;
            if !ok {
                report.exit_code = 1;
                report.verdict = "audit-mismatch".into();
            }
        }
    }
    Ok(Outcome {
        report: finish(report, start),
        document: None,
    })
}

fn require_product_minus(eps: EpsilonTriple) -> CliResult<()> {
    if eps.classify() == Classification::Other {
        return Err(CliError::invalid(format!(
            "signs {eps} have product +1: such triples are neither hypersymplectic nor para-hypersymplectic, \
             so there is no corresponding structure"
        )));
    }
    Ok(())
}

pub fn correspond(input: &[u8], direction: &Direction, audit: bool) -> CliResult<Outcome> {
    let start = Instant::now();
    let (doc, inst) = load(input, audit)?;
    let mut report = ReportDocument::new(format!("correspond --direction {}", direction.name()), input);
    let theta = courant(inst.theta())?;
    let mut out = doc.clone();
    out.clear_structure();
    match direction {
        Direction::ToHyperkahler => {
            let h = inst.require_triple()?;
            require_product_minus(h.eps())?;
            let q = to_hyperkahler(h).map_err(CliError::from_core)?;
            report.push(
                "hyperkahler",
                &check_hyperkahler(&theta, &q).map_err(CliError::from_core)?,
            )?;
            out.set_hyperkahler(&q)?;
        }
        Direction::FromHyperkahler => {
            let q = inst
                .hyperkahler
                .as_ref()
                .ok_or_else(|| CliError::invalid("from-hk needs a hyperkahler section"))?;
            let eps = match doc.epsilon {
                Some(_) => inst.eps,
                None => match q.flavour() {
                    Some(Sign::Plus) => EpsilonTriple::PARA,
                    _ => EpsilonTriple::HYPER,
                },
            };
            require_product_minus(eps)?;
            let h = from_hyperkahler(q, eps).map_err(CliError::from_core)?;
            report.push(
                "hyper",
                &check_eps_hypersymplectic(&theta, &h).map_err(CliError::from_core)?,
            )?;
            out.set_triple(&h)?;
        }
        Direction::Swap(pattern) => {
            let h = inst.require_triple()?;
            require_product_minus(h.eps())?;
            let s = swap_structure(h, pattern).map_err(CliError::from_core)?;
            report.push(
                "hyper",
                &check_eps_hypersymplectic(&theta, &s.triple).map_err(CliError::from_core)?,
            )?;
            report.notes.push(format!(
                "metric of the output is {} times the input metric",
                s.metric_sign
            ));
            out.set_triple(&s.triple)?;
        }
    }
    out.epsilon = doc.epsilon;
    report.conclude_checks();
    Ok(Outcome {
        report: finish(report, start),
        document: Some(out.emit()),
    })
}

/// Report for input that could not be processed.
pub fn invalid_report(command: &str, input: &[u8], e: &CliError) -> ReportDocument {
    let mut r = ReportDocument::new(command, input);
    r.verdict = if e.exit_code() == 2 { "invalid" } else { "error" }.into();
    r.exit_code = e.exit_code();
    r.notes.push(e.to_string());
    r
}
