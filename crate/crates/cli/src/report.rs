//! Machine-readable report documents.

use hypercourant::{CheckReport, EquivalenceReport, Witness};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::document::{render, terms_doc, Term, Q};
use crate::error::CliResult;

pub const TOOL: &str = "hypercourant";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessDoc {
    Element { terms: Vec<Term> },
    Entry { indices: Vec<usize>, expected: Q, found: Q },
    Note { text: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemDoc {
    pub id: String,
    pub status: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionDoc {
    pub name: String,
    pub title: String,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    pub items: Vec<ItemDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidesDoc {
    pub left: String,
    pub right: String,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// `sha256:` of the input file bytes.
    pub input_digest: String,
    pub verdict: String,
    pub exit_code: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<SidesDoc>,
    pub sections: Vec<SectionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock milliseconds; the only nondeterministic field.
    pub timing_ms: u64,
}

pub fn digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    let hex: String = h.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn witness_doc(w: &Witness) -> CliResult<WitnessDoc> {
    Ok(match w {
        Witness::Element(e) => WitnessDoc::Element { terms: terms_doc(e)? },
        Witness::Entry {
            indices,
            expected,
            found,
        } => WitnessDoc::Entry {
            indices: indices.clone(),
            expected: Q::from_rational(expected)?,
            found: Q::from_rational(found)?,
        },
        Witness::Note(s) => WitnessDoc::Note { text: s.clone() },
    })
}

fn verdict(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

pub fn section(name: &str, r: &CheckReport) -> CliResult<SectionDoc> {
    let items = r
        .items
        .iter()
        .map(|v| {
            Ok(ItemDoc {
                id: v.id.clone(),
                status: v.status.as_str().to_string(),
                description: v.description.clone(),
                witness: v.witness.as_ref().map(witness_doc).transpose()?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SectionDoc {
        name: name.to_string(),
        title: r.title.clone(),
        verdict: verdict(r.passed()),
        classification: r.classification.clone(),
        items,
    })
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, input: &[u8]) -> Self {
        ReportDocument {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.into(),
            input_digest: digest(input),
            verdict: String::new(),
            exit_code: 0,
            sides: None,
            sections: Vec::new(),
            notes: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn push(&mut self, name: &str, r: &CheckReport) -> CliResult<()> {
        self.sections.push(section(name, r)?);
        Ok(())
    }

    /// Verdict from the sections: exit 0 when all pass, 1 otherwise.
    pub fn conclude_checks(&mut self) {
        let ok = self.sections.iter().all(|s| s.verdict == "pass");
        self.verdict = verdict(ok);
        self.exit_code = if ok { 0 } else { 1 };
    }

    /// Exit 0 iff the two sides agree and the cross-checks pass.
    pub fn conclude_equivalence(&mut self, e: &EquivalenceReport) -> CliResult<()> {
        self.push("left", &e.left)?;
        self.push("right", &e.right)?;
        self.push("cross-checks", &e.consistency)?;
        let ok = e.agree();
        self.sides = Some(SidesDoc {
            left: verdict(e.left.passed()),
            right: verdict(e.right.passed()),
            agree: ok,
        });
        self.verdict = if ok { "agree" } else { "disagree" }.to_string();
        self.exit_code = if ok { 0 } else { 1 };
        Ok(())
    }

    pub fn to_json(&self) -> String {
        render(&serde_json::to_value(self).expect("report serializes"))
    }

    /// Human-readable form.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} :: {}\n", self.tool, self.version, self.command);
        out.push_str(&format!("input {}\n", self.input_digest));
        if let Some(s) = &self.sides {
            out.push_str(&format!("left {}, right {}\n", s.left, s.right));
        }
        for s in &self.sections {
            out.push_str(&format!("{}: {} ({})\n", s.name, s.verdict.to_uppercase(), s.title));
            if let Some(c) = &s.classification {
                out.push_str(&format!("  classification: {c}\n"));
            }
            for i in &s.items {
                out.push_str(&format!("  [{}] {} - {}", i.status, i.id, i.description));
                if let Some(w) = &i.witness {
                    out.push_str(&format!(" <{}>", witness_text(w)));
                }
                out.push('\n');
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!("verdict: {} (exit {})\n", self.verdict, self.exit_code));
        out
    }
}

fn q_text(q: &Q) -> String {
    if q.d == 1 {
        q.n.to_string()
    } else {
        format!("{}/{}", q.n, q.d)
    }
}

fn witness_text(w: &WitnessDoc) -> String {
    match w {
        WitnessDoc::Element { terms } => terms
            .iter()
            .map(|t| format!("{} {:?}{:?}", q_text(&t.coeff), t.up, t.down))
            .collect::<Vec<_>>()
            .join(" + "),
        WitnessDoc::Entry {
            indices,
            expected,
            found,
        } => {
            format!("at {indices:?}: expected {}, found {}", q_text(expected), q_text(found))
        }
        WitnessDoc::Note { text } => text.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypercourant::report::{AxiomVerdict, Status};

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn verdict_follows_sections() {
        let mut r = CheckReport::new("t");
        r.push(AxiomVerdict::new("a", "x", Status::Pass));
        let mut doc = ReportDocument::new("check", b"");
        doc.push("s", &r).unwrap();
        doc.conclude_checks();
        assert_eq!(doc.exit_code, 0);
        r.push(AxiomVerdict::new("b", "y", Status::Fail).with_witness(Some(Witness::Note("w".into()))));
        doc.push("s2", &r).unwrap();
        doc.conclude_checks();
        assert_eq!((doc.exit_code, doc.verdict.as_str()), (1, "fail"));
        assert!(doc.to_text().contains("<w>"));
        let back: ReportDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }
}
