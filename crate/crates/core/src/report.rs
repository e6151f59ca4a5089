//! Verdict reports shared by every checker.

use std::fmt;

use crate::gca::GradedElement;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// Nothing to check on this instance; counts as a pass.
    Vacuous,
    /// Could not be evaluated; counts as a failure.
    Skipped,
    /// Recorded for information only; never affects the overall verdict.
    Info,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_ok(self) -> bool {
        matches!(self, Status::Pass | Status::Vacuous | Status::Info)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
            Status::Skipped => "skipped",
            Status::Info => "info",
        }
    }
}

/// Evidence attached to a failing (or informative) item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A nonzero element that should have vanished (or the offending value).
    Element(GradedElement),
    /// A single array entry: indices, expected value and value found.
    Entry {
        indices: Vec<usize>,
        expected: Rational,
        found: Rational,
    },
    Note(String),
}

impl Witness {
    pub(crate) fn entry(indices: Vec<usize>, expected: Rational, found: Rational) -> Self {
        Witness::Entry {
            indices,
            expected,
            found,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Element(e) => write!(f, "{e}"),
            Witness::Entry {
                indices,
                expected,
                found,
            } => write!(
                f,
                "at {:?}: expected {}, found {}",
                indices,
                rational::format(expected),
                rational::format(found)
            ),
            Witness::Note(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomVerdict {
    /// Stable identifier, e.g. `square.S1`.
    pub id: String,
    pub description: String,
    pub status: Status,
    pub witness: Option<Witness>,
}

impl AxiomVerdict {
    pub fn new(id: impl Into<String>, description: impl Into<String>, status: Status) -> Self {
        AxiomVerdict {
            id: id.into(),
            description: description.into(),
            status,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: Option<Witness>) -> Self {
        self.witness = w;
        self
    }

    pub fn passed(&self) -> bool {
        self.status.is_ok()
    }
}

/// Ordered list of verdicts. The report passes iff every item passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub title: String,
    pub items: Vec<AxiomVerdict>,
    pub classification: Option<String>,
}

impl CheckReport {
    pub fn new(title: impl Into<String>) -> Self {
        CheckReport {
            title: title.into(),
            items: Vec::new(),
            classification: None,
        }
    }

    pub fn push(&mut self, item: AxiomVerdict) {
        self.items.push(item);
    }

    /// Pushes a pass/fail item with an optional witness used only on failure.
    pub fn record(
        &mut self,
        id: impl Into<String>,
        description: impl Into<String>,
        ok: bool,
        witness: impl FnOnce() -> Option<Witness>,
    ) {
        let w = if ok { None } else { witness() };
        self.items
            .push(AxiomVerdict::new(id, description, Status::from_bool(ok)).with_witness(w));
    }

    /// Appends all items of `other`, prefixing their ids.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for mut item in other.items {
            item.id = format!("{prefix}.{}", item.id);
            self.items.push(item);
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(AxiomVerdict::passed)
    }

    pub fn item(&self, id: &str) -> Option<&AxiomVerdict> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomVerdict> {
        self.items.iter().filter(|i| !i.passed())
    }

    /// True when the item exists and passed.
    pub fn item_passed(&self, id: &str) -> bool {
        self.item(id).is_some_and(AxiomVerdict::passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, if self.passed() { "PASS" } else { "FAIL" })?;
        if let Some(c) = &self.classification {
            writeln!(f, "  classification: {c}")?;
        }
        for item in &self.items {
            write!(f, "  [{}] {} - {}", item.status.as_str(), item.id, item.description)?;
            if let Some(w) = &item.witness {
                write!(f, " ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Both sides of an equivalence, evaluated independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub name: String,
    pub left: CheckReport,
    pub right: CheckReport,
    /// Internal cross-checks; any failure here is a consistency problem, not
    /// a verdict on the instance.
    pub consistency: CheckReport,
}

impl EquivalenceReport {
    pub fn sides_agree(&self) -> bool {
        self.left.passed() == self.right.passed()
    }

    /// Sides agree and every internal cross-check passed.
    pub fn agree(&self) -> bool {
        self.sides_agree() && self.consistency.passed()
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: left {}, right {}, {}",
            self.name,
            if self.left.passed() { "holds" } else { "fails" },
            if self.right.passed() { "holds" } else { "fails" },
            if self.agree() { "agree" } else { "DISAGREE" }
        )?;
        write!(f, "{}{}{}", self.left, self.right, self.consistency)
    }
}
