//! Black-box label access and idealized distribution oracles.

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::hypothesis::{FiniteClass, Hypothesis};
use crate::loss;
use crate::perturbation::Perturbation;
use crate::point::Point;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub x: Point,
    pub label: u8,
    pub index: usize,
}

/// Label oracle over a hidden hypothesis, with an optional query budget and
/// a full transcript. The only channel certifiers and adversaries get.
#[derive(Clone, Debug)]
pub struct LabelOracle {
    hidden: Hypothesis,
    budget: Option<usize>,
    transcript: Vec<(Point, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub queries_used: usize,
    pub transcript_hash: String,
}

impl LabelOracle {
    pub fn new(hidden: Hypothesis) -> Self {
        LabelOracle { hidden, budget: None, transcript: Vec::new() }
    }

    pub fn with_budget(hidden: Hypothesis, budget: usize) -> Self {
        LabelOracle { hidden, budget: Some(budget), transcript: Vec::new() }
    }

    pub fn query(&mut self, x: &Point) -> Result<bool> {
        if let Some(budget) = self.budget {
            if self.transcript.len() >= budget {
                return Err(Error::BudgetExhausted { budget });
            }
        }
        let label = self.hidden.eval(x)?;
        self.transcript.push((x.clone(), label));
        Ok(label)
    }

    pub fn used(&self) -> usize {
        self.transcript.len()
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    pub fn transcript(&self) -> &[(Point, bool)] {
        &self.transcript
    }

    /// Access to the hidden hypothesis, for ground-truth computations in
    /// harnesses. Certifiers and adversaries never call this.
    pub fn hidden(&self) -> &Hypothesis {
        &self.hidden
    }

    pub fn report(&self) -> OracleReport {
        OracleReport { queries_used: self.transcript.len(), transcript_hash: transcript_hash(&self.transcript) }
    }

    /// Writes the transcript as JSON lines `{x, label, index}`.
    pub fn export_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for (index, (x, label)) in self.transcript.iter().enumerate() {
            let entry = TranscriptEntry { x: x.clone(), label: *label as u8, index };
            serde_json::to_writer(&mut out, &entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// SHA-256 over the JSON-lines rendering of a transcript.
pub fn transcript_hash(transcript: &[(Point, bool)]) -> String {
    let mut hasher = Sha256::new();
    for (index, (x, label)) in transcript.iter().enumerate() {
        let entry = TranscriptEntry { x: x.clone(), label: *label as u8, index };
        hasher.update(serde_json::to_vec(&entry).expect("transcript entries serialize"));
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

// ---------------------------------------------------------------------------
// Distribution oracles

/// `P(err(h))`.
pub fn error_oracle(p: &DiscreteDistribution, h: &Hypothesis) -> Result<Rational> {
    loss::error_weight(h, p)
}

/// `P(mar_U(h))`.
pub fn margin_oracle(p: &DiscreteDistribution, u: &Perturbation, h: &Hypothesis) -> Result<Rational> {
    loss::margin_weight(h, p, u)
}

/// Weights of `mar(h)`, `h Δ h'` and `mar(h) ∩ (h Δ h')` under the marginal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedMargin {
    pub margin: Rational,
    pub disagreement: Rational,
    pub overlap: Rational,
}

impl ExtendedMargin {
    /// `P(mar(h) ∪ (h Δ h'))` by inclusion-exclusion.
    pub fn union(&self) -> Rational {
        &self.margin + &self.disagreement - &self.overlap
    }
}

pub fn extended_margin_oracle(
    p: &DiscreteDistribution,
    u: &Perturbation,
    h: &Hypothesis,
    other: &Hypothesis,
) -> Result<ExtendedMargin> {
    let mut margin = Rational::default();
    let mut disagreement = Rational::default();
    let mut overlap = Rational::default();
    for a in p.support() {
        let m = loss::margin_membership(h, &a.point, u)?;
        let d = h.eval(&a.point)? != other.eval(&a.point)?;
        if m {
            margin += &a.weight;
        }
        if d {
            disagreement += &a.weight;
        }
        if m && d {
            overlap += &a.weight;
        }
    }
    Ok(ExtendedMargin { margin, disagreement, overlap })
}

/// Distribution oracles restricted to one finite class; hypotheses outside
/// the class are refused.
#[derive(Clone, Debug)]
pub struct ClassOracle<'a> {
    class: &'a FiniteClass,
    dist: &'a DiscreteDistribution,
    perturbation: &'a Perturbation,
}

impl<'a> ClassOracle<'a> {
    pub fn new(class: &'a FiniteClass, dist: &'a DiscreteDistribution, perturbation: &'a Perturbation) -> Self {
        ClassOracle { class, dist, perturbation }
    }

    fn admit(&self, h: &Hypothesis) -> Result<()> {
        if self.class.contains(h) {
            Ok(())
        } else {
            Err(Error::NotInClass)
        }
    }

    pub fn error(&self, h: &Hypothesis) -> Result<Rational> {
        self.admit(h)?;
        error_oracle(self.dist, h)
    }

    pub fn margin(&self, h: &Hypothesis) -> Result<Rational> {
        self.admit(h)?;
        margin_oracle(self.dist, self.perturbation, h)
    }

    pub fn extended(&self, h: &Hypothesis, other: &Hypothesis) -> Result<ExtendedMargin> {
        self.admit(h)?;
        self.admit(other)?;
        extended_margin_oracle(self.dist, self.perturbation, h, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn budget_and_transcript() {
        let h = Hypothesis::threshold(q(1, 2));
        let mut o = LabelOracle::with_budget(h, 2);
        let x = Point::line(q(3, 4));
        assert!(o.query(&x).unwrap());
        assert!(o.query(&x).unwrap());
        assert_eq!(o.used(), 2);
        assert!(matches!(o.query(&x), Err(Error::BudgetExhausted { budget: 2 })));
        assert_eq!(o.report().queries_used, o.transcript().len());

        let mut z = LabelOracle::with_budget(Hypothesis::threshold(int(0)), 0);
        assert!(z.query(&x).is_err());
    }

    #[test]
    fn jsonl_export() {
        let mut o = LabelOracle::new(Hypothesis::threshold(q(1, 2)));
        o.query(&Point::line(q(1, 4))).unwrap();
        o.query(&Point::line(q(3, 4))).unwrap();
        let mut buf = Vec::new();
        o.export_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], r#"{"x":["3/4"],"label":1,"index":1}"#);
        let parsed: TranscriptEntry = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(parsed.label, 0);
    }

    #[test]
    fn hash_depends_on_transcript() {
        let mut a = LabelOracle::new(Hypothesis::threshold(q(1, 2)));
        let mut b = a.clone();
        a.query(&Point::line(q(1, 4))).unwrap();
        b.query(&Point::line(q(3, 4))).unwrap();
        assert_ne!(a.report().transcript_hash, b.report().transcript_hash);
    }
}
