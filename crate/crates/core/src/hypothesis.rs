//! Hypotheses and hypothesis classes.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{Point, PointKind};
use crate::rational::{self, Rational};

/// A binary classifier.
///
/// * `Tabular`: an explicit label map, defined only on its keys.
/// * `Threshold`: on the line, `1{x >= t}` when `upward`, else `1{x < t}`.
/// * `Halfspace`: in the plane, label 1 iff `w.x + b >= 0`.
/// * `Singleton`: `1{x = p}`, defined everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HypothesisRepr", into = "HypothesisRepr")]
pub enum Hypothesis {
    Tabular(BTreeMap<Point, bool>),
    Threshold { t: Rational, upward: bool },
    Halfspace { w: (Rational, Rational), b: Rational },
    Singleton(Point),
}

impl Hypothesis {
    pub fn tabular(entries: impl IntoIterator<Item = (Point, bool)>) -> Self {
        Hypothesis::Tabular(entries.into_iter().collect())
    }

    /// Tabular indicator of `ones` over `domain`.
    pub fn indicator(domain: &[Point], ones: &[Point]) -> Self {
        Hypothesis::tabular(domain.iter().map(|p| (p.clone(), ones.contains(p))))
    }

    pub fn constant(domain: &[Point], label: bool) -> Self {
        Hypothesis::tabular(domain.iter().map(|p| (p.clone(), label)))
    }

    /// `1{x >= t}`.
    pub fn threshold(t: Rational) -> Self {
        Hypothesis::Threshold { t, upward: true }
    }

    pub fn halfspace(w0: Rational, w1: Rational, b: Rational) -> Result<Self> {
        if w0.is_zero() && w1.is_zero() {
            return Err(Error::InvalidHypothesis("halfspace normal must be nonzero".into()));
        }
        Ok(Hypothesis::Halfspace { w: (w0, w1), b })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Hypothesis::Tabular(_) => "tabular",
            Hypothesis::Threshold { .. } => "threshold",
            Hypothesis::Halfspace { .. } => "halfspace",
            Hypothesis::Singleton(_) => "singleton",
        }
    }

    pub fn eval(&self, x: &Point) -> Result<bool> {
        match self {
            Hypothesis::Tabular(map) => {
                map.get(x).copied().ok_or_else(|| Error::PointOutsideDomain(Box::new(x.clone())))
            }
            Hypothesis::Threshold { t, upward } => {
                let v = x.as_line().ok_or_else(|| Error::PointOutsideDomain(Box::new(x.clone())))?;
                Ok((v >= t) == *upward)
            }
            Hypothesis::Halfspace { .. } => {
                let s = self.score(x).ok_or_else(|| Error::PointOutsideDomain(Box::new(x.clone())))?;
                Ok(s >= Rational::zero())
            }
            Hypothesis::Singleton(p) => Ok(x == p),
        }
    }

    /// `w.x + b` for a halfspace evaluated at a planar point.
    pub fn score(&self, x: &Point) -> Option<Rational> {
        match (self, x) {
            (Hypothesis::Halfspace { w, b }, Point::Plane(x0, x1)) => Some(&w.0 * x0 + &w.1 * x1 + b),
            _ => None,
        }
    }

    /// The 1-preimage restricted to `points`.
    pub fn positives<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Result<Vec<&'a Point>> {
        let mut out = Vec::new();
        for p in points {
            if self.eval(p)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Labels on `domain`, in order.
    pub fn restrict(&self, domain: &[Point]) -> Result<Vec<bool>> {
        domain.iter().map(|p| self.eval(p)).collect()
    }
}

/// A named member of a finite class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub name: String,
    pub hypothesis: Hypothesis,
}

/// A finite hypothesis class, duplicate-free on its declared domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteClass {
    members: Vec<Member>,
}

impl FiniteClass {
    /// Builds a class and checks that tabular members are total on `domain`
    /// and that no two members agree on every point of `domain`.
    pub fn new(members: Vec<Member>, domain: &[Point]) -> Result<Self> {
        let mut seen: Vec<(Vec<bool>, &str)> = Vec::with_capacity(members.len());
        for m in &members {
            let labels = m
                .hypothesis
                .restrict(domain)
                .map_err(|e| Error::InvalidHypothesis(format!("member {}: {e}", m.name)))?;
            if let Some((_, other)) = seen.iter().find(|(l, _)| *l == labels) {
                return Err(Error::InvalidHypothesis(format!(
                    "members {other} and {} agree on the whole domain",
                    m.name
                )));
            }
            seen.push((labels, &m.name));
        }
        Ok(FiniteClass { members })
    }

    /// Builds a class without the domain checks. Used for families generated
    /// programmatically where distinctness is known.
    pub fn from_members_unchecked(members: Vec<Member>) -> Self {
        FiniteClass { members }
    }

    pub fn from_hypotheses(hs: impl IntoIterator<Item = Hypothesis>, domain: &[Point]) -> Result<Self> {
        let members = hs
            .into_iter()
            .enumerate()
            .map(|(i, hypothesis)| Member { name: format!("h{}", i + 1), hypothesis })
            .collect();
        FiniteClass::new(members, domain)
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Hypothesis> {
        self.members.iter().map(|m| &m.hypothesis)
    }

    pub fn get(&self, name: &str) -> Option<&Hypothesis> {
        self.members.iter().find(|m| m.name == name).map(|m| &m.hypothesis)
    }

    pub fn name_of(&self, h: &Hypothesis) -> Option<&str> {
        self.members.iter().find(|m| &m.hypothesis == h).map(|m| m.name.as_str())
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.members.iter().any(|m| &m.hypothesis == h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum HypothesisClass {
    Finite(FiniteClass),
    /// Upward thresholds `1{x >= t}` on the line.
    Thresholds,
    /// Halfspaces `1{w.x + b >= 0}` in the plane.
    Halfspaces,
}

impl HypothesisClass {
    pub fn contains(&self, h: &Hypothesis) -> bool {
        match self {
            HypothesisClass::Finite(c) => c.contains(h),
            HypothesisClass::Thresholds => matches!(h, Hypothesis::Threshold { upward: true, .. }),
            HypothesisClass::Halfspaces => matches!(h, Hypothesis::Halfspace { .. }),
        }
    }

    pub fn point_kind(&self) -> Option<PointKind> {
        match self {
            HypothesisClass::Finite(_) => None,
            HypothesisClass::Thresholds => Some(PointKind::Line),
            HypothesisClass::Halfspaces => Some(PointKind::Plane),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON representation

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum HypothesisRepr {
    Tabular {
        table: Vec<(Point, u8)>,
    },
    Threshold {
        t: String,
        #[serde(default = "default_true")]
        upward: bool,
    },
    Halfspace {
        w: (String, String),
        b: String,
    },
    Singleton {
        p: Point,
    },
}

fn default_true() -> bool {
    true
}

impl TryFrom<HypothesisRepr> for Hypothesis {
    type Error = Error;

    fn try_from(r: HypothesisRepr) -> Result<Self> {
        Ok(match r {
            HypothesisRepr::Tabular { table } => {
                let mut map = BTreeMap::new();
                for (p, l) in table {
                    let label = crate::label_from_u8(l)?;
                    if map.insert(p.clone(), label).is_some() {
                        return Err(Error::InvalidHypothesis(format!("duplicate table entry {p}")));
                    }
                }
                Hypothesis::Tabular(map)
            }
            HypothesisRepr::Threshold { t, upward } => Hypothesis::Threshold { t: rational::parse(&t)?, upward },
            HypothesisRepr::Halfspace { w, b } => {
                Hypothesis::halfspace(rational::parse(&w.0)?, rational::parse(&w.1)?, rational::parse(&b)?)?
            }
            HypothesisRepr::Singleton { p } => Hypothesis::Singleton(p),
        })
    }
}

impl From<Hypothesis> for HypothesisRepr {
    fn from(h: Hypothesis) -> Self {
        match h {
            Hypothesis::Tabular(map) => {
                HypothesisRepr::Tabular { table: map.into_iter().map(|(p, l)| (p, l as u8)).collect() }
            }
            Hypothesis::Threshold { t, upward } => HypothesisRepr::Threshold { t: rational::format(&t), upward },
            Hypothesis::Halfspace { w, b } => HypothesisRepr::Halfspace {
                w: (rational::format(&w.0), rational::format(&w.1)),
                b: rational::format(&b),
            },
            Hypothesis::Singleton(p) => HypothesisRepr::Singleton { p },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn dom() -> Vec<Point> {
        (1..=3).map(|i| Point::sym(format!("x{i}"))).collect()
    }

    #[test]
    fn threshold_convention() {
        let h = Hypothesis::threshold(q(1, 2));
        assert!(h.eval(&Point::line(q(1, 2))).unwrap());
        assert!(!h.eval(&Point::line(q(49, 100))).unwrap());
        let down = Hypothesis::Threshold { t: q(1, 2), upward: false };
        assert!(!down.eval(&Point::line(q(1, 2))).unwrap());
        assert!(h.eval(&Point::sym("a")).is_err());
    }

    #[test]
    fn halfspace_boundary_is_positive() {
        let h = Hypothesis::halfspace(int(1), int(0), int(0)).unwrap();
        assert!(h.eval(&Point::plane(int(0), int(5))).unwrap());
        assert!(!h.eval(&Point::plane(q(-1, 10), int(0))).unwrap());
        assert!(Hypothesis::halfspace(int(0), int(0), int(1)).is_err());
    }

    #[test]
    fn tabular_outside_domain() {
        let h = Hypothesis::indicator(&dom(), &[Point::sym("x2")]);
        assert!(h.eval(&Point::sym("x2")).unwrap());
        assert!(matches!(h.eval(&Point::sym("x9")), Err(Error::PointOutsideDomain(_))));
    }

    #[test]
    fn class_rejects_extensional_duplicates() {
        let d = dom();
        let a = Hypothesis::indicator(&d, &[Point::sym("x1")]);
        let b = Hypothesis::indicator(&d, &[Point::sym("x1")]);
        assert!(FiniteClass::from_hypotheses([a.clone(), b], &d).is_err());
        let c = Hypothesis::constant(&d, true);
        let class = FiniteClass::from_hypotheses([a.clone(), c], &d).unwrap();
        assert_eq!(class.name_of(&a), Some("h1"));
    }

    #[test]
    fn class_rejects_partial_tabular() {
        let d = dom();
        let partial = Hypothesis::tabular([(Point::sym("x1"), true)]);
        assert!(FiniteClass::from_hypotheses([partial], &d).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let hs = [
            Hypothesis::halfspace(int(1), q(-1, 2), int(3)).unwrap(),
            Hypothesis::threshold(q(11, 20)),
            Hypothesis::indicator(&dom(), &[Point::sym("x3")]),
            Hypothesis::Singleton(Point::plane(int(1), int(2))),
        ];
        for h in hs {
            let s = serde_json::to_string(&h).unwrap();
            assert_eq!(serde_json::from_str::<Hypothesis>(&s).unwrap(), h);
        }
        let bad = r#"{"kind":"halfspace","w":["0","0"],"b":"1"}"#;
        assert!(serde_json::from_str::<Hypothesis>(bad).is_err());
    }
}
