//! Task files: a domain, a hypothesis class, a perturbation type, a
//! labeled distribution and optionally a hidden hypothesis, as JSON.
//!
//! ```json
//! {
//!   "name": "band",
//!   "domain": [["0/1"], ["1/2"]],
//!   "class": {"kind": "thresholds"},
//!   "perturbation": {"kind": "ball", "norm": "l2", "radius": "1/10"},
//!   "distribution": {"atoms": [{"point": ["0/1"], "label": 0, "weight": "1/2"}, ...]},
//!   "hidden": {"kind": "threshold", "t": "1/2"}
//! }
//! ```
//!
//! Finite classes list named members: `{"kind": "finite", "members":
//! [{"name": "h1", "hypothesis": {...}}]}`. The domain may be omitted, in
//! which case the distribution's points are used.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constructions::ConstructionInstance;
use crate::distribution::{Atom, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::hypothesis::{FiniteClass, Hypothesis, HypothesisClass, Member};
use crate::perturbation::{Norm, Perturbation};
use crate::point::Point;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ClassRepr {
    Finite { members: Vec<Member> },
    Thresholds,
    Halfspaces,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TaskRepr {
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Vec<Point>>,
    class: ClassRepr,
    perturbation: Perturbation,
    distribution: DiscreteDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hidden: Option<Hypothesis>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TaskRepr", into = "TaskRepr")]
pub struct Task {
    pub name: String,
    pub domain: Vec<Point>,
    pub class: HypothesisClass,
    pub perturbation: Perturbation,
    pub distribution: DiscreteDistribution,
    pub hidden: Option<Hypothesis>,
}

impl TryFrom<TaskRepr> for Task {
    type Error = Error;

    fn try_from(r: TaskRepr) -> Result<Self> {
        let domain = r.domain.unwrap_or_else(|| r.distribution.points());
        let class = match r.class {
            ClassRepr::Finite { members } => HypothesisClass::Finite(FiniteClass::new(members, &domain)?),
            ClassRepr::Thresholds => HypothesisClass::Thresholds,
            ClassRepr::Halfspaces => HypothesisClass::Halfspaces,
        };
        Task::new(r.name, domain, class, r.perturbation, r.distribution, r.hidden)
    }
}

impl From<Task> for TaskRepr {
    fn from(t: Task) -> Self {
        let class = match t.class {
            HypothesisClass::Finite(c) => ClassRepr::Finite { members: c.members().to_vec() },
            HypothesisClass::Thresholds => ClassRepr::Thresholds,
            HypothesisClass::Halfspaces => ClassRepr::Halfspaces,
        };
        TaskRepr {
            name: t.name,
            domain: Some(t.domain),
            class,
            perturbation: t.perturbation,
            distribution: t.distribution,
            hidden: t.hidden,
        }
    }
}

impl Task {
    /// Checks that distribution points lie in the domain and, for numeric
    /// classes, have the class' point kind; and that a hidden hypothesis
    /// belongs to the class.
    pub fn new(
        name: String,
        domain: Vec<Point>,
        class: HypothesisClass,
        perturbation: Perturbation,
        distribution: DiscreteDistribution,
        hidden: Option<Hypothesis>,
    ) -> Result<Self> {
        for a in distribution.atoms() {
            if !domain.contains(&a.point) {
                return Err(Error::InvalidTask(format!("distribution point {} is not in the domain", a.point)));
            }
        }
        if let Some(kind) = class.point_kind() {
            if let Some(p) = domain.iter().find(|p| p.kind() != kind) {
                return Err(Error::InvalidTask(format!("point {p} does not fit the class")));
            }
        }
        if let Some(h) = &hidden {
            if !class.contains(h) {
                return Err(Error::InvalidTask("hidden hypothesis is not in the class".into()));
            }
        }
        Ok(Task { name, domain, class, perturbation, distribution, hidden })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Task::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn finite_class(&self) -> Result<&FiniteClass> {
        match &self.class {
            HypothesisClass::Finite(c) => Ok(c),
            _ => Err(Error::InvalidTask("operation needs a finite class".into())),
        }
    }

    pub fn hidden(&self) -> Result<&Hypothesis> {
        self.hidden.as_ref().ok_or_else(|| Error::InvalidTask("task has no hidden hypothesis".into()))
    }

    /// Task for one of the two distributions of a construction, without a
    /// hidden hypothesis.
    pub fn from_construction(ci: &ConstructionInstance, which: u8) -> Result<Self> {
        let p = match which {
            1 => ci.p1.clone(),
            2 => ci.p2.clone(),
            other => return Err(Error::InvalidParameter(format!("distribution {other} does not exist"))),
        };
        Task::new(
            format!("{}-p{which}", ci.name),
            ci.domain.clone(),
            HypothesisClass::Finite(ci.class.clone()),
            ci.perturbation.clone(),
            p,
            None,
        )
    }
}

/// Threshold task on the grid `{k/n : 0 <= k <= n}` with hidden threshold
/// `t`: points in the band `[t - r, t + r)` are left out so the
/// uniform distribution on the rest is robustly realizable.
pub fn threshold_band(n: i64, t: &Rational, r: &Rational) -> Result<Task> {
    let hidden = Hypothesis::threshold(t.clone());
    let lo = t - r;
    let hi = t + r;
    let points: Vec<Point> =
        (0..=n).map(|k| rational::q(k, n)).filter(|x| *x < lo || *x >= hi).map(Point::Line).collect();
    let h = hidden.clone();
    let dist = DiscreteDistribution::uniform(&points, |p| h.eval(p).unwrap_or(false))?;
    Task::new(
        "threshold-band".into(),
        points,
        HypothesisClass::Thresholds,
        Perturbation::ball(Norm::L2, r.clone())?,
        dist,
        Some(hidden),
    )
}

/// Halfspace task under a ball: `atoms` planar points with the given
/// weights, labeled by `labeler` (which may differ from `hidden`).
pub fn halfspace_task(
    atoms: Vec<(Point, Rational)>,
    labeler: &Hypothesis,
    hidden: Hypothesis,
    norm: Norm,
    r: Rational,
) -> Result<Task> {
    let atoms = atoms
        .into_iter()
        .map(|(point, weight)| Ok(Atom { label: labeler.eval(&point)?, point, weight }))
        .collect::<Result<Vec<_>>>()?;
    let dist = DiscreteDistribution::new(atoms)?;
    Task::new(
        "halfspace".into(),
        dist.points(),
        HypothesisClass::Halfspaces,
        Perturbation::ball(norm, r)?,
        dist,
        Some(hidden),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;
    use crate::loss;
    use crate::rational::{int, q};

    #[test]
    fn construction_round_trip() {
        let ci = constructions::seven_point_instance().unwrap();
        let t = Task::from_construction(&ci, 1).unwrap();
        let back = Task::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(Task::from_construction(&ci, 3).is_err());
    }

    #[test]
    fn band_is_robustly_realizable() {
        let t = threshold_band(100, &q(1, 2), &q(1, 10)).unwrap();
        let h = t.hidden().unwrap();
        assert_eq!(loss::true_loss(h, &t.distribution, Some(&t.perturbation)).unwrap(), int(0));
        let back = Task::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_inconsistent_tasks() {
        let text = r#"{
            "domain": [["0"]],
            "class": {"kind": "thresholds"},
            "perturbation": {"kind": "ball", "norm": "l2", "radius": "1/10"},
            "distribution": {"atoms": [{"point": ["1"], "label": 1, "weight": "1"}]}
        }"#;
        assert!(Task::from_json(text).is_err());
        let text = r#"{
            "class": {"kind": "thresholds"},
            "perturbation": {"kind": "ball", "norm": "l2", "radius": "1/10"},
            "distribution": {"atoms": [{"point": ["1"], "label": 1, "weight": "1"}]},
            "hidden": {"kind": "halfspace", "w": ["1", "0"], "b": "0"}
        }"#;
        assert!(Task::from_json(text).is_err());
    }
}
