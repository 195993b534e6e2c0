//! Exact counterexample instances where error and margin oracles cannot
//! tell two distributions apart even though their robust-loss minimizers
//! differ.
//!
//! Two instances are provided:
//!
//! * a seven-point instance with a two-member class (`thm32` on the CLI);
//! * its eight-point extension, adding a 0/1-realizing member and the
//!   constant-one member (`thm36` on the CLI).
//!
//! Each instance carries its expected facts as data, and
//! [`verify_indistinguishability`] recomputes every one of them exactly.

use serde::Serialize;

use crate::distribution::{Atom, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::hypothesis::{FiniteClass, Hypothesis, Member};
use crate::loss;
use crate::oracles;
use crate::perturbation::Perturbation;
use crate::point::Point;
use crate::rational::{self, q, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Measure {
    Error,
    Margin,
    Robust,
}

/// An expected exact value: `measure` of member `hypothesis` under
/// distribution 1 or 2.
#[derive(Clone, Debug, Serialize)]
pub struct Fact {
    pub name: String,
    pub hypothesis: String,
    pub distribution: u8,
    pub measure: Measure,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionInstance {
    pub name: String,
    pub domain: Vec<Point>,
    pub class: FiniteClass,
    pub perturbation: Perturbation,
    pub p1: DiscreteDistribution,
    pub p2: DiscreteDistribution,
    pub facts: Vec<Fact>,
    /// Minimizer under P1, minimizer under P2, and the exact gap to the
    /// runner-up.
    pub expected_minimizers: (String, String),
    #[serde(with = "rational::serde_str")]
    pub expected_gap: Rational,
}

fn x(i: usize) -> Point {
    Point::sym(format!("x{i}"))
}

fn dist(weights: &[(usize, Rational)], n: usize) -> Result<DiscreteDistribution> {
    let atoms = (1..=n)
        .map(|i| Atom {
            point: x(i),
            label: false,
            weight: weights.iter().find(|(j, _)| *j == i).map(|(_, w)| w.clone()).unwrap_or_else(rational::zero),
        })
        .collect();
    DiscreteDistribution::new(atoms)
}

fn fact(h: &str, d: u8, measure: Measure, value: Rational) -> Fact {
    let m = match measure {
        Measure::Error => "error",
        Measure::Margin => "margin",
        Measure::Robust => "robust",
    };
    Fact { name: format!("{m}({h}, P{d})"), hypothesis: h.to_owned(), distribution: d, measure, value }
}

fn base_perturbation(extra: bool) -> Perturbation {
    let mut entries = vec![
        (x(1), vec![x(2)]),
        (x(2), vec![x(1), x(3)]),
        (x(3), vec![x(2)]),
        (x(4), vec![x(5)]),
        (x(5), vec![x(4), x(6)]),
        (x(6), vec![x(5)]),
    ];
    if extra {
        entries.push((x(7), vec![x(8)]));
        entries.push((x(8), vec![x(7)]));
    } else {
        entries.push((x(7), vec![]));
    }
    Perturbation::finite_map(entries)
}

/// Seven points, all labeled 0; `h1 = 1{x ∈ {x2, x3}}`, `h2 = 1{x ∈ {x5, x6}}`.
pub fn seven_point_instance() -> Result<ConstructionInstance> {
    let domain: Vec<Point> = (1..=7).map(x).collect();
    let h1 = Hypothesis::indicator(&domain, &[x(2), x(3)]);
    let h2 = Hypothesis::indicator(&domain, &[x(5), x(6)]);
    let class = FiniteClass::new(
        vec![Member { name: "h1".into(), hypothesis: h1 }, Member { name: "h2".into(), hypothesis: h2 }],
        &domain,
    )?;
    let sixth = |n| q(n, 6);
    let p1 = dist(&[(2, sixth(2)), (4, sixth(1)), (5, sixth(1)), (6, sixth(1)), (7, sixth(1))], 7)?;
    let p2 = dist(&[(5, sixth(2)), (1, sixth(1)), (2, sixth(1)), (3, sixth(1)), (7, sixth(1))], 7)?;
    let mut facts = Vec::new();
    for h in ["h1", "h2"] {
        for d in [1, 2] {
            facts.push(fact(h, d, Measure::Error, q(1, 3)));
            facts.push(fact(h, d, Measure::Margin, q(1, 3)));
        }
    }
    facts.push(fact("h1", 1, Measure::Robust, q(2, 6)));
    facts.push(fact("h2", 1, Measure::Robust, q(3, 6)));
    facts.push(fact("h1", 2, Measure::Robust, q(3, 6)));
    facts.push(fact("h2", 2, Measure::Robust, q(2, 6)));
    Ok(ConstructionInstance {
        name: "thm32".into(),
        domain,
        class,
        perturbation: base_perturbation(false),
        p1,
        p2,
        facts,
        expected_minimizers: ("h1".into(), "h2".into()),
        expected_gap: q(1, 6),
    })
}

/// The seven-point instance with weights halved, an eighth zero-weight point
/// sharing a neighbourhood with `x7` (which absorbs the freed mass), and two
/// extra members: `hr = 1{x = x8}` and the constant one `hc`.
pub fn eight_point_instance() -> Result<ConstructionInstance> {
    let domain: Vec<Point> = (1..=8).map(x).collect();
    let h1 = Hypothesis::indicator(&domain, &[x(2), x(3)]);
    let h2 = Hypothesis::indicator(&domain, &[x(5), x(6)]);
    let hr = Hypothesis::indicator(&domain, &[x(8)]);
    let hc = Hypothesis::constant(&domain, true);
    let class = FiniteClass::new(
        vec![
            Member { name: "h1".into(), hypothesis: h1 },
            Member { name: "h2".into(), hypothesis: h2 },
            Member { name: "hr".into(), hypothesis: hr },
            Member { name: "hc".into(), hypothesis: hc },
        ],
        &domain,
    )?;
    let tw = |n| q(n, 12);
    let p1 = dist(&[(2, tw(2)), (4, tw(1)), (5, tw(1)), (6, tw(1)), (7, tw(7))], 8)?;
    let p2 = dist(&[(5, tw(2)), (1, tw(1)), (2, tw(1)), (3, tw(1)), (7, tw(7))], 8)?;
    let mut facts = Vec::new();
    for d in [1, 2] {
        for h in ["h1", "h2"] {
            facts.push(fact(h, d, Measure::Error, tw(2)));
            facts.push(fact(h, d, Measure::Margin, tw(2)));
        }
        facts.push(fact("hr", d, Measure::Error, rational::zero()));
        facts.push(fact("hr", d, Measure::Margin, tw(7)));
        facts.push(fact("hr", d, Measure::Robust, tw(7)));
        facts.push(fact("hc", d, Measure::Error, rational::one()));
        facts.push(fact("hc", d, Measure::Margin, rational::zero()));
        facts.push(fact("hc", d, Measure::Robust, rational::one()));
    }
    facts.push(fact("h1", 1, Measure::Robust, tw(2)));
    facts.push(fact("h2", 1, Measure::Robust, tw(3)));
    facts.push(fact("h1", 2, Measure::Robust, tw(3)));
    facts.push(fact("h2", 2, Measure::Robust, tw(2)));
    Ok(ConstructionInstance {
        name: "thm36".into(),
        domain,
        class,
        perturbation: base_perturbation(true),
        p1,
        p2,
        facts,
        expected_minimizers: ("h1".into(), "h2".into()),
        expected_gap: tw(1),
    })
}

pub fn by_name(name: &str) -> Result<ConstructionInstance> {
    match name {
        "thm32" => seven_point_instance(),
        "thm36" => eight_point_instance(),
        other => Err(Error::InvalidParameter(format!("unknown construction {other:?}"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndistinguishabilityReport {
    pub instance: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl IndistinguishabilityReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn into_result(self) -> Result<Self> {
        if self.pass {
            Ok(self)
        } else {
            let names: Vec<_> = self.failures().map(|c| c.name.clone()).collect();
            Err(Error::ConstructionFailed(format!("{}: {}", self.instance, names.join(", "))))
        }
    }
}

fn measure(ci: &ConstructionInstance, h: &Hypothesis, d: u8, m: Measure) -> Result<Rational> {
    let p = if d == 1 { &ci.p1 } else { &ci.p2 };
    match m {
        Measure::Error => oracles::error_oracle(p, h),
        Measure::Margin => oracles::margin_oracle(p, &ci.perturbation, h),
        Measure::Robust => loss::true_loss(h, p, Some(&ci.perturbation)),
    }
}

fn check(checks: &mut Vec<Check>, name: String, expected: String, actual: String) {
    let pass = expected == actual;
    checks.push(Check { name, expected, actual, pass });
}

/// Recomputes every fact and checks the indistinguishability claims:
/// error and margin oracles agree across P1/P2 for every member, the robust
/// minimizers differ, and the gap to the runner-up is the expected value.
pub fn verify_indistinguishability(ci: &ConstructionInstance) -> Result<IndistinguishabilityReport> {
    let mut checks = Vec::new();
    let fmt = rational::format;

    for f in &ci.facts {
        let h = ci
            .class
            .get(&f.hypothesis)
            .ok_or_else(|| Error::ConstructionFailed(format!("unknown member {}", f.hypothesis)))?;
        let actual = measure(ci, h, f.distribution, f.measure)?;
        check(&mut checks, f.name.clone(), fmt(&f.value), fmt(&actual));
    }

    for m in ci.class.members() {
        for kind in [Measure::Error, Measure::Margin] {
            let a = measure(ci, &m.hypothesis, 1, kind)?;
            let b = measure(ci, &m.hypothesis, 2, kind)?;
            check(
                &mut checks,
                format!("{kind:?} oracle of {} agrees across P1/P2", m.name).to_lowercase(),
                fmt(&a),
                fmt(&b),
            );
        }
    }

    let mut minimizers = Vec::new();
    let mut gaps = Vec::new();
    for d in [1u8, 2] {
        let mut losses: Vec<(Rational, &str)> = ci
            .class
            .members()
            .iter()
            .map(|m| Ok((measure(ci, &m.hypothesis, d, Measure::Robust)?, m.name.as_str())))
            .collect::<Result<_>>()?;
        losses.sort();
        minimizers.push(losses[0].1.to_owned());
        let gap = losses.get(1).map(|r| &r.0 - &losses[0].0).unwrap_or_else(rational::zero);
        gaps.push(gap);
    }
    check(&mut checks, "minimizer under P1".into(), ci.expected_minimizers.0.clone(), minimizers[0].clone());
    check(&mut checks, "minimizer under P2".into(), ci.expected_minimizers.1.clone(), minimizers[1].clone());
    checks.push(Check {
        name: "minimizers differ".into(),
        expected: "true".into(),
        actual: (minimizers[0] != minimizers[1]).to_string(),
        pass: minimizers[0] != minimizers[1],
    });
    for (d, gap) in gaps.iter().enumerate() {
        check(&mut checks, format!("runner-up gap under P{}", d + 1), fmt(&ci.expected_gap), fmt(gap));
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(IndistinguishabilityReport { instance: ci.name.clone(), checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_point_passes() {
        let ci = seven_point_instance().unwrap();
        let r = verify_indistinguishability(&ci).unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn eight_point_passes() {
        let ci = eight_point_instance().unwrap();
        let r = verify_indistinguishability(&ci).unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn mutated_weight_names_the_fact() {
        let mut ci = seven_point_instance().unwrap();
        let mut atoms = ci.p1.atoms().to_vec();
        // Move 1/6 from x4 to x7: breaks h2's error and margin weights.
        atoms[3].weight = rational::zero();
        atoms[6].weight = q(2, 6);
        ci.p1 = DiscreteDistribution::new(atoms).unwrap();
        let r = verify_indistinguishability(&ci).unwrap();
        assert!(!r.pass);
        let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"margin(h2, P1)"), "{failed:?}");
        assert!(r.into_result().is_err());
    }
}
