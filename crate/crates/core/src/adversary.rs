//! Label-query adversaries: attacks on a sample, admissibility checks,
//! query accounting and witness sets read off non-adaptive adversaries.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::certify::WitnessSet;
use crate::error::{Error, Result};
use crate::hypothesis::{FiniteClass, Hypothesis};
use crate::loss;
use crate::oracles::{self, LabelOracle, OracleReport};
use crate::perturbation::Perturbation;
use crate::point::Point;

/// Queries made for one source point, with the index of the returned
/// adversarial point among them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointAttack {
    pub queries: Vec<(Point, bool)>,
    pub returned: Option<usize>,
}

/// An adversary acting on one source point at a time.
///
/// `source_label` is the hidden hypothesis' label at the source, as carried
/// by a realizable sample. Adversaries can only return points they queried:
/// the result refers to a position in the query list.
pub trait Adversary: Sync {
    fn name(&self) -> &'static str;

    fn is_adaptive(&self) -> bool {
        false
    }

    /// Query list for `x`; non-adaptive adversaries issue exactly this list.
    fn query_plan(&self, x: &Point, u: &Perturbation) -> Result<Vec<Point>>;

    /// Picks the returned point from the answered plan.
    fn choose(&self, x: &Point, source_label: bool, answers: &[(Point, bool)]) -> Option<usize>;

    /// Declared maximum number of queries per source point, when known.
    fn per_point_bound(&self, u: &Perturbation) -> Option<usize>;

    fn attack_point(
        &self,
        x: &Point,
        source_label: bool,
        u: &Perturbation,
        query: &mut dyn FnMut(&Point) -> Result<bool>,
    ) -> Result<PointAttack> {
        let plan = self.query_plan(x, u)?;
        let mut answers = Vec::with_capacity(plan.len());
        for p in plan {
            let l = query(&p)?;
            answers.push((p, l));
        }
        let returned = self.choose(x, source_label, &answers);
        Ok(PointAttack { queries: answers, returned })
    }
}

/// Thresholds under a ball on the line: queries `x - r` and `x + r` and
/// returns whichever endpoint is labeled differently from `x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThresholdEndpoints;

impl Adversary for ThresholdEndpoints {
    fn name(&self) -> &'static str {
        "threshold"
    }

    fn query_plan(&self, x: &Point, u: &Perturbation) -> Result<Vec<Point>> {
        let (r, v) = match (u, x) {
            (Perturbation::Ball { radius, .. }, Point::Line(v)) => (radius, v),
            _ => return Err(Error::UnsupportedCombination { hypothesis: "threshold", perturbation: u.kind_name() }),
        };
        Ok(vec![Point::Line(v - r), Point::Line(v + r)])
    }

    fn choose(&self, _x: &Point, source_label: bool, answers: &[(Point, bool)]) -> Option<usize> {
        answers.iter().position(|(_, l)| *l != source_label)
    }

    fn per_point_bound(&self, _u: &Perturbation) -> Option<usize> {
        Some(2)
    }
}

/// Finite perturbation maps: queries all of `U(x)` in point order and
/// returns the first point labeled differently from `x`.
#[derive(Clone, Copy, Debug, Default)]
pub struct FiniteExhaustive;

impl Adversary for FiniteExhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn query_plan(&self, x: &Point, u: &Perturbation) -> Result<Vec<Point>> {
        let nbhd =
            u.neighbors(x).ok_or(Error::UnsupportedCombination { hypothesis: "any", perturbation: u.kind_name() })?;
        Ok(nbhd.into_iter().collect())
    }

    fn choose(&self, x: &Point, source_label: bool, answers: &[(Point, bool)]) -> Option<usize> {
        // x is in its own neighbourhood, so its queried label is available.
        let at_x = answers.iter().find(|(p, _)| p == x).map_or(source_label, |(_, l)| *l);
        answers.iter().position(|(_, l)| *l != at_x)
    }

    fn per_point_bound(&self, u: &Perturbation) -> Option<usize> {
        match u {
            Perturbation::FiniteMap(map) => Some(map.values().map(|s| s.len()).max().unwrap_or(1)),
            _ => None,
        }
    }
}

type AttackFn =
    dyn Fn(&Point, bool, &Perturbation, &mut dyn FnMut(&Point) -> Result<bool>) -> Result<PointAttack> + Sync;

/// Adversary given by a callback. The callback may adapt its queries to
/// earlier answers; it has no fixed plan.
pub struct CallbackAdversary {
    pub bound: Option<usize>,
    pub adaptive: bool,
    pub callback: Box<AttackFn>,
}

impl Adversary for CallbackAdversary {
    fn name(&self) -> &'static str {
        "custom"
    }

    fn is_adaptive(&self) -> bool {
        self.adaptive
    }

    fn query_plan(&self, _x: &Point, _u: &Perturbation) -> Result<Vec<Point>> {
        Err(Error::InvalidParameter("callback adversaries have no fixed query plan".into()))
    }

    fn choose(&self, _x: &Point, _source_label: bool, _answers: &[(Point, bool)]) -> Option<usize> {
        None
    }

    fn per_point_bound(&self, _u: &Perturbation) -> Option<usize> {
        self.bound
    }

    fn attack_point(
        &self,
        x: &Point,
        source_label: bool,
        u: &Perturbation,
        query: &mut dyn FnMut(&Point) -> Result<bool>,
    ) -> Result<PointAttack> {
        (self.callback)(x, source_label, u, query)
    }
}

/// Looks up an adversary by its CLI name.
pub fn by_name(name: &str) -> Result<Box<dyn Adversary>> {
    match name {
        "threshold" => Ok(Box::new(ThresholdEndpoints)),
        "exhaustive" => Ok(Box::new(FiniteExhaustive)),
        other => Err(Error::InvalidParameter(format!("unknown adversary {other}"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AttackResult {
    /// Returned points with the index of their source in the sample.
    pub perturbed: Vec<(Point, usize)>,
    pub queries: OracleReport,
    /// Query list `Q_x` of each source point, in issue order.
    pub per_source: Vec<Vec<Point>>,
}

impl AttackResult {
    pub fn perturbed_points(&self) -> Vec<Point> {
        self.perturbed.iter().map(|(p, _)| p.clone()).collect()
    }
}

fn in_some_neighbourhood(z: &Point, sources: &[Point], u: &Perturbation) -> Result<bool> {
    for x in sources {
        if u.contains(x, z)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Runs `adv` over a sample whose labels are the oracle's labels at the
/// sources. Properness is checked on every run: each query must lie in
/// `∪ U(x)` and each returned point in `U(source)`.
pub fn attack(
    adv: &dyn Adversary,
    oracle: &mut LabelOracle,
    sample: &[(Point, bool)],
    u: &Perturbation,
) -> Result<AttackResult> {
    let start = oracle.used();
    let sources: Vec<Point> = sample.iter().map(|(x, _)| x.clone()).collect();
    let mut perturbed = Vec::new();
    let mut per_source = Vec::with_capacity(sample.len());
    for (i, (x, y)) in sample.iter().enumerate() {
        let res = adv.attack_point(x, *y, u, &mut |p| oracle.query(p))?;
        for (q, _) in &res.queries {
            if !in_some_neighbourhood(q, &sources, u)? {
                return Err(Error::PropernessViolation(format!("query {q} lies outside every U(x)")));
            }
        }
        if let Some(k) = res.returned {
            let (p, _) = res.queries.get(k).ok_or_else(|| {
                Error::InvariantViolation(format!("returned index {k} beyond {} queries", res.queries.len()))
            })?;
            if !u.contains(x, p)? {
                return Err(Error::PropernessViolation(format!("returned {p} is outside U({x})")));
            }
            perturbed.push((p.clone(), i));
        }
        per_source.push(res.queries.into_iter().map(|(p, _)| p).collect());
    }
    let transcript = &oracle.transcript()[start..];
    let queries =
        OracleReport { queries_used: transcript.len(), transcript_hash: oracles::transcript_hash(transcript) };
    Ok(AttackResult { perturbed, queries, per_source })
}

/// Checks that every returned point is adversarial for some sample point
/// and that every sample point in the margin of `h` has an adversarial
/// point among the returned ones.
pub fn is_admissible_attack(returned: &[Point], sample: &[Point], h: &Hypothesis, u: &Perturbation) -> Result<bool> {
    let adversarial_for = |x: &Point, z: &Point| -> Result<bool> { Ok(u.contains(x, z)? && h.eval(z)? != h.eval(x)?) };
    for z in returned {
        let mut hit = false;
        for x in sample {
            if adversarial_for(x, z)? {
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(false);
        }
    }
    for x in sample {
        if loss::margin_membership(h, x, u)? {
            let mut hit = false;
            for z in returned {
                if adversarial_for(x, z)? {
                    hit = true;
                    break;
                }
            }
            if !hit {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct QueryComplexityReport {
    /// `(|S|, queries)` per instance.
    pub rows: Vec<(usize, usize)>,
    /// Maximum queries for each sample size.
    pub buckets: BTreeMap<usize, usize>,
    pub max_per_point: f64,
    pub declared_per_point: Option<usize>,
    pub efficient: bool,
}

/// Least-squares slope of `ln(max queries)` against `ln |S|`.
fn log_slope(buckets: &BTreeMap<usize, usize>) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        buckets.iter().filter(|(n, q)| **n > 0 && **q > 0).map(|(n, q)| ((*n as f64).ln(), (*q as f64).ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Attacks each `(S, h)` instance with a fresh oracle, checks
/// admissibility and tallies queries per sample size.
///
/// The adversary counts as efficient when every bucket stays within its
/// declared per-point bound, or, without a declared bound, when the
/// log-log slope of the bucket maxima is at most 1.1.
pub fn measure_query_complexity(
    adv: &dyn Adversary,
    instances: &[(Vec<Point>, Hypothesis)],
    u: &Perturbation,
) -> Result<QueryComplexityReport> {
    let mut rows = Vec::with_capacity(instances.len());
    let mut buckets: BTreeMap<usize, usize> = BTreeMap::new();
    for (s, h) in instances {
        let sample = s.iter().map(|x| Ok((x.clone(), h.eval(x)?))).collect::<Result<Vec<_>>>()?;
        let mut oracle = LabelOracle::new(h.clone());
        let res = attack(adv, &mut oracle, &sample, u)?;
        if !is_admissible_attack(&res.perturbed_points(), s, h, u)? {
            return Err(Error::InadmissibleAttack(format!("{} failed on a sample of {} points", adv.name(), s.len())));
        }
        let q = res.queries.queries_used;
        rows.push((s.len(), q));
        let e = buckets.entry(s.len()).or_insert(0);
        *e = (*e).max(q);
    }
    let max_per_point = buckets.iter().filter(|(n, _)| **n > 0).map(|(n, q)| *q as f64 / *n as f64).fold(0.0, f64::max);
    let declared = adv.per_point_bound(u);
    let efficient = match declared {
        Some(c) => buckets.iter().all(|(n, q)| *q <= c * n),
        None => log_slope(&buckets).is_none_or(|s| s <= 1.1),
    };
    Ok(QueryComplexityReport { rows, buckets, max_per_point, declared_per_point: declared, efficient })
}

/// Witness set `{x} ∪ Q_x` of a non-adaptive adversary: `x` is in the
/// margin iff some query in `U(x)` is labeled differently from `x`.
/// The result is validated against every member of `class`.
pub fn witness_from_nonadaptive(
    adv: &dyn Adversary,
    x: &Point,
    u: &Perturbation,
    class: &FiniteClass,
) -> Result<WitnessSet> {
    if adv.is_adaptive() {
        return Err(Error::InvalidParameter(format!("adversary {} is adaptive", adv.name())));
    }
    let mut witnesses = Vec::new();
    for q in adv.query_plan(x, u)? {
        if q != *x && u.contains(x, &q)? && !witnesses.contains(&q) {
            witnesses.push(q);
        }
    }
    let w = WitnessSet { base: x.clone(), zero_witnesses: witnesses.clone(), one_witnesses: witnesses };
    w.validate(class, u)?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;
    use crate::perturbation::Norm;
    use crate::rational::{q, Rational};

    fn line(n: i64, d: i64) -> Point {
        Point::line(q(n, d))
    }

    #[test]
    fn threshold_endpoint_example() {
        let h = Hypothesis::threshold(q(1, 2));
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let mut o = LabelOracle::new(h.clone());
        let x = line(45, 100);
        let res = attack(&ThresholdEndpoints, &mut o, &[(x.clone(), false)], &u).unwrap();
        assert_eq!(res.per_source[0], vec![line(35, 100), line(55, 100)]);
        assert_eq!(res.perturbed, vec![(line(55, 100), 0)]);
        assert_eq!(res.queries.queries_used, 2);
        assert!(is_admissible_attack(&res.perturbed_points(), &[x], &h, &u).unwrap());
    }

    #[test]
    fn exhaustive_on_seven_points() {
        let ci = constructions::seven_point_instance().unwrap();
        let h1 = ci.class.get("h1").unwrap().clone();
        let mut o = LabelOracle::new(h1.clone());
        let x1 = Point::sym("x1");
        let res = attack(&FiniteExhaustive, &mut o, &[(x1.clone(), false)], &ci.perturbation).unwrap();
        assert_eq!(res.perturbed_points(), vec![Point::sym("x2")]);

        let x7 = Point::sym("x7");
        let res = attack(&FiniteExhaustive, &mut o, &[(x7, false)], &ci.perturbation).unwrap();
        assert!(res.perturbed.is_empty());
    }

    #[test]
    fn admissibility_conditions() {
        let h = Hypothesis::threshold(q(1, 2));
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let far = vec![line(1, 10)];
        assert!(is_admissible_attack(&[], &far, &h, &u).unwrap());
        let near = vec![line(45, 100)];
        assert!(!is_admissible_attack(&[], &near, &h, &u).unwrap());
        assert!(!is_admissible_attack(&[line(40, 100)], &near, &h, &u).unwrap());
    }

    #[test]
    fn complexity_counts() {
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let h = Hypothesis::threshold(q(1, 2));
        let instances: Vec<(Vec<Point>, Hypothesis)> =
            (0..=20).map(|n| ((0..n).map(|i| line(i, 20)).collect(), h.clone())).collect();
        let rep = measure_query_complexity(&ThresholdEndpoints, &instances, &u).unwrap();
        assert!(rep.efficient);
        assert_eq!(rep.buckets[&0], 0);
        for (n, qn) in &rep.rows {
            assert_eq!(*qn, 2 * n);
        }
    }

    #[test]
    fn witness_from_threshold_adversary() {
        let r = q(1, 10);
        let u = Perturbation::ball(Norm::L2, r.clone()).unwrap();
        let panel: Vec<Point> = (0..=20).map(|i| line(i, 20)).collect();
        let class = FiniteClass::from_members_unchecked(
            (0..=21)
                .map(|i| crate::hypothesis::Member {
                    name: format!("t{i}"),
                    hypothesis: Hypothesis::threshold(q(2 * i - 1, 40)),
                })
                .collect(),
        );
        for x in &panel {
            let w = witness_from_nonadaptive(&ThresholdEndpoints, x, &u, &class).unwrap();
            let v = x.as_line().unwrap();
            let expect: Vec<Point> = vec![Point::Line(v - &r), x.clone(), Point::Line(v + &r)];
            let mut got = w.points();
            got.sort();
            assert_eq!(got, expect);
        }
        let zero = Perturbation::ball(Norm::L2, Rational::from_integer(0.into())).unwrap();
        let w = witness_from_nonadaptive(&ThresholdEndpoints, &panel[3], &zero, &class).unwrap();
        assert_eq!(w.points(), vec![panel[3].clone()]);
    }

    #[test]
    fn non_adaptive_plans_ignore_hypothesis() {
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let s: Vec<(Point, bool)> = (0..10).map(|i| (line(i, 10), false)).collect();
        let mut a = LabelOracle::new(Hypothesis::threshold(q(1, 3)));
        let mut b = LabelOracle::new(Hypothesis::threshold(q(2, 3)));
        let ra = attack(&ThresholdEndpoints, &mut a, &s, &u).unwrap();
        let rb = attack(&ThresholdEndpoints, &mut b, &s, &u).unwrap();
        assert_eq!(ra.per_source, rb.per_source);
    }
}
