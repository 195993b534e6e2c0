//! Query-based certification of the robust loss of a black-box hypothesis.
//!
//! Every certifier sees the hypothesis only through a [`LabelOracle`] and
//! reports the number of queries it spent next to its estimate.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bounds;
use crate::error::{Error, Result};
use crate::hypothesis::{FiniteClass, Hypothesis};
use crate::loss;
use crate::oracles::LabelOracle;
use crate::perturbation::Perturbation;
use crate::point::Point;
use crate::rational::{self, Rational};

/// Points whose labels decide whether `base` is in the margin.
///
/// The decision rule: if the base is labeled 0, it is in the margin iff some
/// point of `one_witnesses` is labeled 1; if the base is labeled 1, iff some
/// point of `zero_witnesses` is labeled 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSet {
    pub base: Point,
    pub zero_witnesses: Vec<Point>,
    pub one_witnesses: Vec<Point>,
}

impl WitnessSet {
    pub fn trivial(base: Point) -> Self {
        WitnessSet { base, zero_witnesses: Vec::new(), one_witnesses: Vec::new() }
    }

    /// All points of the set, base first, without duplicates.
    pub fn points(&self) -> Vec<Point> {
        let mut seen = BTreeSet::new();
        std::iter::once(&self.base)
            .chain(&self.zero_witnesses)
            .chain(&self.one_witnesses)
            .filter(|p| seen.insert(*p))
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn decide(&self, mut label: impl FnMut(&Point) -> Result<bool>) -> Result<bool> {
        let base = label(&self.base)?;
        let candidates = if base { &self.zero_witnesses } else { &self.one_witnesses };
        for p in candidates {
            if label(p)? != base {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Checks the decision rule against exact margin membership for every
    /// member of `class`.
    pub fn validate(&self, class: &FiniteClass, u: &Perturbation) -> Result<()> {
        for m in class.members() {
            let h = &m.hypothesis;
            let decided = self.decide(|p| h.eval(p))?;
            if decided != loss::margin_membership(h, &self.base, u)? {
                return Err(Error::WitnessValidation {
                    point: Box::new(self.base.clone()),
                    hypothesis: m.name.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Inclusion-minimal sets among `sets` (duplicates already removed).
fn minimal_sets(sets: &[BTreeSet<Point>]) -> Vec<&BTreeSet<Point>> {
    sets.iter().filter(|a| !sets.iter().any(|b| b != *a && b.is_subset(a))).collect()
}

/// Witness set for `x` built from the minimal elements of the two
/// inclusion orders on `U(x) ∩ h` and `U(x) \ h`.
///
/// Hypotheses with equal traces are identified and empty traces dropped. One
/// representative point, the smallest in point order, is taken from each
/// minimal trace.
pub fn build_witness_set(class: &FiniteClass, u: &Perturbation, x: &Point) -> Result<WitnessSet> {
    let nbhd = u
        .neighbors(x)
        .ok_or_else(|| Error::InvalidParameter("witness sets are built for finite perturbation maps".into()))?;
    let mut ones: Vec<BTreeSet<Point>> = Vec::new();
    let mut zeros: Vec<BTreeSet<Point>> = Vec::new();
    for h in class.iter() {
        let mut pos = BTreeSet::new();
        let mut neg = BTreeSet::new();
        for z in &nbhd {
            if h.eval(z)? {
                pos.insert(z.clone());
            } else {
                neg.insert(z.clone());
            }
        }
        if !pos.is_empty() && !ones.contains(&pos) {
            ones.push(pos);
        }
        if !neg.is_empty() && !zeros.contains(&neg) {
            zeros.push(neg);
        }
    }
    let pick = |sets: &[BTreeSet<Point>]| -> Vec<Point> {
        let reps: BTreeSet<Point> = minimal_sets(sets).into_iter().map(|s| s.iter().next().unwrap().clone()).collect();
        reps.into_iter().collect()
    };
    Ok(WitnessSet { base: x.clone(), zero_witnesses: pick(&zeros), one_witnesses: pick(&ones) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificationMode {
    ExactWitness,
    L1Corners,
    Tolerant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationParams {
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    #[serde(with = "rational::serde_str")]
    pub estimate: Rational,
    pub estimate_f64: f64,
    pub m_used: usize,
    pub q_used: usize,
    /// Declared query bound for this run.
    pub q_budget: usize,
    pub params: CertificationParams,
    pub mode: CertificationMode,
}

fn finish(
    flagged: usize,
    m: usize,
    oracle: &LabelOracle,
    start: usize,
    q_budget: usize,
    params: CertificationParams,
    mode: CertificationMode,
) -> Result<CertificationReport> {
    let q_used = oracle.used() - start;
    if q_used > q_budget {
        return Err(Error::InvariantViolation(format!("certifier used {q_used} queries, declared {q_budget}")));
    }
    let estimate = rational::q(flagged as i64, m as i64);
    Ok(CertificationReport {
        estimate_f64: rational::to_f64(&estimate),
        estimate,
        m_used: m,
        q_used,
        q_budget,
        params,
        mode,
    })
}

/// Estimates the robust loss by querying each sample point and its witness
/// set. `labels_true` are the sample's labels.
///
/// The declared budget is `m (1 + max |w(x)|)`.
pub fn certify_witness(
    oracle: &mut LabelOracle,
    sample: &[Point],
    witness_fn: impl Fn(&Point) -> Result<WitnessSet>,
    labels_true: &[bool],
    eps: f64,
    delta: f64,
) -> Result<CertificationReport> {
    let needed = bounds::hoeffding_size(eps, delta)?;
    if sample.len() < needed {
        return Err(Error::InvalidParameter(format!(
            "sample of {} points is below the required {needed}",
            sample.len()
        )));
    }
    if labels_true.len() != sample.len() {
        return Err(Error::InvalidParameter("one true label per sample point".into()));
    }
    let witnesses = sample.iter().map(&witness_fn).collect::<Result<Vec<_>>>()?;
    let max_w = witnesses.iter().map(WitnessSet::len).max().unwrap_or(0);
    let q_budget = sample.len() * (1 + max_w);
    let start = oracle.used();

    let mut flagged = 0;
    for (w, &y) in witnesses.iter().zip(labels_true) {
        let mut seen: BTreeMap<Point, bool> = BTreeMap::new();
        let mut ask = |p: &Point| -> Result<bool> {
            if let Some(&l) = seen.get(p) {
                return Ok(l);
            }
            let l = oracle.query(p)?;
            seen.insert(p.clone(), l);
            Ok(l)
        };
        let at_base = ask(&w.base)?;
        let margin = w.decide(&mut ask)?;
        if at_base != y || margin {
            flagged += 1;
        }
    }
    finish(
        flagged,
        sample.len(),
        oracle,
        start,
        q_budget,
        CertificationParams { eps: Some(eps), delta: Some(delta), gamma: None },
        CertificationMode::ExactWitness,
    )
}

/// Halfspaces under the L1 ball of radius `r`: five queries per point, the
/// point and the four corners `x ± r e_i`. Margin iff a corner label differs
/// from the label at `x`.
pub fn certify_halfspace_l1(
    oracle: &mut LabelOracle,
    sample: &[(Point, bool)],
    r: &Rational,
) -> Result<CertificationReport> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let zero = rational::zero();
    let neg = -r.clone();
    let corners = [(&zero, r), (r, &zero), (&neg, &zero), (&zero, &neg)];
    let start = oracle.used();
    let mut flagged = 0;
    for (x, y) in sample {
        if x.as_plane().is_none() {
            return Err(Error::PointOutsideDomain(Box::new(x.clone())));
        }
        let at_x = oracle.query(x)?;
        let mut margin = false;
        for (dx, dy) in corners {
            // Every corner is queried, even after a differing one is found.
            if oracle.query(&x.offset(dx, dy))? != at_x {
                margin = true;
            }
        }
        if at_x != *y || margin {
            flagged += 1;
        }
    }
    finish(
        flagged,
        sample.len(),
        oracle,
        start,
        5 * sample.len(),
        CertificationParams { eps: None, delta: None, gamma: None },
        CertificationMode::L1Corners,
    )
}

/// Vertex count of a regular polygon with circumradius `1 + γ` whose
/// apothem is at least 1: `max(3, ⌈π / arccos(1/(1+γ))⌉)`.
pub fn tolerant_polygon_vertices(gamma: f64) -> Result<usize> {
    if gamma.is_nan() || gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let ratio = std::f64::consts::PI / (1.0 / (1.0 + gamma)).acos();
    // Absorb rounding in the arccos so exact integers (γ = 1 gives 3) are
    // not bumped to the next count.
    let k = (ratio - 1e-9).ceil() as usize;
    Ok(k.max(3))
}

fn cross(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// Rational polygon offsets for the tolerant certifier: `k` vertices lying
/// exactly on the circle of radius `r (1 + γ)`, vertex 0 at angle 0 and
/// vertex `j` near angle `2πj/k`, such that every edge is at distance at
/// least `r` from the centre.
///
/// Vertices are rational points of the circle obtained from the half-angle
/// parametrization `((1 - t²)/(1 + t²), 2t/(1 + t²))` with `t` a dyadic
/// approximation of `tan(θ/2)`, refined until the edge condition holds
/// exactly. When the regular polygon has no slack (the vertex-count formula
/// lands exactly on an integer, e.g. γ = 1) no rational polygon exists and
/// an error is returned.
pub fn tolerant_polygon(r: &Rational, gamma: &Rational) -> Result<Vec<(Rational, Rational)>> {
    let k = tolerant_polygon_vertices(rational::to_f64(gamma))?;
    let big_r = r * (rational::one() + gamma);
    let r2 = r * r;
    for bits in (8u32..=60).step_by(4) {
        let scale = num_bigint::BigInt::from(1u64) << bits;
        let verts: Vec<(Rational, Rational)> = (0..k)
            .map(|j| {
                if 2 * j == k {
                    return (-big_r.clone(), rational::zero());
                }
                let theta = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                let t_f = (theta / 2.0).tan();
                let t = Rational::new(
                    num_bigint::BigInt::from((t_f * (1u64 << bits) as f64).round() as i128),
                    scale.clone(),
                );
                let t2 = &t * &t;
                let denom = rational::one() + &t2;
                let c = (rational::one() - &t2) / &denom;
                let s = (rational::int(2) * &t) / &denom;
                (&big_r * c, &big_r * s)
            })
            .collect();
        let ok = (0..k).all(|j| {
            let a = &verts[j];
            let b = &verts[(j + 1) % k];
            let cr = cross(a, b);
            let dx = &b.0 - &a.0;
            let dy = &b.1 - &a.1;
            cr > rational::zero() && &cr * &cr >= &r2 * (&dx * &dx + &dy * &dy)
        });
        if ok {
            return Ok(verts);
        }
    }
    Err(Error::NoRationalPolygon(format!("r = {}, gamma = {}, k = {k}", rational::format(r), rational::format(gamma))))
}

/// Tolerant certification of halfspaces for `U` = L2 ball of radius `r`
/// and `V` = L2 ball of radius `r (1 + γ)`: each point and the `k` polygon
/// vertices around it are queried, `m (k + 1)` queries in total.
pub fn certify_tolerant_l2(
    oracle: &mut LabelOracle,
    sample: &[(Point, bool)],
    r: &Rational,
    gamma: &Rational,
    eps: f64,
    delta: f64,
) -> Result<CertificationReport> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let polygon = tolerant_polygon(r, gamma)?;
    let start = oracle.used();
    let mut flagged = 0;
    for (x, y) in sample {
        if x.as_plane().is_none() {
            return Err(Error::PointOutsideDomain(Box::new(x.clone())));
        }
        let at_x = oracle.query(x)?;
        let mut margin = false;
        for (dx, dy) in &polygon {
            if oracle.query(&x.offset(dx, dy))? != at_x {
                margin = true;
            }
        }
        if at_x != *y || margin {
            flagged += 1;
        }
    }
    finish(
        flagged,
        sample.len(),
        oracle,
        start,
        sample.len() * (polygon.len() + 1),
        CertificationParams { eps: Some(eps), delta: Some(delta), gamma: Some(rational::to_f64(gamma)) },
        CertificationMode::Tolerant,
    )
}

/// Margin flag of the tolerant polygon test for a known hypothesis, without
/// an oracle. Used to check the sandwich property directly.
pub fn polygon_flag(h: &Hypothesis, x: &Point, polygon: &[(Rational, Rational)]) -> Result<bool> {
    let at_x = h.eval(x)?;
    for (dx, dy) in polygon {
        if h.eval(&x.offset(dx, dy))? != at_x {
            return Ok(true);
        }
    }
    Ok(false)
}
