//! Learning procedures: robust ERM, semi-supervised version-space pruning,
//! the extended-oracle and cluster learners, and sample compression driven
//! by a label-query adversary.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::adversary::Adversary;
use crate::bounds;
use crate::error::{Error, Result};
use crate::hypothesis::{FiniteClass, Hypothesis, HypothesisClass, Member};
use crate::loss;
use crate::oracles::{ExtendedMargin, LabelOracle};
use crate::perturbation::Perturbation;
use crate::point::Point;
use crate::rational::{self, Rational};
use crate::vc;

// ---------------------------------------------------------------------------
// Robust ERM

/// Candidate thresholds for upward thresholds under a ball of radius `r`:
/// one point inside each interval cut out by the breakpoints
/// `{x - r, x, x + r}`, plus one below and one above all of them.
pub fn threshold_candidates(points: &[&Rational], r: &Rational) -> Vec<Rational> {
    let mut br: BTreeSet<Rational> = BTreeSet::new();
    for x in points {
        br.insert(*x - r);
        br.insert((*x).clone());
        br.insert(*x + r);
    }
    let sorted: Vec<Rational> = br.into_iter().collect();
    let mut out = Vec::with_capacity(sorted.len() + 1);
    match (sorted.first(), sorted.last()) {
        (Some(lo), Some(hi)) => {
            out.push(lo - rational::one());
            out.extend(sorted.windows(2).map(|w| rational::midpoint(&w[0], &w[1])));
            out.push(hi + rational::one());
        }
        _ => out.push(rational::zero()),
    }
    out
}

/// A member of `class` minimizing the empirical robust loss on `s`.
///
/// Finite classes are scanned in order, keeping the first minimizer. Upward
/// thresholds under a ball are searched over [`threshold_candidates`],
/// keeping the smallest minimizing threshold.
pub fn erm_robust(class: &HypothesisClass, s: &[(Point, bool)], u: &Perturbation) -> Result<Hypothesis> {
    let score = |h: &Hypothesis| -> Result<usize> {
        let mut n = 0;
        for (x, y) in s {
            if loss::robust_loss_point(h, x, *y, u)? {
                n += 1;
            }
        }
        Ok(n)
    };
    let candidates: Vec<Hypothesis> = match class {
        HypothesisClass::Finite(c) => {
            if c.is_empty() {
                return Err(Error::EmptyClass);
            }
            c.iter().cloned().collect()
        }
        HypothesisClass::Thresholds => {
            let r = match u {
                Perturbation::Ball { radius, .. } => radius,
                _ => {
                    return Err(Error::UnsupportedCombination { hypothesis: "threshold", perturbation: u.kind_name() })
                }
            };
            let xs = s
                .iter()
                .map(|(x, _)| x.as_line().ok_or_else(|| Error::PointOutsideDomain(Box::new(x.clone()))))
                .collect::<Result<Vec<_>>>()?;
            threshold_candidates(&xs, r).into_iter().map(Hypothesis::threshold).collect()
        }
        HypothesisClass::Halfspaces => {
            return Err(Error::UnsupportedCombination { hypothesis: "halfspace", perturbation: u.kind_name() })
        }
    };
    let mut best: Option<(usize, Hypothesis)> = None;
    for h in candidates {
        let v = score(&h)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, h));
        }
    }
    Ok(best.unwrap().1)
}

// ---------------------------------------------------------------------------
// Version spaces

/// Hypotheses with zero empirical binary loss on a sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VersionSpace {
    Finite {
        members: Vec<Member>,
    },
    /// Upward thresholds `t` with `above < t <= at_most`; a missing bound is
    /// unconstrained.
    Thresholds {
        above: Option<Rational>,
        at_most: Option<Rational>,
    },
}

impl VersionSpace {
    pub fn finite(class: &FiniteClass, s: &[(Point, bool)]) -> Result<Self> {
        let mut members = Vec::new();
        for m in class.members() {
            if loss::consistent(&m.hypothesis, s)? {
                members.push(m.clone());
            }
        }
        Ok(VersionSpace::Finite { members })
    }

    pub fn thresholds(s: &[(Point, bool)]) -> Result<Self> {
        let mut above: Option<Rational> = None;
        let mut at_most: Option<Rational> = None;
        for (x, y) in s {
            let v = x.as_line().ok_or_else(|| Error::PointOutsideDomain(Box::new(x.clone())))?;
            if *y {
                if at_most.as_ref().is_none_or(|b| v < b) {
                    at_most = Some(v.clone());
                }
            } else if above.as_ref().is_none_or(|b| v > b) {
                above = Some(v.clone());
            }
        }
        Ok(VersionSpace::Thresholds { above, at_most })
    }

    pub fn is_empty(&self) -> bool {
        match self {
            VersionSpace::Finite { members } => members.is_empty(),
            VersionSpace::Thresholds { above: Some(a), at_most: Some(b) } => a >= b,
            VersionSpace::Thresholds { .. } => false,
        }
    }

    pub fn members(&self) -> &[Member] {
        match self {
            VersionSpace::Finite { members } => members,
            VersionSpace::Thresholds { .. } => &[],
        }
    }
}

// ---------------------------------------------------------------------------
// Semi-supervised pruning

/// First version-space member whose margin weight, as reported by
/// `margin`, is zero.
pub fn ssl_margin_prune(
    class: &FiniteClass,
    s: &[(Point, bool)],
    mut margin: impl FnMut(&Hypothesis) -> Result<Rational>,
) -> Result<Hypothesis> {
    let vs = VersionSpace::finite(class, s)?;
    for m in vs.members() {
        if margin(&m.hypothesis)? == rational::zero() {
            return Ok(m.hypothesis.clone());
        }
    }
    Err(Error::EmptyAfterPruning)
}

/// First version-space member with no point of the unlabeled sample `t`
/// in its margin.
pub fn ssl_unlabeled_prune(
    class: &FiniteClass,
    s: &[(Point, bool)],
    t: &[Point],
    u: &Perturbation,
) -> Result<Hypothesis> {
    let vs = VersionSpace::finite(class, s)?;
    'members: for m in vs.members() {
        for x in t {
            if loss::margin_membership(&m.hypothesis, x, u)? {
                continue 'members;
            }
        }
        return Ok(m.hypothesis.clone());
    }
    Err(Error::EmptyAfterPruning)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SslSampleSizes {
    pub labeled: usize,
    pub unlabeled: usize,
    pub vc_class: usize,
    pub vc_margin_class: usize,
}

/// Labeled and unlabeled sample sizes: ε-net sizes for the class and for
/// its margin class over `domain` (dimensions floored at 1).
pub fn ssl_sample_sizes(
    class: &FiniteClass,
    u: &Perturbation,
    domain: &[Point],
    eps: f64,
    delta: f64,
) -> Result<SslSampleSizes> {
    let vc_class = vc::class_vc_dimension(class, domain)?;
    let vc_margin_class = vc::vc_dimension(domain, &loss::margin_class_sets(class, u, domain)?)?;
    Ok(SslSampleSizes {
        labeled: bounds::eps_net_size(vc_class.max(1), eps, delta)?,
        unlabeled: bounds::eps_net_size(vc_margin_class.max(1), eps, delta)?,
        vc_class,
        vc_margin_class,
    })
}

// ---------------------------------------------------------------------------
// Extended margin oracle

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedOracleChoice {
    pub hypothesis: Hypothesis,
    pub name: String,
    /// Name of the version-space member used as labeler.
    pub labeler: String,
    /// `P(mar(h)) + P(h_e Δ h) - P(mar(h) ∩ (h_e Δ h))` for every member.
    pub scores: Vec<(String, String)>,
}

/// Takes the first member consistent with `s` as labeler `h_e` and returns
/// the member minimizing the robust loss against `h_e`, computed from the
/// three extended oracle values. Ties keep the first member.
pub fn extended_oracle_learner(
    class: &FiniteClass,
    s: &[(Point, bool)],
    mut ext: impl FnMut(&Hypothesis, &Hypothesis) -> Result<ExtendedMargin>,
) -> Result<ExtendedOracleChoice> {
    let vs = VersionSpace::finite(class, s)?;
    let labeler = vs.members().first().ok_or(Error::EmptyAfterPruning)?.clone();
    let mut best: Option<(Rational, &Member)> = None;
    let mut scores = Vec::with_capacity(class.len());
    for m in class.members() {
        let v = ext(&m.hypothesis, &labeler.hypothesis)?.union();
        scores.push((m.name.clone(), rational::format(&v)));
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, m));
        }
    }
    let (_, m) = best.ok_or(Error::EmptyClass)?;
    Ok(ExtendedOracleChoice { hypothesis: m.hypothesis.clone(), name: m.name.clone(), labeler: labeler.name, scores })
}

// ---------------------------------------------------------------------------
// Cluster learner

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterResult {
    /// Tabular hypothesis constant on every cluster.
    pub hypothesis: Hypothesis,
    /// Name of the version-space member it extends.
    pub base: String,
    pub clusters: Vec<Vec<Point>>,
}

/// Connected components of the graph with edges `x ~ x'` for `x ∈ supp`, `x' ∈ U(x)`.
pub fn clusters(supp: &[Point], u: &Perturbation) -> Result<Vec<Vec<Point>>> {
    let mut index: BTreeMap<Point, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for x in supp {
        let nbhd =
            u.neighbors(x).ok_or(Error::UnsupportedCombination { hypothesis: "any", perturbation: u.kind_name() })?;
        let n = index.len();
        let ix = *index.entry(x.clone()).or_insert(n);
        for z in nbhd {
            let n = index.len();
            let iz = *index.entry(z).or_insert(n);
            edges.push((ix, iz));
        }
    }
    let mut uf = UnionFind::<usize>::new(index.len());
    for (a, b) in edges {
        uf.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<Point>> = BTreeMap::new();
    for (p, i) in &index {
        groups.entry(uf.find(*i)).or_default().push(p.clone());
    }
    let mut out: Vec<Vec<Point>> = groups.into_values().collect();
    out.sort();
    Ok(out)
}

/// Improper learner: selects the first version-space member that is
/// constant on the support part of every cluster, then labels each whole
/// cluster with that constant. The result has zero margin on `supp`.
pub fn cluster_learner(
    class: &FiniteClass,
    s: &[(Point, bool)],
    supp: &[Point],
    u: &Perturbation,
) -> Result<ClusterResult> {
    let comps = clusters(supp, u)?;
    let supp_set: BTreeSet<&Point> = supp.iter().collect();
    let cluster_of: BTreeMap<&Point, usize> =
        comps.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |p| (p, i))).collect();

    let mut sample_label: BTreeMap<usize, (bool, &Point)> = BTreeMap::new();
    for (x, y) in s {
        if let Some(&c) = cluster_of.get(x) {
            match sample_label.get(&c) {
                Some((l, _)) if l != y => return Err(Error::HeterogeneousCluster(Box::new(x.clone()))),
                _ => {
                    sample_label.insert(c, (*y, x));
                }
            }
        }
    }

    let vs = VersionSpace::finite(class, s)?;
    let mut chosen: Option<(&Member, Vec<bool>)> = None;
    'members: for m in vs.members() {
        let mut labels = Vec::with_capacity(comps.len());
        for c in &comps {
            let mut label: Option<bool> = None;
            for p in c.iter().filter(|p| supp_set.contains(p)) {
                let l = m.hypothesis.eval(p)?;
                if label.is_some_and(|prev| prev != l) {
                    continue 'members;
                }
                label = Some(l);
            }
            labels.push(label.unwrap_or(false));
        }
        chosen = Some((m, labels));
        break;
    }
    let (member, labels) = chosen.ok_or(Error::EmptyAfterPruning)?;

    let mut table: BTreeMap<Point, bool> = match &member.hypothesis {
        Hypothesis::Tabular(t) => t.clone(),
        _ => BTreeMap::new(),
    };
    for (c, l) in comps.iter().zip(&labels) {
        for p in c {
            table.insert(p.clone(), *l);
        }
    }
    Ok(ClusterResult { hypothesis: Hypothesis::Tabular(table), base: member.name.clone(), clusters: comps })
}

// ---------------------------------------------------------------------------
// Compression

/// A proper, non-robust sample compression scheme for one class.
pub trait ProperCompressor: Sync {
    fn name(&self) -> &'static str;

    /// Sub-sample of `t` from which [`ProperCompressor::decompress`]
    /// rebuilds a class member consistent with all of `t`.
    fn compress(&self, t: &[(Point, bool)]) -> Result<Vec<(Point, bool)>>;

    fn decompress(&self, kept: &[(Point, bool)]) -> Result<Hypothesis>;
}

/// Upward thresholds: keeps the largest 0-labeled and the smallest
/// 1-labeled point and decodes to their midpoint.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThresholdCompressor;

impl ProperCompressor for ThresholdCompressor {
    fn name(&self) -> &'static str {
        "threshold"
    }

    fn compress(&self, t: &[(Point, bool)]) -> Result<Vec<(Point, bool)>> {
        let vs = VersionSpace::thresholds(t)?;
        if vs.is_empty() {
            return Err(Error::NotRealizable("a 0-labeled point lies above a 1-labeled point".into()));
        }
        let VersionSpace::Thresholds { above, at_most } = vs else { unreachable!() };
        let mut kept = Vec::new();
        if let Some(a) = above {
            kept.push((Point::Line(a), false));
        }
        if let Some(b) = at_most {
            kept.push((Point::Line(b), true));
        }
        Ok(kept)
    }

    fn decompress(&self, kept: &[(Point, bool)]) -> Result<Hypothesis> {
        let vs = VersionSpace::thresholds(kept)?;
        let t = match vs {
            VersionSpace::Thresholds { above: Some(a), at_most: Some(b) } if a < b => rational::midpoint(&a, &b),
            VersionSpace::Thresholds { above: Some(a), at_most: None } => a + rational::one(),
            VersionSpace::Thresholds { above: None, at_most: Some(b) } => b - rational::one(),
            VersionSpace::Thresholds { above: None, at_most: None } => rational::zero(),
            _ => return Err(Error::NotRealizable("kept points are not separable by a threshold".into())),
        };
        Ok(Hypothesis::threshold(t))
    }
}

/// Finite classes: the decoder returns the first member consistent with the
/// kept points; the encoder adds points until that member is consistent
/// with the whole input.
#[derive(Clone, Debug)]
pub struct FiniteClassCompressor {
    pub class: FiniteClass,
}

impl FiniteClassCompressor {
    fn first_consistent(&self, kept: &[(Point, bool)]) -> Result<Option<&Hypothesis>> {
        for h in self.class.iter() {
            if loss::consistent(h, kept)? {
                return Ok(Some(h));
            }
        }
        Ok(None)
    }
}

impl ProperCompressor for FiniteClassCompressor {
    fn name(&self) -> &'static str {
        "finite"
    }

    fn compress(&self, t: &[(Point, bool)]) -> Result<Vec<(Point, bool)>> {
        let mut kept: Vec<(Point, bool)> = Vec::new();
        loop {
            let h = self
                .first_consistent(&kept)?
                .ok_or_else(|| Error::NotRealizable("no member is consistent with the sample".into()))?;
            let mut miss = None;
            for (x, y) in t {
                if h.eval(x)? != *y {
                    miss = Some((x.clone(), *y));
                    break;
                }
            }
            match miss {
                None => return Ok(kept),
                Some(p) => kept.push(p),
            }
        }
    }

    fn decompress(&self, kept: &[(Point, bool)]) -> Result<Hypothesis> {
        self.first_consistent(kept)?
            .cloned()
            .ok_or_else(|| Error::NotRealizable("no member is consistent with the kept points".into()))
    }
}

/// One kept point: either a sample point, or a query recovered by
/// re-running the adversary on a sample point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KeptPoint {
    Sample {
        point: Point,
        label: u8,
    },
    Derived {
        source: Point,
        source_label: u8,
        /// Position in the adversary's query list for `source`.
        rank: usize,
        /// Labels of that query list, in order.
        labels: Vec<u8>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressedSet {
    pub adversary: String,
    pub compressor: String,
    pub perturbation: Perturbation,
    pub kept: Vec<KeptPoint>,
}

impl CompressedSet {
    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    /// Number of side-information points.
    pub fn derived(&self) -> usize {
        self.kept.iter().filter(|k| matches!(k, KeptPoint::Derived { .. })).count()
    }
}

/// A source point, its label, and the labeled queries issued for it.
type SourceQueries = (Point, bool, Vec<(Point, bool)>);

fn build_compressed(
    s: &[(Point, bool)],
    u: &Perturbation,
    adv: &dyn Adversary,
    compressor: &dyn ProperCompressor,
    mut query: impl FnMut(&Point, bool, &Point) -> Result<bool>,
) -> Result<CompressedSet> {
    let mut t: BTreeMap<Point, bool> = BTreeMap::new();
    let insert = |t: &mut BTreeMap<Point, bool>, p: &Point, l: bool| -> Result<()> {
        match t.insert(p.clone(), l) {
            Some(prev) if prev != l => Err(Error::NotRealizable(format!("conflicting labels at {p}"))),
            _ => Ok(()),
        }
    };
    for (x, y) in s {
        insert(&mut t, x, *y)?;
    }
    let mut per_source: Vec<SourceQueries> = Vec::with_capacity(s.len());
    for (x, y) in s {
        let res = adv.attack_point(x, *y, u, &mut |p| query(x, *y, p))?;
        for (p, l) in &res.queries {
            insert(&mut t, p, *l)?;
        }
        per_source.push((x.clone(), *y, res.queries));
    }
    let t: Vec<(Point, bool)> = t.into_iter().collect();
    let kept_pts = compressor.compress(&t)?;

    let sample_points: BTreeSet<&Point> = s.iter().map(|(x, _)| x).collect();
    let mut kept = Vec::with_capacity(kept_pts.len());
    for (p, l) in kept_pts {
        if sample_points.contains(&p) {
            kept.push(KeptPoint::Sample { point: p, label: l as u8 });
            continue;
        }
        let found =
            per_source.iter().find_map(|(x, y, qs)| qs.iter().position(|(q, _)| *q == p).map(|rank| (x, y, qs, rank)));
        let (source, source_label, qs, rank) = found.ok_or_else(|| {
            Error::PropernessViolation(format!("kept point {p} is neither a sample point nor a query"))
        })?;
        kept.push(KeptPoint::Derived {
            source: source.clone(),
            source_label: *source_label as u8,
            rank,
            labels: qs.iter().map(|(_, l)| *l as u8).collect(),
        });
    }
    Ok(CompressedSet {
        adversary: adv.name().to_string(),
        compressor: compressor.name().to_string(),
        perturbation: u.clone(),
        kept,
    })
}

/// Compresses `s` (labeled by the oracle's hypothesis): the adversary's
/// queries are answered by the oracle, the compressor runs on the sample
/// together with the labeled queries, and kept queries are stored as
/// (source, rank, query labels).
pub fn compress_robust(
    s: &[(Point, bool)],
    oracle: &mut LabelOracle,
    u: &Perturbation,
    adv: &dyn Adversary,
    compressor: &dyn ProperCompressor,
) -> Result<CompressedSet> {
    build_compressed(s, u, adv, compressor, |_, _, p| oracle.query(p))
}

/// Rebuilds a class member from a compressed set by replaying the
/// adversary on each source with the stored labels.
pub fn decompress_robust(
    cs: &CompressedSet,
    adv: &dyn Adversary,
    compressor: &dyn ProperCompressor,
) -> Result<Hypothesis> {
    if cs.adversary != adv.name() || cs.compressor != compressor.name() {
        return Err(Error::MalformedSideInfo(format!(
            "set was built with {}/{}, decoding with {}/{}",
            cs.adversary,
            cs.compressor,
            adv.name(),
            compressor.name()
        )));
    }
    let mut kept = Vec::with_capacity(cs.kept.len());
    for k in &cs.kept {
        match k {
            KeptPoint::Sample { point, label } => kept.push((point.clone(), crate::label_from_u8(*label)?)),
            KeptPoint::Derived { source, source_label, rank, labels } => {
                let bits = labels.iter().map(|b| crate::label_from_u8(*b)).collect::<Result<Vec<_>>>()?;
                let mut served = 0;
                let replay =
                    adv.attack_point(source, crate::label_from_u8(*source_label)?, &cs.perturbation, &mut |_| {
                        let b = bits.get(served).copied().ok_or_else(|| {
                            Error::MalformedSideInfo(format!("{} label bits for source {source}", bits.len()))
                        })?;
                        served += 1;
                        Ok(b)
                    })?;
                if replay.queries.len() != bits.len() {
                    return Err(Error::MalformedSideInfo(format!(
                        "adversary issued {} queries for {source}, side information has {}",
                        replay.queries.len(),
                        bits.len()
                    )));
                }
                let (p, l) =
                    replay.queries.get(*rank).cloned().ok_or_else(|| {
                        Error::MalformedSideInfo(format!("rank {rank} beyond {} queries", bits.len()))
                    })?;
                kept.push((p, l));
            }
        }
    }
    compressor.decompress(&kept)
}

/// Learner without oracle access: under robust realizability every point of
/// `U(x)` carries the label of `x`, so each adversary query is answered
/// with its source's label. Compresses, then decompresses.
pub fn compression_learner(
    s: &[(Point, bool)],
    u: &Perturbation,
    adv: &dyn Adversary,
    compressor: &dyn ProperCompressor,
) -> Result<(Hypothesis, CompressedSet)> {
    let cs = build_compressed(s, u, adv, compressor, |_, y, _| Ok(y))?;
    let h = decompress_robust(&cs, adv, compressor)?;
    Ok((h, cs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{FiniteExhaustive, ThresholdEndpoints};
    use crate::constructions;
    use crate::oracles;
    use crate::perturbation::Norm;
    use crate::rational::{int, q};

    fn line(n: i64, d: i64) -> Point {
        Point::line(q(n, d))
    }

    #[test]
    fn erm_on_seven_points() {
        let ci = constructions::seven_point_instance().unwrap();
        let mut s = Vec::new();
        for a in ci.p1.support() {
            let copies = (&a.weight * int(6)).to_integer();
            for _ in 0..copies.try_into().unwrap_or(0usize) {
                s.push((a.point.clone(), a.label));
            }
        }
        let class = HypothesisClass::Finite(ci.class.clone());
        let h = erm_robust(&class, &s, &ci.perturbation).unwrap();
        assert_eq!(ci.class.name_of(&h), Some("h1"));
        assert!(matches!(
            erm_robust(&HypothesisClass::Finite(FiniteClass::from_members_unchecked(vec![])), &s, &ci.perturbation),
            Err(Error::EmptyClass)
        ));
    }

    #[test]
    fn erm_thresholds_realizable() {
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let s: Vec<(Point, bool)> = vec![(line(2, 10), false), (line(35, 100), false), (line(7, 10), true)];
        let h = erm_robust(&HypothesisClass::Thresholds, &s, &u).unwrap();
        assert_eq!(loss::empirical_robust_loss(&h, &s, &u).unwrap(), int(0));
    }

    #[test]
    fn ssl_on_seven_points_is_not_realizable() {
        let ci = constructions::seven_point_instance().unwrap();
        let o = oracles::ClassOracle::new(&ci.class, &ci.p1, &ci.perturbation);
        assert!(matches!(ssl_margin_prune(&ci.class, &[], |h| o.margin(h)), Err(Error::EmptyAfterPruning)));
    }

    #[test]
    fn extended_oracle_on_eight_points() {
        let ci = constructions::eight_point_instance().unwrap();
        for (p, want) in [(&ci.p1, "h1"), (&ci.p2, "h2")] {
            let s: Vec<(Point, bool)> = p.support().map(|a| (a.point.clone(), a.label)).collect();
            let o = oracles::ClassOracle::new(&ci.class, p, &ci.perturbation);
            let choice = extended_oracle_learner(&ci.class, &s, |h, e| o.extended(h, e)).unwrap();
            assert_eq!(choice.labeler, "hr");
            assert_eq!(choice.name, want);
        }
        let s: Vec<(Point, bool)> = ci.p1.support().map(|a| (a.point.clone(), a.label)).collect();
        let o = oracles::ClassOracle::new(&ci.class, &ci.p1, &ci.perturbation);
        let choice = extended_oracle_learner(&ci.class, &s, |h, e| o.extended(h, e)).unwrap();
        let scores: BTreeMap<_, _> = choice.scores.into_iter().collect();
        assert_eq!(scores["h1"], "1/6");
        assert_eq!(scores["h2"], "1/4");
        assert_eq!(scores["hr"], "7/12");
        assert_eq!(scores["hc"], "1/1");
    }

    #[test]
    fn cluster_two_groups() {
        let d: Vec<Point> = ["a", "b", "c", "d", "e"].into_iter().map(Point::sym).collect();
        let u = Perturbation::finite_map([
            (d[0].clone(), vec![d[1].clone()]),
            (d[2].clone(), vec![d[3].clone(), d[4].clone()]),
        ]);
        let class = FiniteClass::from_hypotheses(
            [Hypothesis::indicator(&d, &d[1..2]), Hypothesis::indicator(&d, &d[2..4])],
            &d,
        )
        .unwrap();
        let supp = vec![d[0].clone(), d[1].clone(), d[2].clone(), d[3].clone()];
        let s = vec![(d[0].clone(), false), (d[2].clone(), true)];
        let res = cluster_learner(&class, &s, &supp, &u).unwrap();
        assert_eq!(res.base, "h2");
        assert_eq!(res.clusters.len(), 2);
        // e is reached only through U(c) and takes the cluster label.
        assert!(res.hypothesis.eval(&d[4]).unwrap());
        for x in &supp {
            assert!(!loss::margin_membership(&res.hypothesis, x, &u).unwrap());
        }
        let bad = vec![(d[0].clone(), false), (d[1].clone(), true)];
        assert!(matches!(cluster_learner(&class, &bad, &supp, &u), Err(Error::HeterogeneousCluster(_))));
    }

    #[test]
    fn threshold_compressor() {
        let c = ThresholdCompressor;
        let t = vec![(line(3, 10), false), (line(8, 10), true)];
        let kept = c.compress(&t).unwrap();
        assert_eq!(kept, t);
        assert_eq!(c.decompress(&kept).unwrap(), Hypothesis::threshold(q(55, 100)));
        let ones = vec![(line(3, 10), true), (line(8, 10), true)];
        let kept = c.compress(&ones).unwrap();
        assert_eq!(kept, vec![(line(3, 10), true)]);
        assert!(c.decompress(&kept).unwrap().eval(&line(3, 10)).unwrap());
        assert!(c.compress(&[(line(1, 1), false), (line(0, 1), true)]).is_err());
    }

    #[test]
    fn compression_hand_trace() {
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let h = Hypothesis::threshold(q(1, 2));
        let s = vec![(line(2, 10), false), (line(9, 10), true)];
        let mut o = LabelOracle::new(h.clone());
        let cs = compress_robust(&s, &mut o, &u, &ThresholdEndpoints, &ThresholdCompressor).unwrap();
        assert_eq!(o.used(), 4);
        assert_eq!(
            cs.kept,
            vec![
                KeptPoint::Derived { source: line(2, 10), source_label: 0, rank: 1, labels: vec![0, 0] },
                KeptPoint::Derived { source: line(9, 10), source_label: 1, rank: 0, labels: vec![1, 1] },
            ]
        );
        let hh = decompress_robust(&cs, &ThresholdEndpoints, &ThresholdCompressor).unwrap();
        assert_eq!(hh, Hypothesis::threshold(q(55, 100)));
        for (x, y) in &s {
            assert_eq!(
                loss::robust_loss_point(&h, x, *y, &u).unwrap(),
                loss::robust_loss_point(&hh, x, *y, &u).unwrap()
            );
        }
        let json = serde_json::to_string(&cs).unwrap();
        let back: CompressedSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cs);
    }

    #[test]
    fn malformed_side_info() {
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let cs = CompressedSet {
            adversary: "threshold".into(),
            compressor: "threshold".into(),
            perturbation: u,
            kept: vec![KeptPoint::Derived { source: line(1, 2), source_label: 0, rank: 5, labels: vec![0, 1] }],
        };
        assert!(matches!(
            decompress_robust(&cs, &ThresholdEndpoints, &ThresholdCompressor),
            Err(Error::MalformedSideInfo(_))
        ));
        assert!(decompress_robust(&cs, &FiniteExhaustive, &ThresholdCompressor).is_err());
    }

    #[test]
    fn finite_compression_round_trip() {
        let ci = constructions::eight_point_instance().unwrap();
        let h = ci.class.get("hr").unwrap().clone();
        let s: Vec<(Point, bool)> = ci.domain.iter().map(|x| (x.clone(), h.eval(x).unwrap())).collect();
        let comp = FiniteClassCompressor { class: ci.class.clone() };
        let mut o = LabelOracle::new(h.clone());
        let cs = compress_robust(&s, &mut o, &ci.perturbation, &FiniteExhaustive, &comp).unwrap();
        let hh = decompress_robust(&cs, &FiniteExhaustive, &comp).unwrap();
        for (x, y) in &s {
            assert_eq!(
                loss::robust_loss_point(&h, x, *y, &ci.perturbation).unwrap(),
                loss::robust_loss_point(&hh, x, *y, &ci.perturbation).unwrap()
            );
        }
    }

    #[test]
    fn compression_learner_empty_sample() {
        let u = Perturbation::ball(Norm::L2, q(1, 10)).unwrap();
        let (h, cs) = compression_learner(&[], &u, &ThresholdEndpoints, &ThresholdCompressor).unwrap();
        assert!(cs.is_empty());
        assert_eq!(h, Hypothesis::threshold(int(0)));
    }
}
