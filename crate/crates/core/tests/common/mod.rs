//! Reference computations written independently of the library code, plus
//! random instance generators.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use robcert::rational::q;
use robcert::{FiniteClass, Hypothesis, Member, Perturbation, Point, Rational};

pub fn sym(i: usize) -> Point {
    Point::sym(format!("p{i}"))
}

pub fn zero() -> Rational {
    q(0, 1)
}

/// Margin by scanning an explicit neighbourhood list.
pub fn margin_by_scan(h: &Hypothesis, x: &Point, nbhd: &BTreeSet<Point>) -> bool {
    let hx = h.eval(x).unwrap();
    nbhd.iter().any(|z| h.eval(z).unwrap() != hx)
}

/// Upward threshold at `t` under the closed interval `[x - r, x + r]`: the
/// interval holds points on both sides iff `x - r < t <= x + r`.
pub fn threshold_margin(t: &Rational, x: &Rational, r: &Rational) -> bool {
    &(x - r) < t && t <= &(x + r)
}

/// Halfspace `w.z + b >= 0` under the closed L1 ball: the extreme values of
/// `w.z` over the ball are `w.x ± r max|w_i|`.
pub fn halfspace_l1_margin(w: &(Rational, Rational), b: &Rational, x: &(Rational, Rational), r: &Rational) -> bool {
    let s = &w.0 * &x.0 + &w.1 * &x.1 + b;
    let a0 = if w.0 < zero() { -w.0.clone() } else { w.0.clone() };
    let a1 = if w.1 < zero() { -w.1.clone() } else { w.1.clone() };
    let reach = r * if a0 > a1 { a0 } else { a1 };
    if s >= zero() {
        &s - &reach < zero()
    } else {
        &s + &reach >= zero()
    }
}

/// Same under the closed L2 ball, compared in squares.
pub fn halfspace_l2_margin(w: &(Rational, Rational), b: &Rational, x: &(Rational, Rational), r: &Rational) -> bool {
    let s = &w.0 * &x.0 + &w.1 * &x.1 + b;
    let n2 = &w.0 * &w.0 + &w.1 * &w.1;
    let reach2 = r * r * n2;
    if s >= zero() {
        &s * &s < reach2
    } else {
        &s * &s <= reach2
    }
}

/// Whether `family` (bitmasks over `n` points) shatters `subset`, checked by
/// looking for a realizing set for every labeling in turn.
pub fn shatters(family: &[u32], subset: &[usize]) -> bool {
    (0u32..(1 << subset.len())).all(|pattern| {
        family
            .iter()
            .any(|set| subset.iter().enumerate().all(|(j, &i)| ((set >> i) & 1 == 1) == ((pattern >> j) & 1 == 1)))
    })
}

/// VC dimension by trying every subset of the `n` points.
pub fn naive_vc(n: usize, family: &[u32]) -> usize {
    if family.is_empty() {
        return 0;
    }
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| (mask >> i) & 1 == 1).collect();
        if subset.len() > best && shatters(family, &subset) {
            best = subset.len();
        }
    }
    best
}

pub fn mask_to_set(mask: u32, domain: &[Point]) -> BTreeSet<Point> {
    domain.iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).map(|(_, p)| p.clone()).collect()
}

/// Random finite perturbation map: each point gets up to `max_extra`
/// random neighbours.
pub fn random_finite_map<R: Rng>(rng: &mut R, domain: &[Point], max_extra: usize) -> Perturbation {
    let entries: Vec<(Point, Vec<Point>)> = domain
        .iter()
        .map(|x| {
            let k = rng.gen_range(0..=max_extra);
            let nb: Vec<Point> = domain.choose_multiple(rng, k).cloned().collect();
            (x.clone(), nb)
        })
        .collect();
    Perturbation::finite_map(entries)
}

pub fn random_tabular<R: Rng>(rng: &mut R, domain: &[Point]) -> Hypothesis {
    Hypothesis::tabular(domain.iter().map(|p| (p.clone(), rng.gen_bool(0.5))))
}

/// Random class of distinct tabular members.
pub fn random_class<R: Rng>(rng: &mut R, domain: &[Point], size: usize) -> FiniteClass {
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut members = Vec::new();
    let cap = 1usize << domain.len().min(20);
    while members.len() < size.min(cap) {
        let h = random_tabular(rng, domain);
        if seen.insert(h.restrict(domain).unwrap()) {
            members.push(Member { name: format!("h{}", members.len() + 1), hypothesis: h });
        }
    }
    FiniteClass::new(members, domain).unwrap()
}

pub fn random_domain<R: Rng>(rng: &mut R, max: usize) -> Vec<Point> {
    let n = rng.gen_range(1..=max);
    (0..n).map(sym).collect()
}

/// Random rational in `[lo, hi]` with denominator `den`.
pub fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Rational {
    q(rng.gen_range(lo * den..=hi * den), den)
}

/// Exact weight of a predicate over explicit `(point, label, weight)` atoms.
pub fn weight_of(atoms: &[(Point, bool, Rational)], mut pred: impl FnMut(&Point, bool) -> bool) -> Rational {
    atoms.iter().filter(|(p, y, _)| pred(p, *y)).fold(zero(), |acc, (_, _, w)| acc + w)
}

pub fn atoms_of(d: &robcert::DiscreteDistribution) -> Vec<(Point, bool, Rational)> {
    d.atoms().iter().map(|a| (a.point.clone(), a.label, a.weight.clone())).collect()
}

/// Neighbourhoods of a finite map as plain sets, defaulting to `{x}`.
pub fn neighbourhoods(u: &Perturbation, domain: &[Point]) -> BTreeMap<Point, BTreeSet<Point>> {
    domain.iter().map(|x| (x.clone(), u.neighbors(x).unwrap())).collect()
}
