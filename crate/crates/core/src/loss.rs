//! Binary and robust losses, the margin/error decomposition, and exact
//! losses over finite distributions.

use std::collections::BTreeSet;

use num_traits::Signed;

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::hypothesis::{FiniteClass, Hypothesis};
use crate::perturbation::{self, Dist, Norm, Perturbation};
use crate::point::Point;
use crate::rational::{self, Rational};

pub fn binary_loss(h: &Hypothesis, x: &Point, y: bool) -> Result<bool> {
    Ok(h.eval(x)? != y)
}

fn unsupported(h: &Hypothesis, u: &Perturbation) -> Error {
    Error::UnsupportedCombination { hypothesis: h.kind_name(), perturbation: u.kind_name() }
}

/// Dual norm of the halfspace normal for the given ball norm. L2 is
/// returned squared.
fn dual_norm(norm: Norm, w: &(Rational, Rational)) -> Dist {
    let a0 = w.0.abs();
    let a1 = w.1.abs();
    match norm {
        Norm::L1 => Dist::Plain(if a0 > a1 { a0 } else { a1 }),
        Norm::Linf => Dist::Plain(a0 + a1),
        Norm::L2 => Dist::Squared(&a0 * &a0 + &a1 * &a1),
    }
}

/// `x ∈ mar_U(h)`: some `z ∈ U(x)` has `h(z) != h(x)`.
///
/// Supported combinations: any hypothesis under a finite map (exhaustive
/// scan), thresholds under balls on the line (endpoint test, by
/// monotonicity), halfspaces under planar balls (distance to the boundary
/// against the dual norm), and singletons under balls.
pub fn margin_membership(h: &Hypothesis, x: &Point, u: &Perturbation) -> Result<bool> {
    match u {
        Perturbation::FiniteMap(_) => {
            let hx = h.eval(x)?;
            for z in u.neighbors(x).unwrap() {
                if h.eval(&z)? != hx {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Perturbation::Ball { norm, radius } => match (h, x) {
            (Hypothesis::Threshold { .. }, Point::Line(v)) => {
                let hx = h.eval(x)?;
                Ok(h.eval(&Point::Line(v - radius))? != hx || h.eval(&Point::Line(v + radius))? != hx)
            }
            (Hypothesis::Halfspace { w, .. }, Point::Plane(..)) => {
                let s = h.score(x).unwrap();
                // h(x) = 1: margin iff min over the ball of w.z + b is < 0.
                // h(x) = 0: margin iff max over the ball of w.z + b is >= 0.
                let positive = !s.is_negative();
                Ok(match dual_norm(*norm, w) {
                    Dist::Plain(nw) => {
                        let reach = radius * nw;
                        if positive {
                            s < reach
                        } else {
                            -s <= reach
                        }
                    }
                    Dist::Squared(nw2) => {
                        let s2 = &s * &s;
                        let reach2 = radius * radius * nw2;
                        if positive {
                            s2 < reach2
                        } else {
                            s2 <= reach2
                        }
                    }
                })
            }
            (Hypothesis::Singleton(p), Point::Line(_) | Point::Plane(..)) => {
                if x == p {
                    return Ok(radius.is_positive());
                }
                Ok(match perturbation::norm_cmp_value(*norm, x, p)? {
                    Dist::Plain(d) => d <= *radius,
                    Dist::Squared(d2) => d2 <= radius * radius,
                })
            }
            _ => Err(unsupported(h, u)),
        },
        Perturbation::Restriction { .. } => Err(unsupported(h, u)),
    }
}

/// `ℓ^U(h, x, y)`: misclassified, or in the margin.
pub fn robust_loss_point(h: &Hypothesis, x: &Point, y: bool, u: &Perturbation) -> Result<bool> {
    Ok(binary_loss(h, x, y)? || margin_membership(h, x, u)?)
}

/// Exact weight of `err(h)` (no perturbation) or `err(h) ∪ mar_U(h)`.
pub fn true_loss(h: &Hypothesis, p: &DiscreteDistribution, u: Option<&Perturbation>) -> Result<Rational> {
    p.weight_where(|a| match u {
        None => binary_loss(h, &a.point, a.label),
        Some(u) => robust_loss_point(h, &a.point, a.label, u),
    })
}

pub fn error_weight(h: &Hypothesis, p: &DiscreteDistribution) -> Result<Rational> {
    true_loss(h, p, None)
}

pub fn margin_weight(h: &Hypothesis, p: &DiscreteDistribution, u: &Perturbation) -> Result<Rational> {
    p.weight_where(|a| margin_membership(h, &a.point, u))
}

pub fn empirical_robust_loss(h: &Hypothesis, s: &[(Point, bool)], u: &Perturbation) -> Result<Rational> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut hits = 0i64;
    for (x, y) in s {
        if robust_loss_point(h, x, *y, u)? {
            hits += 1;
        }
    }
    Ok(rational::q(hits, s.len() as i64))
}

pub fn empirical_binary_loss(h: &Hypothesis, s: &[(Point, bool)]) -> Result<Rational> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut hits = 0i64;
    for (x, y) in s {
        if binary_loss(h, x, *y)? {
            hits += 1;
        }
    }
    Ok(rational::q(hits, s.len() as i64))
}

/// Zero empirical binary loss on `s`.
pub fn consistent(h: &Hypothesis, s: &[(Point, bool)]) -> Result<bool> {
    for (x, y) in s {
        if h.eval(x)? != *y {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `mar_U(h) ∩ domain` for every member, deduplicated, in first-seen order.
pub fn margin_class_sets(class: &FiniteClass, u: &Perturbation, domain: &[Point]) -> Result<Vec<BTreeSet<Point>>> {
    let mut out: Vec<BTreeSet<Point>> = Vec::new();
    for h in class.iter() {
        let mut set = BTreeSet::new();
        for x in domain {
            if margin_membership(h, x, u)? {
                set.insert(x.clone());
            }
        }
        if !out.contains(&set) {
            out.push(set);
        }
    }
    Ok(out)
}

/// `{x ∈ domain : h(x) = 1}` for every member, deduplicated.
pub fn positive_sets(class: &FiniteClass, domain: &[Point]) -> Result<Vec<BTreeSet<Point>>> {
    let mut out: Vec<BTreeSet<Point>> = Vec::new();
    for h in class.iter() {
        let set: BTreeSet<Point> = h.positives(domain)?.into_iter().cloned().collect();
        if !out.contains(&set) {
            out.push(set);
        }
    }
    Ok(out)
}
