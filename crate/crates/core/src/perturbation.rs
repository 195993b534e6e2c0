//! Perturbation types: the admissible neighbourhood `U(x)` of each point.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    #[serde(alias = "linf")]
    Linf,
}

/// `U: X -> 2^X`, always containing the point itself.
///
/// Balls are closed. A `FiniteMap` stores every key together with itself;
/// points without an entry perturb only to themselves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PerturbationRepr", into = "PerturbationRepr")]
pub enum Perturbation {
    FiniteMap(BTreeMap<Point, BTreeSet<Point>>),
    Ball { norm: Norm, radius: Rational },
    Restriction { inner: Box<Perturbation>, outer: Box<Perturbation> },
}

impl Perturbation {
    /// Finite map, augmented so that `x` is in `U(x)`.
    pub fn finite_map<I, J>(entries: I) -> Self
    where
        I: IntoIterator<Item = (Point, J)>,
        J: IntoIterator<Item = Point>,
    {
        let mut map = BTreeMap::new();
        for (k, vs) in entries {
            let set: &mut BTreeSet<Point> = map.entry(k.clone()).or_default();
            set.extend(vs);
            set.insert(k);
        }
        Perturbation::FiniteMap(map)
    }

    /// `U(x) = {x}` everywhere.
    pub fn identity() -> Self {
        Perturbation::FiniteMap(BTreeMap::new())
    }

    pub fn ball(norm: Norm, radius: Rational) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::InvalidPerturbation("negative radius".into()));
        }
        Ok(Perturbation::Ball { norm, radius })
    }

    /// Pairs `inner` with `outer` after checking `inner(x) ⊆ outer(x)`.
    ///
    /// Finite maps are compared exhaustively over both key sets; balls by
    /// radius, using the planar norm inequalities when the norms differ.
    pub fn restriction(inner: Perturbation, outer: Perturbation) -> Result<Self> {
        if !inner.is_restriction_of(&outer)? {
            return Err(Error::InvalidPerturbation("inner is not contained in outer".into()));
        }
        Ok(Perturbation::Restriction { inner: Box::new(inner), outer: Box::new(outer) })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Perturbation::FiniteMap(_) => "finite_map",
            Perturbation::Ball { .. } => "ball",
            Perturbation::Restriction { .. } => "restriction",
        }
    }

    /// `U(x)` for finite maps; `None` for balls and restriction pairs.
    pub fn neighbors(&self, x: &Point) -> Option<BTreeSet<Point>> {
        match self {
            Perturbation::FiniteMap(map) => Some(map.get(x).cloned().unwrap_or_else(|| BTreeSet::from([x.clone()]))),
            _ => None,
        }
    }

    /// Keys of a finite map (empty for other kinds).
    pub fn keys(&self) -> impl Iterator<Item = &Point> {
        let map = match self {
            Perturbation::FiniteMap(m) => Some(m),
            _ => None,
        };
        map.into_iter().flat_map(|m| m.keys())
    }

    pub fn radius(&self) -> Option<&Rational> {
        match self {
            Perturbation::Ball { radius, .. } => Some(radius),
            _ => None,
        }
    }

    /// Membership test `z ∈ U(x)`.
    pub fn contains(&self, x: &Point, z: &Point) -> Result<bool> {
        match self {
            Perturbation::FiniteMap(_) => Ok(self.neighbors(x).unwrap().contains(z)),
            Perturbation::Ball { norm, radius } => {
                let d = norm_cmp_value(*norm, x, z)?;
                Ok(match d {
                    Dist::Plain(v) => v <= *radius,
                    Dist::Squared(v) => v <= radius * radius,
                })
            }
            Perturbation::Restriction { inner, .. } => inner.contains(x, z),
        }
    }

    pub fn is_restriction_of(&self, outer: &Perturbation) -> Result<bool> {
        match (self, outer) {
            (Perturbation::FiniteMap(a), Perturbation::FiniteMap(b)) => {
                let keys: BTreeSet<&Point> = a.keys().chain(b.keys()).collect();
                Ok(keys.into_iter().all(|k| {
                    let ua = self.neighbors(k).unwrap();
                    let ub = outer.neighbors(k).unwrap();
                    ua.is_subset(&ub)
                }))
            }
            (Perturbation::Ball { norm: n_in, radius: r_in }, Perturbation::Ball { norm: n_out, radius: r_out }) => {
                // ||z||_out <= sqrt(c) ||z||_in in the plane.
                let c = match (n_in, n_out) {
                    (a, b) if a == b => 1,
                    (Norm::L1, _) => 1,
                    (Norm::L2, Norm::Linf) => 1,
                    (Norm::L2, Norm::L1) => 2,
                    (Norm::Linf, Norm::L2) => 2,
                    (Norm::Linf, Norm::L1) => 4,
                    _ => unreachable!(),
                };
                Ok(rational::int(c) * r_in * r_in <= r_out * r_out)
            }
            _ => Err(Error::InvalidPerturbation(format!(
                "cannot compare {} with {}",
                self.kind_name(),
                outer.kind_name()
            ))),
        }
    }
}

pub(crate) enum Dist {
    Plain(Rational),
    Squared(Rational),
}

/// Distance between two numeric points of the same kind. L2 is returned
/// squared to stay rational.
pub(crate) fn norm_cmp_value(norm: Norm, x: &Point, z: &Point) -> Result<Dist> {
    match (x, z) {
        (Point::Line(a), Point::Line(b)) => Ok(Dist::Plain((a - b).abs())),
        (Point::Plane(a0, a1), Point::Plane(b0, b1)) => {
            let d0 = (a0 - b0).abs();
            let d1 = (a1 - b1).abs();
            Ok(match norm {
                Norm::L1 => Dist::Plain(d0 + d1),
                Norm::Linf => Dist::Plain(if d0 > d1 { d0 } else { d1 }),
                Norm::L2 => Dist::Squared(&d0 * &d0 + &d1 * &d1),
            })
        }
        _ => Err(Error::InvalidPerturbation(format!("no distance between {x} and {z}"))),
    }
}

// ---------------------------------------------------------------------------
// JSON representation

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PerturbationRepr {
    FiniteMap { map: Vec<(Point, Vec<Point>)> },
    Ball { norm: Norm, radius: String },
    Restriction { inner: Box<Perturbation>, outer: Box<Perturbation> },
}

impl TryFrom<PerturbationRepr> for Perturbation {
    type Error = Error;

    fn try_from(r: PerturbationRepr) -> Result<Self> {
        match r {
            PerturbationRepr::FiniteMap { map } => Ok(Perturbation::finite_map(map)),
            PerturbationRepr::Ball { norm, radius } => Perturbation::ball(norm, rational::parse(&radius)?),
            PerturbationRepr::Restriction { inner, outer } => Perturbation::restriction(*inner, *outer),
        }
    }
}

impl From<Perturbation> for PerturbationRepr {
    fn from(p: Perturbation) -> Self {
        match p {
            Perturbation::FiniteMap(map) => PerturbationRepr::FiniteMap {
                map: map.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect(),
            },
            Perturbation::Ball { norm, radius } => PerturbationRepr::Ball { norm, radius: rational::format(&radius) },
            Perturbation::Restriction { inner, outer } => PerturbationRepr::Restriction { inner, outer },
        }
    }
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn finite_map_is_self_inclusive() {
        let u = Perturbation::finite_map([(Point::sym("a"), vec![Point::sym("b")])]);
        let n = u.neighbors(&Point::sym("a")).unwrap();
        assert!(n.contains(&Point::sym("a")) && n.contains(&Point::sym("b")));
        assert_eq!(u.neighbors(&Point::sym("z")).unwrap(), BTreeSet::from([Point::sym("z")]));
    }

    #[test]
    fn restriction_checks() {
        let u = Perturbation::finite_map([(Point::sym("a"), vec![Point::sym("b")])]);
        let v = Perturbation::finite_map([(Point::sym("a"), vec![Point::sym("b"), Point::sym("c")])]);
        assert!(Perturbation::restriction(u.clone(), v.clone()).is_ok());
        assert!(Perturbation::restriction(v, u).is_err());

        let small = Perturbation::ball(Norm::L2, int(1)).unwrap();
        let big = Perturbation::ball(Norm::L2, q(11, 10)).unwrap();
        assert!(Perturbation::restriction(small.clone(), big.clone()).is_ok());
        assert!(Perturbation::restriction(big, small).is_err());
        let l1 = Perturbation::ball(Norm::L1, int(1)).unwrap();
        let l2 = Perturbation::ball(Norm::L2, int(1)).unwrap();
        assert!(l1.is_restriction_of(&l2).unwrap());
        assert!(!l2.is_restriction_of(&l1).unwrap());
    }

    #[test]
    fn ball_membership_is_closed() {
        let u = Perturbation::ball(Norm::L2, int(1)).unwrap();
        let o = Point::plane(int(0), int(0));
        assert!(u.contains(&o, &Point::plane(q(3, 5), q(4, 5))).unwrap());
        assert!(!u.contains(&o, &Point::plane(q(3, 5), q(81, 100))).unwrap());
        assert!(Perturbation::ball(Norm::L1, int(-1)).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let u = Perturbation::finite_map([(Point::sym("a"), vec![Point::sym("b")])]);
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(serde_json::from_str::<Perturbation>(&s).unwrap(), u);
        let b: Perturbation = serde_json::from_str(r#"{"kind":"ball","norm":"l2","radius":"1/10"}"#).unwrap();
        assert_eq!(b, Perturbation::ball(Norm::L2, q(1, 10)).unwrap());
    }
}
