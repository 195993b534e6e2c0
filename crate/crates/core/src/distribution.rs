//! Finite-support distributions over labeled points and exact sampling.

use std::collections::BTreeSet;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{self, Point};
use crate::rational::{self, Rational};

/// Labeled sample; duplicates allowed.
pub type LabeledSample = Vec<(Point, bool)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub point: Point,
    pub label: bool,
    pub weight: Rational,
}

/// Atoms with nonnegative weights summing to exactly one. Atom points are
/// distinct, so each point carries one deterministic label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
    // Cumulative weights over a common denominator, for exact inverse-CDF
    // sampling.
    cumulative: Vec<BigInt>,
    denominator: BigInt,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        point::common_kind(atoms.iter().map(|a| &a.point)).map_err(Error::InvalidDistribution)?;
        let mut seen = BTreeSet::new();
        let mut total = Rational::zero();
        for a in &atoms {
            if a.weight.is_negative() {
                return Err(Error::InvalidDistribution(format!("negative weight at {}", a.point)));
            }
            if !seen.insert(&a.point) {
                return Err(Error::InvalidDistribution(format!("duplicate atom {}", a.point)));
            }
            total += &a.weight;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {} instead of 1",
                rational::format(&total)
            )));
        }
        let denominator = atoms.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.weight.denom()));
        let mut running = BigInt::zero();
        let cumulative = atoms
            .iter()
            .map(|a| {
                running += a.weight.numer() * (&denominator / a.weight.denom());
                running.clone()
            })
            .collect();
        Ok(DiscreteDistribution { atoms, cumulative, denominator })
    }

    /// Uniform over `points` with labels from `label`.
    pub fn uniform(points: &[Point], label: impl Fn(&Point) -> bool) -> Result<Self> {
        let n = points.len() as i64;
        if n == 0 {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        DiscreteDistribution::new(
            points.iter().map(|p| Atom { point: p.clone(), label: label(p), weight: rational::q(1, n) }).collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Atoms with positive weight.
    pub fn support(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.weight.is_positive())
    }

    pub fn support_points(&self) -> Vec<Point> {
        self.support().map(|a| a.point.clone()).collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.atoms.iter().map(|a| a.point.clone()).collect()
    }

    pub fn atom(&self, x: &Point) -> Option<&Atom> {
        self.atoms.iter().find(|a| &a.point == x)
    }

    /// Marginal weight of the points satisfying `pred`.
    pub fn weight_where(&self, mut pred: impl FnMut(&Atom) -> Result<bool>) -> Result<Rational> {
        let mut w = Rational::zero();
        for a in self.support() {
            if pred(a)? {
                w += &a.weight;
            }
        }
        Ok(w)
    }

    /// Same marginal, labels replaced by `labeler`.
    pub fn relabel(&self, mut labeler: impl FnMut(&Point) -> Result<bool>) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok(Atom { label: labeler(&a.point)?, ..a.clone() }))
            .collect::<Result<Vec<_>>>()?;
        DiscreteDistribution::new(atoms)
    }

    fn draw_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.gen_bigint_range(&BigInt::zero(), &self.denominator);
        // First atom whose cumulative weight exceeds u.
        self.cumulative.partition_point(|c| c <= &u)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> LabeledSample {
        (0..m)
            .map(|_| {
                let a = &self.atoms[self.draw_index(rng)];
                (a.point.clone(), a.label)
            })
            .collect()
    }

    /// `m` iid draws, deterministic in `seed`.
    pub fn sample(&self, m: usize, seed: u64) -> Result<LabeledSample> {
        if m == 0 {
            return Err(Error::InvalidParameter("sample size must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(self.sample_with(m, &mut rng))
    }

    /// Unlabeled draws from the marginal.
    pub fn sample_marginal_with<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Vec<Point> {
        (0..m).map(|_| self.atoms[self.draw_index(rng)].point.clone()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    atoms: Vec<AtomRepr>,
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    point: Point,
    label: u8,
    weight: String,
}

impl TryFrom<DistributionRepr> for DiscreteDistribution {
    type Error = Error;

    fn try_from(r: DistributionRepr) -> Result<Self> {
        let atoms = r
            .atoms
            .into_iter()
            .map(|a| {
                Ok(Atom { point: a.point, label: crate::label_from_u8(a.label)?, weight: rational::parse(&a.weight)? })
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteDistribution::new(atoms)
    }
}

impl From<DiscreteDistribution> for DistributionRepr {
    fn from(d: DiscreteDistribution) -> Self {
        DistributionRepr {
            atoms: d
                .atoms
                .into_iter()
                .map(|a| AtomRepr { point: a.point, label: a.label as u8, weight: rational::format(&a.weight) })
                .collect(),
        }
    }
}
