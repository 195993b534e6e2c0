//! Exact workbench for adversarially robust learning and black-box
//! robustness certification.
//!
//! The crate is organized by role:
//!
//! * model and losses: [`point`], [`hypothesis`], [`perturbation`],
//!   [`distribution`], [`loss`], [`vc`], [`bounds`];
//! * black-box access: [`oracles`];
//! * query-based estimation: [`certify`];
//! * attacks: [`adversary`];
//! * exact answering games for the impossibility arguments: [`games`];
//! * learning procedures: [`learners`];
//! * counterexample instances: [`constructions`];
//! * task files and seeded trial orchestration: [`task`], [`trials`].
//!
//! Finite-domain, threshold and planar computations run on exact rationals.
//! Floating point appears only in sample-size formulas and trial statistics.

pub mod adversary;
pub mod bounds;
pub mod certify;
pub mod constructions;
pub mod distribution;
pub mod error;
pub mod games;
pub mod hypothesis;
pub mod learners;
pub mod loss;
pub mod oracles;
pub mod perturbation;
pub mod point;
pub mod rational;
pub mod task;
pub mod trials;
pub mod vc;

pub use distribution::{Atom, DiscreteDistribution, LabeledSample};
pub use error::{Error, Result};
pub use hypothesis::{FiniteClass, Hypothesis, HypothesisClass, Member};
pub use perturbation::{Norm, Perturbation};
pub use point::Point;
pub use rational::Rational;

pub(crate) fn label_from_u8(v: u8) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(Error::InvalidTask(format!("labels are 0 or 1, got {other}"))),
    }
}
