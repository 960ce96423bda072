//! External regret minimizers over simplices and sequence-form polytopes.
//!
//! Every minimizer keeps its current iterate available through `strategy()`;
//! `observe` takes the utility of that iterate and moves to the next one.

mod cfr;
mod dge;
mod simplex;

use std::sync::Arc;

use thiserror::Error;

use crate::game::Treeplex;

pub use cfr::PredictiveCfr;
pub use dge::{dge_weights, DgeWeights, OftrlDge};
pub use simplex::{log_sum_exp, softmax, LocalRule, SimplexLearner};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegretError {
    #[error("utility has length {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("non-finite utility or prediction")]
    NonFinite,
}

pub(crate) fn check_input(expected: usize, v: &[f64]) -> Result<(), RegretError> {
    if v.len() != expected {
        return Err(RegretError::Dimension { expected, found: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(RegretError::NonFinite);
    }
    Ok(())
}

/// Step size schedule, indexed by the iterate being produced (`t >= 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    Constant(f64),
    /// `tau * t^(-exponent)`
    Decaying { tau: f64, exponent: f64 },
}

impl StepSize {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            StepSize::Constant(eta) => eta,
            StepSize::Decaying { tau, exponent } => tau * (t.max(1) as f64).powf(-exponent),
        }
    }
}

/// How a sequence-form polytope is learned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceAlgorithm {
    /// OFTRL with the dilatable global entropy; `predictive` selects the
    /// one-recency prediction, otherwise the prediction is zero.
    Dge { predictive: bool },
    /// CFR decomposition with one local learner per infoset.
    Cfr(LocalRule),
}

/// A regret minimizer over a sequence-form polytope.
#[derive(Debug, Clone)]
pub enum SequenceLearner {
    Dge(OftrlDge),
    Cfr(PredictiveCfr),
}

impl SequenceLearner {
    pub fn new(algorithm: SequenceAlgorithm, plex: Arc<Treeplex>, step: StepSize) -> SequenceLearner {
        match algorithm {
            SequenceAlgorithm::Dge { predictive } => SequenceLearner::Dge(OftrlDge::new(plex, step, predictive)),
            SequenceAlgorithm::Cfr(rule) => SequenceLearner::Cfr(PredictiveCfr::new(plex, rule, step)),
        }
    }

    pub fn strategy(&self) -> &[f64] {
        match self {
            SequenceLearner::Dge(m) => m.strategy(),
            SequenceLearner::Cfr(m) => m.strategy(),
        }
    }

    pub fn observe(&mut self, utility: &[f64]) -> Result<(), RegretError> {
        match self {
            SequenceLearner::Dge(m) => m.observe(utility),
            SequenceLearner::Cfr(m) => m.observe(utility),
        }
    }
}
