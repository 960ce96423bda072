//! Trigger and coarse trigger deviations, applied without materializing
//! their matrices, and the Φ-regret minimizer over their convex hull.

mod psi;

use std::ops::Range;

use thiserror::Error;

use crate::game::Game;

pub use psi::{PsiConfig, PsiMinimizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationKind {
    /// Triggered by a recommended sequence (j, a); EFCE.
    Trigger,
    /// Triggered on reaching infoset j; EFCCE.
    Coarse,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviationError {
    #[error("vector has length {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("transformation has {found} triggers, expected {expected}")]
    TriggerCount { expected: usize, found: usize },
}

/// Where a deviation fires and what it overwrites, in player-vector indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerPoint {
    pub infoset: usize,
    /// Sequence whose mass is redirected to the continuation.
    pub seq: usize,
    /// Sequences at or below `infoset`; the continuation lives here.
    pub subtree: Range<usize>,
    /// Sequences whose mass the deviation removes.
    pub removed: [Range<usize>; 2],
}

/// All trigger points of one player for one deviation kind.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSpace {
    kind: DeviationKind,
    player: usize,
    num_sequences: usize,
    triggers: Vec<TriggerPoint>,
}

/// A point of the convex hull: mixture weights over trigger points plus one
/// continuation per trigger point, indexed relative to its subtree.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformation {
    pub lambda: Vec<f64>,
    pub continuations: Vec<Vec<f64>>,
}

impl DeviationSpace {
    pub fn new(game: &Game, player: usize, kind: DeviationKind) -> DeviationSpace {
        let plex = game.treeplex(player);
        let mut triggers = Vec::new();
        for j in 0..plex.num_infosets() {
            let subtree = game.subtree_range(player, j);
            match kind {
                DeviationKind::Trigger => {
                    for a in 0..plex.infoset(j).num_actions {
                        let seq = game.seq(player, j, a);
                        let below = plex.descendants(seq - 1);
                        triggers.push(TriggerPoint {
                            infoset: j,
                            seq,
                            subtree: subtree.clone(),
                            removed: [seq..seq + 1, below.start + 1..below.end + 1],
                        });
                    }
                }
                DeviationKind::Coarse => triggers.push(TriggerPoint {
                    infoset: j,
                    seq: game.parent_seq(player, j),
                    subtree: subtree.clone(),
                    removed: [subtree.clone(), 0..0],
                }),
            }
        }
        DeviationSpace { kind, player, num_sequences: game.num_sequences(player), triggers }
    }

    pub fn kind(&self) -> DeviationKind {
        self.kind
    }

    pub fn player(&self) -> usize {
        self.player
    }

    pub fn num_sequences(&self) -> usize {
        self.num_sequences
    }

    pub fn triggers(&self) -> &[TriggerPoint] {
        &self.triggers
    }

    fn check(&self, t: &Transformation, x: &[f64]) -> Result<(), DeviationError> {
        if x.len() != self.num_sequences {
            return Err(DeviationError::Dimension { expected: self.num_sequences, found: x.len() });
        }
        if t.lambda.len() != self.triggers.len() || t.continuations.len() != self.triggers.len() {
            return Err(DeviationError::TriggerCount { expected: self.triggers.len(), found: t.lambda.len() });
        }
        for (tp, q) in self.triggers.iter().zip(&t.continuations) {
            if q.len() != tp.subtree.len() {
                return Err(DeviationError::Dimension { expected: tp.subtree.len(), found: q.len() });
            }
        }
        Ok(())
    }

    /// `phi(x) = x + sum_k lambda_k (x[seq_k] q_k - x restricted to removed_k)`.
    pub fn apply(&self, t: &Transformation, x: &[f64]) -> Result<Vec<f64>, DeviationError> {
        self.check(t, x)?;
        let mut out = x.to_vec();
        for ((tp, &lambda), q) in self.triggers.iter().zip(&t.lambda).zip(&t.continuations) {
            if lambda == 0.0 {
                continue;
            }
            for r in tp.removed.iter().cloned() {
                for s in r {
                    out[s] -= lambda * x[s];
                }
            }
            let mass = lambda * x[tp.seq];
            if mass != 0.0 {
                for (s, qv) in tp.subtree.clone().zip(q) {
                    out[s] += mass * qv;
                }
            }
        }
        Ok(out)
    }

    /// Applies the single deviation of trigger `k` with continuation `q`.
    pub fn apply_single(&self, k: usize, q: &[f64], x: &[f64]) -> Vec<f64> {
        let tp = &self.triggers[k];
        let mut out = x.to_vec();
        for r in tp.removed.iter().cloned() {
            for s in r {
                out[s] = 0.0;
            }
        }
        for (s, qv) in tp.subtree.clone().zip(q) {
            out[s] += x[tp.seq] * qv;
        }
        out
    }

    /// Utility of trigger `k` as an affine function of its continuation:
    /// `<l, phi_k(x)> = <g, q> + offset`, with `g = x[seq] * l` on the subtree.
    /// `total` must be `<l, x>`.
    pub fn trigger_utility_into(&self, k: usize, l: &[f64], x: &[f64], total: f64, g: &mut [f64]) -> f64 {
        let tp = &self.triggers[k];
        let mass = x[tp.seq];
        for (gv, s) in g.iter_mut().zip(tp.subtree.clone()) {
            *gv = mass * l[s];
        }
        let removed: f64 = tp.removed.iter().cloned().flatten().map(|s| l[s] * x[s]).sum();
        total - removed
    }

    pub fn local_trigger_utility(&self, k: usize, l: &[f64], x: &[f64]) -> (Vec<f64>, f64) {
        let mut g = vec![0.0; self.triggers[k].subtree.len()];
        let total = dot(l, x);
        let offset = self.trigger_utility_into(k, l, x, total, &mut g);
        (g, offset)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
