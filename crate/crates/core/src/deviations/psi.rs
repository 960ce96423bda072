use std::collections::HashMap;
use std::sync::Arc;

use super::{dot, DeviationKind, DeviationSpace, Transformation};
use crate::game::{Game, Treeplex};
use crate::regret::{check_input, LocalRule, RegretError, SequenceAlgorithm, SequenceLearner, SimplexLearner, StepSize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiConfig {
    /// Learner over each trigger point's continuation polytope.
    pub sub: SequenceAlgorithm,
    /// Learner over the mixture weights.
    pub mixer: LocalRule,
    pub step: StepSize,
}

/// Regret minimizer over the convex hull of one player's trigger (or coarse
/// trigger) deviations: one continuation learner per trigger point and a
/// simplex learner mixing them.
#[derive(Debug, Clone)]
pub struct PsiMinimizer {
    space: DeviationSpace,
    plexes: Vec<Arc<Treeplex>>,
    subs: Vec<SequenceLearner>,
    mixer: SimplexLearner,
    // per trigger: sum_t g_k^t, and sum_t of the removed utility
    ledger_v: Vec<Vec<f64>>,
    ledger_s: Vec<f64>,
    scratch: Vec<f64>,
    mixer_u: Vec<f64>,
    mixer_m: Vec<f64>,
    rounds: usize,
}

impl PsiMinimizer {
    pub fn new(game: &Game, player: usize, kind: DeviationKind, config: PsiConfig) -> PsiMinimizer {
        let space = DeviationSpace::new(game, player, kind);
        let mut shared: HashMap<usize, Arc<Treeplex>> = HashMap::new();
        let plexes: Vec<Arc<Treeplex>> = space
            .triggers()
            .iter()
            .map(|tp| shared.entry(tp.infoset).or_insert_with(|| Arc::new(game.subtree(player, tp.infoset).clone())).clone())
            .collect();
        let subs = plexes.iter().map(|p| SequenceLearner::new(config.sub, p.clone(), config.step)).collect();
        let n = space.triggers().len();
        let widest = space.triggers().iter().map(|tp| tp.subtree.len()).max().unwrap_or(0);
        PsiMinimizer {
            ledger_v: space.triggers().iter().map(|tp| vec![0.0; tp.subtree.len()]).collect(),
            ledger_s: vec![0.0; n],
            mixer: SimplexLearner::new(config.mixer, n.max(1), config.step),
            space,
            plexes,
            subs,
            scratch: vec![0.0; widest],
            mixer_u: vec![0.0; n],
            mixer_m: vec![0.0; n],
            rounds: 0,
        }
    }

    pub fn space(&self) -> &DeviationSpace {
        &self.space
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Current mixture weights over trigger points.
    pub fn lambda(&self) -> &[f64] {
        &self.mixer.strategy()[..self.subs.len()]
    }

    pub fn continuation(&self, k: usize) -> &[f64] {
        self.subs[k].strategy()
    }

    pub fn transformation(&self) -> Transformation {
        Transformation {
            lambda: self.lambda().to_vec(),
            continuations: self.subs.iter().map(|s| s.strategy().to_vec()).collect(),
        }
    }

    /// Feeds the utility `l` over the player's sequences, observed while the
    /// player played `x`.
    pub fn observe(&mut self, l: &[f64], x: &[f64]) -> Result<(), RegretError> {
        check_input(self.space.num_sequences(), l)?;
        check_input(self.space.num_sequences(), x)?;
        if self.subs.is_empty() {
            self.rounds += 1;
            return Ok(());
        }
        let total = dot(l, x);
        for k in 0..self.subs.len() {
            let width = self.space.triggers()[k].subtree.len();
            let g = &mut self.scratch[..width];
            let offset = self.space.trigger_utility_into(k, l, x, total, g);
            self.mixer_u[k] = offset + dot(g, self.subs[k].strategy());
            self.subs[k].observe(g)?;
            // the continuation learner moves first, so the mixer can be
            // predicted with next round's continuation
            self.mixer_m[k] = offset + dot(g, self.subs[k].strategy());
            for (v, gv) in self.ledger_v[k].iter_mut().zip(g.iter()) {
                *v += gv;
            }
            self.ledger_s[k] += total - offset;
        }
        self.mixer.observe_with_prediction(&self.mixer_u, &self.mixer_m)?;
        self.rounds += 1;
        Ok(())
    }

    /// `max_k (max_q sum_t <g_k^t, q> - sum_t removed_k^t)`: cumulative gain of
    /// the best fixed deviation against the observed play.
    pub fn phi_regret(&self) -> f64 {
        self.ledger_v
            .iter()
            .zip(&self.ledger_s)
            .zip(&self.plexes)
            .map(|((v, s), plex)| plex.best_response(v).0 - s)
            .reduce(f64::max)
            .unwrap_or(0.0)
    }
}
