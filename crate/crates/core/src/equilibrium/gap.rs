use thiserror::Error;

use crate::deviations::{DeviationKind, DeviationSpace};
use crate::game::Game;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GapError {
    #[error("no iterations accumulated")]
    NoIterations,
}

/// Per-player deviation benefits of the average joint distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// `max` over trigger points and continuations of the average benefit;
    /// may be negative.
    pub raw: Vec<f64>,
    /// `max(0, max_i raw[i])`
    pub gap: f64,
}

#[derive(Debug, Clone)]
struct KindTotals {
    space: DeviationSpace,
    v: Vec<Vec<f64>>,
    s: Vec<f64>,
}

impl KindTotals {
    fn new(game: &Game, player: usize, kind: DeviationKind) -> KindTotals {
        let space = DeviationSpace::new(game, player, kind);
        let v = space.triggers().iter().map(|tp| vec![0.0; tp.subtree.len()]).collect();
        let s = vec![0.0; space.triggers().len()];
        KindTotals { space, v, s }
    }
}

/// Streaming totals from which the EFCE and EFCCE gaps of the average of the
/// played product distributions follow exactly. For every trigger point:
/// `V += x[seq] * cf` on its subtree and `S += sum over removed of cf * x`.
#[derive(Debug, Clone)]
pub struct GapAccumulators {
    players: Vec<[KindTotals; 2]>,
    iterations: usize,
}

fn slot(kind: DeviationKind) -> usize {
    match kind {
        DeviationKind::Trigger => 0,
        DeviationKind::Coarse => 1,
    }
}

impl GapAccumulators {
    pub fn new(game: &Game) -> GapAccumulators {
        let players = (0..game.num_players())
            .map(|p| [KindTotals::new(game, p, DeviationKind::Trigger), KindTotals::new(game, p, DeviationKind::Coarse)])
            .collect();
        GapAccumulators { players, iterations: 0 }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `cfs[i]` must be player `i`'s counterfactual utility against `profile`.
    pub fn update(&mut self, profile: &[Vec<f64>], cfs: &[Vec<f64>]) {
        for ((totals, x), cf) in self.players.iter_mut().zip(profile).zip(cfs) {
            for kt in totals.iter_mut() {
                for ((tp, v), s) in kt.space.triggers().iter().zip(&mut kt.v).zip(&mut kt.s) {
                    let mass = x[tp.seq];
                    if mass != 0.0 {
                        for (acc, i) in v.iter_mut().zip(tp.subtree.clone()) {
                            *acc += mass * cf[i];
                        }
                    }
                    for r in tp.removed.iter().cloned() {
                        *s += r.map(|i| cf[i] * x[i]).sum::<f64>();
                    }
                }
            }
        }
        self.iterations += 1;
    }

    /// Adds another run's totals, as if its iterations had been fed here.
    pub fn merge(&mut self, other: &GapAccumulators) {
        for (mine, theirs) in self.players.iter_mut().zip(&other.players) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                for (va, vb) in a.v.iter_mut().zip(&b.v) {
                    va.iter_mut().zip(vb).for_each(|(x, y)| *x += y);
                }
                a.s.iter_mut().zip(&b.s).for_each(|(x, y)| *x += y);
            }
        }
        self.iterations += other.iterations;
    }

    /// Trigger-point totals `(V, S)` of one player.
    pub fn totals(&self, player: usize, kind: DeviationKind) -> (&[Vec<f64>], &[f64]) {
        let kt = &self.players[player][slot(kind)];
        (&kt.v, &kt.s)
    }

    /// Largest cumulative benefit `max_k (max_q <V_k, q> - S_k)`.
    pub fn cumulative_benefit(&self, game: &Game, player: usize, kind: DeviationKind) -> f64 {
        let kt = &self.players[player][slot(kind)];
        kt.space
            .triggers()
            .iter()
            .zip(&kt.v)
            .zip(&kt.s)
            .map(|((tp, v), s)| game.subtree(player, tp.infoset).best_response(v).0 - s)
            .reduce(f64::max)
            .unwrap_or(0.0)
    }

    pub fn compute_gap(&self, game: &Game, kind: DeviationKind) -> Result<GapReport, GapError> {
        if self.iterations == 0 {
            return Err(GapError::NoIterations);
        }
        let t = self.iterations as f64;
        let raw: Vec<f64> = (0..self.players.len()).map(|p| self.cumulative_benefit(game, p, kind) / t).collect();
        let gap = raw.iter().fold(0.0f64, |m, r| m.max(*r));
        Ok(GapReport { raw, gap })
    }
}
