use std::sync::Arc;

use super::simplex::{log_sum_exp, softmax};
use super::{check_input, RegretError, StepSize};
use crate::game::Treeplex;

/// Weights of the dilatable global entropy `d(x) = sum_s w[s] x[s] ln x[s]`.
/// The empty sequence carries weight 1 and is left implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct DgeWeights {
    /// Per infoset.
    pub gamma: Vec<f64>,
    /// Per sequence.
    pub w: Vec<f64>,
}

pub fn dge_weights(plex: &Treeplex) -> DgeWeights {
    let gamma = plex.gamma();
    let mut w = vec![0.0; plex.num_sequences()];
    for (k, info) in plex.infosets().iter().enumerate() {
        for s in info.seqs() {
            w[s] = gamma[k] - plex.children(s).iter().map(|&c| gamma[c]).sum::<f64>();
        }
    }
    DgeWeights { gamma, w }
}

impl DgeWeights {
    pub fn entropy(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.w).map(|(&v, w)| if v > 0.0 { w * v * v.ln() } else { 0.0 }).sum()
    }
}

/// Optimistic FTRL over a sequence-form polytope regularized by the
/// dilatable global entropy, using the closed-form argmax.
#[derive(Debug, Clone)]
pub struct OftrlDge {
    plex: Arc<Treeplex>,
    weights: DgeWeights,
    step: StepSize,
    predictive: bool,
    observed: usize,
    sum: Vec<f64>,
    strategy: Vec<f64>,
    // scratch
    theta: Vec<f64>,
    r: Vec<f64>,
    local: Vec<f64>,
}

impl OftrlDge {
    pub fn new(plex: Arc<Treeplex>, step: StepSize, predictive: bool) -> OftrlDge {
        let n = plex.num_sequences();
        let weights = dge_weights(&plex);
        let mut m = OftrlDge {
            weights,
            step,
            predictive,
            observed: 0,
            sum: vec![0.0; n],
            strategy: vec![0.0; n],
            theta: vec![0.0; n],
            r: vec![0.0; plex.num_infosets()],
            local: Vec::new(),
            plex,
        };
        m.solve();
        m
    }

    pub fn weights(&self) -> &DgeWeights {
        &self.weights
    }

    pub fn strategy(&self) -> &[f64] {
        &self.strategy
    }

    pub fn observe(&mut self, utility: &[f64]) -> Result<(), RegretError> {
        check_input(self.sum.len(), utility)?;
        self.update(utility, utility);
        Ok(())
    }

    pub fn observe_with_prediction(&mut self, utility: &[f64], prediction: &[f64]) -> Result<(), RegretError> {
        check_input(self.sum.len(), utility)?;
        check_input(self.sum.len(), prediction)?;
        self.update(utility, prediction);
        Ok(())
    }

    fn update(&mut self, utility: &[f64], prediction: &[f64]) {
        self.observed += 1;
        let eta = self.step.at(self.observed + 1);
        for (s, u) in utility.iter().enumerate() {
            self.sum[s] += u;
            let m = if self.predictive { prediction[s] } else { 0.0 };
            self.theta[s] = eta * (self.sum[s] + m);
        }
        self.solve();
    }

    /// argmax over the polytope of `<theta, x> - d(x)`: one bottom-up pass for
    /// the subtree values, then local softmaxes multiplied top-down.
    fn solve(&mut self) {
        let plex = &*self.plex;
        let gamma = &self.weights.gamma;
        for k in (0..plex.num_infosets()).rev() {
            let info = plex.infoset(k);
            self.local.clear();
            for s in info.seqs() {
                let below: f64 = plex.children(s).iter().map(|&c| self.r[c]).sum();
                self.local.push((self.theta[s] + below) / gamma[k]);
            }
            self.r[k] = gamma[k] * log_sum_exp(&self.local);
            softmax(&self.local, &mut self.strategy[info.seqs()]);
        }
        for k in 0..plex.num_infosets() {
            let mass = plex.parent_mass(&self.strategy, k);
            for s in plex.infoset(k).seqs() {
                self.strategy[s] *= mass;
            }
        }
    }
}
