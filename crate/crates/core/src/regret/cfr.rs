use std::sync::Arc;

use super::{check_input, LocalRule, RegretError, SimplexLearner, StepSize};
use crate::game::Treeplex;

/// CFR decomposition of a sequence-form polytope into one simplex learner per
/// infoset. Each local learner sees counterfactual utilities; with the
/// optimistic rule its prediction is the value of the observed utility under
/// the children's next iterates.
#[derive(Debug, Clone)]
pub struct PredictiveCfr {
    plex: Arc<Treeplex>,
    locals: Vec<SimplexLearner>,
    strategy: Vec<f64>,
    // scratch
    current_value: Vec<f64>,
    next_value: Vec<f64>,
    util: Vec<f64>,
    pred: Vec<f64>,
}

impl PredictiveCfr {
    pub fn new(plex: Arc<Treeplex>, rule: LocalRule, step: StepSize) -> PredictiveCfr {
        let locals = plex.infosets().iter().map(|i| SimplexLearner::new(rule, i.num_actions, step)).collect();
        let k = plex.num_infosets();
        let mut m = PredictiveCfr {
            strategy: vec![0.0; plex.num_sequences()],
            locals,
            current_value: vec![0.0; k],
            next_value: vec![0.0; k],
            util: Vec::new(),
            pred: Vec::new(),
            plex,
        };
        m.assemble();
        m
    }

    pub fn strategy(&self) -> &[f64] {
        &self.strategy
    }

    pub fn local_strategy(&self, k: usize) -> &[f64] {
        self.locals[k].strategy()
    }

    pub fn observe(&mut self, utility: &[f64]) -> Result<(), RegretError> {
        check_input(self.strategy.len(), utility)?;
        let plex = &*self.plex;
        for k in (0..plex.num_infosets()).rev() {
            self.util.clear();
            self.pred.clear();
            for s in plex.infoset(k).seqs() {
                let kids = plex.children(s);
                self.util.push(utility[s] + kids.iter().map(|&c| self.current_value[c]).sum::<f64>());
                self.pred.push(utility[s] + kids.iter().map(|&c| self.next_value[c]).sum::<f64>());
            }
            let local = &mut self.locals[k];
            self.current_value[k] = dot(local.strategy(), &self.util);
            local.observe_with_prediction(&self.util, &self.pred)?;
            self.next_value[k] = dot(local.strategy(), &self.pred);
        }
        self.assemble();
        Ok(())
    }

    fn assemble(&mut self) {
        let plex = &*self.plex;
        for k in 0..plex.num_infosets() {
            let mass = plex.parent_mass(&self.strategy, k);
            let first = plex.infoset(k).first;
            for (a, b) in self.locals[k].strategy().iter().enumerate() {
                self.strategy[first + a] = mass * b;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
