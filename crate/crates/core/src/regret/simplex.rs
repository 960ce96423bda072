use super::{check_input, RegretError, StepSize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalRule {
    /// Optimistic multiplicative weights.
    Omwu,
    /// Multiplicative weights (zero prediction).
    Mwu,
    /// Regret matching plus; ignores the step size.
    RmPlus,
}

pub fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Writes `softmax(z)` into `out`, subtracting the max first.
pub fn softmax(z: &[f64], out: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, v) in out.iter_mut().zip(z) {
        *o = (v - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// Regret minimizer on the probability simplex.
#[derive(Debug, Clone)]
pub struct SimplexLearner {
    rule: LocalRule,
    step: StepSize,
    observed: usize,
    /// Utility sum for the entropic rules, clipped regrets for RM+.
    acc: Vec<f64>,
    strategy: Vec<f64>,
    scratch: Vec<f64>,
}

impl SimplexLearner {
    pub fn new(rule: LocalRule, n: usize, step: StepSize) -> SimplexLearner {
        assert!(n > 0, "empty simplex");
        SimplexLearner {
            rule,
            step,
            observed: 0,
            acc: vec![0.0; n],
            strategy: vec![1.0 / n as f64; n],
            scratch: vec![0.0; n],
        }
    }

    pub fn rule(&self) -> LocalRule {
        self.rule
    }

    pub fn strategy(&self) -> &[f64] {
        &self.strategy
    }

    /// Observes the utility of the current iterate, predicting that the next
    /// utility repeats it.
    pub fn observe(&mut self, utility: &[f64]) -> Result<(), RegretError> {
        check_input(self.acc.len(), utility)?;
        self.update(utility, utility);
        Ok(())
    }

    /// Observes `utility` and uses `prediction` for the next iterate. Only the
    /// optimistic rule reads the prediction.
    pub fn observe_with_prediction(&mut self, utility: &[f64], prediction: &[f64]) -> Result<(), RegretError> {
        check_input(self.acc.len(), utility)?;
        check_input(self.acc.len(), prediction)?;
        self.update(utility, prediction);
        Ok(())
    }

    fn update(&mut self, utility: &[f64], prediction: &[f64]) {
        self.observed += 1;
        match self.rule {
            LocalRule::Omwu | LocalRule::Mwu => {
                let eta = self.step.at(self.observed + 1);
                for (a, u) in self.acc.iter_mut().zip(utility) {
                    *a += u;
                }
                let optimistic = self.rule == LocalRule::Omwu;
                for (k, z) in self.scratch.iter_mut().enumerate() {
                    let m = if optimistic { prediction[k] } else { 0.0 };
                    *z = eta * (self.acc[k] + m);
                }
                softmax(&self.scratch, &mut self.strategy);
            }
            LocalRule::RmPlus => {
                let value: f64 = utility.iter().zip(&self.strategy).map(|(u, x)| u * x).sum();
                for (r, u) in self.acc.iter_mut().zip(utility) {
                    *r = (*r + u - value).max(0.0);
                }
                let total: f64 = self.acc.iter().sum();
                let n = self.acc.len() as f64;
                for (x, r) in self.strategy.iter_mut().zip(&self.acc) {
                    *x = if total > 0.0 { r / total } else { 1.0 / n };
                }
            }
        }
    }
}
