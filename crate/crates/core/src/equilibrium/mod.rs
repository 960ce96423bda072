//! The learning loop: each player runs a Φ-regret minimizer over its trigger
//! deviations and plays the fixed point of the current transformation. The
//! average of the played product distributions approaches the equilibrium
//! set.

mod gap;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::deviations::{DeviationKind, PsiConfig, PsiMinimizer};
use crate::fixed_point::{efce_fixed_point, efcce_fixed_point, FixedPointError, FixedPointOptions};
use crate::game::Game;
use crate::regret::{LocalRule, RegretError, SequenceAlgorithm, StepSize};

pub use gap::{GapAccumulators, GapError, GapReport};

/// Step sizes searched by default.
pub const TAU_GRID: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown {what} `{value}`")]
pub struct UnknownName {
    pub what: &'static str,
    pub value: String,
}

macro_rules! named_enum {
    ($name:ident, $what:literal, { $($variant:ident => $text:literal),* $(,)? }) => {
        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),* }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $name {
            type Err = UnknownName;

            fn from_str(s: &str) -> Result<Self, UnknownName> {
                match s {
                    $($text => Ok($name::$variant),)*
                    _ => Err(UnknownName { what: $what, value: s.to_string() }),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Efce,
    Efcce,
}

named_enum!(Target, "target", { Efce => "efce", Efcce => "efcce" });

impl Target {
    pub fn kind(self) -> DeviationKind {
        match self {
            Target::Efce => DeviationKind::Trigger,
            Target::Efcce => DeviationKind::Coarse,
        }
    }
}

/// Local learning rule used by every component of the Φ-regret minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Omwu,
    Mwu,
    RmPlus,
}

named_enum!(Algorithm, "algorithm", { Omwu => "omwu", Mwu => "mwu", RmPlus => "rmplus" });

impl Algorithm {
    pub fn rule(self) -> LocalRule {
        match self {
            Algorithm::Omwu => LocalRule::Omwu,
            Algorithm::Mwu => LocalRule::Mwu,
            Algorithm::RmPlus => LocalRule::RmPlus,
        }
    }

    /// `eta_t = tau * t^(-exponent)`; regret matching ignores it.
    pub fn default_exponent(self) -> f64 {
        match self {
            Algorithm::Omwu => 0.25,
            Algorithm::Mwu => 0.5,
            Algorithm::RmPlus => 0.0,
        }
    }
}

/// How each trigger point's continuation polytope is learned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsolver {
    /// One local learner per infoset.
    Cfr,
    /// Global OFTRL with the dilatable entropy; entropic rules only.
    Dge,
}

named_enum!(Subsolver, "subsolver", { Cfr => "cfr", Dge => "dge" });

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub target: Target,
    pub algorithm: Algorithm,
    pub subsolver: Subsolver,
    pub step: StepSize,
    pub fixed_point: FixedPointOptions,
}

impl LearnerConfig {
    /// Default schedule for `algorithm` with scale `tau`. Regret matching can
    /// leave the interior, so its fixed points accept reducible chains.
    pub fn new(target: Target, algorithm: Algorithm, tau: f64) -> LearnerConfig {
        LearnerConfig {
            target,
            algorithm,
            subsolver: Subsolver::Cfr,
            step: StepSize::Decaying { tau, exponent: algorithm.default_exponent() },
            fixed_point: FixedPointOptions { allow_reducible: algorithm == Algorithm::RmPlus, ..Default::default() },
        }
    }

    fn psi_config(&self) -> Result<PsiConfig, LearnerError> {
        let rule = self.algorithm.rule();
        let sub = match (self.subsolver, self.algorithm) {
            (Subsolver::Cfr, _) => SequenceAlgorithm::Cfr(rule),
            (Subsolver::Dge, Algorithm::Omwu) => SequenceAlgorithm::Dge { predictive: true },
            (Subsolver::Dge, Algorithm::Mwu) => SequenceAlgorithm::Dge { predictive: false },
            (Subsolver::Dge, Algorithm::RmPlus) => {
                return Err(LearnerError::Config("the dge subsolver needs an entropic algorithm".into()))
            }
        };
        Ok(PsiConfig { sub, mixer: rule, step: self.step })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("iteration {iteration}, player {player}: {source}")]
    FixedPoint { iteration: usize, player: usize, source: FixedPointError },
    #[error("iteration {iteration}, player {player}: {source}")]
    Regret { iteration: usize, player: usize, source: RegretError },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Simultaneous no-regret dynamics for all players.
#[derive(Debug, Clone)]
pub struct Learner<'g> {
    game: &'g Game,
    config: LearnerConfig,
    psi: Vec<PsiMinimizer>,
    acc: GapAccumulators,
    profile: Vec<Vec<f64>>,
    utilities: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    variation_violations: usize,
    iterations: usize,
}

impl<'g> Learner<'g> {
    pub fn new(game: &'g Game, config: LearnerConfig) -> Result<Learner<'g>, LearnerError> {
        let psi_config = config.psi_config()?;
        let n = game.num_players();
        Ok(Learner {
            game,
            config,
            psi: (0..n).map(|p| PsiMinimizer::new(game, p, config.target.kind(), psi_config)).collect(),
            acc: GapAccumulators::new(game),
            profile: (0..n).map(|p| game.uniform_strategy(p)).collect(),
            utilities: (0..n).map(|p| vec![0.0; game.num_sequences(p)]).collect(),
            residuals: vec![0.0; n],
            variation_violations: 0,
            iterations: 0,
        })
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Profile played in the last iteration.
    pub fn profile(&self) -> &[Vec<f64>] {
        &self.profile
    }

    /// Counterfactual utilities observed in the last iteration.
    pub fn utilities(&self) -> &[Vec<f64>] {
        &self.utilities
    }

    /// `|phi(q) - q|_1` per player in the last iteration.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn accumulators(&self) -> &GapAccumulators {
        &self.acc
    }

    pub fn psi(&self, player: usize) -> &PsiMinimizer {
        &self.psi[player]
    }

    /// Φ-regret of `player` against the target's deviations, from the
    /// minimizer's own records.
    pub fn phi_regret(&self, player: usize) -> f64 {
        self.psi[player].phi_regret()
    }

    pub fn gap(&self, kind: DeviationKind) -> Result<GapReport, GapError> {
        self.acc.compute_gap(self.game, kind)
    }

    /// Iterations in which some player's utility moved by more than the
    /// profile change allows:
    /// `|l_i - l_i'|_inf^2 <= (n - 1) |Z|^2 sum_{k != i} |q_k - q_k'|_1^2`.
    pub fn variation_violations(&self) -> usize {
        self.variation_violations
    }

    pub fn step(&mut self) -> Result<(), LearnerError> {
        let iteration = self.iterations + 1;
        let previous = (self.iterations > 0).then(|| (self.profile.clone(), self.utilities.clone()));
        for (p, psi) in self.psi.iter().enumerate() {
            let t = psi.transformation();
            let space = psi.space();
            let q = match self.config.target {
                Target::Efce => efce_fixed_point(self.game, space, &t, &self.config.fixed_point),
                Target::Efcce => efcce_fixed_point(self.game, space, &t),
            }
            .map_err(|source| LearnerError::FixedPoint { iteration, player: p, source })?;
            let image = space.apply(&t, &q).map_err(|e| LearnerError::FixedPoint { iteration, player: p, source: e.into() })?;
            self.residuals[p] = image.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum();
            self.profile[p] = q;
        }
        for p in 0..self.psi.len() {
            self.utilities[p] = self.game.counterfactual_utility(p, &self.profile).expect("profile has the game's shape");
        }
        self.acc.update(&self.profile, &self.utilities);
        if let Some((q0, l0)) = previous {
            if !self.variation_bound_holds(&q0, &l0) {
                self.variation_violations += 1;
            }
        }
        for (p, psi) in self.psi.iter_mut().enumerate() {
            psi.observe(&self.utilities[p], &self.profile[p])
                .map_err(|source| LearnerError::Regret { iteration, player: p, source })?;
        }
        self.iterations = iteration;
        Ok(())
    }

    pub fn run(&mut self, iterations: usize) -> Result<(), LearnerError> {
        for _ in 0..iterations {
            self.step()?;
        }
        Ok(())
    }

    fn variation_bound_holds(&self, q0: &[Vec<f64>], l0: &[Vec<f64>]) -> bool {
        let n = self.profile.len();
        let leaves = self.game.terminals().len() as f64;
        let moves: Vec<f64> = self
            .profile
            .iter()
            .zip(q0)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>().powi(2))
            .collect();
        (0..n).all(|i| {
            let lhs = self.utilities[i].iter().zip(&l0[i]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max).powi(2);
            let rhs: f64 = (n - 1) as f64 * leaves * leaves * moves.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, m)| m).sum::<f64>();
            lhs <= rhs + 1e-12
        })
    }
}
