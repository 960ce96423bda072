//! Uncoupled no-regret learning dynamics for extensive-form correlated and
//! coarse correlated equilibria.

pub mod game;
pub mod benchmarks;
pub mod regret;
pub mod deviations;
pub mod fixed_point;
pub mod equilibrium;

#[cfg(test)]
mod testing;
