//! Random strategies and small games shared by unit tests.

use rand::Rng;

use crate::game::{Game, Treeplex};

/// Behavioral strategy with every local probability at least `floor`.
pub(crate) fn random_behavior<R: Rng>(plex: &Treeplex, floor: f64, rng: &mut R) -> Vec<Vec<f64>> {
    plex.infosets()
        .iter()
        .map(|info| {
            let w: Vec<f64> = (0..info.num_actions).map(|_| floor + rng.gen::<f64>()).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

/// Interior point of a treeplex (no empty sequence).
pub(crate) fn random_point<R: Rng>(plex: &Treeplex, rng: &mut R) -> Vec<f64> {
    plex.behavioral_to_sequence(&random_behavior(plex, 0.05, rng)).unwrap()
}

/// Interior sequence-form strategy of `player`, with the empty sequence.
pub(crate) fn random_strategy<R: Rng>(game: &Game, player: usize, rng: &mut R) -> Vec<f64> {
    let mut x = vec![1.0];
    x.extend(random_point(game.treeplex(player), rng));
    x
}

pub(crate) fn random_utility<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub(crate) fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// All-zero game where player 0 has a single infoset with `n` actions.
pub(crate) fn one_infoset(n: usize) -> Game {
    let z = vec![vec![0.0]; n];
    crate::game::tests::matrix_game(&z, &z)
}
