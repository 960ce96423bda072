use super::efce::check_coarse;
use super::FixedPointError;
use crate::deviations::{DeviationSpace, Transformation};
use crate::game::Game;

/// Closed-form fixed point of a coarse trigger transformation. Each sequence
/// `(j, a)` averages the continuations of the triggers at or above `j`,
/// weighted by their mixture weight and the mass reaching them.
pub fn efcce_fixed_point(game: &Game, space: &DeviationSpace, t: &Transformation) -> Result<Vec<f64>, FixedPointError> {
    check_coarse(space, t)?;
    let p = space.player();
    let mut x = vec![0.0; space.num_sequences()];
    x[0] = 1.0;
    let mut path: Vec<(usize, f64)> = Vec::new();
    for j in 0..game.num_infosets(p) {
        path.clear();
        let mut k = j;
        loop {
            path.push((k, t.lambda[k]));
            let s = game.parent_seq(p, k);
            if s == 0 {
                break;
            }
            k = game.seq_owner(p, s).0;
        }
        let d: f64 = path.iter().map(|(_, l)| l).sum();
        let n = game.num_actions(p, j);
        let parent = x[game.parent_seq(p, j)];
        for a in 0..n {
            let sigma = game.seq(p, j, a);
            x[sigma] = if d == 0.0 {
                parent / n as f64
            } else {
                path.iter()
                    .map(|&(k, l)| l * t.continuations[k][sigma - game.subtree_range(p, k).start] * x[game.parent_seq(p, k)])
                    .sum::<f64>()
                    / d
            };
        }
    }
    Ok(x)
}
