use nalgebra::{DMatrix, DVector};

use super::FixedPointError;
use crate::deviations::{DeviationSpace, Transformation};
use crate::game::Game;

/// Dense reference solver for small games: least squares on
/// `[(Phi - I); flow rows; x[empty] = 1] x = e_last`.
pub fn brute_force_fixed_point(game: &Game, space: &DeviationSpace, t: &Transformation) -> Result<Vec<f64>, FixedPointError> {
    let p = space.player();
    let n = space.num_sequences();
    let infosets = game.num_infosets(p);
    let rows = n + infosets + 1;
    let mut a = DMatrix::<f64>::zeros(rows, n);
    let mut unit = vec![0.0; n];
    for c in 0..n {
        unit[c] = 1.0;
        let col = space.apply(t, &unit)?;
        unit[c] = 0.0;
        for (r, v) in col.into_iter().enumerate() {
            a[(r, c)] = v;
        }
        a[(c, c)] -= 1.0;
    }
    for j in 0..infosets {
        let r = n + j;
        a[(r, game.parent_seq(p, j))] = 1.0;
        for k in 0..game.num_actions(p, j) {
            a[(r, game.seq(p, j, k))] = -1.0;
        }
    }
    a[(rows - 1, 0)] = 1.0;
    let mut b = DVector::<f64>::zeros(rows);
    b[rows - 1] = 1.0;
    let svd = a.clone().svd(true, true);
    let solve = |rhs: &DVector<f64>| svd.solve(rhs, 1e-12).map_err(|_| FixedPointError::Singular { residual: f64::NAN });
    let mut x = solve(&b)?;
    // a few rounds of iterative refinement; the raw SVD solve can be loose
    for _ in 0..3 {
        x += solve(&(&b - &a * &x))?;
    }
    let residual = (&a * &x - &b).norm();
    if !(residual < 1e-8) {
        return Err(FixedPointError::Singular { residual });
    }
    Ok(x.iter().copied().collect())
}
