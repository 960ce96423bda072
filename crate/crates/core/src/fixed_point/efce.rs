use super::{recurrent_stationary, stationary_distribution, ChainMatrix, FixedPointError, FixedPointOptions};
use crate::deviations::{DeviationKind, DeviationSpace, Transformation};
use crate::game::Game;

fn check(space: &DeviationSpace, t: &Transformation, kind: DeviationKind) -> Result<(), FixedPointError> {
    if space.kind() != kind {
        return Err(FixedPointError::WrongKind { expected: kind });
    }
    // dimension checks only; the result is discarded
    let probe = vec![0.0; space.num_sequences()];
    space.apply(t, &probe)?;
    Ok(())
}

/// Fills the sequences of infoset `j_star`, given `x` already fixed on every
/// infoset above it. Only the entries of `j_star`'s actions change.
pub fn extend_partial_fixed_point(
    game: &Game,
    space: &DeviationSpace,
    t: &Transformation,
    j_star: usize,
    x: &mut [f64],
    opts: &FixedPointOptions,
) -> Result<(), FixedPointError> {
    let p = space.player();
    let n = game.num_actions(p, j_star);
    let first = game.seq(p, j_star, 0);
    let parent = game.parent_seq(p, j_star);
    let xp = x[parent];
    if xp == 0.0 {
        x[first..first + n].iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }

    // Mass entering j_star from triggers above it, and the total weight of
    // triggers on the path whose region covers j_star.
    let mut inflow = vec![0.0; n];
    let mut covering = 0.0;
    let mut s = parent;
    while s != 0 {
        let (j, _) = game.seq_owner(p, s);
        let base = game.subtree_range(p, j).start;
        for a in 0..game.num_actions(p, j) {
            let sigma = game.seq(p, j, a);
            let lambda = t.lambda[sigma - 1];
            if lambda == 0.0 || x[sigma] == 0.0 {
                continue;
            }
            let q = &t.continuations[sigma - 1];
            for (ar, v) in inflow.iter_mut().enumerate() {
                *v += lambda * q[first + ar - base] * x[sigma];
            }
        }
        covering += t.lambda[s - 1];
        s = game.parent_seq(p, j);
    }

    let mut m = ChainMatrix::zeros(n);
    for ac in 0..n {
        let lambda = t.lambda[first + ac - 1];
        let q = &t.continuations[first + ac - 1];
        let mut total = 0.0;
        for ar in 0..n {
            let mut v = inflow[ar] / xp + lambda * q[ar];
            if ar == ac {
                v += 1.0 - covering - lambda;
            }
            let v = v.max(0.0);
            m.set(ar, ac, v);
            total += v;
        }
        // columns sum to 1 up to the tolerance of the entries above
        for ar in 0..n {
            m.set(ar, ac, m.get(ar, ac) / total);
        }
    }
    let b = if opts.allow_reducible {
        recurrent_stationary(&m)
    } else {
        stationary_distribution(&m, opts.tol, opts.max_iter)
            .map_err(|e| FixedPointError::AtInfoset { infoset: j_star, source: Box::new(e) })?
    };
    for (v, bv) in x[first..first + n].iter_mut().zip(&b) {
        *v = xp * bv;
    }
    Ok(())
}

/// Sequence-form strategy fixed by a trigger transformation, built top-down
/// one infoset at a time.
pub fn efce_fixed_point(
    game: &Game,
    space: &DeviationSpace,
    t: &Transformation,
    opts: &FixedPointOptions,
) -> Result<Vec<f64>, FixedPointError> {
    check(space, t, DeviationKind::Trigger)?;
    let mut x = vec![0.0; space.num_sequences()];
    x[0] = 1.0;
    for j in 0..game.num_infosets(space.player()) {
        extend_partial_fixed_point(game, space, t, j, &mut x, opts)?;
    }
    Ok(x)
}

pub(super) fn check_coarse(space: &DeviationSpace, t: &Transformation) -> Result<(), FixedPointError> {
    check(space, t, DeviationKind::Coarse)
}
