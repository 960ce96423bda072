use super::FixedPointError;

/// Square matrix in row-major order. Stationary distributions are taken for
/// the column convention `pi = M pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMatrix {
    n: usize,
    data: Vec<f64>,
}

impl ChainMatrix {
    pub fn zeros(n: usize) -> ChainMatrix {
        ChainMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> ChainMatrix {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix");
        ChainMatrix { n, data: rows.concat() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n + c] = v;
    }

    pub fn column_sum(&self, c: usize) -> f64 {
        (0..self.n).map(|r| self.get(r, c)).sum()
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.data[r * self.n..(r + 1) * self.n].iter().zip(x).map(|(m, v)| m * v).sum();
        }
    }

    fn check_stochastic(&self) -> Result<(), FixedPointError> {
        for c in 0..self.n {
            let bad = (0..self.n).any(|r| !(self.get(r, c) >= -1e-12));
            if bad || (self.column_sum(c) - 1.0).abs() > 1e-9 {
                return Err(FixedPointError::NotStochastic { column: c });
            }
        }
        Ok(())
    }

    /// Strong connectivity of the transition graph `c -> r` when `M[r][c] > 0`.
    pub fn is_irreducible(&self) -> bool {
        let reach = |forward: bool| {
            let mut seen = vec![false; self.n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for v in 0..self.n {
                    let w = if forward { self.get(v, u) } else { self.get(u, v) };
                    if w > 0.0 && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        self.n == 0 || (reach(true) && reach(false))
    }
}

/// Stationary distribution of an irreducible column-stochastic matrix.
pub fn stationary_distribution(m: &ChainMatrix, tol: f64, max_iter: usize) -> Result<Vec<f64>, FixedPointError> {
    m.check_stochastic()?;
    if !m.is_irreducible() {
        return Err(FixedPointError::Reducible);
    }
    power_iteration(m, tol, max_iter)
}

/// Power iteration from the uniform distribution, without a connectivity
/// check.
///
/// Heavy diagonals slow plain power iteration to a crawl, so the chain is
/// first de-lazied: off-diagonal entries are divided by `1.1` times the
/// largest off-diagonal column mass, which keeps the stationary distributions.
/// Iteration stops once the rescaled chain's residual, times the factor when
/// it exceeds 1, is within `tol`, and the distance to the limit, estimated from
/// the last step and the observed contraction rate `r` as `step * r / (1 - r)`,
/// is within `tol` in l1. A small step alone says little on slowly mixing
/// chains. The update works on off-diagonal flows alone, since the diagonal is
/// fixed by the column sums and `1 - M[c][c]` loses precision when the chain
/// is nearly the identity.
pub fn power_iteration(m: &ChainMatrix, tol: f64, max_iter: usize) -> Result<Vec<f64>, FixedPointError> {
    let n = m.size();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut pi = vec![1.0 / n as f64; n];
    let outflow: Vec<f64> = (0..n).map(|c| (0..n).filter(|&r| r != c).map(|r| m.get(r, c)).sum()).collect();
    let scale = 1.1 * outflow.iter().fold(0.0f64, |a, b| a.max(*b));
    if scale == 0.0 {
        // identity: every distribution is stationary
        return Ok(pi);
    }
    let mut off = m.clone();
    for k in 0..n {
        off.set(k, k, 0.0);
    }
    off.data.iter_mut().for_each(|v| *v /= scale);
    let outflow: Vec<f64> = outflow.iter().map(|o| o / scale).collect();
    let mut delta = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut last_step = f64::INFINITY;
    for _ in 0..max_iter {
        off.mul(&pi, &mut delta);
        for ((d, x), o) in delta.iter_mut().zip(&pi).zip(&outflow) {
            *d -= o * x;
        }
        residual = scale.max(1.0) * delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        let mut total = 0.0;
        for (x, d) in pi.iter_mut().zip(&delta) {
            *x = (*x + d).max(0.0);
            total += *x;
        }
        pi.iter_mut().for_each(|x| *x /= total);
        let step: f64 = delta.iter().map(|d| d.abs()).sum();
        let rate = step / last_step;
        last_step = step;
        if residual <= tol && (step == 0.0 || (rate < 1.0 && step * rate / (1.0 - rate) <= tol)) {
            return Ok(pi);
        }
    }
    Err(FixedPointError::MaxIter { iterations: max_iter, residual })
}

/// A stationary distribution of any column-stochastic matrix, exact up to
/// rounding: the uniform mixture of the stationary distributions of the
/// closed communicating classes, each found by state reduction
/// (Grassmann-Taksar-Heyman), which involves no subtractions.
pub fn recurrent_stationary(m: &ChainMatrix) -> Vec<f64> {
    let n = m.size();
    let edge = |from: usize, to: usize| from != to && m.get(to, from) > 0.0;
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for v in 0..n {
                    if edge(u, v) && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect();
    let mut pi = vec![0.0; n];
    let mut assigned = vec![false; n];
    let mut classes = 0;
    for s in 0..n {
        // closed class: everything reachable from s reaches back
        if assigned[s] || !(0..n).all(|v| !reach[s][v] || reach[v][s]) {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&v| reach[s][v]).collect();
        for (&v, w) in members.iter().zip(gth(m, &members)) {
            assigned[v] = true;
            pi[v] += w;
        }
        classes += 1;
    }
    pi.iter_mut().for_each(|x| *x /= classes as f64);
    pi
}

fn gth(m: &ChainMatrix, states: &[usize]) -> Vec<f64> {
    let k = states.len();
    // p[i][j]: probability of moving from states[i] to states[j]
    let mut p: Vec<Vec<f64>> = states.iter().map(|&i| states.iter().map(|&j| if i == j { 0.0 } else { m.get(j, i) }).collect()).collect();
    for l in (1..k).rev() {
        let s: f64 = p[l][..l].iter().sum();
        for i in 0..l {
            p[i][l] /= s;
        }
        for i in 0..l {
            let pil = p[i][l];
            if pil != 0.0 {
                for j in 0..l {
                    p[i][j] += pil * p[l][j];
                }
            }
        }
    }
    let mut pi = vec![0.0; k];
    pi[0] = 1.0;
    for l in 1..k {
        pi[l] = (0..l).map(|i| pi[i] * p[i][l]).sum();
    }
    let total: f64 = pi.iter().sum();
    pi.into_iter().map(|x| x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_chains() {
        let half = ChainMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(stationary_distribution(&half, 1e-12, 10).unwrap(), vec![0.5, 0.5]);
        let m = ChainMatrix::from_rows(&[vec![0.9, 0.5], vec![0.1, 0.5]]);
        let pi = stationary_distribution(&m, 1e-13, 100_000).unwrap();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-12 && (pi[1] - 1.0 / 6.0).abs() < 1e-12, "{pi:?}");
    }

    #[test]
    fn identity_is_rejected_unless_allowed() {
        let id = ChainMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(stationary_distribution(&id, 1e-6, 1000), Err(FixedPointError::Reducible));
        assert_eq!(power_iteration(&id, 1e-6, 1000).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn periodic_chain_is_solved() {
        let swap = ChainMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(stationary_distribution(&swap, 1e-12, 10).unwrap(), vec![0.5, 0.5]);
        let cycle = ChainMatrix::from_rows(&[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let pi = stationary_distribution(&cycle, 1e-12, 10).unwrap();
        assert!(pi.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn lazy_chain_converges_tightly() {
        let eps = 1e-7;
        let m = ChainMatrix::from_rows(&[vec![1.0 - eps, 2.0 * eps], vec![eps, 1.0 - 2.0 * eps]]);
        let pi = stationary_distribution(&m, 1e-18, 1000).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-11, "{pi:?}");
    }

    #[test]
    fn state_reduction_handles_reducible_chains() {
        let m = ChainMatrix::from_rows(&[vec![0.9, 0.5], vec![0.1, 0.5]]);
        let pi = recurrent_stationary(&m);
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-15 && (pi[1] - 1.0 / 6.0).abs() < 1e-15);
        let id = ChainMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(recurrent_stationary(&id), vec![0.5, 0.5]);
        // state 2 drains into the closed pair {0, 1}
        let m = ChainMatrix::from_rows(&[vec![0.5, 0.5, 0.3], vec![0.5, 0.5, 0.3], vec![0.0, 0.0, 0.4]]);
        assert_eq!(recurrent_stationary(&m), vec![0.5, 0.5, 0.0]);
        let eps = 1e-300;
        let m = ChainMatrix::from_rows(&[vec![1.0 - eps, 2.0 * eps], vec![eps, 1.0 - 2.0 * eps]]);
        let pi = recurrent_stationary(&m);
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_stochastic() {
        let m = ChainMatrix::from_rows(&[vec![0.9, 0.5], vec![0.2, 0.5]]);
        assert_eq!(stationary_distribution(&m, 1e-6, 10), Err(FixedPointError::NotStochastic { column: 0 }));
    }

    #[test]
    fn reports_max_iter() {
        let m = ChainMatrix::from_rows(&[vec![0.9, 0.5], vec![0.1, 0.5]]);
        assert!(matches!(stationary_distribution(&m, 1e-15, 1), Err(FixedPointError::MaxIter { iterations: 1, .. })));
    }
}
