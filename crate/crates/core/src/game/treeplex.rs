use super::{GameError, StrategyError};

/// An information set of a sequence-form polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeplexInfoset {
    /// Parent sequence, or `None` when the infoset hangs off the root (mass 1).
    pub parent: Option<usize>,
    pub first: usize,
    pub num_actions: usize,
    /// Exclusive end of the sequences at or below this infoset.
    pub end_seq: usize,
    /// Exclusive end of the infosets at or below this infoset.
    pub end_infoset: usize,
    pub depth: usize,
}

impl TreeplexInfoset {
    pub fn seqs(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.num_actions
    }
}

/// Sequence-form polytope laid out in pre-order: an infoset's sequences are
/// contiguous, followed by the subtrees under each of its actions in action
/// order. Every subtree therefore occupies a contiguous range of sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Treeplex {
    infosets: Vec<TreeplexInfoset>,
    seq_infoset: Vec<usize>,
    seq_children: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

impl Treeplex {
    /// Builds from `(parent sequence, action count)` per infoset, listed in
    /// pre-order. Sequence ids are assigned consecutively.
    pub fn new(shape: &[(Option<usize>, usize)]) -> Result<Treeplex, GameError> {
        let bad = |msg: &str| GameError::MalformedTreeplex(msg.to_string());
        let num_sequences: usize = shape.iter().map(|s| s.1).sum();
        let mut infosets: Vec<TreeplexInfoset> = Vec::with_capacity(shape.len());
        let mut seq_infoset = vec![0; num_sequences];
        let mut seq_children = vec![Vec::new(); num_sequences];
        let mut roots = Vec::new();
        let mut first = 0;
        for (k, &(parent, num_actions)) in shape.iter().enumerate() {
            if num_actions == 0 {
                return Err(bad("infoset without actions"));
            }
            match parent {
                Some(p) if p >= first => return Err(bad("parent sequence must precede its child infoset")),
                Some(p) => seq_children[p].push(k),
                None => roots.push(k),
            }
            let depth = parent.map_or(1, |p| infosets[seq_infoset[p]].depth + 1);
            for s in first..first + num_actions {
                seq_infoset[s] = k;
            }
            infosets.push(TreeplexInfoset { parent, first, num_actions, end_seq: 0, end_infoset: 0, depth });
            first += num_actions;
        }

        for k in (0..infosets.len()).rev() {
            let mut next = k + 1;
            for s in infosets[k].seqs() {
                for &c in &seq_children[s] {
                    if c != next {
                        return Err(bad("infosets are not in pre-order"));
                    }
                    next = infosets[c].end_infoset;
                }
            }
            infosets[k].end_infoset = next;
            infosets[k].end_seq = infosets[next - 1].first + infosets[next - 1].num_actions;
        }
        let mut next = 0;
        for &r in &roots {
            if r != next {
                return Err(bad("infosets are not in pre-order"));
            }
            next = infosets[r].end_infoset;
        }
        Ok(Treeplex { infosets, seq_infoset, seq_children, roots })
    }

    pub fn num_sequences(&self) -> usize {
        self.seq_infoset.len()
    }

    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    pub fn infosets(&self) -> &[TreeplexInfoset] {
        &self.infosets
    }

    pub fn infoset(&self, k: usize) -> &TreeplexInfoset {
        &self.infosets[k]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Infoset owning sequence `s`.
    pub fn seq_infoset(&self, s: usize) -> usize {
        self.seq_infoset[s]
    }

    /// Infosets whose parent sequence is `s`.
    pub fn children(&self, s: usize) -> &[usize] {
        &self.seq_children[s]
    }

    /// Sequences strictly below `s`, as a contiguous range.
    pub fn descendants(&self, s: usize) -> std::ops::Range<usize> {
        match (self.seq_children[s].first(), self.seq_children[s].last()) {
            (Some(&a), Some(&b)) => self.infosets[a].first..self.infosets[b].end_seq,
            _ => 0..0,
        }
    }

    /// The subtree rooted at infoset `k` as a standalone treeplex, with
    /// sequence ids shifted by `infoset(k).first`.
    pub fn subtree(&self, k: usize) -> Treeplex {
        let root = &self.infosets[k];
        let off = root.first;
        let shape: Vec<(Option<usize>, usize)> = self.infosets[k..root.end_infoset]
            .iter()
            .enumerate()
            .map(|(i, info)| (if i == 0 { None } else { info.parent.map(|p| p - off) }, info.num_actions))
            .collect();
        Treeplex::new(&shape).expect("subtree of a valid treeplex")
    }

    /// Mass flowing into infoset `k` under `x`.
    pub fn parent_mass(&self, x: &[f64], k: usize) -> f64 {
        self.infosets[k].parent.map_or(1.0, |p| x[p])
    }

    pub fn behavioral_to_sequence(&self, behavior: &[Vec<f64>]) -> Result<Vec<f64>, StrategyError> {
        if behavior.len() != self.infosets.len() {
            return Err(StrategyError::Dimension { expected: self.infosets.len(), found: behavior.len() });
        }
        for (k, b) in behavior.iter().enumerate() {
            let n = self.infosets[k].num_actions;
            if b.len() != n {
                return Err(StrategyError::Dimension { expected: n, found: b.len() });
            }
            let sum: f64 = b.iter().sum();
            if b.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(StrategyError::NotOnSimplex(k));
            }
        }
        let mut x = vec![0.0; self.num_sequences()];
        for (k, info) in self.infosets.iter().enumerate() {
            let mass = self.parent_mass(&x, k);
            for (a, s) in info.seqs().enumerate() {
                x[s] = mass * behavior[k][a];
            }
        }
        Ok(x)
    }

    /// Local conditional distributions; uniform where the infoset is unreached.
    pub fn to_behavioral(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.infosets
            .iter()
            .enumerate()
            .map(|(k, info)| {
                let mass = self.parent_mass(x, k);
                if mass > 0.0 {
                    info.seqs().map(|s| x[s] / mass).collect()
                } else {
                    vec![1.0 / info.num_actions as f64; info.num_actions]
                }
            })
            .collect()
    }

    /// Uniform local play at every infoset.
    pub fn uniform(&self) -> Vec<f64> {
        let b: Vec<Vec<f64>> = self.infosets.iter().map(|i| vec![1.0 / i.num_actions as f64; i.num_actions]).collect();
        self.behavioral_to_sequence(&b).expect("uniform is valid")
    }

    pub fn check(&self, x: &[f64], tol: f64) -> Result<(), StrategyError> {
        if x.len() != self.num_sequences() {
            return Err(StrategyError::Dimension { expected: self.num_sequences(), found: x.len() });
        }
        if let Some(s) = x.iter().position(|v| !v.is_finite() || *v < -tol) {
            return Err(StrategyError::Negative(s));
        }
        for (k, info) in self.infosets.iter().enumerate() {
            let flow: f64 = x[info.seqs()].iter().sum();
            if (flow - self.parent_mass(x, k)).abs() > tol {
                return Err(StrategyError::Flow(k));
            }
        }
        Ok(())
    }

    /// Max of `<v, pi>` over pure strategies, by backward induction. Ties go
    /// to the lowest action index.
    pub fn best_response(&self, v: &[f64]) -> (f64, Vec<f64>) {
        assert_eq!(v.len(), self.num_sequences(), "utility dimension");
        let mut value = vec![0.0; self.infosets.len()];
        let mut choice = vec![0usize; self.infosets.len()];
        for k in (0..self.infosets.len()).rev() {
            let mut best = f64::NEG_INFINITY;
            for (a, s) in self.infosets[k].seqs().enumerate() {
                let u = v[s] + self.seq_children[s].iter().map(|&c| value[c]).sum::<f64>();
                if u > best {
                    best = u;
                    choice[k] = a;
                }
            }
            value[k] = best;
        }
        let mut pi = vec![0.0; self.num_sequences()];
        for (k, info) in self.infosets.iter().enumerate() {
            if self.parent_mass(&pi, k) > 0.0 {
                pi[info.first + choice[k]] = 1.0;
            }
        }
        (self.roots.iter().map(|&r| value[r]).sum(), pi)
    }

    /// Largest number of infosets on a root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.infosets.iter().map(|i| i.depth).max().unwrap_or(0)
    }

    pub fn max_actions(&self) -> usize {
        self.infosets.iter().map(|i| i.num_actions).max().unwrap_or(0)
    }

    /// `gamma[k] = 1 + max_a sum of gamma over child infosets of (k, a)`, which
    /// is also the largest l1 norm of a pure strategy of the subtree at `k`.
    pub fn gamma(&self) -> Vec<f64> {
        let mut gamma = vec![0.0; self.infosets.len()];
        for k in (0..self.infosets.len()).rev() {
            let best = self.infosets[k]
                .seqs()
                .map(|s| self.seq_children[s].iter().map(|&c| gamma[c]).sum::<f64>())
                .fold(0.0, f64::max);
            gamma[k] = 1.0 + best;
        }
        gamma
    }

    /// Max l1 norm over the polytope, not counting any root mass.
    pub fn l1_bound(&self) -> f64 {
        let gamma = self.gamma();
        self.roots.iter().map(|&r| gamma[r]).sum()
    }
}
