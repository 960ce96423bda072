//! Extensive-form games with per-player sequence-form indexing.
//!
//! Player strategies are dense vectors over that player's sequences, with
//! the empty sequence at index 0. Sequence `s > 0` corresponds to position
//! `s - 1` of the player's [`Treeplex`].

mod format;
mod tree;
mod treeplex;

use std::ops::Range;

use thiserror::Error;

pub use format::{parse_game, parse_raw, serialize_game, ParseError};
pub use tree::{validate_perfect_recall, GameTree, InfosetInfo, Node, NodeKind, RawGame, RawNode, RecallReport, RecallViolation};
pub use treeplex::{Treeplex, TreeplexInfoset};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("empty game description")]
    Empty,
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("node `{node}` references unknown child `{child}`")]
    UnknownChild { node: String, child: String },
    #[error("node `{0}` has more than one parent")]
    MultipleParents(String),
    #[error("cyclic structure at node `{0}`")]
    Cycle(String),
    #[error("node `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("node `{0}`: number of children does not match its actions or probabilities")]
    ChildCountMismatch(String),
    #[error("node `{node}`: player {player} out of range")]
    InvalidPlayer { node: String, player: usize },
    #[error("inconsistent action sets in infoset `{infoset}` of player {player}")]
    InconsistentActions { player: usize, infoset: String },
    #[error("perfect recall violated at infoset `{infoset}` of player {player}")]
    PerfectRecall { player: usize, infoset: String },
    #[error("chance node `{node}`: probabilities sum to {sum}")]
    BadChance { node: String, sum: f64 },
    #[error("leaf `{node}`: expected {expected} payoffs, found {found}")]
    PayoffCount { node: String, expected: usize, found: usize },
    #[error("leaf `{node}`: payoff {value} outside [-1, 1]")]
    PayoffRange { node: String, value: f64 },
    #[error("malformed treeplex: {0}")]
    MalformedTreeplex(String),
    #[error("player {0} out of range")]
    NoSuchPlayer(usize),
    #[error("infoset {infoset} out of range for player {player}")]
    NoSuchInfoset { player: usize, infoset: usize },
    #[error("utility vector has length {found}, subtree has {expected} sequences")]
    SubtreeDimension { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("local distribution at infoset {0} is not on the simplex")]
    NotOnSimplex(usize),
    #[error("negative or non-finite entry at sequence {0}")]
    Negative(usize),
    #[error("flow conservation violated at infoset {0}")]
    Flow(usize),
    #[error("empty sequence must carry mass 1")]
    RootMass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Terminal {
    pub node: usize,
    pub chance: f64,
    pub payoffs: Vec<f64>,
    /// Last sequence of each player on the path (0 when the player never acts).
    pub last_seq: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolytopeMetrics {
    pub depth: usize,
    pub l1_norm: f64,
    pub max_actions: usize,
    pub entropy_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct PlayerIndex {
    treeplex: Treeplex,
    subtrees: Vec<Treeplex>,
}

/// A validated perfect-recall game together with its sequence indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    tree: GameTree,
    players: Vec<PlayerIndex>,
    terminals: Vec<Terminal>,
}

pub fn build_game(raw: &RawGame, normalize: bool) -> Result<Game, GameError> {
    Game::new(GameTree::from_raw(raw, normalize)?)
}

impl Game {
    pub fn new(mut tree: GameTree) -> Result<Game, GameError> {
        let report = validate_perfect_recall(&tree);
        if let Some(v) = report.violations.into_iter().next() {
            return Err(GameError::PerfectRecall { player: v.player, infoset: v.infoset });
        }

        let parents = tree::owner_parent_sequences(&tree);
        let n = tree.num_players();
        let mut order = Vec::with_capacity(n);
        for p in 0..n {
            let sets = tree.infosets(p);
            let mut roots = Vec::new();
            let mut children: Vec<Vec<Vec<usize>>> = sets.iter().map(|i| vec![Vec::new(); i.actions.len()]).collect();
            for (k, info) in sets.iter().enumerate() {
                match parents[info.nodes[0]] {
                    Some((j, a)) => children[j][a].push(k),
                    None => roots.push(k),
                }
            }
            let mut out = Vec::with_capacity(sets.len());
            let mut stack: Vec<usize> = roots.into_iter().rev().collect();
            while let Some(k) = stack.pop() {
                out.push(k);
                for kids in children[k].iter().rev() {
                    stack.extend(kids.iter().rev());
                }
            }
            order.push(out);
        }
        tree.permute_infosets(&order);

        let parents = tree::owner_parent_sequences(&tree);
        let mut players = Vec::with_capacity(n);
        for p in 0..n {
            let sets = tree.infosets(p);
            let mut first = vec![0; sets.len()];
            let mut next = 0;
            for (k, info) in sets.iter().enumerate() {
                first[k] = next;
                next += info.actions.len();
            }
            let shape: Vec<(Option<usize>, usize)> = sets
                .iter()
                .map(|info| (parents[info.nodes[0]].map(|(j, a)| first[j] + a), info.actions.len()))
                .collect();
            let treeplex = Treeplex::new(&shape)?;
            let subtrees = (0..sets.len()).map(|k| treeplex.subtree(k)).collect();
            players.push(PlayerIndex { treeplex, subtrees });
        }

        let mut terminals = Vec::new();
        let mut stack = vec![(0usize, 1.0f64, vec![0usize; n])];
        while let Some((k, reach, last)) = stack.pop() {
            match &tree.nodes()[k].kind {
                NodeKind::Decision { player, infoset, children } => {
                    let first = players[*player].treeplex.infoset(*infoset).first;
                    for (a, &c) in children.iter().enumerate().rev() {
                        let mut next = last.clone();
                        next[*player] = first + a + 1;
                        stack.push((c, reach, next));
                    }
                }
                NodeKind::Chance { probs, children } => {
                    for (&pr, &c) in probs.iter().zip(children).rev() {
                        stack.push((c, reach * pr, last.clone()));
                    }
                }
                NodeKind::Terminal { payoffs } => {
                    terminals.push(Terminal { node: k, chance: reach, payoffs: payoffs.clone(), last_seq: last });
                }
            }
        }

        Ok(Game { tree, players, terminals })
    }

    pub fn tree(&self) -> &GameTree {
        &self.tree
    }

    pub fn num_players(&self) -> usize {
        self.tree.num_players()
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    /// Sequences of `player`, counting the empty sequence.
    pub fn num_sequences(&self, player: usize) -> usize {
        self.players[player].treeplex.num_sequences() + 1
    }

    pub fn num_infosets(&self, player: usize) -> usize {
        self.players[player].treeplex.num_infosets()
    }

    /// (decision points, sequences, leaves), with one empty sequence per player.
    pub fn size(&self) -> (usize, usize, usize) {
        let n = self.num_players();
        (
            (0..n).map(|p| self.num_infosets(p)).sum(),
            (0..n).map(|p| self.num_sequences(p)).sum(),
            self.terminals.len(),
        )
    }

    /// The player's polytope without the empty sequence.
    pub fn treeplex(&self, player: usize) -> &Treeplex {
        &self.players[player].treeplex
    }

    /// The polytope of continuations below infoset `j`.
    pub fn subtree(&self, player: usize, j: usize) -> &Treeplex {
        &self.players[player].subtrees[j]
    }

    /// Sequences at or below infoset `j`, in player-vector indexing.
    pub fn subtree_range(&self, player: usize, j: usize) -> Range<usize> {
        let info = self.players[player].treeplex.infoset(j);
        info.first + 1..info.end_seq + 1
    }

    /// Parent sequence of infoset `j`, in player-vector indexing.
    pub fn parent_seq(&self, player: usize, j: usize) -> usize {
        self.players[player].treeplex.infoset(j).parent.map_or(0, |s| s + 1)
    }

    /// Sequence of action `a` at infoset `j`, in player-vector indexing.
    pub fn seq(&self, player: usize, j: usize, a: usize) -> usize {
        self.players[player].treeplex.infoset(j).first + a + 1
    }

    /// Infoset and action of sequence `s > 0`.
    pub fn seq_owner(&self, player: usize, s: usize) -> (usize, usize) {
        let t = &self.players[player].treeplex;
        let j = t.seq_infoset(s - 1);
        (j, s - 1 - t.infoset(j).first)
    }

    pub fn infoset_label(&self, player: usize, j: usize) -> &str {
        &self.tree.infosets(player)[j].label
    }

    pub fn num_actions(&self, player: usize, j: usize) -> usize {
        self.players[player].treeplex.infoset(j).num_actions
    }

    pub fn uniform_strategy(&self, player: usize) -> Vec<f64> {
        let mut x = vec![1.0];
        x.extend(self.players[player].treeplex.uniform());
        x
    }

    pub fn behavioral_to_sequence_form(&self, player: usize, behavior: &[Vec<f64>]) -> Result<Vec<f64>, StrategyError> {
        let mut x = vec![1.0];
        x.extend(self.players[player].treeplex.behavioral_to_sequence(behavior)?);
        Ok(x)
    }

    pub fn check_strategy(&self, player: usize, x: &[f64], tol: f64) -> Result<(), StrategyError> {
        if x.len() != self.num_sequences(player) {
            return Err(StrategyError::Dimension { expected: self.num_sequences(player), found: x.len() });
        }
        if (x[0] - 1.0).abs() > tol {
            return Err(StrategyError::RootMass);
        }
        self.players[player].treeplex.check(&x[1..], tol)
    }

    fn check_profile(&self, profile: &[Vec<f64>]) -> Result<(), StrategyError> {
        if profile.len() != self.num_players() {
            return Err(StrategyError::Dimension { expected: self.num_players(), found: profile.len() });
        }
        for (p, q) in profile.iter().enumerate() {
            if q.len() != self.num_sequences(p) {
                return Err(StrategyError::Dimension { expected: self.num_sequences(p), found: q.len() });
            }
        }
        Ok(())
    }

    /// `u_i = sum_z p_c(z) u_i(z) prod_k q_k[last_k(z)]`.
    pub fn expected_utilities(&self, profile: &[Vec<f64>]) -> Result<Vec<f64>, StrategyError> {
        self.check_profile(profile)?;
        let mut u = vec![0.0; self.num_players()];
        for z in &self.terminals {
            let reach = z.last_seq.iter().zip(profile).fold(z.chance, |r, (&s, q)| r * q[s]);
            for (ui, pay) in u.iter_mut().zip(&z.payoffs) {
                *ui += reach * pay;
            }
        }
        Ok(u)
    }

    /// Same quantity as [`Game::expected_utilities`], computed by walking the
    /// tree with the behavioral strategies the profile induces.
    pub fn expected_utilities_by_walk(&self, profile: &[Vec<f64>]) -> Result<Vec<f64>, StrategyError> {
        self.check_profile(profile)?;
        let mut u = vec![0.0; self.num_players()];
        let mut stack = vec![(0usize, 1.0f64)];
        while let Some((k, reach)) = stack.pop() {
            match &self.tree.nodes()[k].kind {
                NodeKind::Decision { player, infoset, children } => {
                    let q = &profile[*player];
                    let parent = q[self.parent_seq(*player, *infoset)];
                    if parent <= 0.0 {
                        continue;
                    }
                    for (a, &c) in children.iter().enumerate() {
                        stack.push((c, reach * q[self.seq(*player, *infoset, a)] / parent));
                    }
                }
                NodeKind::Chance { probs, children } => {
                    for (&pr, &c) in probs.iter().zip(children) {
                        stack.push((c, reach * pr));
                    }
                }
                NodeKind::Terminal { payoffs } => {
                    for (ui, pay) in u.iter_mut().zip(payoffs) {
                        *ui += reach * pay;
                    }
                }
            }
        }
        Ok(u)
    }

    /// Gradient of player `i`'s utility with respect to its own sequence-form
    /// strategy. Entries of `profile[player]` are ignored.
    pub fn counterfactual_utility(&self, player: usize, profile: &[Vec<f64>]) -> Result<Vec<f64>, StrategyError> {
        self.check_profile(profile)?;
        let mut cf = vec![0.0; self.num_sequences(player)];
        for z in &self.terminals {
            let mut w = z.chance * z.payoffs[player];
            if w == 0.0 {
                continue;
            }
            for (k, q) in profile.iter().enumerate() {
                if k != player {
                    w *= q[z.last_seq[k]];
                }
            }
            cf[z.last_seq[player]] += w;
        }
        Ok(cf)
    }

    /// Best pure continuation below infoset `j` against `v`, a utility over
    /// the sequences of that subtree.
    pub fn best_response(&self, player: usize, j: usize, v: &[f64]) -> Result<(f64, Vec<f64>), GameError> {
        let p = self.players.get(player).ok_or(GameError::NoSuchPlayer(player))?;
        let t = p.subtrees.get(j).ok_or(GameError::NoSuchInfoset { player, infoset: j })?;
        if v.len() != t.num_sequences() {
            return Err(GameError::SubtreeDimension { expected: t.num_sequences(), found: v.len() });
        }
        Ok(t.best_response(v))
    }

    pub fn polytope_metrics(&self, player: usize) -> PolytopeMetrics {
        let t = &self.players[player].treeplex;
        let l1_norm = 1.0 + t.l1_bound();
        let max_log = t.infosets().iter().map(|i| (i.num_actions as f64).ln()).fold(0.0, f64::max);
        PolytopeMetrics {
            depth: t.depth(),
            l1_norm,
            max_actions: t.max_actions(),
            entropy_bound: l1_norm * l1_norm * max_log,
        }
    }
}
