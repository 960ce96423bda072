use std::collections::HashMap;

use super::GameError;

/// One record of a raw game description, before validation.
#[derive(Debug, Clone, PartialEq)]
pub enum RawNode {
    Decision {
        id: String,
        player: usize,
        infoset: String,
        actions: Vec<String>,
        children: Vec<String>,
    },
    Chance {
        id: String,
        probs: Vec<f64>,
        children: Vec<String>,
    },
    Leaf {
        id: String,
        payoffs: Vec<f64>,
    },
}

impl RawNode {
    pub fn id(&self) -> &str {
        match self {
            RawNode::Decision { id, .. } | RawNode::Chance { id, .. } | RawNode::Leaf { id, .. } => id,
        }
    }

    fn children(&self) -> &[String] {
        match self {
            RawNode::Decision { children, .. } | RawNode::Chance { children, .. } => children,
            RawNode::Leaf { .. } => &[],
        }
    }
}

/// A game as a flat list of node records. The first node is the root.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawGame {
    pub num_players: usize,
    pub nodes: Vec<RawNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Decision {
        player: usize,
        infoset: usize,
        children: Vec<usize>,
    },
    Chance {
        probs: Vec<f64>,
        children: Vec<usize>,
    },
    Terminal {
        payoffs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfosetInfo {
    pub label: String,
    pub actions: Vec<String>,
    pub nodes: Vec<usize>,
}

/// Validated tree structure. Node 0 is the root; infoset ids are per player.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTree {
    num_players: usize,
    nodes: Vec<Node>,
    infosets: Vec<Vec<InfosetInfo>>,
}

const PROB_TOL: f64 = 1e-12;

impl GameTree {
    /// Checks tree shape, action-set consistency, chance distributions and
    /// payoff ranges. Perfect recall is checked separately.
    pub fn from_raw(raw: &RawGame, normalize: bool) -> Result<GameTree, GameError> {
        if raw.nodes.is_empty() {
            return Err(GameError::Empty);
        }
        let n = raw.num_players;
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(raw.nodes.len());
        for (k, node) in raw.nodes.iter().enumerate() {
            if index.insert(node.id(), k).is_some() {
                return Err(GameError::DuplicateNode(node.id().to_string()));
            }
        }

        let mut parent: Vec<Option<usize>> = vec![None; raw.nodes.len()];
        let mut child_ids: Vec<Vec<usize>> = Vec::with_capacity(raw.nodes.len());
        for (k, node) in raw.nodes.iter().enumerate() {
            let mut ids = Vec::with_capacity(node.children().len());
            for c in node.children() {
                let &ci = index.get(c.as_str()).ok_or_else(|| GameError::UnknownChild {
                    node: node.id().to_string(),
                    child: c.clone(),
                })?;
                if ci == 0 || ci == k {
                    return Err(GameError::Cycle(node.id().to_string()));
                }
                if parent[ci].replace(k).is_some() {
                    return Err(GameError::MultipleParents(c.clone()));
                }
                ids.push(ci);
            }
            child_ids.push(ids);
        }

        // Every node must hang off the root; a parent chain that never
        // reaches the root is a cycle.
        let mut reached = vec![false; raw.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(k) = stack.pop() {
            reached[k] = true;
            stack.extend(child_ids[k].iter().copied());
        }
        if let Some(k) = reached.iter().position(|r| !r) {
            let id = raw.nodes[k].id().to_string();
            return Err(if parent[k].is_some() { GameError::Cycle(id) } else { GameError::Unreachable(id) });
        }

        let mut scale = 1.0;
        if normalize {
            let max = raw
                .nodes
                .iter()
                .filter_map(|node| match node {
                    RawNode::Leaf { payoffs, .. } => Some(payoffs.iter().fold(0.0f64, |m, u| m.max(u.abs()))),
                    _ => None,
                })
                .fold(0.0f64, f64::max);
            if max > 1.0 {
                scale = max;
            }
        }

        let mut infosets: Vec<Vec<InfosetInfo>> = vec![Vec::new(); n];
        let mut infoset_ids: Vec<HashMap<&str, usize>> = vec![HashMap::new(); n];
        let mut nodes = Vec::with_capacity(raw.nodes.len());
        for (k, node) in raw.nodes.iter().enumerate() {
            let kind = match node {
                RawNode::Decision { id, player, infoset, actions, children } => {
                    if *player >= n {
                        return Err(GameError::InvalidPlayer { node: id.clone(), player: *player });
                    }
                    if actions.is_empty() || actions.len() != children.len() {
                        return Err(GameError::ChildCountMismatch(id.clone()));
                    }
                    let ids = &mut infoset_ids[*player];
                    let j = match ids.get(infoset.as_str()) {
                        Some(&j) => {
                            if infosets[*player][j].actions != *actions {
                                return Err(GameError::InconsistentActions {
                                    player: *player,
                                    infoset: infoset.clone(),
                                });
                            }
                            j
                        }
                        None => {
                            let j = infosets[*player].len();
                            ids.insert(infoset, j);
                            infosets[*player].push(InfosetInfo {
                                label: infoset.clone(),
                                actions: actions.clone(),
                                nodes: Vec::new(),
                            });
                            j
                        }
                    };
                    infosets[*player][j].nodes.push(k);
                    NodeKind::Decision { player: *player, infoset: j, children: child_ids[k].clone() }
                }
                RawNode::Chance { id, probs, children } => {
                    if probs.is_empty() || probs.len() != children.len() {
                        return Err(GameError::ChildCountMismatch(id.clone()));
                    }
                    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                        return Err(GameError::BadChance { node: id.clone(), sum: probs.iter().sum() });
                    }
                    let sum: f64 = probs.iter().sum();
                    if (sum - 1.0).abs() > PROB_TOL {
                        return Err(GameError::BadChance { node: id.clone(), sum });
                    }
                    NodeKind::Chance { probs: probs.clone(), children: child_ids[k].clone() }
                }
                RawNode::Leaf { id, payoffs } => {
                    if payoffs.len() != n {
                        return Err(GameError::PayoffCount { node: id.clone(), expected: n, found: payoffs.len() });
                    }
                    let payoffs: Vec<f64> = payoffs.iter().map(|u| u / scale).collect();
                    if let Some(&u) = payoffs.iter().find(|u| !u.is_finite() || u.abs() > 1.0) {
                        return Err(GameError::PayoffRange { node: id.clone(), value: u });
                    }
                    NodeKind::Terminal { payoffs }
                }
            };
            nodes.push(Node { id: node.id().to_string(), kind });
        }

        Ok(GameTree { num_players: n, nodes, infosets })
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn infosets(&self, player: usize) -> &[InfosetInfo] {
        &self.infosets[player]
    }

    pub fn num_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Terminal { .. })).count()
    }

    pub fn num_infosets(&self) -> usize {
        self.infosets.iter().map(Vec::len).sum()
    }

    /// Renumbers every player's infosets; `order[p][new] = old`.
    pub(crate) fn permute_infosets(&mut self, order: &[Vec<usize>]) {
        let mut inverse: Vec<Vec<usize>> = order.iter().map(|o| vec![0; o.len()]).collect();
        for (p, o) in order.iter().enumerate() {
            for (new, &old) in o.iter().enumerate() {
                inverse[p][old] = new;
            }
            let old = std::mem::take(&mut self.infosets[p]);
            let mut slots: Vec<Option<InfosetInfo>> = old.into_iter().map(Some).collect();
            self.infosets[p] = o.iter().map(|&k| slots[k].take().expect("permutation")).collect();
        }
        for node in &mut self.nodes {
            if let NodeKind::Decision { player, infoset, .. } = &mut node.kind {
                *infoset = inverse[*player][*infoset];
            }
        }
    }

    /// Converts back to the flat record form, in node order.
    pub fn to_raw(&self) -> RawGame {
        let id = |k: &usize| self.nodes[*k].id.clone();
        let nodes = self
            .nodes
            .iter()
            .map(|node| match &node.kind {
                NodeKind::Decision { player, infoset, children } => {
                    let info = &self.infosets[*player][*infoset];
                    RawNode::Decision {
                        id: node.id.clone(),
                        player: *player,
                        infoset: info.label.clone(),
                        actions: info.actions.clone(),
                        children: children.iter().map(id).collect(),
                    }
                }
                NodeKind::Chance { probs, children } => RawNode::Chance {
                    id: node.id.clone(),
                    probs: probs.clone(),
                    children: children.iter().map(id).collect(),
                },
                NodeKind::Terminal { payoffs } => RawNode::Leaf { id: node.id.clone(), payoffs: payoffs.clone() },
            })
            .collect();
        RawGame { num_players: self.num_players, nodes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecallViolation {
    pub player: usize,
    pub infoset: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RecallReport {
    pub violations: Vec<RecallViolation>,
}

impl RecallReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Last (infoset, action) of the acting player on the path to each decision
/// node, or `None` when the player has not acted yet.
pub(crate) fn owner_parent_sequences(tree: &GameTree) -> Vec<Option<(usize, usize)>> {
    let n = tree.num_players;
    let mut out = vec![None; tree.nodes.len()];
    let mut stack: Vec<(usize, Vec<Option<(usize, usize)>>)> = vec![(0, vec![None; n])];
    while let Some((k, last)) = stack.pop() {
        match &tree.nodes[k].kind {
            NodeKind::Decision { player, infoset, children } => {
                out[k] = last[*player];
                for (a, &c) in children.iter().enumerate() {
                    let mut next = last.clone();
                    next[*player] = Some((*infoset, a));
                    stack.push((c, next));
                }
            }
            NodeKind::Chance { children, .. } => {
                for &c in children {
                    stack.push((c, last.clone()));
                }
            }
            NodeKind::Terminal { .. } => {}
        }
    }
    out
}

/// Every node of an infoset must be reached through the same last own
/// sequence; applied inductively this makes whole own histories coincide.
pub fn validate_perfect_recall(tree: &GameTree) -> RecallReport {
    let parents = owner_parent_sequences(tree);
    let mut report = RecallReport::default();
    for (p, sets) in tree.infosets.iter().enumerate() {
        for info in sets {
            let first = parents[info.nodes[0]];
            if info.nodes.iter().any(|&k| parents[k] != first) {
                report.violations.push(RecallViolation { player: p, infoset: info.label.clone() });
            }
        }
    }
    report
}
