//! Three-player Goofspiel of rank 3 with limited information. Prize cards are
//! revealed one per turn in random order; bids are simultaneous (modelled
//! sequentially with hidden bids). Between turns each player only learns
//! whether it won, lost, or the prize was discarded by a tie.

use super::RawBuilder;
use crate::game::{RawGame, RawNode};

const PLAYERS: usize = 3;
const RANK: usize = 3;

#[derive(Clone, Default)]
struct State {
    prizes: Vec<usize>,
    /// bids[turn][player]
    bids: Vec<Vec<usize>>,
}

impl State {
    fn winner(&self, turn: usize) -> Option<usize> {
        let bids = &self.bids[turn];
        let top = *bids.iter().max().expect("bids");
        let mut at_top = (0..PLAYERS).filter(|&p| bids[p] == top);
        let first = at_top.next();
        if at_top.next().is_some() {
            None
        } else {
            first
        }
    }

    fn hand(&self, player: usize) -> Vec<usize> {
        (1..=RANK).filter(|c| !self.bids.iter().any(|b| b.get(player) == Some(c))).collect()
    }

    fn label(&self, player: usize) -> String {
        let mut s = String::new();
        for (t, &prize) in self.prizes.iter().enumerate() {
            s.push_str(&prize.to_string());
            if let Some(b) = self.bids.get(t).and_then(|b| b.get(player)) {
                s.push_str(&b.to_string());
            }
            if self.bids.get(t).is_some_and(|b| b.len() == PLAYERS) {
                s.push(match self.winner(t) {
                    Some(w) if w == player => 'w',
                    Some(_) => 'l',
                    None => 't',
                });
            }
            s.push('.');
        }
        s
    }
}

pub(super) fn raw() -> RawGame {
    let mut b = RawBuilder::default();
    reveal(&mut b, &mut State::default());
    b.finish(PLAYERS)
}

fn reveal(b: &mut RawBuilder, st: &mut State) -> String {
    if st.prizes.len() == RANK {
        return b.leaf(payoffs(st));
    }
    let left: Vec<usize> = (1..=RANK).filter(|p| !st.prizes.contains(p)).collect();
    if left.len() == 1 {
        st.prizes.push(left[0]);
        st.bids.push(Vec::new());
        let id = bid(b, st);
        st.bids.pop();
        st.prizes.pop();
        return id;
    }
    let (k, id) = b.reserve();
    let mut children = Vec::with_capacity(left.len());
    for &p in &left {
        st.prizes.push(p);
        st.bids.push(Vec::new());
        children.push(bid(b, st));
        st.bids.pop();
        st.prizes.pop();
    }
    b.set(k, RawNode::Chance { id: id.clone(), probs: vec![1.0 / left.len() as f64; left.len()], children });
    id
}

fn bid(b: &mut RawBuilder, st: &mut State) -> String {
    let turn = st.prizes.len() - 1;
    let player = st.bids[turn].len();
    if player == PLAYERS {
        return reveal(b, st);
    }
    let infoset = st.label(player);
    let hand = st.hand(player);
    let (k, id) = b.reserve();
    let mut children = Vec::with_capacity(hand.len());
    for &c in &hand {
        st.bids[turn].push(c);
        children.push(bid(b, st));
        st.bids[turn].pop();
    }
    b.set(
        k,
        RawNode::Decision {
            id: id.clone(),
            player,
            infoset,
            actions: hand.iter().map(|c| format!("bid{c}")).collect(),
            children,
        },
    );
    id
}

fn payoffs(st: &State) -> Vec<f64> {
    let mut u = vec![0.0; PLAYERS];
    for (t, &prize) in st.prizes.iter().enumerate() {
        if let Some(w) = st.winner(t) {
            u[w] += prize as f64;
        }
    }
    u
}
