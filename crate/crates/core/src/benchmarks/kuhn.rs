//! Three-player Kuhn poker with a J/Q/K deck. Everyone antes 1; players
//! check or bet 1 in turn until someone bets, after which the remaining
//! players fold or call. At most one bet per hand.

use super::RawBuilder;
use crate::game::{RawGame, RawNode};

const PLAYERS: usize = 3;
const CARDS: [char; 3] = ['J', 'Q', 'K'];

pub(super) fn raw() -> RawGame {
    let mut b = RawBuilder::default();
    let (root, id) = b.reserve();
    let mut deals = Vec::new();
    for a in 0..3 {
        for c in 0..3 {
            for d in 0..3 {
                if a != c && a != d && c != d {
                    deals.push([a, c, d]);
                }
            }
        }
    }
    let children = deals.iter().map(|deal| betting(&mut b, deal, "")).collect();
    let probs = vec![1.0 / deals.len() as f64; deals.len()];
    b.set(root, RawNode::Chance { id, probs, children });
    b.finish(PLAYERS)
}

/// Returns the player to act after `history`, or `None` when the hand is over.
fn to_act(history: &str) -> Option<usize> {
    let h = history.as_bytes();
    match h.iter().position(|&c| c == b'b') {
        None if h.len() < PLAYERS => Some(h.len()),
        None => None,
        // everyone after the bettor answers once
        Some(bettor) if h.len() < bettor + PLAYERS => Some(h.len() % PLAYERS),
        Some(_) => None,
    }
}

fn betting(b: &mut RawBuilder, deal: &[usize; 3], history: &str) -> String {
    let Some(player) = to_act(history) else {
        return b.leaf(payoffs(deal, history));
    };
    let (k, id) = b.reserve();
    let children = ["p", "b"].iter().map(|a| betting(b, deal, &format!("{history}{a}"))).collect();
    b.set(
        k,
        RawNode::Decision {
            id: id.clone(),
            player,
            infoset: format!("{}:{history}", CARDS[deal[player]]),
            actions: vec!["p".into(), "b".into()],
            children,
        },
    );
    id
}

fn payoffs(deal: &[usize; 3], history: &str) -> Vec<f64> {
    let h = history.as_bytes();
    let mut put = [1.0; PLAYERS];
    let mut live = [true; PLAYERS];
    if let Some(bettor) = h.iter().position(|&c| c == b'b') {
        put[bettor] += 1.0;
        for (k, &c) in h.iter().enumerate().skip(bettor + 1) {
            let p = k % PLAYERS;
            if c == b'b' {
                put[p] += 1.0;
            } else {
                live[p] = false;
            }
        }
    }
    let pot: f64 = put.iter().sum();
    let winner = (0..PLAYERS).filter(|&p| live[p]).max_by_key(|&p| deal[p]).expect("someone stays in");
    (0..PLAYERS).map(|p| if p == winner { pot - put[p] } else { -put[p] }).collect()
}
