//! Three-player Liar's dice with one 3-face die each. Bids (quantity, face)
//! are ordered by quantity first, then face; each player either raises or
//! calls the previous bidder a liar. No face is wild.

use super::RawBuilder;
use crate::game::{RawGame, RawNode};

const PLAYERS: usize = 3;
const FACES: usize = 3;
const BIDS: usize = PLAYERS * FACES;

fn bid(k: usize) -> (usize, usize) {
    (k / FACES + 1, k % FACES + 1)
}

pub(super) fn raw() -> RawGame {
    let mut b = RawBuilder::default();
    let (root, id) = b.reserve();
    let outcomes = FACES.pow(PLAYERS as u32);
    let mut children = Vec::with_capacity(outcomes);
    for r in 0..outcomes {
        let dice = [r / (FACES * FACES) + 1, r / FACES % FACES + 1, r % FACES + 1];
        children.push(turn(&mut b, &dice, &mut Vec::new()));
    }
    b.set(root, RawNode::Chance { id, probs: vec![1.0 / outcomes as f64; outcomes], children });
    b.finish(PLAYERS)
}

fn turn(b: &mut RawBuilder, dice: &[usize; PLAYERS], bids: &mut Vec<usize>) -> String {
    let player = bids.len() % PLAYERS;
    let (k, id) = b.reserve();
    let lowest = bids.last().map_or(0, |&l| l + 1);
    let mut actions = Vec::new();
    let mut children = Vec::new();
    if !bids.is_empty() {
        actions.push("liar".to_string());
        children.push(b.leaf(payoffs(dice, bids)));
    }
    for next in lowest..BIDS {
        let (q, f) = bid(next);
        actions.push(format!("{q}x{f}"));
        bids.push(next);
        children.push(turn(b, dice, bids));
        bids.pop();
    }
    let history: Vec<String> = bids.iter().map(|k| k.to_string()).collect();
    b.set(
        k,
        RawNode::Decision {
            id: id.clone(),
            player,
            infoset: format!("{}:{}", dice[player], history.join(".")),
            actions,
            children,
        },
    );
    id
}

fn payoffs(dice: &[usize; PLAYERS], bids: &[usize]) -> Vec<f64> {
    let bidder = (bids.len() - 1) % PLAYERS;
    let challenger = bids.len() % PLAYERS;
    let (q, f) = bid(*bids.last().expect("a bid to challenge"));
    let valid = dice.iter().filter(|&&d| d == f).count() >= q;
    let mut u = vec![0.0; PLAYERS];
    u[bidder] = if valid { 1.0 } else { -1.0 };
    u[challenger] = -u[bidder];
    u
}
