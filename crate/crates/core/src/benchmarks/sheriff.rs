//! Sheriff, baseline version: the Smuggler loads 0..=3 illegal items, then two
//! bargaining rounds with bribes 0..=3 follow. Only the Sheriff's decision in
//! the last round is binding.

use super::RawBuilder;
use crate::game::{RawGame, RawNode};

const SMUGGLER: usize = 0;
const SHERIFF: usize = 1;
const MAX_ITEMS: usize = 3;
const MAX_BRIBE: usize = 3;
const ROUNDS: usize = 2;

pub(super) fn raw() -> RawGame {
    let mut b = RawBuilder::default();
    let (root, id) = b.reserve();
    let children = (0..=MAX_ITEMS).map(|n| bribe(&mut b, n, &mut Vec::new())).collect();
    b.set(
        root,
        RawNode::Decision {
            id,
            player: SMUGGLER,
            infoset: "S".into(),
            actions: (0..=MAX_ITEMS).map(|n| format!("load{n}")).collect(),
            children,
        },
    );
    b.finish(2)
}

/// `rounds` holds (bribe, inspect) for every completed round.
fn bribe(b: &mut RawBuilder, items: usize, rounds: &mut Vec<(usize, bool)>) -> String {
    let (k, id) = b.reserve();
    let children = (0..=MAX_BRIBE)
        .map(|bribe| respond(b, items, rounds, bribe))
        .collect();
    b.set(
        k,
        RawNode::Decision {
            id: id.clone(),
            player: SMUGGLER,
            infoset: format!("S:{items}{}", history(rounds)),
            actions: (0..=MAX_BRIBE).map(|v| format!("bribe{v}")).collect(),
            children,
        },
    );
    id
}

fn respond(b: &mut RawBuilder, items: usize, rounds: &mut Vec<(usize, bool)>, bribe_now: usize) -> String {
    let (k, id) = b.reserve();
    let last = rounds.len() + 1 == ROUNDS;
    let mut children = Vec::with_capacity(2);
    for inspect in [false, true] {
        children.push(if last {
            b.leaf(payoffs(items, bribe_now, inspect))
        } else {
            rounds.push((bribe_now, inspect));
            let c = bribe(b, items, rounds);
            rounds.pop();
            c
        });
    }
    b.set(
        k,
        RawNode::Decision {
            id: id.clone(),
            player: SHERIFF,
            infoset: format!("P{}:{bribe_now}", history(rounds)),
            actions: vec!["accept".into(), "inspect".into()],
            children,
        },
    );
    id
}

fn history(rounds: &[(usize, bool)]) -> String {
    rounds.iter().map(|&(v, i)| format!("/{v}{}", if i { 'i' } else { 'a' })).collect()
}

fn payoffs(items: usize, bribe: usize, inspect: bool) -> Vec<f64> {
    let (n, b) = (items as f64, bribe as f64);
    match (inspect, items) {
        (false, _) => vec![n - b, b],
        (true, 0) => vec![3.0, -3.0],
        (true, _) => vec![-2.0 * n, 2.0 * n],
    }
}
