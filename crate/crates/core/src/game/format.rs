//! Line-oriented text format:
//!
//! ```text
//! player <n>
//! node <id> player=<i> infoset=<label> actions=<a,...> children=<id,...>
//! chance <id> probs=<p,...> children=<id,...>
//! leaf <id> payoffs=<u1,...,un>
//! ```
//!
//! The first node record is the root. Blank lines and `#` comments are skipped.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use super::{build_game, Game, GameError, RawGame, RawNode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn serialize_game(game: &Game) -> String {
    let raw = game.tree().to_raw();
    let mut out = String::new();
    writeln!(out, "player {}", raw.num_players).unwrap();
    for node in &raw.nodes {
        match node {
            RawNode::Decision { id, player, infoset, actions, children } => writeln!(
                out,
                "node {id} player={player} infoset={infoset} actions={} children={}",
                join(actions),
                join(children)
            ),
            RawNode::Chance { id, probs, children } => {
                writeln!(out, "chance {id} probs={} children={}", join(probs), join(children))
            }
            RawNode::Leaf { id, payoffs } => writeln!(out, "leaf {id} payoffs={}", join(payoffs)),
        }
        .unwrap();
    }
    out
}

pub fn parse_game(text: &str, normalize: bool) -> Result<Game, ParseError> {
    Ok(build_game(&parse_raw(text)?, normalize)?)
}

pub fn parse_raw(text: &str) -> Result<RawGame, ParseError> {
    let mut num_players = None;
    let mut nodes = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |message: String| ParseError::Syntax { line: line_no, message };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let kind = tokens.next().unwrap_or_default();
        if kind == "player" {
            let n = tokens.next().ok_or_else(|| err("missing player count".into()))?;
            let n = n.parse::<usize>().map_err(|e| err(format!("bad player count `{n}`: {e}")))?;
            if num_players.replace(n).is_some() {
                return Err(err("player count given twice".into()));
            }
            continue;
        }
        let id = tokens.next().ok_or_else(|| err(format!("`{kind}` record without an id")))?.to_string();
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for tok in tokens {
            let (key, value) = tok.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{tok}`")))?;
            if fields.insert(key, value).is_some() {
                return Err(err(format!("duplicate field `{key}`")));
            }
        }
        let mut take = |key: &str| fields.remove(key).ok_or_else(|| err(format!("missing field `{key}`")));
        let list = |v: &str| -> Vec<String> { v.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect() };
        let floats = |v: &str| -> Result<Vec<f64>, ParseError> {
            v.split(',')
                .map(|s| s.parse::<f64>().map_err(|e| err(format!("bad number `{s}`: {e}"))))
                .collect()
        };
        let node = match kind {
            "node" => {
                let player = take("player")?;
                let player = player.parse::<usize>().map_err(|e| err(format!("bad player `{player}`: {e}")))?;
                RawNode::Decision {
                    id,
                    player,
                    infoset: take("infoset")?.to_string(),
                    actions: list(take("actions")?),
                    children: list(take("children")?),
                }
            }
            "chance" => RawNode::Chance { id, probs: floats(take("probs")?)?, children: list(take("children")?) },
            "leaf" => RawNode::Leaf { id, payoffs: floats(take("payoffs")?)? },
            other => return Err(err(format!("unknown record `{other}`"))),
        };
        if let Some(key) = fields.keys().next() {
            return Err(err(format!("unexpected field `{key}`")));
        }
        nodes.push(node);
    }
    let num_players = num_players.ok_or(ParseError::Syntax { line: 0, message: "missing `player` record".into() })?;
    Ok(RawGame { num_players, nodes })
}
