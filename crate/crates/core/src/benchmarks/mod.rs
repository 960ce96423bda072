//! Generators for the built-in benchmark games.

mod goofspiel;
mod kuhn;
mod liars_dice;
mod sheriff;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::game::{build_game, Game, RawGame, RawNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Kuhn3,
    Sheriff,
    LiarsDice3,
    Goofspiel3,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown benchmark `{0}` (expected kuhn3, sheriff, liars_dice3 or goofspiel3)")]
pub struct UnknownBenchmark(pub String);

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [Benchmark::Kuhn3, Benchmark::Sheriff, Benchmark::Goofspiel3, Benchmark::LiarsDice3];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Kuhn3 => "kuhn3",
            Benchmark::Sheriff => "sheriff",
            Benchmark::LiarsDice3 => "liars_dice3",
            Benchmark::Goofspiel3 => "goofspiel3",
        }
    }

    /// Raw description with payoffs in the game's natural units.
    pub fn raw(self) -> RawGame {
        match self {
            Benchmark::Kuhn3 => kuhn::raw(),
            Benchmark::Sheriff => sheriff::raw(),
            Benchmark::LiarsDice3 => liars_dice::raw(),
            Benchmark::Goofspiel3 => goofspiel::raw(),
        }
    }

    /// Builds the game, rescaling payoffs into [-1, 1].
    pub fn build(self) -> Game {
        build_game(&self.raw(), true).expect("benchmark generators emit valid games")
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = UnknownBenchmark;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Benchmark::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| UnknownBenchmark(s.to_string()))
    }
}

pub fn generate_benchmark(name: &str) -> Result<Game, UnknownBenchmark> {
    Ok(name.parse::<Benchmark>()?.build())
}

/// Collects node records in pre-order with generated ids `n0, n1, ...`.
#[derive(Default)]
struct RawBuilder {
    nodes: Vec<Option<RawNode>>,
}

impl RawBuilder {
    fn reserve(&mut self) -> (usize, String) {
        self.nodes.push(None);
        let k = self.nodes.len() - 1;
        (k, format!("n{k}"))
    }

    fn set(&mut self, k: usize, node: RawNode) {
        self.nodes[k] = Some(node);
    }

    fn leaf(&mut self, payoffs: Vec<f64>) -> String {
        let (k, id) = self.reserve();
        self.set(k, RawNode::Leaf { id: id.clone(), payoffs });
        id
    }

    fn finish(self, num_players: usize) -> RawGame {
        RawGame { num_players, nodes: self.nodes.into_iter().map(|n| n.expect("every reserved node is set")).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_game, serialize_game, validate_perfect_recall};

    #[test]
    fn kuhn_and_sheriff_sizes() {
        assert_eq!(Benchmark::Kuhn3.build().size(), (36, 75, 78));
        assert_eq!(Benchmark::Sheriff.build().size(), (73, 222, 256));
    }

    #[test]
    fn liars_dice_size() {
        assert_eq!(Benchmark::LiarsDice3.build().size(), (1536, 3069, 13797));
    }

    #[test]
    fn goofspiel_leaves() {
        // decision points and sequences for the limited-information variant
        // are checked in the acceptance suite
        assert_eq!(Benchmark::Goofspiel3.build().size().2, 1296);
    }

    #[test]
    fn names_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.name().parse::<Benchmark>().unwrap(), b);
        }
        assert!(generate_benchmark("leduc").is_err());
    }

    #[test]
    fn generated_games_have_perfect_recall_and_no_zero_chance() {
        for b in Benchmark::ALL {
            let g = b.build();
            assert!(validate_perfect_recall(g.tree()).is_ok(), "{b}");
            for node in g.tree().nodes() {
                if let crate::game::NodeKind::Chance { probs, .. } = &node.kind {
                    assert!(probs.iter().all(|&p| p > 0.0));
                }
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        for b in [Benchmark::Kuhn3, Benchmark::Sheriff] {
            let g = b.build();
            let text = serialize_game(&g);
            let back = parse_game(&text, false).unwrap();
            assert_eq!(back, g);
            assert_eq!(back.size(), g.size());
            assert_eq!(serialize_game(&back), text);
        }
    }

    #[test]
    fn payoff_ranges() {
        let ld = Benchmark::LiarsDice3.build();
        for z in ld.terminals() {
            assert!(z.payoffs.iter().all(|&u| u == -1.0 || u == 0.0 || u == 1.0));
            assert_eq!(z.payoffs.iter().sum::<f64>(), 0.0);
        }
        let sh = Benchmark::Sheriff.build();
        let max = sh.terminals().iter().flat_map(|z| z.payoffs.iter()).fold(0.0f64, |m, u| m.max(u.abs()));
        assert_eq!(max, 1.0);
    }
}
