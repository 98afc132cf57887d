//! Nim-sum arithmetic, P/N classification and the winning strategy.
//!
//! A [`Position`] doubles as a tuple of pile sizes and as a lattice point in
//! `d`-space; every other module builds on that identification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pile sizes, or equivalently a lattice point with `d >= 1` coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Position(Vec<u64>);

impl Position {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPosition);
        }
        Ok(Position(coords))
    }

    pub fn origin(d: usize) -> Result<Self> {
        Position::new(vec![0; d])
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn nim_sum(&self) -> u64 {
        nim_sum(&self.0)
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }

    /// Checks `m` against this position without applying it.
    pub fn check_move(&self, m: Move) -> Result<()> {
        let current = *self.0.get(m.pile_index).ok_or(Error::PileIndexOutOfRange {
            index: m.pile_index,
            piles: self.0.len(),
        })?;
        if m.new_size >= current {
            return Err(Error::MoveDoesNotReduce {
                index: m.pile_index,
                current,
                new_size: m.new_size,
            });
        }
        Ok(())
    }

    pub fn apply(&self, m: Move) -> Result<Position> {
        self.check_move(m)?;
        let mut next = self.0.clone();
        next[m.pile_index] = m.new_size;
        Ok(Position(next))
    }

    /// Every legal move, ordered by pile index then new size.
    pub fn legal_moves(&self) -> impl Iterator<Item = Move> + '_ {
        self.0.iter().enumerate().flat_map(|(pile_index, &size)| {
            (0..size).map(move |new_size| Move {
                pile_index,
                new_size,
            })
        })
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coords = Vec::<u64>::deserialize(deserializer)?;
        Position::new(coords).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<u64>> for Position {
    type Error = Error;

    fn try_from(coords: Vec<u64>) -> Result<Self> {
        Position::new(coords)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Parses pile lists such as `4,6,9`, `4 6 9` or `4, 6, 9`.
impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(parse_coordinate)
            .collect::<Result<Vec<_>>>()?;
        Position::new(coords)
    }
}

pub fn parse_coordinate(tok: &str) -> Result<u64> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::ParseCoordinate(tok.to_owned()));
    }
    tok.parse().map_err(|_| Error::ParseCoordinate(tok.to_owned()))
}

/// Take stones from `pile_index` until `new_size` remain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Move {
    pub pile_index: usize,
    pub new_size: u64,
}

impl Move {
    pub fn new(pile_index: usize, new_size: u64) -> Self {
        Move {
            pile_index,
            new_size,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pile {} -> {}", self.pile_index, self.new_size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// The previous player wins: nim-sum zero.
    P,
    /// The next player wins: nim-sum nonzero.
    N,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::P => "P",
            Classification::N => "N",
        })
    }
}

/// Binary addition without carries. The empty sum is 0.
pub fn nim_sum(values: &[u64]) -> u64 {
    values.iter().fold(0, |acc, &x| acc ^ x)
}

pub fn classify(p: &Position) -> Classification {
    if p.nim_sum() == 0 {
        Classification::P
    } else {
        Classification::N
    }
}

/// The winning reply from an N-position, `None` from a P-position.
///
/// With `s` the nim-sum, pile `j` can be reduced to `x_j ^ s` exactly when that
/// is smaller than `x_j`. The lowest such pile is chosen.
pub fn optimal_move(p: &Position) -> Option<Move> {
    let s = p.nim_sum();
    if s == 0 {
        return None;
    }
    p.coords().iter().enumerate().find_map(|(j, &x)| {
        let target = x ^ s;
        (target < x).then_some(Move::new(j, target))
    })
}

/// All moves that reach a P-position, ordered by pile index.
///
/// For a fixed pile the only candidate size is `x_j ^ s`, so the list holds at
/// most one move per pile.
pub fn all_winning_moves(p: &Position) -> Vec<Move> {
    let s = p.nim_sum();
    if s == 0 {
        return Vec::new();
    }
    p.coords()
        .iter()
        .enumerate()
        .filter_map(|(j, &x)| {
            let target = x ^ s;
            (target < x).then_some(Move::new(j, target))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pos(c: &[u64]) -> Position {
        Position::new(c.to_vec()).unwrap()
    }

    /// Column-wise parity of binary expansions, independent of `^`.
    fn bitwise_oracle(values: &[u64]) -> u64 {
        let mut out = 0u64;
        for bit in 0..64 {
            let ones: u32 = values.iter().map(|v| ((v >> bit) & 1) as u32).sum();
            if ones % 2 == 1 {
                out += 1 << bit;
            }
        }
        out
    }

    fn brute_force_winning(p: &Position) -> Vec<Move> {
        p.legal_moves()
            .filter(|&m| p.apply(m).unwrap().classify() == Classification::P)
            .collect()
    }

    #[test]
    fn nim_sum_examples() {
        assert_eq!(nim_sum(&[4, 6, 2]), 0);
        assert_eq!(nim_sum(&[]), 0);
        assert_eq!(nim_sum(&[77, 77]), 0);
        assert_eq!(bitwise_oracle(&[4, 6, 9]), 11);
        assert_eq!(nim_sum(&[4, 6, 9]), 11);
        // reducing 9 to 2 balances the other two piles
        assert_eq!(nim_sum(&[4, 6]), 2);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(pos(&[4, 6, 2]).classify(), Classification::P);
        assert_eq!(pos(&[0, 0, 0, 0]).classify(), Classification::P);
        assert_eq!(bitwise_oracle(&[7, 3, 5]), 1);
        assert_eq!(pos(&[7, 3, 5]).classify(), Classification::N);
    }

    #[test]
    fn optimal_move_examples() {
        assert_eq!(optimal_move(&pos(&[4, 6, 9])), Some(Move::new(2, 2)));
        assert_eq!(optimal_move(&pos(&[5, 5])), None);
        let p = pos(&[1, 1, 1]);
        assert_eq!(
            brute_force_winning(&p),
            vec![Move::new(0, 0), Move::new(1, 0), Move::new(2, 0)]
        );
        assert_eq!(optimal_move(&p), Some(Move::new(0, 0)));
    }

    #[test]
    fn all_winning_moves_examples() {
        assert_eq!(all_winning_moves(&pos(&[1, 1, 1])).len(), 3);
        assert!(all_winning_moves(&pos(&[0, 0])).is_empty());
        let p = pos(&[4, 6, 9]);
        assert_eq!(p.legal_moves().count(), 19);
        assert_eq!(brute_force_winning(&p), vec![Move::new(2, 2)]);
        assert_eq!(all_winning_moves(&p), vec![Move::new(2, 2)]);
    }

    #[test]
    fn all_winning_moves_matches_brute_force_on_cube() {
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    let p = pos(&[a, b, c]);
                    assert_eq!(all_winning_moves(&p), brute_force_winning(&p), "{p}");
                }
            }
        }
    }

    #[test]
    fn strategy_soundness_on_cube() {
        for a in 0..16 {
            for b in 0..16 {
                for c in 0..16 {
                    let p = pos(&[a, b, c]);
                    match p.classify() {
                        Classification::N => {
                            let m = optimal_move(&p).expect("N-position has a winning move");
                            assert_eq!(p.apply(m).unwrap().classify(), Classification::P);
                        }
                        Classification::P => {
                            assert!(optimal_move(&p).is_none());
                            for m in p.legal_moves() {
                                assert_eq!(p.apply(m).unwrap().classify(), Classification::N);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn position_construction_and_parsing() {
        assert!(matches!(Position::new(vec![]), Err(Error::EmptyPosition)));
        assert_eq!("4,6,9".parse::<Position>().unwrap(), pos(&[4, 6, 9]));
        assert_eq!("4 6  9".parse::<Position>().unwrap(), pos(&[4, 6, 9]));
        assert_eq!("4, 6, 9".parse::<Position>().unwrap(), pos(&[4, 6, 9]));
        assert_eq!(
            "18446744073709551615".parse::<Position>().unwrap(),
            pos(&[u64::MAX])
        );
        assert!(matches!(
            "18446744073709551616".parse::<Position>(),
            Err(Error::ParseCoordinate(_))
        ));
        assert!(matches!("-1".parse::<Position>(), Err(Error::ParseCoordinate(_))));
        assert!(matches!("".parse::<Position>(), Err(Error::EmptyPosition)));
        assert!(serde_json::from_str::<Position>("[]").is_err());
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let p = pos(&[2, 2]);
        assert!(matches!(
            p.apply(Move::new(0, 2)),
            Err(Error::MoveDoesNotReduce { .. })
        ));
        assert!(matches!(
            p.apply(Move::new(5, 0)),
            Err(Error::PileIndexOutOfRange { .. })
        ));
        assert_eq!(p.apply(Move::new(1, 0)).unwrap(), pos(&[2, 0]));
    }

    proptest! {
        #[test]
        fn nim_sum_is_commutative_and_associative(a: u64, b: u64, c: u64) {
            prop_assert_eq!(nim_sum(&[a, b]), nim_sum(&[b, a]));
            prop_assert_eq!(
                nim_sum(&[nim_sum(&[a, b]), c]),
                nim_sum(&[a, nim_sum(&[b, c])])
            );
        }

        #[test]
        fn nim_sum_identity_and_self_inverse(x: u64) {
            prop_assert_eq!(nim_sum(&[x, x]), 0);
            prop_assert_eq!(nim_sum(&[x, 0]), x);
        }

        #[test]
        fn nim_sum_matches_bitwise_oracle(values in proptest::collection::vec(any::<u64>(), 0..8)) {
            prop_assert_eq!(nim_sum(&values), bitwise_oracle(&values));
        }
    }
}
