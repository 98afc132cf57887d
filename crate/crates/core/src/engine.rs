//! Nim sessions between a human and the engine, plus seeded simulations.
//!
//! Normal play: whoever takes the last stone wins.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nim::{all_winning_moves, optimal_move, Classification, Move, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Human,
    Engine,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Human => Player::Engine,
            Player::Engine => Player::Human,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Human => "human",
            Player::Engine => "engine",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    HumanWon,
    EngineWon,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        self != Status::InProgress
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionId(String);

impl SessionId {
    pub fn new(token: impl Into<String>) -> Self {
        SessionId(token.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Issues opaque 128-bit hex tokens. Seeded sources are reproducible.
pub struct SessionIdSource {
    rng: ChaCha8Rng,
}

impl SessionIdSource {
    pub fn seeded(seed: u64) -> Self {
        SessionIdSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn from_os_rng() -> Self {
        SessionIdSource {
            rng: ChaCha8Rng::from_os_rng(),
        }
    }

    pub fn next_id(&mut self) -> SessionId {
        let mut bytes = [0u8; 16];
        self.rng.fill_bytes(&mut bytes);
        SessionId(bytes.iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub mover: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    pub result: Position,
}

/// Classification of the position plus every move that wins from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    pub classification: Classification,
    pub winning_moves: Vec<Move>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSession {
    id: SessionId,
    initial: Position,
    position: Position,
    to_move: Player,
    history: Vec<HistoryEntry>,
    status: Status,
}

impl GameSession {
    pub fn new_game(id: SessionId, piles: Position, human_moves_first: bool) -> Result<Self> {
        if piles.is_terminal() {
            return Err(Error::TerminalStart);
        }
        Ok(GameSession {
            id,
            initial: piles.clone(),
            position: piles,
            to_move: if human_moves_first {
                Player::Human
            } else {
                Player::Engine
            },
            history: Vec::new(),
            status: Status::InProgress,
        })
    }

    pub fn id(&self) -> &SessionId {
        &self.id
    }

    pub fn initial(&self) -> &Position {
        &self.initial
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn classification(&self) -> Classification {
        self.position.classify()
    }

    fn play(&mut self, mover: Player, m: Move) -> Result<()> {
        if self.status.is_terminal() {
            return Err(Error::TerminalGame);
        }
        if self.to_move != mover {
            return Err(Error::WrongTurn);
        }
        let next = self.position.apply(m)?;
        self.history.push(HistoryEntry {
            mover,
            mv: m,
            result: next.clone(),
        });
        self.position = next;
        self.to_move = mover.other();
        if self.position.is_terminal() {
            self.status = match mover {
                Player::Human => Status::HumanWon,
                Player::Engine => Status::EngineWon,
            };
        }
        Ok(())
    }

    /// Validates and applies the human's move. On error the session is unchanged.
    pub fn apply_human_move(&mut self, m: Move) -> Result<()> {
        self.play(Player::Human, m)
    }

    /// Plays the engine's reply: the optimal move from an N-position,
    /// otherwise [`fallback_move`].
    pub fn engine_move(&mut self) -> Result<Move> {
        if self.status.is_terminal() {
            return Err(Error::TerminalGame);
        }
        if self.to_move != Player::Engine {
            return Err(Error::WrongTurn);
        }
        let m = engine_choice(&self.position).expect("in-progress position has a legal move");
        self.play(Player::Engine, m)?;
        Ok(m)
    }

    pub fn hint(&self) -> Result<Hint> {
        if self.status.is_terminal() {
            return Err(Error::TerminalGame);
        }
        Ok(Hint {
            classification: self.classification(),
            winning_moves: all_winning_moves(&self.position),
        })
    }

    /// Recomputes the position by replaying the history from the start.
    pub fn replay(&self) -> Result<Position> {
        self.history
            .iter()
            .try_fold(self.initial.clone(), |p, entry| p.apply(entry.mv))
    }
}

/// Reply from a lost (P) position: take one stone from the largest pile,
/// lowest index on ties. `None` only when every pile is empty.
pub fn fallback_move(p: &Position) -> Option<Move> {
    let (index, &size) = p
        .coords()
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, &size)| size)?;
    (size > 0).then(|| Move::new(index, size - 1))
}

pub fn engine_choice(p: &Position) -> Option<Move> {
    optimal_move(p).or_else(|| fallback_move(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Opponent {
    /// Uniform over all legal moves.
    Random,
    /// Plays the same strategy as the engine.
    Perfect,
}

impl std::str::FromStr for Opponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(Opponent::Random),
            "perfect" => Ok(Opponent::Perfect),
            other => Err(format!("unknown opponent {other:?}, expected random or perfect")),
        }
    }
}

fn random_move<R: Rng>(p: &Position, rng: &mut R) -> Option<Move> {
    let total: u64 = p.coords().iter().sum();
    if total == 0 {
        return None;
    }
    let mut k = rng.random_range(0..total);
    for (index, &size) in p.coords().iter().enumerate() {
        if k < size {
            return Some(Move::new(index, k));
        }
        k -= size;
    }
    unreachable!("k < total")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationTally {
    pub engine_wins: u64,
    pub engine_losses: u64,
}

/// Plays one game to completion with the engine moving first. The opponent
/// takes the human seat.
pub fn simulate_game<R: Rng>(start: &Position, opponent: Opponent, rng: &mut R) -> Result<GameSession> {
    let mut session = GameSession::new_game(SessionId::new("simulation"), start.clone(), false)?;
    while !session.status().is_terminal() {
        match session.to_move() {
            Player::Engine => {
                session.engine_move()?;
            }
            Player::Human => {
                let m = match opponent {
                    Opponent::Random => random_move(session.position(), rng),
                    Opponent::Perfect => engine_choice(session.position()),
                }
                .expect("in-progress position has a legal move");
                session.apply_human_move(m)?;
            }
        }
    }
    Ok(session)
}

/// Runs `trials` engine-first games. Trial `i` draws from stream `i` of a
/// ChaCha generator seeded with `seed`, so trials are reproducible individually.
pub fn simulate(start: &Position, opponent: Opponent, trials: u64, seed: u64) -> Result<SimulationTally> {
    let mut tally = SimulationTally::default();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        match simulate_game(start, opponent, &mut rng)?.status() {
            Status::EngineWon => tally.engine_wins += 1,
            _ => tally.engine_losses += 1,
        }
    }
    Ok(tally)
}
