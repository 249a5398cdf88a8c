//! Game sessions: a spec, the current position, and who moves next.

use serde::{Deserialize, Serialize};

use necklace_core::characterizations::{closed_form, derived_quantities, DerivedQuantities, PredicateReport};
use necklace_core::oracle::Oracle;
use necklace_core::strategy::{winning_move, StrategyMove};
use necklace_core::{Descriptor, Error, GameSpec, Move, Outcome, Position};

/// Text attached to moves played from P-positions.
pub const NO_WINNING_MOVE: &str = "no winning move exists";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mover {
    Human,
    Engine,
}

impl Mover {
    pub fn other(self) -> Mover {
        match self {
            Mover::Human => Mover::Engine,
            Mover::Engine => Mover::Human,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", content = "winner", rename_all = "snake_case")]
pub enum Status {
    Ongoing,
    Won(Mover),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub mover: Mover,
    #[serde(rename = "move")]
    pub mv: Move,
}

/// Why a session refused a request.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("it is the {0:?} player's turn")]
    WrongTurn(Mover),
    #[error("the game is over")]
    GameOver,
    #[error("a game cannot start from the terminal position")]
    TerminalStart,
}

/// One game. Serializes to a snapshot that replays its history on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Snapshot", into = "Snapshot")]
pub struct GameSession {
    id: String,
    spec: GameSpec,
    initial: Position,
    position: Position,
    history: Vec<HistoryEntry>,
    first: Mover,
    to_move: Mover,
    status: Status,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    id: String,
    spec: Descriptor,
    /// Display only; rebuilt from `spec` on load.
    #[serde(default, skip_deserializing)]
    label: String,
    #[serde(default, skip_deserializing)]
    move_sets: Vec<Vec<usize>>,
    initial: Position,
    position: Position,
    history: Vec<HistoryEntry>,
    first: Mover,
    to_move: Mover,
    status: Status,
}

impl From<GameSession> for Snapshot {
    fn from(s: GameSession) -> Self {
        Snapshot {
            id: s.id,
            spec: Descriptor::of(&s.spec, None),
            label: s.spec.family().to_string(),
            move_sets: s.spec.move_sets_one_based(),
            initial: s.initial,
            position: s.position,
            history: s.history,
            first: s.first,
            to_move: s.to_move,
            status: s.status,
        }
    }
}

impl TryFrom<Snapshot> for GameSession {
    type Error = SessionError;

    fn try_from(snap: Snapshot) -> Result<Self, SessionError> {
        let spec = snap.spec.spec()?;
        let mut session = GameSession::new(snap.id, spec, snap.initial, snap.first)?;
        for entry in snap.history {
            session.play(entry.mover, entry.mv)?;
        }
        if (&session.position, session.to_move, session.status)
            != (&snap.position, snap.to_move, snap.status)
        {
            return Err(Error::Inconsistent("snapshot does not match its history".into()).into());
        }
        Ok(session)
    }
}

/// Reply to an engine-move request.
#[derive(Debug, Clone, Serialize)]
pub struct EngineReply {
    #[serde(rename = "move")]
    pub mv: Move,
    pub winning: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyMove>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<&'static str>,
}

/// The certified move from the current position, if any.
#[derive(Debug, Clone, Serialize)]
pub struct Hint {
    pub outcome: Outcome,
    #[serde(rename = "move", skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyMove>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<&'static str>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub outcome: Outcome,
    pub source: Source,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicate: Option<PredicateReport>,
    #[serde(rename = "SE", skip_serializing_if = "Option::is_none")]
    pub se: Option<bool>,
    #[serde(rename = "ME", skip_serializing_if = "Option::is_none")]
    pub me: Option<bool>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedQuantities>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<Hint>,
}

/// Largest stack (lowest index on ties), taken from the first set holding it.
pub fn stalling_move(spec: &GameSpec, pos: &Position) -> Result<Move, Error> {
    let (v, _) = pos
        .heights()
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, h)| *h)
        .filter(|&(_, h)| *h > 0)
        .ok_or_else(|| Error::Domain("no move from the terminal position".into()))?;
    let set_index = spec
        .move_sets()
        .iter()
        .position(|s| s.contains(v))
        .ok_or_else(|| Error::Domain(format!("stack {} is in no move set", v + 1)))?;
    let mut removals = vec![0; pos.len()];
    removals[v] = 1;
    Ok(Move {
        set_index,
        removals,
    })
}

impl GameSession {
    pub fn new(id: String, spec: GameSpec, initial: Position, first: Mover) -> Result<Self, SessionError> {
        spec.check_position(&initial)?;
        if initial.is_terminal() {
            return Err(SessionError::TerminalStart);
        }
        Ok(GameSession {
            id,
            spec,
            position: initial.clone(),
            initial,
            history: Vec::new(),
            first,
            to_move: first,
            status: Status::Ongoing,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn position(&self) -> &Position {
        &self.position
    }

    pub fn initial(&self) -> &Position {
        &self.initial
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn to_move(&self) -> Mover {
        self.to_move
    }

    pub fn status(&self) -> Status {
        self.status
    }

    fn play(&mut self, mover: Mover, mv: Move) -> Result<(), SessionError> {
        if self.status != Status::Ongoing {
            return Err(SessionError::GameOver);
        }
        if mover != self.to_move {
            return Err(SessionError::WrongTurn(self.to_move));
        }
        self.position = self.spec.apply_move(&self.position, &mv)?;
        self.history.push(HistoryEntry { mover, mv });
        self.to_move = mover.other();
        if self.position.is_terminal() {
            self.status = Status::Won(mover);
        }
        Ok(())
    }

    pub fn apply_human_move(&mut self, mv: Move) -> Result<(), SessionError> {
        self.play(Mover::Human, mv)
    }

    /// Plays a certified winning move, or the stalling move from a P-position.
    pub fn engine_reply(&mut self, oracle: &Oracle) -> Result<EngineReply, SessionError> {
        if self.status != Status::Ongoing {
            return Err(SessionError::GameOver);
        }
        if self.to_move != Mover::Engine {
            return Err(SessionError::WrongTurn(self.to_move));
        }
        let reply = match winning_move(&self.spec, &self.position, Some(oracle))? {
            Some(found) => EngineReply {
                mv: found.mv.clone(),
                winning: true,
                strategy: Some(found),
                message: None,
            },
            None => EngineReply {
                mv: stalling_move(&self.spec, &self.position)?,
                winning: false,
                strategy: None,
                message: Some(NO_WINNING_MOVE),
            },
        };
        self.play(Mover::Engine, reply.mv.clone())?;
        Ok(reply)
    }

    pub fn hint(&self, oracle: &Oracle) -> Result<Hint, SessionError> {
        let found = winning_move(&self.spec, &self.position, Some(oracle))?;
        Ok(Hint {
            outcome: if found.is_some() { Outcome::N } else { Outcome::P },
            message: found.is_none().then_some(NO_WINNING_MOVE),
            strategy: found,
        })
    }

    pub fn analysis(&self, oracle: &Oracle, with_hint: bool) -> Result<Analysis, SessionError> {
        let predicate = closed_form(&self.spec, &self.position)?;
        let (outcome, source) = match &predicate {
            Some(r) if r.holds => (Outcome::P, Source::ClosedForm),
            Some(_) => (Outcome::N, Source::ClosedForm),
            None => (oracle.classify(&self.position)?, Source::Oracle),
        };
        let derived = derived_quantities(&self.spec, &self.position).ok();
        let hint = if with_hint { Some(self.hint(oracle)?) } else { None };
        Ok(Analysis {
            outcome,
            source,
            se: derived.as_ref().map(DerivedQuantities::se),
            me: derived.as_ref().map(DerivedQuantities::me),
            predicate,
            derived,
            hint,
        })
    }
}
