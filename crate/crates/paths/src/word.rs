//! Combinatorial paths in the central fiber over a tangent vector.
//!
//! A position is a component together with one of its punctures (an incident
//! edge id). Based paths start and end at the disk of branch 0, at its
//! puncture, which carries the base vector. The straight segment inside that
//! disk is left out; with residue-free disk contributions it never changes a
//! value.

use nearby_dga::Model;
use serde::{Deserialize, Serialize};

use crate::PathError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "ev", rename_all = "snake_case")]
pub enum Event {
    /// Pass through the double point of `edge`; `dir = 1` goes from the lower
    /// to the higher endpoint. The tangent-matching condition always holds in
    /// adapted coordinates.
    Cross { edge: usize, dir: i8 },
    /// `n` counterclockwise turns around the puncture `edge` on `comp`.
    Wind { comp: usize, edge: usize, n: i64 },
    /// The fixed arc on `comp` between two of its punctures.
    Arc { comp: usize, from: usize, to: usize },
    /// `n` turns around the `gen`-th homology loop of `comp`.
    Loop { comp: usize, gen: usize, n: i64 },
}

impl Event {
    pub fn inverse(&self) -> Event {
        match *self {
            Event::Cross { edge, dir } => Event::Cross { edge, dir: -dir },
            Event::Wind { comp, edge, n } => Event::Wind { comp, edge, n: -n },
            Event::Arc { comp, from, to } => Event::Arc { comp, from: to, to: from },
            Event::Loop { comp, gen, n } => Event::Loop { comp, gen, n: -n },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub comp: usize,
    pub puncture: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathWord {
    pub events: Vec<Event>,
}

impl PathWord {
    pub fn new(events: Vec<Event>) -> Self {
        PathWord { events }
    }

    /// `self ⋆ other`.
    pub fn compose(&self, other: &PathWord) -> PathWord {
        PathWord { events: self.events.iter().chain(other.events.iter()).copied().collect() }
    }

    pub fn inverse(&self) -> PathWord {
        PathWord { events: self.events.iter().rev().map(Event::inverse).collect() }
    }

    pub fn from_json(text: &str) -> Result<PathWord, PathError> {
        serde_json::from_str(text).map_err(|e| PathError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("path words serialize")
    }
}

/// Where based paths start and end.
pub fn base_position(model: &Model) -> Result<Position, PathError> {
    let disk = model.disk_component(0).ok_or(PathError::NoBase)?;
    let puncture = model.graph.disk_edge(0).ok_or(PathError::NoBase)?.id;
    Ok(Position { comp: disk, puncture })
}

/// Positions before and after every event, starting at `start`.
pub fn trace(model: &Model, word: &PathWord, start: Position) -> Result<Vec<Position>, PathError> {
    let g = &model.graph;
    let mut at = start;
    let mut out = vec![at];
    let bad = |i: usize, why: String| PathError::Invalid { index: i, reason: why };
    for (i, ev) in word.events.iter().enumerate() {
        at = match *ev {
            Event::Cross { edge, dir } => {
                let e = g.edges.iter().find(|e| e.id == edge).ok_or_else(|| bad(i, format!("no edge {edge}")))?;
                let (from, to) = match dir {
                    1 => (e.k, e.l),
                    -1 => (e.l, e.k),
                    _ => return Err(bad(i, format!("direction {dir} is not ±1"))),
                };
                if at != (Position { comp: from, puncture: edge }) {
                    return Err(bad(i, format!("crossing e{edge} from D{}@e{}", at.comp, at.puncture)));
                }
                Position { comp: to, puncture: edge }
            }
            Event::Wind { comp, edge, .. } => {
                if at != (Position { comp, puncture: edge }) {
                    return Err(bad(i, format!("winding at D{comp}@e{edge} from D{}@e{}", at.comp, at.puncture)));
                }
                at
            }
            Event::Arc { comp, from, to } => {
                if at != (Position { comp, puncture: from }) {
                    return Err(bad(i, format!("arc from D{comp}@e{from} while at D{}@e{}", at.comp, at.puncture)));
                }
                if !g.incident(comp).iter().any(|e| e.id == to) {
                    return Err(bad(i, format!("e{to} is not a puncture of D{comp}")));
                }
                Position { comp, puncture: to }
            }
            Event::Loop { comp, gen, .. } => {
                if at.comp != comp {
                    return Err(bad(i, format!("loop on D{comp} while at D{}", at.comp)));
                }
                let genus = g.vertex(comp).map(|v| v.genus).unwrap_or(0) as usize;
                if gen >= 2 * genus {
                    return Err(bad(i, format!("D{comp} has no homology loop {gen}")));
                }
                at
            }
        };
        out.push(at);
    }
    Ok(out)
}

/// Checks a based path and returns its positions.
pub fn check_based(model: &Model, word: &PathWord) -> Result<Vec<Position>, PathError> {
    let base = base_position(model)?;
    let pos = trace(model, word, base)?;
    if *pos.last().expect("nonempty") != base {
        return Err(PathError::Invalid { index: word.events.len(), reason: "path does not return to the base".into() });
    }
    Ok(pos)
}
