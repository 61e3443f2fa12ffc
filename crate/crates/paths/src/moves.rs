//! Elementary nearby homotopies of path words.

use nearby_dga::Model;
use serde::{Deserialize, Serialize};

use crate::word::{check_based, Event, PathWord, Position};
use crate::PathError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// Insert `event · event⁻¹` before position `at`.
    InsertBacktrack { at: usize, event: Event },
    /// Remove `events[at] · events[at+1]` when they are mutually inverse.
    RemoveBacktrack { at: usize },
    /// `Wind(n) · Wind(m) → Wind(n+m)` on the same puncture; a total of zero
    /// turns drops the event.
    MergeWinds { at: usize },
    /// `Wind(n) → Wind(first) · Wind(n−first)`.
    SplitWind { at: usize, first: i64 },
    /// `Arc(p→x) · Arc(x→q) → Arc(p→q)`; `p = q` drops the event.
    MergeArcs { at: usize },
    /// `Arc(p→q) → Arc(p→via) · Arc(via→q)`.
    SplitArc { at: usize, via: usize },
    /// `Loop(n) · Loop(m) → Loop(n+m)` for the same homology loop.
    MergeLoops { at: usize },
    /// `Wind(D_k, e, n) · Cross(e) → Cross(e) · Wind(D_l, e, −n)`: a loop
    /// around the double point on one side is the reversed loop on the other.
    SlideWind { at: usize },
    /// `Cross(e) · Wind(D_l, e, n) → Wind(D_k, e, −n) · Cross(e)`.
    SlideWindBack { at: usize },
}

fn inapplicable(m: &Move, why: &str) -> PathError {
    PathError::InapplicableMove(format!("{m:?}: {why}"))
}

fn other_side(model: &Model, edge: usize, comp: usize) -> Option<usize> {
    model.graph.edge(edge).map(|e| if e.k == comp { e.l } else { e.k })
}

/// Applies one move to a based path word.
pub fn homotopy_move(model: &Model, gamma: &PathWord, mv: &Move) -> Result<PathWord, PathError> {
    let pos = check_based(model, gamma)?;
    let ev = &gamma.events;
    let get = |i: usize| ev.get(i).copied().ok_or_else(|| inapplicable(mv, "index out of range"));
    let mut out = ev.clone();
    match *mv {
        Move::InsertBacktrack { at, event } => {
            if at > ev.len() {
                return Err(inapplicable(mv, "index out of range"));
            }
            let probe = PathWord::new(vec![event]);
            crate::word::trace(model, &probe, pos[at]).map_err(|_| inapplicable(mv, "event does not start here"))?;
            out.splice(at..at, [event, event.inverse()]);
        }
        Move::RemoveBacktrack { at } => {
            let (a, b) = (get(at)?, get(at + 1)?);
            if b != a.inverse() {
                return Err(inapplicable(mv, "events are not inverse"));
            }
            out.drain(at..at + 2);
        }
        Move::MergeWinds { at } => match (get(at)?, get(at + 1)?) {
            (Event::Wind { comp, edge, n }, Event::Wind { comp: c2, edge: e2, n: m }) if comp == c2 && edge == e2 => {
                let merged: Vec<Event> = if n + m == 0 { vec![] } else { vec![Event::Wind { comp, edge, n: n + m }] };
                out.splice(at..at + 2, merged);
            }
            _ => return Err(inapplicable(mv, "not two windings around one puncture")),
        },
        Move::SplitWind { at, first } => match get(at)? {
            Event::Wind { comp, edge, n } => {
                out.splice(at..at + 1, [Event::Wind { comp, edge, n: first }, Event::Wind { comp, edge, n: n - first }]);
            }
            _ => return Err(inapplicable(mv, "not a winding")),
        },
        Move::MergeArcs { at } => match (get(at)?, get(at + 1)?) {
            (Event::Arc { comp, from, .. }, Event::Arc { comp: c2, to, .. }) if comp == c2 => {
                let merged: Vec<Event> = if from == to { vec![] } else { vec![Event::Arc { comp, from, to }] };
                out.splice(at..at + 2, merged);
            }
            _ => return Err(inapplicable(mv, "not two arcs on one component")),
        },
        Move::SplitArc { at, via } => match get(at)? {
            Event::Arc { comp, from, to } => {
                if !model.graph.incident(comp).iter().any(|e| e.id == via) {
                    return Err(inapplicable(mv, "not a puncture of the component"));
                }
                out.splice(at..at + 1, [Event::Arc { comp, from, to: via }, Event::Arc { comp, from: via, to }]);
            }
            _ => return Err(inapplicable(mv, "not an arc")),
        },
        Move::MergeLoops { at } => match (get(at)?, get(at + 1)?) {
            (Event::Loop { comp, gen, n }, Event::Loop { comp: c2, gen: g2, n: m }) if comp == c2 && gen == g2 => {
                let merged: Vec<Event> = if n + m == 0 { vec![] } else { vec![Event::Loop { comp, gen, n: n + m }] };
                out.splice(at..at + 2, merged);
            }
            _ => return Err(inapplicable(mv, "not two turns around one homology loop")),
        },
        Move::SlideWind { at } => match (get(at)?, get(at + 1)?) {
            (Event::Wind { comp, edge, n }, c @ Event::Cross { edge: e2, .. }) if edge == e2 => {
                let l = other_side(model, edge, comp).ok_or_else(|| inapplicable(mv, "no such edge"))?;
                out.splice(at..at + 2, [c, Event::Wind { comp: l, edge, n: -n }]);
            }
            _ => return Err(inapplicable(mv, "not a winding followed by its crossing")),
        },
        Move::SlideWindBack { at } => match (get(at)?, get(at + 1)?) {
            (c @ Event::Cross { edge, .. }, Event::Wind { comp, edge: e2, n }) if edge == e2 => {
                let k = other_side(model, edge, comp).ok_or_else(|| inapplicable(mv, "no such edge"))?;
                out.splice(at..at + 2, [Event::Wind { comp: k, edge, n: -n }, c]);
            }
            _ => return Err(inapplicable(mv, "not a crossing followed by a winding")),
        },
    }
    let res = PathWord::new(out);
    check_based(model, &res)?;
    Ok(res)
}

/// Events that can start at `at`, with small turn counts.
pub fn events_from(model: &Model, at: Position) -> Vec<Event> {
    let g = &model.graph;
    let mut out = Vec::new();
    if let Some(e) = g.edge(at.puncture) {
        let dir = if e.k == at.comp { 1 } else { -1 };
        out.push(Event::Cross { edge: e.id, dir });
    }
    for n in [-2, -1, 1, 2] {
        out.push(Event::Wind { comp: at.comp, edge: at.puncture, n });
    }
    for e in g.incident(at.comp) {
        if e.id != at.puncture {
            out.push(Event::Arc { comp: at.comp, from: at.puncture, to: e.id });
        }
    }
    let genus = g.vertex(at.comp).map(|v| v.genus).unwrap_or(0) as usize;
    for gen in 0..2 * genus {
        for n in [-1, 1] {
            out.push(Event::Loop { comp: at.comp, gen, n });
        }
    }
    out
}

/// Every move that applies to `gamma`, with small parameters.
pub fn applicable_moves(model: &Model, gamma: &PathWord) -> Result<Vec<Move>, PathError> {
    let pos = check_based(model, gamma)?;
    let ev = &gamma.events;
    let mut out = Vec::new();
    for (at, p) in pos.iter().enumerate() {
        for event in events_from(model, *p) {
            out.push(Move::InsertBacktrack { at, event });
        }
    }
    for at in 0..ev.len() {
        match ev[at] {
            Event::Wind { n, .. } => {
                for first in [-1, 1, n + 1] {
                    out.push(Move::SplitWind { at, first });
                }
            }
            Event::Arc { comp, .. } => {
                for e in model.graph.incident(comp) {
                    out.push(Move::SplitArc { at, via: e.id });
                }
            }
            _ => {}
        }
        if at + 1 < ev.len() {
            let (a, b) = (ev[at], ev[at + 1]);
            if b == a.inverse() {
                out.push(Move::RemoveBacktrack { at });
            }
            match (a, b) {
                (Event::Wind { comp, edge, .. }, Event::Wind { comp: c2, edge: e2, .. }) if comp == c2 && edge == e2 => {
                    out.push(Move::MergeWinds { at })
                }
                (Event::Arc { comp, .. }, Event::Arc { comp: c2, .. }) if comp == c2 => out.push(Move::MergeArcs { at }),
                (Event::Loop { comp, gen, .. }, Event::Loop { comp: c2, gen: g2, .. }) if comp == c2 && gen == g2 => {
                    out.push(Move::MergeLoops { at })
                }
                (Event::Wind { edge, .. }, Event::Cross { edge: e2, .. }) if edge == e2 => out.push(Move::SlideWind { at }),
                (Event::Cross { edge, .. }, Event::Wind { edge: e2, .. }) if edge == e2 => {
                    out.push(Move::SlideWindBack { at })
                }
                _ => {}
            }
        }
    }
    Ok(out)
}
