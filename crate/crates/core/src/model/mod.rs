//! Timed lasso models: witness extraction from accepted branches, a
//! semantic evaluator, atom and pre-model checks, and brute-force search.

mod atoms;
mod eval;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::formula::closure::{Closure, Kind};
use crate::formula::Name;
use crate::tableau::{Tick, Witness};

pub use atoms::{atom_sequence, check_premodel, is_atom, AtomSequence};
pub use eval::{evaluate, evaluate_env, EvalError};
pub use search::bounded_model_search;

/// Variable assignment to absolute timestamps.
pub type Environment = BTreeMap<Name, u64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State {
    pub letters: BTreeSet<String>,
    pub time: u64,
}

/// Ultimately periodic timed state sequence. Positions at or after
/// `loop_start` repeat with period `states.len() - loop_start`, each
/// traversal adding `loop_time_advance` to the timestamps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimedLassoModel {
    states: Vec<State>,
    loop_start: usize,
    loop_time_advance: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a model needs at least one state")]
    Empty,
    #[error("loop start {0} is outside the state list")]
    LoopStart(usize),
    #[error("timestamps decrease at position {0}")]
    NotMonotone(usize),
    #[error("the loop must advance time by at least 1 and cover its own span")]
    NoProgress,
}

impl TimedLassoModel {
    pub fn new(states: Vec<State>, loop_start: usize, loop_time_advance: u64) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::Empty);
        }
        if loop_start >= states.len() {
            return Err(ModelError::LoopStart(loop_start));
        }
        if let Some(i) = (1..states.len()).find(|&i| states[i].time < states[i - 1].time) {
            return Err(ModelError::NotMonotone(i));
        }
        let span = states.last().unwrap().time - states[loop_start].time;
        if loop_time_advance < 1 || loop_time_advance < span {
            return Err(ModelError::NoProgress);
        }
        Ok(TimedLassoModel { states, loop_start, loop_time_advance })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn loop_start(&self) -> usize {
        self.loop_start
    }

    pub fn loop_time_advance(&self) -> u64 {
        self.loop_time_advance
    }

    pub fn loop_len(&self) -> usize {
        self.states.len() - self.loop_start
    }

    /// Index into `states` and number of completed loop traversals.
    fn locate(&self, i: usize) -> (usize, u64) {
        if i < self.states.len() {
            return (i, 0);
        }
        let l = self.loop_len();
        let off = i - self.loop_start;
        (self.loop_start + off % l, (off / l) as u64)
    }

    pub fn time(&self, i: usize) -> u64 {
        let (k, laps) = self.locate(i);
        self.states[k].time + laps * self.loop_time_advance
    }

    pub fn letters(&self, i: usize) -> &BTreeSet<String> {
        &self.states[self.locate(i).0].letters
    }

    pub fn holds(&self, i: usize, p: &str) -> bool {
        self.letters(i).contains(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ModelJson::from(self)).expect("model serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    prefix: Vec<State>,
    #[serde(rename = "loop")]
    loop_: Vec<State>,
    loop_advance: u64,
}

impl From<&TimedLassoModel> for ModelJson {
    fn from(m: &TimedLassoModel) -> Self {
        ModelJson {
            prefix: m.states[..m.loop_start].to_vec(),
            loop_: m.states[m.loop_start..].to_vec(),
            loop_advance: m.loop_time_advance,
        }
    }
}

impl Serialize for TimedLassoModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TimedLassoModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ModelJson::deserialize(d)?;
        let start = j.prefix.len();
        let mut states = j.prefix;
        states.extend(j.loop_);
        TimedLassoModel::new(states, start, j.loop_advance).map_err(serde::de::Error::custom)
    }
}

fn letters_of(closure: &Closure, delta: &[crate::formula::closure::FormulaId]) -> BTreeSet<String> {
    delta
        .iter()
        .filter_map(|&f| match closure.kind(f) {
            Kind::Lit { prop, positive: true } => Some(closure.prop_name(prop).to_string()),
            _ => None,
        })
        .collect()
}

/// Builds the lasso described by an accepted branch: one state per step
/// node plus the ticked leaf.
pub fn extract_model(witness: &Witness, closure: &Closure) -> TimedLassoModel {
    let states: Vec<State> = witness
        .states
        .iter()
        .map(|s| State { letters: letters_of(closure, &s.delta), time: s.time })
        .collect();
    let last = states.len() - 1;
    match witness.tick {
        // The empty leaf repeats forever, one time unit apart.
        Tick::Empty => TimedLassoModel::new(states, last, 1),
        Tick::Loop { anchor } => {
            let advance = witness.states[last].time - witness.states[anchor].time;
            TimedLassoModel::new(states, anchor + 1, advance)
        }
    }
    .expect("accepted branches yield well-formed lassos")
}
