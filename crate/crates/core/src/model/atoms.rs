//! Atoms and pre-model conditions over sequences of closure sets.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use crate::formula::closure::{Closure, FormulaId, Kind};
use crate::shift::Shifter;
use crate::tableau::{Label, Tick, Witness};

/// A set of closure formulas completed to an atom: elementary formulas are
/// taken from the base set (negative literals whose proposition is absent
/// are added), non-elementary ones are present exactly when justified.
struct Atom<'c> {
    cl: &'c Closure,
    base: HashSet<FormulaId>,
    positive: HashSet<u32>,
    memo: RefCell<HashMap<FormulaId, bool>>,
}

impl<'c> Atom<'c> {
    fn new(cl: &'c Closure, base: &[FormulaId]) -> Atom<'c> {
        let positive = base
            .iter()
            .filter_map(|&f| match cl.kind(f) {
                Kind::Lit { prop, positive: true } => Some(prop),
                _ => None,
            })
            .collect();
        Atom { cl, base: base.iter().copied().collect(), positive, memo: RefCell::default() }
    }

    fn contains(&self, f: FormulaId) -> bool {
        if let Some(&v) = self.memo.borrow().get(&f) {
            return v;
        }
        let v = match self.cl.kind(f) {
            Kind::True => true,
            Kind::False => false,
            Kind::Sync { holds } => holds,
            Kind::Lit { prop, positive } => {
                self.base.contains(&f) || (!positive && !self.positive.contains(&prop))
            }
            Kind::Next(_) | Kind::Prev(_) | Kind::WeakPrev(_) => self.base.contains(&f),
            _ => self.justified(f),
        };
        self.memo.borrow_mut().insert(f, v);
        v
    }

    fn justified(&self, f: FormulaId) -> bool {
        let m = |g| self.contains(g);
        match self.cl.kind(f) {
            Kind::And(a, b) => m(a) && m(b),
            Kind::Or(a, b) => m(a) || m(b),
            Kind::Freeze(a) => m(a),
            Kind::Until { left, right, next } => m(right) || (m(left) && m(next)),
            Kind::Since { left, right, prev } => m(right) || (m(left) && m(prev)),
            Kind::Release { left, right, next } => m(right) && (m(left) || m(next)),
            Kind::Triggered { left, right, prev } => m(right) && (m(left) || m(prev)),
            _ => self.contains(f),
        }
    }

    fn consistent(&self) -> bool {
        self.base.iter().all(|&f| match self.cl.kind(f) {
            Kind::False | Kind::Sync { holds: false } => false,
            Kind::Lit { prop, positive: false } => !self.positive.contains(&prop),
            k if !k.is_elementary() => self.justified(f),
            _ => true,
        })
    }
}

/// Whether `set` can be completed to an atom without dropping any of its
/// members: literals are consistent and every non-elementary member is
/// justified by the rest.
pub fn is_atom(cl: &Closure, set: &[FormulaId]) -> bool {
    Atom::new(cl, set).consistent()
}

/// Lasso of closure sets with timestamps, shaped like the model extracted
/// from the same branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomSequence {
    pub sets: Vec<Label>,
    pub times: Vec<u64>,
    pub loop_start: usize,
    pub loop_time_advance: u64,
}

impl AtomSequence {
    fn locate(&self, i: usize) -> (usize, u64) {
        if i < self.sets.len() {
            return (i, 0);
        }
        let l = self.sets.len() - self.loop_start;
        let off = i - self.loop_start;
        (self.loop_start + off % l, (off / l) as u64)
    }

    pub fn time(&self, i: usize) -> u64 {
        let (k, laps) = self.locate(i);
        self.times[k] + laps * self.loop_time_advance
    }
}

/// The segment sets of an accepted branch.
pub fn atom_sequence(witness: &Witness) -> AtomSequence {
    let sets = witness.states.iter().map(|s| s.delta.clone()).collect();
    let times: Vec<u64> = witness.states.iter().map(|s| s.time).collect();
    let last = times.len() - 1;
    let (loop_start, loop_time_advance) = match witness.tick {
        Tick::Empty => (last, 1),
        Tick::Loop { anchor } => (anchor + 1, times[last] - times[anchor]),
    };
    AtomSequence { sets, times, loop_start, loop_time_advance }
}

/// Checks the pre-model conditions for `root` over the completed atoms of
/// `seq`; the error names the first violated condition.
pub fn check_premodel(cl: &Closure, sh: &Shifter, seq: &AtomSequence, root: FormulaId) -> Result<(), String> {
    let atoms: Vec<Atom> = seq.sets.iter().map(|s| Atom::new(cl, s)).collect();
    if let Some(i) = atoms.iter().position(|a| !a.consistent()) {
        return Err(format!("set {i} is not an atom"));
    }
    let at = |i: usize| &atoms[seq.locate(i).0];
    let shift = |f, d: i64| sh.shift_anchored(cl, f, d).map_err(|e| e.to_string());
    if !at(0).contains(root) {
        return Err("root formula missing from the first atom".into());
    }
    let p = seq.loop_start;
    let l = seq.sets.len() - p;
    let horizon = p + 2 * l;
    for i in 0..horizon {
        let ti = seq.time(i) as i64;
        // Every formula the completed atom contains, reachable from its base.
        let mut stack: Vec<FormulaId> = at(i).base.iter().copied().collect();
        let mut seen: HashSet<FormulaId> = stack.iter().copied().collect();
        while let Some(f) = stack.pop() {
            for c in cl.closure_children(f) {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        for &f in &seen {
            if !at(i).contains(f) {
                continue;
            }
            match cl.kind(f) {
                Kind::Next(c) => {
                    let d = seq.time(i + 1) as i64 - ti;
                    if !at(i + 1).contains(shift(c, d)?) {
                        return Err(format!("next requirement {} unmet at {i}", cl.display(f)));
                    }
                }
                Kind::Prev(c) | Kind::WeakPrev(c) => {
                    if i == 0 {
                        if matches!(cl.kind(f), Kind::Prev(_)) {
                            return Err(format!("{} at the first position", cl.display(f)));
                        }
                        continue;
                    }
                    let d = ti - seq.time(i - 1) as i64;
                    if !at(i - 1).contains(shift(c, -d)?) {
                        return Err(format!("yesterday requirement {} unmet at {i}", cl.display(f)));
                    }
                }
                Kind::Until { left, right, .. } => {
                    let cb = sh.convergence_bound(cl, f).max(0) as u64;
                    let laps = (cb / seq.loop_time_advance) as usize + 2;
                    let mut ok = false;
                    for j in i..i.max(p) + l * (laps + 1) {
                        let d = seq.time(j) as i64 - ti;
                        if at(j).contains(shift(right, d)?) {
                            ok = true;
                            break;
                        }
                        if !at(j).contains(shift(left, d)?) {
                            break;
                        }
                    }
                    if !ok {
                        return Err(format!("eventuality {} unfulfilled from {i}", cl.display(f)));
                    }
                }
                Kind::Since { left, right, .. } => {
                    let mut ok = false;
                    for j in (0..=i).rev() {
                        let d = ti - seq.time(j) as i64;
                        if at(j).contains(shift(right, -d)?) {
                            ok = true;
                            break;
                        }
                        if !at(j).contains(shift(left, -d)?) {
                            break;
                        }
                    }
                    if !ok {
                        return Err(format!("past eventuality {} unfulfilled at {i}", cl.display(f)));
                    }
                }
                _ => {}
            }
        }
    }
    Ok(())
}
