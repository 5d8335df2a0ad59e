use crate::formula::closure::{Closure, FormulaId, Kind};
use crate::shift::Shifter;

use super::{Label, SegmentState};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansion {
    Poised,
    One(Label),
    Two(Label, Label),
}

/// Sorts and deduplicates a label, dropping `true` and decided single
/// variable constraints that hold; one that fails becomes `false`.
pub fn normalize(cl: &Closure, ids: impl IntoIterator<Item = FormulaId>) -> Label {
    let mut out: Label = ids
        .into_iter()
        .filter_map(|f| match cl.kind(f) {
            Kind::True | Kind::Sync { holds: true } => None,
            Kind::Sync { holds: false } => Some(FormulaId::FALSE),
            _ => Some(f),
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Applies the expansion rule of the first non-elementary formula.
pub fn expand(cl: &Closure, label: &Label) -> Expansion {
    let Some(pos) = label.iter().position(|&f| !cl.is_elementary(f)) else {
        return Expansion::Poised;
    };
    let target = label[pos];
    let rest = || label.iter().copied().filter(move |&f| f != target);
    let with = |extra: &[FormulaId]| normalize(cl, rest().chain(extra.iter().copied()));
    match cl.kind(target) {
        Kind::And(a, b) => Expansion::One(with(&[a, b])),
        Kind::Freeze(a) => Expansion::One(with(&[a])),
        Kind::Or(a, b) => Expansion::Two(with(&[a]), with(&[b])),
        Kind::Until { left, right, next } => Expansion::Two(with(&[right]), with(&[left, next])),
        Kind::Since { left, right, prev } => Expansion::Two(with(&[right]), with(&[left, prev])),
        Kind::Release { left, right, next } => Expansion::Two(with(&[left, right]), with(&[right, next])),
        Kind::Triggered { left, right, prev } => Expansion::Two(with(&[left, right]), with(&[right, prev])),
        k => unreachable!("elementary kind {k:?} selected for expansion"),
    }
}

/// Complementary literals or `false`.
pub fn check_contradiction(cl: &Closure, label: &Label) -> bool {
    if label.contains(&FormulaId::FALSE) {
        return true;
    }
    let lits: Vec<(u32, bool)> = label
        .iter()
        .filter_map(|&f| match cl.kind(f) {
            Kind::Lit { prop, positive } => Some((prop, positive)),
            _ => None,
        })
        .collect();
    lits.iter().any(|&(p, pos)| pos && lits.contains(&(p, false)))
}

/// A single-variable constraint that is arithmetically false.
pub fn check_sync(cl: &Closure, label: &Label) -> bool {
    label.iter().any(|&f| cl.kind(f) == Kind::Sync { holds: false })
}

pub fn check_empty(label: &Label) -> bool {
    label.is_empty()
}

/// Completed step nodes of a branch, optionally followed by the poised leaf
/// under examination.
pub struct BranchView<'a> {
    pub segments: &'a [SegmentState],
    pub leaf: Option<&'a SegmentState>,
}

impl BranchView<'_> {
    pub fn len(&self) -> usize {
        self.segments.len() + usize::from(self.leaf.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, k: usize) -> &SegmentState {
        if k < self.segments.len() {
            &self.segments[k]
        } else {
            self.leaf.expect("segment index out of range")
        }
    }
}

fn holds_in(delta: &Label, f: FormulaId) -> bool {
    f == FormulaId::TRUE || delta.binary_search(&f).is_ok()
}

/// The X-eventualities `x.X(a U b)` of a label, as `(x.a, x.b)` pairs.
pub fn eventualities(cl: &Closure, gamma: &Label) -> Vec<(FormulaId, FormulaId)> {
    gamma
        .iter()
        .filter_map(|&f| match cl.kind(f) {
            Kind::Next(c) => match cl.kind(c) {
                Kind::Until { left, right, .. } => Some((left, right)),
                _ => None,
            },
            _ => None,
        })
        .collect()
}

fn shifted(cl: &Closure, sh: &Shifter, f: FormulaId, d: u64) -> FormulaId {
    sh.shift_anchored(cl, f, d as i64).expect("forward shifts are total")
}

/// Whether the eventuality requested at segment `i` is fulfilled exactly
/// at segment `j`.
pub fn eventuality_fulfilled(
    cl: &Closure,
    sh: &Shifter,
    view: &BranchView,
    ev: (FormulaId, FormulaId),
    i: usize,
    j: usize,
) -> bool {
    if j <= i || j >= view.len() {
        return false;
    }
    let t0 = view.get(i).time;
    let (left, right) = ev;
    let sj = view.get(j);
    if !holds_in(&sj.delta, shifted(cl, sh, right, sj.time - t0)) {
        return false;
    }
    (i + 1..j).all(|k| {
        let sk = view.get(k);
        holds_in(&sk.delta, shifted(cl, sh, left, sk.time - t0))
    })
}

/// Whether the eventuality requested at segment `i` is fulfilled at some
/// segment in `(i, end]`.
pub fn fulfilled_between(
    cl: &Closure,
    sh: &Shifter,
    view: &BranchView,
    ev: (FormulaId, FormulaId),
    i: usize,
    end: usize,
) -> bool {
    let t0 = view.get(i).time;
    let (left, right) = ev;
    for k in i + 1..=end.min(view.len().saturating_sub(1)) {
        let sk = view.get(k);
        let d = sk.time - t0;
        if holds_in(&sk.delta, shifted(cl, sh, right, d)) {
            return true;
        }
        if !holds_in(&sk.delta, shifted(cl, sh, left, d)) {
            return false;
        }
    }
    false
}

/// Whether the `depth` step nodes before `a` and before `b` carry the same
/// labels at the same time distances. Past requests issued after a
/// repetition reach back that far, so a repetition only counts when the
/// histories agree too.
pub fn same_history(view: &BranchView, a: usize, b: usize, h: History) -> bool {
    let dist = |x: u64, y: u64| h.cap.map(|c| (x - y).min(c));
    (1..=h.depth).all(|t| match (a.checked_sub(t), b.checked_sub(t)) {
        (None, None) => true,
        (Some(i), Some(j)) => {
            let (si, sj) = (view.get(i), view.get(j));
            si.gamma == sj.gamma && dist(view.get(a).time, si.time) == dist(view.get(b).time, sj.time)
        }
        _ => false,
    })
}

/// How much of the branch before a repetition LOOP and PRUNE compare.
#[derive(Clone, Copy, Debug)]
pub struct History {
    /// Number of preceding step labels.
    pub depth: usize,
    /// Time distances are compared up to this value; `None` when no
    /// constraint sits below a past operator, so distances are invisible
    /// to past requests.
    pub cap: Option<u64>,
}

/// Finds a step node whose label repeats at the leaf with every requested
/// eventuality fulfilled in between. Returns the anchor index and whether
/// time advanced; an anchor with progress is preferred.
pub fn check_loop(cl: &Closure, sh: &Shifter, view: &BranchView, history: History) -> Option<(usize, bool)> {
    let last = view.len().checked_sub(1)?;
    let leaf = view.get(last);
    let evs = eventualities(cl, &leaf.gamma);
    let mut stalled = None;
    for k in 0..last {
        let u = view.get(k);
        if u.gamma != leaf.gamma || !same_history(view, k, last, history) {
            continue;
        }
        if !evs.iter().all(|&ev| fulfilled_between(cl, sh, view, ev, k, last)) {
            continue;
        }
        if u.time < leaf.time {
            return Some((k, true));
        }
        stalled.get_or_insert((k, false));
    }
    stalled
}

/// Two earlier step nodes share the leaf's label and the second repetition
/// fulfilled nothing the first had not.
pub fn check_prune(cl: &Closure, sh: &Shifter, view: &BranchView, history: History) -> bool {
    let Some(last) = view.len().checked_sub(1) else {
        return false;
    };
    let leaf = view.get(last);
    let same: Vec<usize> = (0..last)
        .filter(|&k| view.get(k).gamma == leaf.gamma && same_history(view, k, last, history))
        .collect();
    if same.len() < 2 {
        return false;
    }
    let evs = eventualities(cl, &leaf.gamma);
    for (a, &u) in same.iter().enumerate() {
        for &v in &same[a + 1..] {
            let redundant = evs.iter().all(|&ev| {
                !fulfilled_between(cl, sh, view, ev, v, last) || fulfilled_between(cl, sh, view, ev, u, v)
            });
            if redundant {
                return true;
            }
        }
    }
    false
}
