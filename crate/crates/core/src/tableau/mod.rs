//! One-pass tree-shaped tableau.
//!
//! The tree is explored depth first. Only the current branch is kept in
//! memory, as a stack of completed segments (one per step node) plus the
//! labels of the nodes of the segment being built. The optional [`Tree`]
//! recorder keeps every visited node for DOT export.

mod dot;
mod rules;

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use crate::formula::closure::{Closure, FormulaId, Kind};
use crate::formula::{past_depth, Formula};
use crate::shift::{Shifter, Variant};

pub use dot::export_dot;
pub use rules::{
    check_contradiction, check_empty, check_sync, eventualities, eventuality_fulfilled, expand,
    fulfilled_between, normalize, BranchView, Expansion,
};

pub type Label = Vec<FormulaId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChildOrder {
    Ascending,
    Descending,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Largest time increment tried by STEP.
    pub delta: u64,
    pub max_nodes: usize,
    pub order: ChildOrder,
    pub threads: usize,
    pub record_tree: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            delta: 1,
            max_nodes: 1_000_000,
            order: ChildOrder::Ascending,
            threads: 1,
            record_tree: false,
        }
    }
}

/// A state of a branch: the poised label of a step node (or of the final
/// leaf), the union of the labels of its segment, and its timestamp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentState {
    pub gamma: Label,
    pub delta: Label,
    pub time: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tick {
    Empty,
    /// LOOP2 against the step node at this segment index.
    Loop {
        anchor: usize,
    },
}

/// An accepted branch: its step nodes followed by the ticked leaf.
#[derive(Clone, Debug)]
pub struct Witness {
    pub states: Vec<SegmentState>,
    pub tick: Tick,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Crossed,
    Ticked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    Root,
    Expansion,
    Step(u64),
    Retry,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub label: Label,
    pub time: u64,
    pub edge: Edge,
    pub mark: Option<(Mark, &'static str)>,
}

#[derive(Clone, Debug, Default)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Stats {
    pub nodes: u64,
    pub poised_nodes: u64,
    pub steps: u64,
    pub rule_fires: BTreeMap<String, u64>,
    pub max_depth: u64,
    pub wall_time_ms: u64,
    pub closure_size: u64,
}

impl Stats {
    fn fire(&mut self, rule: &str) {
        *self.rule_fires.entry(rule.to_string()).or_default() += 1;
    }

    fn merge(&mut self, other: &Stats) {
        self.nodes += other.nodes;
        self.poised_nodes += other.poised_nodes;
        self.steps += other.steps;
        for (k, v) in &other.rule_fires {
            *self.rule_fires.entry(k.clone()).or_default() += v;
        }
        self.max_depth = self.max_depth.max(other.max_depth);
    }

    pub fn fired(&self, rule: &str) -> u64 {
        self.rule_fires.get(rule).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Sat(Witness),
    Unsat,
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: Stats,
    pub tree: Option<Tree>,
}

/// A failed YESTERDAY check asks the step node of segment `target` for an
/// extra child with this label.
#[derive(Clone, Debug)]
struct Retry {
    target: usize,
    label: Label,
}

enum Search {
    Sat(Witness),
    Unsat(Vec<Retry>),
    Exhausted,
    Cancelled,
}

/// Outcome, recorded subtree and statistics of one child searched in parallel.
type ChildResult = (Search, Option<Vec<TreeNode>>, Stats);

struct Shared<'a> {
    closure: &'a Closure,
    shifter: &'a Shifter,
    cfg: &'a SolverConfig,
    history: rules::History,
    nodes: AtomicUsize,
    cancel: AtomicBool,
}

#[derive(Clone)]
struct Worker<'a> {
    sh: &'a Shared<'a>,
    segments: Vec<SegmentState>,
    /// Labels of the nodes of the segment under construction.
    current: Vec<Label>,
    tree: Option<Vec<TreeNode>>,
    stats: Stats,
}

/// Past requests issued after a repetition reach back as far as the past
/// nesting depth, so LOOP and PRUNE compare that many earlier labels.
fn history(f: &Formula, variant: Variant) -> rules::History {
    fn timed(f: &Formula, under_past: bool) -> (bool, bool) {
        let past = under_past
            || matches!(
                f,
                Formula::Prev(..) | Formula::WeakPrev(..) | Formula::Since(..) | Formula::Triggered(..)
            );
        match f {
            Formula::Rel { .. } => (past, false),
            Formula::Cong { .. } => (false, past),
            _ => f
                .children()
                .iter()
                .map(|c| timed(c, past))
                .fold((false, false), |a, b| (a.0 || b.0, a.1 || b.1)),
        }
    }
    let cap = match (timed(f, false), variant) {
        ((false, false), _) => None,
        // Offsets beyond the window all collapse the same way.
        ((true, false), Variant::Gtptlp { window }) => Some(window + 1),
        _ => Some(u64::MAX),
    };
    rules::History { depth: past_depth(f), cap }
}

pub fn solve(closure: &Closure, shifter: &Shifter, root: FormulaId, cfg: &SolverConfig) -> Verdict {
    let start = Instant::now();
    let shared = Shared {
        closure,
        shifter,
        cfg,
        history: history(&closure.formula(root), shifter.variant()),
        nodes: AtomicUsize::new(0),
        cancel: AtomicBool::new(false),
    };
    let mut w = Worker {
        sh: &shared,
        segments: Vec::new(),
        current: Vec::new(),
        tree: cfg.record_tree.then(Vec::new),
        stats: Stats::default(),
    };
    let label = normalize(closure, [root]);
    let result = w.node(label, 0, None, Edge::Root, 0);
    let outcome = match result {
        Search::Sat(wit) => Outcome::Sat(wit),
        Search::Unsat(_) => Outcome::Unsat,
        Search::Exhausted | Search::Cancelled => Outcome::Exhausted,
    };
    let mut stats = w.stats;
    stats.wall_time_ms = start.elapsed().as_millis() as u64;
    stats.closure_size = closure.len() as u64;
    Verdict { outcome, stats, tree: w.tree.map(|nodes| Tree { nodes }) }
}

impl<'a> Worker<'a> {
    fn fork(&self) -> Worker<'a> {
        Worker {
            sh: self.sh,
            segments: self.segments.clone(),
            current: self.current.clone(),
            tree: self.tree.as_ref().map(|_| Vec::new()),
            stats: Stats::default(),
        }
    }

    fn record(&mut self, parent: Option<usize>, label: &Label, time: u64, edge: Edge) -> Option<usize> {
        let tree = self.tree.as_mut()?;
        tree.push(TreeNode { parent, label: label.clone(), time, edge, mark: None });
        Some(tree.len() - 1)
    }

    fn mark(&mut self, id: Option<usize>, mark: Mark, rule: &'static str) {
        self.stats.fire(rule);
        if let (Some(tree), Some(id)) = (self.tree.as_mut(), id) {
            tree[id].mark = Some((mark, rule));
        }
    }

    fn node(&mut self, label: Label, time: u64, parent: Option<usize>, edge: Edge, depth: u64) -> Search {
        if self.sh.cancel.load(Ordering::Relaxed) {
            return Search::Cancelled;
        }
        if self.sh.nodes.fetch_add(1, Ordering::Relaxed) >= self.sh.cfg.max_nodes {
            return Search::Exhausted;
        }
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        let id = self.record(parent, &label, time, edge);

        if label.contains(&FormulaId::FALSE) {
            self.mark(id, Mark::Crossed, "CONTRADICTION");
            return Search::Unsat(Vec::new());
        }
        self.current.push(label.clone());
        let result = match expand(self.sh.closure, &label) {
            Expansion::Poised => self.poised(label, time, id, depth),
            Expansion::One(a) => self.node(a, time, id, Edge::Expansion, depth + 1),
            Expansion::Two(a, b) => match self.node(a, time, id, Edge::Expansion, depth + 1) {
                Search::Unsat(mut r1) => match self.node(b, time, id, Edge::Expansion, depth + 1) {
                    Search::Unsat(r2) => {
                        r1.extend(r2);
                        Search::Unsat(r1)
                    }
                    other => other,
                },
                other => other,
            },
        };
        self.current.pop();
        result
    }

    fn current_union(&self) -> Label {
        let mut u: Label = self.current.iter().flatten().copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    }

    fn poised(&mut self, label: Label, time: u64, id: Option<usize>, depth: u64) -> Search {
        let cl = self.sh.closure;
        self.stats.poised_nodes += 1;
        if check_contradiction(cl, &label) {
            self.mark(id, Mark::Crossed, "CONTRADICTION");
            return Search::Unsat(Vec::new());
        }
        if check_sync(cl, &label) {
            self.mark(id, Mark::Crossed, "SYNC");
            return Search::Unsat(Vec::new());
        }
        if check_empty(&label) {
            self.mark(id, Mark::Ticked, "EMPTY");
            return Search::Sat(self.witness(label, time, Tick::Empty));
        }
        match self.yesterday(&label, time) {
            Yesterday::Pass => {}
            Yesterday::Fail(retry) => {
                self.mark(id, Mark::Crossed, "YESTERDAY");
                return Search::Unsat(retry.into_iter().collect());
            }
        }
        let leaf = SegmentState { gamma: label.clone(), delta: self.current_union(), time };
        let view = BranchView { segments: &self.segments, leaf: Some(&leaf) };
        match rules::check_loop(cl, self.sh.shifter, &view, self.sh.history) {
            Some((anchor, true)) => {
                self.mark(id, Mark::Ticked, "LOOP2");
                return Search::Sat(self.witness(label, time, Tick::Loop { anchor }));
            }
            Some((_, false)) => {
                self.mark(id, Mark::Crossed, "LOOP1");
                return Search::Unsat(Vec::new());
            }
            None => {}
        }
        if rules::check_prune(cl, self.sh.shifter, &view, self.sh.history) {
            self.mark(id, Mark::Crossed, "PRUNE");
            return Search::Unsat(Vec::new());
        }
        self.step(label, leaf.delta, time, id, depth)
    }

    fn witness(&self, label: Label, time: u64, tick: Tick) -> Witness {
        let mut states = self.segments.clone();
        states.push(SegmentState { gamma: label, delta: self.current_union(), time });
        Witness { states, tick }
    }

    fn yesterday(&self, label: &Label, time: u64) -> Yesterday {
        let cl = self.sh.closure;
        let mut strong = false;
        let mut bodies = Vec::new();
        for &f in label {
            match cl.kind(f) {
                Kind::Prev(b) => {
                    strong = true;
                    bodies.push(b);
                }
                Kind::WeakPrev(b) => bodies.push(b),
                _ => {}
            }
        }
        if bodies.is_empty() {
            return Yesterday::Pass;
        }
        let Some(u) = self.segments.last() else {
            return if strong { Yesterday::Fail(None) } else { Yesterday::Pass };
        };
        let back = -((time - u.time) as i64);
        let mut omega = Vec::new();
        for b in bodies {
            let s = self
                .sh
                .shifter
                .shift_anchored(cl, b, back)
                .expect("past operators only occur with the guarded shift");
            omega.push(s);
        }
        let omega = normalize(cl, omega);
        if omega.iter().all(|f| u.delta.binary_search(f).is_ok()) {
            return Yesterday::Pass;
        }
        if omega.contains(&FormulaId::FALSE) {
            // The previous state can never satisfy the request.
            return Yesterday::Fail(None);
        }
        let label = normalize(cl, u.gamma.iter().chain(omega.iter()).copied());
        Yesterday::Fail(Some(Retry { target: self.segments.len() - 1, label }))
    }

    fn step(&mut self, label: Label, union: Label, time: u64, id: Option<usize>, depth: u64) -> Search {
        let cl = self.sh.closure;
        let cfg = self.sh.cfg;
        self.stats.steps += 1;
        self.stats.fire("STEP");
        let nexts: Vec<FormulaId> = label
            .iter()
            .filter_map(|&f| match cl.kind(f) {
                Kind::Next(c) => Some(c),
                _ => None,
            })
            .collect();
        let mut deltas: Vec<u64> = (0..=cfg.delta).collect();
        if cfg.order == ChildOrder::Descending {
            deltas.reverse();
        }
        let children: Vec<(u64, Label)> = deltas
            .into_iter()
            .map(|d| {
                let shifted = nexts.iter().map(|&c| {
                    self.sh.shifter.shift_anchored(cl, c, d as i64).expect("forward shifts are total")
                });
                (d, normalize(cl, shifted))
            })
            .collect();

        let index = self.segments.len();
        self.segments.push(SegmentState { gamma: label, delta: union, time });
        let saved = std::mem::take(&mut self.current);

        let mut mine = Vec::new();
        let mut others = Vec::new();
        let mut early = None;
        let results = if cfg.threads > 1 && index == 0 && children.len() > 1 {
            self.step_parallel(&children, time, id, depth)
        } else {
            let mut rs = Vec::new();
            for (d, child) in &children {
                let r = self.node(child.clone(), time + d, id, Edge::Step(*d), depth + 1);
                let stop = !matches!(r, Search::Unsat(_));
                rs.push(r);
                if stop {
                    break;
                }
            }
            rs
        };
        for r in results {
            match r {
                Search::Unsat(retries) => {
                    for r in retries {
                        if r.target == index {
                            mine.push(r);
                        } else {
                            others.push(r);
                        }
                    }
                }
                other => {
                    early = Some(other);
                    break;
                }
            }
        }
        self.segments.pop();
        self.current = saved;
        if let Some(r) = early {
            return r;
        }

        // Children requested by failed YESTERDAY checks continue this segment.
        let mut spawned: HashSet<Label> = HashSet::new();
        for r in mine {
            if !spawned.insert(r.label.clone()) {
                continue;
            }
            self.stats.fire("RETRY");
            match self.node(r.label, time, id, Edge::Retry, depth + 1) {
                Search::Unsat(rs) => others.extend(rs),
                other => return other,
            }
        }
        Search::Unsat(others)
    }

    fn step_parallel(
        &mut self,
        children: &[(u64, Label)],
        time: u64,
        id: Option<usize>,
        depth: u64,
    ) -> Vec<Search> {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<ChildResult>>> = Mutex::new((0..children.len()).map(|_| None).collect());
        let threads = self.sh.cfg.threads.min(children.len());
        std::thread::scope(|s| {
            for _ in 0..threads {
                let base = self.fork();
                let (next, slots) = (&next, &slots);
                s.spawn(move || loop {
                    let k = next.fetch_add(1, Ordering::SeqCst);
                    if k >= children.len() {
                        break;
                    }
                    let (d, child) = &children[k];
                    let mut w = base.fork();
                    let r = w.node(child.clone(), time + d, None, Edge::Step(*d), depth + 1);
                    if matches!(r, Search::Sat(_) | Search::Exhausted) {
                        w.sh.cancel.store(true, Ordering::SeqCst);
                    }
                    slots.lock().unwrap()[k] = Some((r, w.tree, w.stats));
                });
            }
        });
        let mut out = Vec::new();
        let mut sat = None;
        for (r, tree, stats) in slots.into_inner().unwrap().into_iter().flatten() {
            self.stats.merge(&stats);
            if let (Some(main), Some(sub)) = (self.tree.as_mut(), tree) {
                let off = main.len();
                for mut n in sub {
                    n.parent = Some(n.parent.map_or(id.unwrap_or(0), |p| p + off));
                    main.push(n);
                }
            }
            match r {
                Search::Sat(w) if sat.is_none() => sat = Some(Search::Sat(w)),
                Search::Cancelled => {}
                other => out.push(other),
            }
        }
        if let Some(s) = sat {
            // Cancellation was only requested to stop sibling workers.
            self.sh.cancel.store(false, Ordering::SeqCst);
            return vec![s];
        }
        if out.iter().any(|r| matches!(r, Search::Exhausted)) {
            return vec![Search::Exhausted];
        }
        out
    }
}

enum Yesterday {
    Pass,
    Fail(Option<Retry>),
}

#[cfg(test)]
mod tests;
