//! Exhaustive search for small lasso models.
//!
//! Prefixes are grown state by state and discarded as soon as a
//! three-valued reading of the formula over the prefix is already false.

use std::collections::{BTreeSet, HashMap};

use crate::formula::closure::decide_by_order;
use crate::formula::{increment_bound, simplify, Bound, Formula, Name};

use super::{evaluate, State, TimedLassoModel};

type Tv = Option<bool>;

fn not3(a: Tv) -> Tv {
    a.map(|v| !v)
}

fn and3(a: Tv, b: Tv) -> Tv {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or3(a: Tv, b: Tv) -> Tv {
    not3(and3(not3(a), not3(b)))
}

struct Prefix<'a> {
    props: &'a [Name],
    masks: &'a [u32],
    times: &'a [u64],
}

impl Prefix<'_> {
    fn dist(&self, i: usize, j: usize) -> i64 {
        self.times[j] as i64 - self.times[i] as i64
    }

    fn eval(&self, f: &Formula, i: usize, env: &mut HashMap<Name, i64>, neg: bool) -> Tv {
        let v = self.eval_pos(f, i, env);
        if neg {
            not3(v)
        } else {
            v
        }
    }

    fn eval_pos(&self, f: &Formula, i: usize, env: &mut HashMap<Name, i64>) -> Tv {
        use Formula::*;
        let n = self.times.len();
        match f {
            True => Some(true),
            False => Some(false),
            Prop(p) => {
                let k = self.props.iter().position(|q| q == p).expect("known proposition");
                Some(self.masks[i] >> k & 1 == 1)
            }
            Not(a) => not3(self.eval_pos(a, i, env)),
            And(a, b) => and3(self.eval_pos(a, i, env), self.eval_pos(b, i, env)),
            Or(a, b) => or3(self.eval_pos(a, i, env), self.eval_pos(b, i, env)),
            Implies(a, b) => or3(not3(self.eval_pos(a, i, env)), self.eval_pos(b, i, env)),
            Rel { lhs, rhs, c } => Some(env[lhs] <= env[rhs] + c),
            Cong { lhs, rhs, m, c } => Some((env[lhs] - env[rhs] - c).rem_euclid(*m as i64) == 0),
            Abs { var, c } => Some(env[var] <= *c),
            Freeze(x, a) => {
                let old = env.insert(x.clone(), self.times[i] as i64);
                let v = self.eval_pos(a, i, env);
                match old {
                    Some(t) => env.insert(x.clone(), t),
                    None => env.remove(x),
                };
                v
            }
            Next(w, a) | WeakNext(w, a) => {
                if i + 1 >= n {
                    None
                } else if !w.admits(self.dist(i, i + 1)) {
                    Some(matches!(f, WeakNext(..)))
                } else {
                    self.eval_pos(a, i + 1, env)
                }
            }
            Prev(w, a) | WeakPrev(w, a) => {
                if i == 0 || !w.admits(self.dist(i - 1, i)) {
                    Some(matches!(f, WeakPrev(..)))
                } else {
                    self.eval_pos(a, i - 1, env)
                }
            }
            Until(w, a, b) => self.until(*w, a, b, i, env, false),
            Release(w, a, b) => not3(self.until(*w, a, b, i, env, true)),
            Since(w, a, b) => self.since(*w, a, b, i, env, false),
            Triggered(w, a, b) => not3(self.since(*w, a, b, i, env, true)),
        }
    }

    /// `a U b`, with both operands negated when `neg` (so that release is
    /// its dual).
    fn until(
        &self,
        w: Bound,
        a: &Formula,
        b: &Formula,
        i: usize,
        env: &mut HashMap<Name, i64>,
        neg: bool,
    ) -> Tv {
        let (mut acc, mut pre) = (Some(false), Some(true));
        for j in i..self.times.len() {
            if !w.admits(self.dist(i, j)) {
                return acc;
            }
            acc = or3(acc, and3(pre, self.eval(b, j, env, neg)));
            pre = and3(pre, self.eval(a, j, env, neg));
            if acc == Some(true) || pre == Some(false) {
                return acc;
            }
        }
        or3(acc, None)
    }

    fn since(
        &self,
        w: Bound,
        a: &Formula,
        b: &Formula,
        i: usize,
        env: &mut HashMap<Name, i64>,
        neg: bool,
    ) -> Tv {
        let (mut acc, mut pre) = (Some(false), Some(true));
        for j in (0..=i).rev() {
            if !w.admits(self.dist(j, i)) {
                break;
            }
            acc = or3(acc, and3(pre, self.eval(b, j, env, neg)));
            pre = and3(pre, self.eval(a, j, env, neg));
        }
        acc
    }
}

struct Search<'a> {
    f: &'a Formula,
    /// Equivalent, simplified copy of `f` used for pruning only.
    prune: Formula,
    props: Vec<Name>,
    max_states: usize,
    max_delta: u64,
    masks: Vec<u32>,
    times: Vec<u64>,
}

impl Search<'_> {
    fn model(&self, loop_start: usize, advance: u64) -> Option<TimedLassoModel> {
        let states = self
            .masks
            .iter()
            .zip(&self.times)
            .map(|(&m, &t)| State {
                letters: (0..self.props.len())
                    .filter(|k| m >> k & 1 == 1)
                    .map(|k| self.props[k].to_string())
                    .collect::<BTreeSet<_>>(),
                time: t,
            })
            .collect();
        TimedLassoModel::new(states, loop_start, advance).ok()
    }

    fn run(&mut self) -> Option<TimedLassoModel> {
        let n = self.times.len();
        if n > 0 {
            let prefix = Prefix { props: &self.props, masks: &self.masks, times: &self.times };
            if prefix.eval(&self.prune, 0, &mut HashMap::new(), false) == Some(false) {
                return None;
            }
            let last = self.times[n - 1];
            for start in 0..n {
                let span = last - self.times[start];
                for gap in 0..=self.max_delta {
                    let Some(m) = self.model(start, span + gap) else { continue };
                    if evaluate(&m, 0, self.f).unwrap_or(false) {
                        return Some(m);
                    }
                }
            }
            if n == self.max_states {
                return None;
            }
        }
        let steps = if n == 0 { 0 } else { self.max_delta };
        let base = self.times.last().copied().unwrap_or(0);
        for mask in 0..1u32 << self.props.len() {
            for d in 0..=steps {
                self.masks.push(mask);
                self.times.push(base + d);
                let found = self.run();
                self.masks.pop();
                self.times.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
}

/// Looks for a model of the closed formula `f` with at most `max_states`
/// distinct states and every time increment at most `max_delta`, starting
/// at time 0.
pub fn bounded_model_search(f: &Formula, max_states: usize, max_delta: u64) -> Option<TimedLassoModel> {
    let mut s = Search {
        f,
        prune: simplify(&decide_by_order(f, true)),
        props: f.props().into_iter().collect(),
        max_states,
        max_delta: max_delta.min(increment_bound(f)),
        masks: Vec::new(),
        times: Vec::new(),
    };
    s.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn search(s: &str, n: usize, d: u64) -> Option<TimedLassoModel> {
        bounded_model_search(&parse(s).unwrap().root, n, d)
    }

    #[test]
    fn finds_small_models() {
        let m = search("p & X !p & G F p", 3, 1).unwrap();
        assert!(evaluate(&m, 0, &parse("G F p").unwrap().root).unwrap());
        let m = search("x. F[3] y. (q & y >= x + 2)", 3, 2).unwrap();
        assert!(m.states().iter().any(|s| s.letters.contains("q")));
    }

    #[test]
    fn reports_absence() {
        assert!(search("p & !p", 3, 2).is_none());
        assert!(search("F p & G !p", 4, 1).is_none());
        // Needs a gap of 3 but increments are capped at 1.
        assert!(search("x. X y. y >= x + 3", 4, 1).is_none());
        assert!(search("x. X y. y >= x + 3", 2, 3).is_some());
        assert!(search("x. X y. (y >= x + 9 & y == x + 1 mod 2)", 2, 100).is_some());
    }

    #[test]
    fn three_valued_prefix_reading() {
        let props = [crate::formula::name("p")];
        let pre = Prefix { props: &props, masks: &[1, 0], times: &[0, 1] };
        let v = |s: &str| pre.eval(&parse(s).unwrap().root, 0, &mut HashMap::new(), false);
        assert_eq!(v("G p"), Some(false));
        assert_eq!(v("F p"), Some(true));
        assert_eq!(v("X X p"), None);
        assert_eq!(v("F !p & G[0] p"), Some(true));
        assert_eq!(v("H p"), Some(true));
    }
}
