//! Shared helpers for the integration suites: seeded generators for
//! formulas and lassos, and a second, deliberately naive evaluator.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tptl::cli::{check, Options, Report};
use tptl::formula::{check_wellformed, name, Bound, Formula, Logic, Name};
use tptl::model::{State, TimedLassoModel};
use tptl::syntax::parse;
use tptl::tableau::Outcome;

pub const PROPS: [&str; 3] = ["p", "q", "r"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Sat,
    Unsat,
    Unknown,
}

pub fn answer(r: &Report) -> Answer {
    match r.verdict.outcome {
        Outcome::Sat(_) => Answer::Sat,
        Outcome::Unsat => Answer::Unsat,
        Outcome::Exhausted => Answer::Unknown,
    }
}

/// One line of `tests/data/corpus.txt`: logic, expected verdict, formula.
pub struct Entry {
    pub logic: Logic,
    pub expected: Answer,
    pub text: String,
    pub formula: Formula,
}

pub fn corpus() -> Vec<Entry> {
    include_str!("../data/corpus.txt")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.splitn(3, '|').map(str::trim).collect();
            let logic = match parts[0] {
                "tptl" => Logic::Tptl,
                "tptlbp" => Logic::Tptlbp,
                other => panic!("unknown logic {other}"),
            };
            let expected = match parts[1] {
                "sat" => Answer::Sat,
                "unsat" => Answer::Unsat,
                other => panic!("unknown verdict {other}"),
            };
            let formula = parse(parts[2]).unwrap_or_else(|e| panic!("{}: {e}", parts[2])).root;
            Entry { logic, expected, text: parts[2].to_string(), formula }
        })
        .collect()
}

pub fn solve_with(f: &Formula, opts: &Options) -> Report {
    check(f, opts).unwrap_or_else(|d| panic!("rejected {f}: {d:?}"))
}

pub fn opts(logic: Logic) -> Options {
    Options { logic, ..Options::default() }
}

/// Random closed formula of AST depth at most `depth` that is well formed
/// for `logic`.
pub fn random_formula(rng: &mut ChaCha8Rng, logic: Logic, depth: usize) -> Formula {
    loop {
        let mut vars = Vec::new();
        let mut counter = 0;
        let f = if rng.gen_bool(0.6) {
            freeze(rng, logic, depth - 1, &mut vars, &mut counter)
        } else {
            gen(rng, logic, depth, &mut vars, &mut counter)
        };
        if check_wellformed(&f, logic, None).is_ok() {
            return f;
        }
    }
}

fn gen_bound(rng: &mut ChaCha8Rng, logic: Logic) -> Bound {
    match logic {
        Logic::Tptl => Bound::Infinite,
        _ if rng.gen_bool(0.2) => Bound::Infinite,
        _ => Bound::Finite(rng.gen_range(0..=3)),
    }
}

fn leaf(rng: &mut ChaCha8Rng, vars: &[Name]) -> Formula {
    let roll = rng.gen_range(0..10);
    if vars.len() >= 2 && roll < 6 {
        let a = vars[rng.gen_range(0..vars.len())].clone();
        let mut b = vars[rng.gen_range(0..vars.len())].clone();
        if a == b {
            b = vars[(vars.iter().position(|v| *v == a).unwrap() + 1) % vars.len()].clone();
        }
        let c = rng.gen_range(-3..=3);
        return if rng.gen_bool(0.8) {
            Formula::Rel { lhs: a, rhs: b, c }
        } else {
            Formula::Cong { lhs: a, rhs: b, m: rng.gen_range(2..=3), c: c.rem_euclid(3) }
        };
    }
    let p = Formula::prop(PROPS[rng.gen_range(0..PROPS.len())]);
    match roll {
        9 if rng.gen_bool(0.3) => {
            if rng.gen_bool(0.5) {
                Formula::True
            } else {
                Formula::False
            }
        }
        6..=8 if rng.gen_bool(0.5) => Formula::not(p),
        _ => p,
    }
}

/// Operand of a temporal operator; often binds a fresh variable so that
/// constraints relate states at different times.
fn operand(
    rng: &mut ChaCha8Rng,
    logic: Logic,
    depth: usize,
    vars: &mut Vec<Name>,
    counter: &mut usize,
) -> Formula {
    if depth >= 1 && !vars.is_empty() && rng.gen_bool(0.6) {
        freeze(rng, logic, depth - 1, vars, counter)
    } else {
        gen(rng, logic, depth, vars, counter)
    }
}

fn freeze(
    rng: &mut ChaCha8Rng,
    logic: Logic,
    depth: usize,
    vars: &mut Vec<Name>,
    counter: &mut usize,
) -> Formula {
    *counter += 1;
    let x = name(&format!("x{counter}"));
    vars.push(x.clone());
    let body = gen(rng, logic, depth, vars, counter);
    vars.pop();
    Formula::Freeze(x, Arc::new(body))
}

fn gen(
    rng: &mut ChaCha8Rng,
    logic: Logic,
    depth: usize,
    vars: &mut Vec<Name>,
    counter: &mut usize,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng, vars);
    }
    let d = depth - 1;
    let past = logic != Logic::Tptl;
    let choice = rng.gen_range(0..if past { 16 } else { 11 });
    let arc = |f: Formula| Arc::new(f);
    match choice {
        0 => Formula::not(gen(rng, logic, d, vars, counter)),
        1 => Formula::and(gen(rng, logic, d, vars, counter), gen(rng, logic, d, vars, counter)),
        2 => Formula::or(gen(rng, logic, d, vars, counter), gen(rng, logic, d, vars, counter)),
        3 => Formula::implies(gen(rng, logic, d, vars, counter), gen(rng, logic, d, vars, counter)),
        4 | 5 => freeze(rng, logic, d, vars, counter),
        6 => Formula::Next(gen_bound(rng, logic), arc(operand(rng, logic, d, vars, counter))),
        7..=10 => {
            let w = gen_bound(rng, logic);
            let (a, b) = (operand(rng, logic, d, vars, counter), operand(rng, logic, d, vars, counter));
            // Half of the time an eventually or always operator.
            let a = if rng.gen_bool(0.5) {
                a
            } else if choice % 2 == 0 {
                Formula::False
            } else {
                Formula::True
            };
            if choice % 2 == 0 {
                Formula::Release(w, arc(a), arc(b))
            } else {
                Formula::Until(w, arc(a), arc(b))
            }
        }
        11 => Formula::WeakNext(gen_bound(rng, logic), arc(operand(rng, logic, d, vars, counter))),
        12 => Formula::Prev(gen_bound(rng, logic), arc(operand(rng, logic, d, vars, counter))),
        13 => Formula::WeakPrev(gen_bound(rng, logic), arc(operand(rng, logic, d, vars, counter))),
        _ => {
            let w = gen_bound(rng, logic);
            let (a, b) = (operand(rng, logic, d, vars, counter), operand(rng, logic, d, vars, counter));
            let a = if rng.gen_bool(0.5) {
                a
            } else if choice == 14 {
                Formula::True
            } else {
                Formula::False
            };
            if choice == 14 {
                Formula::Since(w, arc(a), arc(b))
            } else {
                Formula::Triggered(w, arc(a), arc(b))
            }
        }
    }
}

pub fn random_lasso(rng: &mut ChaCha8Rng, max_states: usize, max_inc: u64) -> TimedLassoModel {
    let n = rng.gen_range(1..=max_states);
    let mut t = 0;
    let mut states = Vec::new();
    for k in 0..n {
        if k > 0 {
            t += rng.gen_range(0..=max_inc);
        }
        let letters: BTreeSet<String> =
            PROPS.iter().filter(|_| rng.gen_bool(0.5)).map(|s| s.to_string()).collect();
        states.push(State { letters, time: t });
    }
    let start = rng.gen_range(0..n);
    let span = t - states[start].time;
    let advance = (span + rng.gen_range(0..=max_inc)).max(1);
    TimedLassoModel::new(states, start, advance).unwrap()
}

/// Reference evaluator: explicit absolute timestamps and a finite horizon.
/// Future operators scan a fixed number of positions beyond their start and
/// every nesting level gets a fresh window, so answers are exact once the
/// window covers the stabilisation of the lasso.
pub struct Naive<'m> {
    m: &'m TimedLassoModel,
    span: usize,
    memo: HashMap<MemoKey, bool>,
}

/// Formula address, position, window and sorted environment.
type MemoKey = (usize, usize, usize, Vec<(Name, i64)>);

impl<'m> Naive<'m> {
    pub fn new(m: &'m TimedLassoModel, f: &Formula) -> Naive<'m> {
        let mut weight = 0i64;
        let mut lcm = 1i64;
        for g in f.preorder() {
            match g {
                Formula::Rel { c, .. } => weight += c.abs(),
                Formula::Cong { m, c, .. } => {
                    weight += c.abs();
                    let m = *m as i64;
                    let mut a = lcm;
                    let mut b = m;
                    while b != 0 {
                        (a, b) = (b, a % b);
                    }
                    lcm = lcm / a * m;
                }
                _ => {}
            }
            if let Some(Bound::Finite(w)) = g.bound() {
                weight += w as i64;
            }
        }
        let laps = (2 * weight + 2 * lcm + 8) as usize;
        Naive { m, span: m.states().len() + m.loop_len() * laps, memo: HashMap::new() }
    }

    pub fn eval_env(&mut self, f: &Formula, i: usize, env: &BTreeMap<Name, i64>) -> bool {
        let h = i + self.span;
        self.go(f, i, env, h)
    }

    fn t(&self, i: usize) -> i64 {
        self.m.time(i) as i64
    }

    fn go(&mut self, f: &Formula, i: usize, env: &BTreeMap<Name, i64>, h: usize) -> bool {
        use Formula::*;
        let fv = f.free_vars();
        let key_env: Vec<(Name, i64)> =
            env.iter().filter(|(k, _)| fv.contains(*k)).map(|(k, v)| (k.clone(), *v)).collect();
        let key = (f as *const Formula as usize, i, h, key_env);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let next_h = h + self.span;
        let v = match f {
            True => true,
            False => false,
            Prop(p) => self.m.holds(i, p),
            Not(a) => !self.go(a, i, env, h),
            And(a, b) => self.go(a, i, env, h) && self.go(b, i, env, h),
            Or(a, b) => self.go(a, i, env, h) || self.go(b, i, env, h),
            Implies(a, b) => !self.go(a, i, env, h) || self.go(b, i, env, h),
            Rel { lhs, rhs, c } => env[lhs] <= env[rhs] + c,
            Cong { lhs, rhs, m, c } => (env[lhs] - env[rhs] - c).rem_euclid(*m as i64) == 0,
            Abs { var, c } => env[var] <= *c,
            Freeze(x, a) => {
                let mut e = env.clone();
                e.insert(x.clone(), self.t(i));
                self.go(a, i, &e, h)
            }
            Next(w, a) => w.admits(self.t(i + 1) - self.t(i)) && self.go(a, i + 1, env, next_h),
            WeakNext(w, a) => !w.admits(self.t(i + 1) - self.t(i)) || self.go(a, i + 1, env, next_h),
            Prev(w, a) => i > 0 && w.admits(self.t(i) - self.t(i - 1)) && self.go(a, i - 1, env, next_h),
            WeakPrev(w, a) => {
                i == 0 || !w.admits(self.t(i) - self.t(i - 1)) || self.go(a, i - 1, env, next_h)
            }
            Until(w, a, b) => {
                let mut r = false;
                for j in i..h {
                    if !w.admits(self.t(j) - self.t(i)) {
                        break;
                    }
                    if self.go(b, j, env, next_h) {
                        r = true;
                        break;
                    }
                    if !self.go(a, j, env, next_h) {
                        break;
                    }
                }
                r
            }
            Release(w, a, b) => {
                let mut r = true;
                for j in i..h {
                    if !w.admits(self.t(j) - self.t(i)) {
                        break;
                    }
                    if !self.go(b, j, env, next_h) {
                        r = false;
                        break;
                    }
                    if self.go(a, j, env, next_h) {
                        break;
                    }
                }
                r
            }
            Since(w, a, b) | Triggered(w, a, b) => {
                let strong = matches!(f, Since(..));
                // Scan back from i; `strong` asks for a b-witness behind an a-run,
                // the dual asks that no b-failure is reachable without meeting a.
                let mut r = !strong;
                for j in (0..=i).rev() {
                    if !w.admits(self.t(i) - self.t(j)) {
                        break;
                    }
                    let bj = self.go(b, j, env, next_h);
                    if strong && bj {
                        r = true;
                        break;
                    }
                    if !strong && !bj {
                        r = false;
                        break;
                    }
                    let aj = self.go(a, j, env, next_h);
                    if strong && !aj {
                        break;
                    }
                    if !strong && aj {
                        break;
                    }
                }
                r
            }
        };
        self.memo.insert(key, v);
        v
    }
}

pub fn naive_eval(m: &TimedLassoModel, i: usize, f: &Formula) -> bool {
    Naive::new(m, f).eval_env(f, i, &BTreeMap::new())
}
