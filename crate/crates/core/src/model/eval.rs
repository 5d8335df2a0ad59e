//! Exact satisfaction over timed lassos.
//!
//! Variables are kept as offsets from the current timestamp. Gaps larger
//! than any constant the formula can observe are clamped, which makes the
//! set of reachable (position, environment) pairs finite; positions beyond a
//! stabilised unrolling are folded back by whole loop periods. Until and
//! release then become reachability questions with cycle detection.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use crate::formula::{past_depth, Bound, Formula, Name};

use super::{Environment, TimedLassoModel};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("free variable {0} has no value")]
    Unbound(String),
    #[error("absolute constraints unsupported: {0}")]
    Absolute(String),
}

/// Sorted by name: (variable, offset from now, offset residue).
type Env = Vec<(Name, i64, i64)>;

struct Ctx<'a> {
    m: &'a TimedLassoModel,
    pst: usize,
    end: usize,
    clamp: i64,
    modulus: i64,
    memo: HashMap<(usize, usize, Env), bool>,
    fv: HashMap<usize, Arc<BTreeSet<Name>>>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn key(f: &Formula) -> usize {
    f as *const Formula as usize
}

impl<'a> Ctx<'a> {
    fn new(m: &'a TimedLassoModel, f: &Formula) -> Ctx<'a> {
        let (mut consts, mut bounds, mut modulus) = (0i64, 0i64, 1i64);
        for g in f.preorder() {
            match g {
                Formula::Rel { c, .. } => consts += c.abs(),
                Formula::Cong { m, c, .. } => {
                    consts += c.abs();
                    let m = *m as i64;
                    modulus = modulus / gcd(modulus, m) * m;
                }
                _ => {}
            }
            if let Some(Bound::Finite(w)) = g.bound() {
                bounds += w as i64;
            }
        }
        let laps = (past_depth(f) + 1) * (bounds as usize + 2) + 1;
        let pst = m.loop_start() + m.loop_len() * laps;
        Ctx {
            m,
            pst,
            end: pst + m.loop_len(),
            clamp: 2 * (consts + bounds) + 4,
            modulus,
            memo: HashMap::new(),
            fv: HashMap::new(),
        }
    }

    fn time(&self, p: usize) -> i64 {
        self.m.time(p) as i64
    }

    fn fold(&self, p: usize) -> usize {
        if p < self.end {
            p
        } else {
            self.pst + (p - self.pst) % self.m.loop_len()
        }
    }

    fn succ(&self, p: usize) -> (usize, i64) {
        let d = self.time(p + 1) - self.time(p);
        (self.fold(p + 1), d)
    }

    fn pred(&self, p: usize) -> Option<(usize, i64)> {
        (p > 0).then(|| (p - 1, self.time(p) - self.time(p - 1)))
    }

    /// Moves "now" by `d` (negative when stepping back) and re-clamps.
    fn moved(&self, env: &Env, d: i64) -> Env {
        let mut out: Env =
            env.iter().map(|(x, o, r)| (x.clone(), o - d, (r - d).rem_euclid(self.modulus))).collect();
        self.clamp_chain(&mut out);
        out
    }

    fn clamp_chain(&self, env: &mut Env) {
        let orig: Vec<i64> = env.iter().map(|e| e.1).collect();
        let mut order: Vec<usize> = (0..env.len()).collect();
        order.sort_by_key(|&i| orig[i]);
        let (mut prev_old, mut prev_new) = (0, 0);
        for &i in order.iter().filter(|&&i| orig[i] >= 0) {
            prev_new += (orig[i] - prev_old).min(self.clamp);
            prev_old = orig[i];
            env[i].1 = prev_new;
        }
        let (mut prev_old, mut prev_new) = (0, 0);
        for &i in order.iter().rev().filter(|&&i| orig[i] < 0) {
            prev_new -= (prev_old - orig[i]).min(self.clamp);
            prev_old = orig[i];
            env[i].1 = prev_new;
        }
    }

    fn free(&mut self, f: &Formula) -> Arc<BTreeSet<Name>> {
        self.fv.entry(key(f)).or_insert_with(|| Arc::new(f.free_vars())).clone()
    }

    fn restrict(&mut self, f: &Formula, env: &Env) -> Env {
        let fv = self.free(f);
        env.iter().filter(|(x, ..)| fv.contains(x)).cloned().collect()
    }

    fn lookup<'e>(env: &'e Env, x: &Name) -> &'e (Name, i64, i64) {
        let i = env.binary_search_by(|e| e.0.cmp(x)).expect("free variables are bound");
        &env[i]
    }

    fn eval(&mut self, f: &Formula, p: usize, env: &Env) -> bool {
        use Formula::*;
        match f {
            True => return true,
            False => return false,
            Prop(q) => return self.m.holds(p, q),
            Not(a) => return !self.eval(a, p, env),
            And(a, b) => return self.eval(a, p, env) && self.eval(b, p, env),
            Or(a, b) => return self.eval(a, p, env) || self.eval(b, p, env),
            Implies(a, b) => return !self.eval(a, p, env) || self.eval(b, p, env),
            Rel { lhs, rhs, c } => {
                return Self::lookup(env, lhs).1 <= Self::lookup(env, rhs).1 + c;
            }
            Cong { lhs, rhs, m, c } => {
                let d = Self::lookup(env, lhs).2 - Self::lookup(env, rhs).2 - c;
                return d.rem_euclid(*m as i64) == 0;
            }
            Abs { .. } => unreachable!("rejected before evaluation"),
            _ => {}
        }
        let env = self.restrict(f, env);
        let k = (key(f), p, env);
        if let Some(&v) = self.memo.get(&k) {
            return v;
        }
        let v = self.temporal(f, p, &k.2);
        self.memo.insert(k, v);
        v
    }

    fn temporal(&mut self, f: &Formula, p: usize, env: &Env) -> bool {
        use Formula::*;
        match f {
            Freeze(x, a) => {
                let mut e: Env = env.iter().filter(|(y, ..)| y != x).cloned().collect();
                e.push((x.clone(), 0, 0));
                e.sort_by(|a, b| a.0.cmp(&b.0));
                self.eval(a, p, &e)
            }
            Next(w, a) | WeakNext(w, a) => {
                let (q, d) = self.succ(p);
                if !w.admits(d) {
                    return matches!(f, WeakNext(..));
                }
                let e = self.moved(env, d);
                self.eval(a, q, &e)
            }
            Prev(w, a) | WeakPrev(w, a) => {
                let weak = matches!(f, WeakPrev(..));
                match self.pred(p) {
                    None => weak,
                    Some((_, d)) if !w.admits(d) => weak,
                    Some((q, d)) => {
                        let e = self.moved(env, -d);
                        self.eval(a, q, &e)
                    }
                }
            }
            Until(w, a, b) | Release(w, a, b) => self.forward(*w, a, b, p, env, matches!(f, Release(..))),
            Since(w, a, b) | Triggered(w, a, b) => {
                self.backward(*w, a, b, p, env, matches!(f, Triggered(..)))
            }
            _ => unreachable!("non-temporal formulas are handled in eval"),
        }
    }

    /// `a U b`, or `a R b` when `release`; the release answer is the one
    /// returned when the walk leaves the bound or cycles.
    fn forward(&mut self, w: Bound, a: &Formula, b: &Formula, p: usize, env: &Env, release: bool) -> bool {
        let cap = match w {
            Bound::Finite(w) => Some(w as i64),
            Bound::Infinite => None,
        };
        let mut seen = HashSet::new();
        let (mut pos, mut env, mut acc) = (p, env.clone(), 0i64);
        loop {
            if cap.is_some_and(|w| acc > w) {
                return release;
            }
            if !seen.insert((pos, env.clone(), acc)) {
                return release;
            }
            let (goal, guard) = if release { (a, b) } else { (b, a) };
            if !release && self.eval(goal, pos, &env) {
                return true;
            }
            if !self.eval(guard, pos, &env) {
                return false;
            }
            if release && self.eval(goal, pos, &env) {
                return true;
            }
            let (q, d) = self.succ(pos);
            env = self.moved(&env, d);
            pos = q;
            if let Some(w) = cap {
                acc = (acc + d).min(w + 1);
            }
        }
    }

    fn backward(&mut self, w: Bound, a: &Formula, b: &Formula, p: usize, env: &Env, triggered: bool) -> bool {
        let (mut pos, mut env, mut acc) = (p, env.clone(), 0i64);
        loop {
            if !w.admits(acc) {
                return triggered;
            }
            if triggered {
                if !self.eval(b, pos, &env) {
                    return false;
                }
                if self.eval(a, pos, &env) {
                    return true;
                }
            } else {
                if self.eval(b, pos, &env) {
                    return true;
                }
                if !self.eval(a, pos, &env) {
                    return false;
                }
            }
            let Some((q, d)) = self.pred(pos) else {
                return triggered;
            };
            env = self.moved(&env, -d);
            pos = q;
            acc += d;
        }
    }
}

/// Truth of `f` at position `i` under `env`.
pub fn evaluate_env(
    m: &TimedLassoModel,
    i: usize,
    f: &Formula,
    env: &Environment,
) -> Result<bool, EvalError> {
    if let Some(g) = f.preorder().into_iter().find(|g| matches!(g, Formula::Abs { .. })) {
        return Err(EvalError::Absolute(g.to_string()));
    }
    if let Some(x) = f.free_vars().into_iter().find(|x| !env.contains_key(x)) {
        return Err(EvalError::Unbound(x.to_string()));
    }
    let mut ctx = Ctx::new(m, f);
    let now = m.time(i) as i64;
    let mut e: Env = env
        .iter()
        .map(|(x, &t)| {
            let o = t as i64 - now;
            (x.clone(), o, o.rem_euclid(ctx.modulus))
        })
        .collect();
    ctx.clamp_chain(&mut e);
    let p = ctx.fold(i);
    Ok(ctx.eval(f, p, &e))
}

/// Truth of a closed formula at position `i`.
pub fn evaluate(m: &TimedLassoModel, i: usize, f: &Formula) -> Result<bool, EvalError> {
    evaluate_env(m, i, f, &Environment::new())
}
