//! Formula AST shared by all three input languages (TPTL, TPTLbP and the
//! guarded fragment used internally), together with the syntactic passes the
//! solver pipeline runs before building a tableau.

pub mod closure;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::syntax::Span;

/// Identifier of a proposition letter or a clock variable.
pub type Name = Arc<str>;

/// Visibility bound of a temporal operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn is_infinite(self) -> bool {
        matches!(self, Bound::Infinite)
    }

    /// Whether a time distance is within the bound.
    pub fn admits(self, distance: i64) -> bool {
        match self {
            Bound::Infinite => true,
            Bound::Finite(w) => distance <= w as i64,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(w) => write!(f, "{w}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

/// Which surface logic a formula is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Logic {
    /// Future-only TPTL; every bound is `+inf`.
    Tptl,
    /// Bounded TPTL with past.
    Tptlbp,
    /// Guarded fragment produced by translation; unbounded operators may
    /// take open operands because the guards carry the bounds.
    Gtptlp,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(Name),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    /// `x. phi`: binds `x` to the timestamp of the current state.
    Freeze(Name, Arc<Formula>),
    /// `lhs <= rhs + c`
    Rel {
        lhs: Name,
        rhs: Name,
        c: i64,
    },
    /// `var <= c`; parsed for diagnostics only.
    Abs {
        var: Name,
        c: i64,
    },
    /// `lhs == rhs + c mod m`
    Cong {
        lhs: Name,
        rhs: Name,
        m: u64,
        c: i64,
    },
    Next(Bound, Arc<Formula>),
    WeakNext(Bound, Arc<Formula>),
    Prev(Bound, Arc<Formula>),
    WeakPrev(Bound, Arc<Formula>),
    Until(Bound, Arc<Formula>, Arc<Formula>),
    Release(Bound, Arc<Formula>, Arc<Formula>),
    Since(Bound, Arc<Formula>, Arc<Formula>),
    Triggered(Bound, Arc<Formula>, Arc<Formula>),
}

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

// Smart constructors. They keep call sites readable; no simplification happens here.
impl Formula {
    pub fn prop(p: &str) -> Formula {
        Formula::Prop(name(p))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }
    pub fn freeze(x: &str, f: Formula) -> Formula {
        Formula::Freeze(name(x), Arc::new(f))
    }
    pub fn rel(lhs: &str, rhs: &str, c: i64) -> Formula {
        Formula::Rel { lhs: name(lhs), rhs: name(rhs), c }
    }
    pub fn cong(lhs: &str, rhs: &str, m: u64, c: i64) -> Formula {
        Formula::Cong { lhs: name(lhs), rhs: name(rhs), m, c }
    }
    pub fn next(f: Formula) -> Formula {
        Formula::Next(Bound::Infinite, Arc::new(f))
    }
    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Bound::Infinite, Arc::new(a), Arc::new(b))
    }
    pub fn release(a: Formula, b: Formula) -> Formula {
        Formula::Release(Bound::Infinite, Arc::new(a), Arc::new(b))
    }
    pub fn since(a: Formula, b: Formula) -> Formula {
        Formula::Since(Bound::Infinite, Arc::new(a), Arc::new(b))
    }
    pub fn triggered(a: Formula, b: Formula) -> Formula {
        Formula::Triggered(Bound::Infinite, Arc::new(a), Arc::new(b))
    }
    /// `F phi` as `true U phi`.
    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::True, f)
    }
    /// `G phi` as `false R phi`.
    pub fn always(f: Formula) -> Formula {
        Formula::release(Formula::False, f)
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Arc<Formula>> {
        use Formula::*;
        match self {
            True | False | Prop(_) | Rel { .. } | Abs { .. } | Cong { .. } => vec![],
            Not(a) | Freeze(_, a) | Next(_, a) | WeakNext(_, a) | Prev(_, a) | WeakPrev(_, a) => {
                vec![a]
            }
            And(a, b)
            | Or(a, b)
            | Implies(a, b)
            | Until(_, a, b)
            | Release(_, a, b)
            | Since(_, a, b)
            | Triggered(_, a, b) => vec![a, b],
        }
    }

    pub fn bound(&self) -> Option<Bound> {
        use Formula::*;
        match self {
            Next(w, _) | WeakNext(w, _) | Prev(w, _) | WeakPrev(w, _) => Some(*w),
            Until(w, ..) | Release(w, ..) | Since(w, ..) | Triggered(w, ..) => Some(*w),
            _ => None,
        }
    }

    pub fn is_temporal(&self) -> bool {
        self.bound().is_some()
    }

    /// Nodes in preorder; parser spans are recorded in the same order.
    pub fn preorder(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            for c in f.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        self.preorder().len()
    }

    /// Number of distinct subformulae.
    pub fn subformula_count(&self) -> usize {
        self.preorder().into_iter().collect::<HashSet<_>>().len()
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn props(&self) -> BTreeSet<Name> {
        self.preorder()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Prop(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for f in self.preorder() {
            match f {
                Formula::Freeze(x, _) | Formula::Abs { var: x, .. } => {
                    out.insert(x.clone());
                }
                Formula::Rel { lhs, rhs, .. } | Formula::Cong { lhs, rhs, .. } => {
                    out.insert(lhs.clone());
                    out.insert(rhs.clone());
                }
                _ => {}
            }
        }
        out
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    let mut note = |v: &Name, bound: &Vec<Name>| {
        if !bound.contains(v) {
            out.insert(v.clone());
        }
    };
    match f {
        Formula::Freeze(x, body) => {
            bound.push(x.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Formula::Rel { lhs, rhs, .. } | Formula::Cong { lhs, rhs, .. } => {
            note(lhs, bound);
            note(rhs, bound);
        }
        Formula::Abs { var, .. } => note(var, bound),
        _ => {
            for c in f.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub span: Option<Span>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span {
            Some(s) => write!(f, "{} (bytes {}..{})", self.message, s.start, s.end),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Checks closedness, rejects absolute constraints and enforces the
/// restrictions of the selected logic. `spans`, when given, must be the
/// preorder span table produced by the parser for `f`.
pub fn check_wellformed(f: &Formula, logic: Logic, spans: Option<&[Span]>) -> Result<(), Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut index = 0usize;
    wf_walk(f, logic, spans, &mut index, &mut Vec::new(), &mut diags);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

fn wf_walk(
    f: &Formula,
    logic: Logic,
    spans: Option<&[Span]>,
    index: &mut usize,
    bound: &mut Vec<Name>,
    diags: &mut Vec<Diagnostic>,
) {
    let span = spans.and_then(|s| s.get(*index).copied());
    *index += 1;
    let mut push = |message: String| diags.push(Diagnostic { message, span });

    let check_var = |v: &Name, bound: &Vec<Name>, push: &mut dyn FnMut(String)| {
        if !bound.contains(v) {
            push(format!("unbound variable {v}"));
        }
    };

    match f {
        Formula::Rel { lhs, rhs, .. } => {
            check_var(lhs, bound, &mut push);
            if rhs != lhs {
                check_var(rhs, bound, &mut push);
            }
        }
        Formula::Cong { lhs, rhs, m, .. } => {
            if *m < 1 {
                push("congruence modulus must be at least 1".to_string());
            }
            check_var(lhs, bound, &mut push);
            if rhs != lhs {
                check_var(rhs, bound, &mut push);
            }
        }
        Formula::Abs { var, .. } => {
            push(format!(
                "absolute constraints unsupported: `{var} <= c` compares a clock with a constant; \
                 only relative constraints between two clocks are accepted"
            ));
            check_var(var, bound, &mut push);
        }
        _ => {}
    }

    if let Some(w) = f.bound() {
        match logic {
            Logic::Tptl => {
                if matches!(
                    f,
                    Formula::Prev(..) | Formula::WeakPrev(..) | Formula::Since(..) | Formula::Triggered(..)
                ) {
                    push("past operators are not allowed in TPTL".to_string());
                }
                if matches!(f, Formula::WeakNext(..)) {
                    push("weak tomorrow is not allowed in TPTL".to_string());
                }
                if !w.is_infinite() {
                    push("bounded temporal operators are not allowed in TPTL".to_string());
                }
            }
            Logic::Tptlbp => {
                if w.is_infinite() && f.children().iter().any(|c| !c.is_closed()) {
                    push("unbounded temporal operator applied to a formula with free variables".to_string());
                }
            }
            Logic::Gtptlp => {
                if !w.is_infinite() {
                    push("bounds are expressed by guards in the guarded fragment".to_string());
                }
            }
        }
    }

    if let Formula::Freeze(x, body) = f {
        bound.push(x.clone());
        wf_walk(body, logic, spans, index, bound, diags);
        bound.pop();
    } else {
        for c in f.children() {
            wf_walk(c, logic, spans, index, bound, diags);
        }
    }
}

/// Picks names not in `used`, based on `base`.
pub struct Fresh {
    used: HashSet<Name>,
    counter: usize,
}

impl Fresh {
    pub fn new(used: impl IntoIterator<Item = Name>) -> Fresh {
        Fresh { used: used.into_iter().collect(), counter: 0 }
    }

    pub fn make(&mut self, base: &str) -> Name {
        loop {
            self.counter += 1;
            let candidate: Name = name(&format!("{base}_{}", self.counter));
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// Renames every freeze quantifier to a globally unique variable.
pub fn alpha_rename(f: &Formula) -> Formula {
    let mut fresh = Fresh::new(f.all_vars());
    rename_walk(f, &mut HashMap::new(), &mut fresh)
}

fn rename_walk(f: &Formula, env: &mut HashMap<Name, Name>, fresh: &mut Fresh) -> Formula {
    let look = |v: &Name, env: &HashMap<Name, Name>| env.get(v).cloned().unwrap_or_else(|| v.clone());
    match f {
        Formula::Freeze(x, body) => {
            let nx = fresh.make(x);
            let saved = env.insert(x.clone(), nx.clone());
            let body = rename_walk(body, env, fresh);
            match saved {
                Some(s) => env.insert(x.clone(), s),
                None => env.remove(x),
            };
            Formula::Freeze(nx, Arc::new(body))
        }
        Formula::Rel { lhs, rhs, c } => Formula::Rel { lhs: look(lhs, env), rhs: look(rhs, env), c: *c },
        Formula::Cong { lhs, rhs, m, c } => {
            Formula::Cong { lhs: look(lhs, env), rhs: look(rhs, env), m: *m, c: *c }
        }
        Formula::Abs { var, c } => Formula::Abs { var: look(var, env), c: *c },
        _ => map_children(f, |c| rename_walk(c, env, fresh)),
    }
}

/// Rebuilds `f` with `g` applied to each direct child.
pub fn map_children(f: &Formula, mut g: impl FnMut(&Formula) -> Formula) -> Formula {
    use Formula::*;
    let mut a = |x: &Arc<Formula>| Arc::new(g(x));
    match f {
        True | False | Prop(_) | Rel { .. } | Abs { .. } | Cong { .. } => f.clone(),
        Not(x) => Not(a(x)),
        Freeze(v, x) => Freeze(v.clone(), a(x)),
        Next(w, x) => Next(*w, a(x)),
        WeakNext(w, x) => WeakNext(*w, a(x)),
        Prev(w, x) => Prev(*w, a(x)),
        WeakPrev(w, x) => WeakPrev(*w, a(x)),
        And(x, y) => {
            let x = a(x);
            And(x, a(y))
        }
        Or(x, y) => {
            let x = a(x);
            Or(x, a(y))
        }
        Implies(x, y) => {
            let x = a(x);
            Implies(x, a(y))
        }
        Until(w, x, y) => {
            let x = a(x);
            Until(*w, x, a(y))
        }
        Release(w, x, y) => {
            let x = a(x);
            Release(*w, x, a(y))
        }
        Since(w, x, y) => {
            let x = a(x);
            Since(*w, x, a(y))
        }
        Triggered(w, x, y) => {
            let x = a(x);
            Triggered(*w, x, a(y))
        }
    }
}

/// Negated normal form: negation only on propositions and constraints,
/// implications expanded.
pub fn nnf(f: &Formula) -> Formula {
    nnf_pos(f)
}

fn nnf_pos(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        Not(g) => nnf_neg(g),
        Implies(a, b) => Formula::or(nnf_neg(a), nnf_pos(b)),
        // X and WX coincide without a bound: every state has a successor.
        WeakNext(Bound::Infinite, g) => Next(Bound::Infinite, Arc::new(nnf_pos(g))),
        _ => map_children(f, nnf_pos),
    }
}

fn nnf_neg(f: &Formula) -> Formula {
    use Formula::*;
    let n = |x: &Arc<Formula>| Arc::new(nnf_neg(x));
    match f {
        True => False,
        False => True,
        Prop(_) | Rel { .. } | Abs { .. } | Cong { .. } => Formula::not(f.clone()),
        Not(g) => nnf_pos(g),
        And(a, b) => Or(n(a), n(b)),
        Or(a, b) => And(n(a), n(b)),
        Implies(a, b) => And(Arc::new(nnf_pos(a)), n(b)),
        Freeze(x, g) => Freeze(x.clone(), n(g)),
        Next(Bound::Infinite, g) | WeakNext(Bound::Infinite, g) => Next(Bound::Infinite, n(g)),
        Next(w, g) => WeakNext(*w, n(g)),
        WeakNext(w, g) => Next(*w, n(g)),
        Prev(w, g) => WeakPrev(*w, n(g)),
        WeakPrev(w, g) => Prev(*w, n(g)),
        Until(w, a, b) => Release(*w, n(a), n(b)),
        Release(w, a, b) => Until(*w, n(a), n(b)),
        Since(w, a, b) => Triggered(*w, n(a), n(b)),
        Triggered(w, a, b) => Since(*w, n(a), n(b)),
    }
}

/// Bound on the time distance between consecutive states that suffices to
/// find a model: the product of every constant occurrence (relative
/// constraint offsets, moduli and finite bounds), each counted as at least 1.
pub fn delta_bound(f: &Formula) -> u64 {
    let mut product: u64 = 1;
    for g in f.preorder() {
        let k: u64 = match g {
            Formula::Rel { c, .. } | Formula::Abs { c, .. } => c.unsigned_abs(),
            Formula::Cong { m, c, .. } => {
                product = product.saturating_mul(c.unsigned_abs().max(1));
                *m
            }
            _ => match g.bound() {
                Some(Bound::Finite(w)) => w,
                _ => 1,
            },
        };
        product = product.saturating_mul(k.max(1));
    }
    product.max(1)
}

/// Largest time increment a model ever needs. A gap above every constant
/// and bound `k` only matters through its residue modulo the lcm `l` of the
/// moduli, so any model has a counterpart with increments at most `k + l`.
pub fn increment_bound(f: &Formula) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let (mut k, mut l) = (0u64, 1u64);
    for g in f.preorder() {
        match g {
            Formula::Rel { c, .. } | Formula::Abs { c, .. } => k = k.max(c.unsigned_abs()),
            Formula::Cong { m, .. } => l = (l / gcd(l, *m)).saturating_mul(*m),
            _ => {
                if let Some(Bound::Finite(w)) = g.bound() {
                    k = k.max(w);
                }
            }
        }
    }
    k.saturating_add(l)
}

/// Largest number of past operators on a path from the root.
pub fn past_depth(f: &Formula) -> usize {
    let own = usize::from(matches!(
        f,
        Formula::Prev(..) | Formula::WeakPrev(..) | Formula::Since(..) | Formula::Triggered(..)
    ));
    own + f.children().iter().map(|c| past_depth(c)).max().unwrap_or(0)
}

/// Replaces every free occurrence of `y` by `x`.
pub fn substitute(f: &Formula, y: &str, x: &Name) -> Formula {
    let sub = |v: &Name| if &**v == y { x.clone() } else { v.clone() };
    match f {
        Formula::Freeze(v, _) if &**v == y => f.clone(),
        Formula::Rel { lhs, rhs, c } => Formula::Rel { lhs: sub(lhs), rhs: sub(rhs), c: *c },
        Formula::Cong { lhs, rhs, m, c } => Formula::Cong { lhs: sub(lhs), rhs: sub(rhs), m: *m, c: *c },
        Formula::Abs { var, c } => Formula::Abs { var: sub(var), c: *c },
        _ => map_children(f, |c| substitute(c, y, x)),
    }
}

/// One bottom-up pass folding `true`/`false` through conjunction,
/// disjunction, negation, implication and freeze quantification.
/// Whether a chain of conjunctions (or of disjunctions) contains some
/// operand together with its negation.
fn complementary(f: &Formula) -> bool {
    fn flatten<'a>(f: &'a Formula, and: bool, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::And(a, b) if and => {
                flatten(a, and, out);
                flatten(b, and, out);
            }
            Formula::Or(a, b) if !and => {
                flatten(a, and, out);
                flatten(b, and, out);
            }
            _ => out.push(f),
        }
    }
    let mut ops = Vec::new();
    flatten(f, matches!(f, Formula::And(..)), &mut ops);
    ops.iter().any(|g| match g {
        Formula::Not(a) => ops.contains(&&**a),
        _ => false,
    })
}

pub fn simplify(f: &Formula) -> Formula {
    use Formula::*;
    let g = map_children(f, simplify);
    match &g {
        Not(a) => match **a {
            True => False,
            False => True,
            _ => g,
        },
        And(a, b) => match (&**a, &**b) {
            (False, _) | (_, False) => False,
            (True, _) => (**b).clone(),
            (_, True) => (**a).clone(),
            _ if complementary(&g) => False,
            _ => g,
        },
        Or(a, b) => match (&**a, &**b) {
            (True, _) | (_, True) => True,
            (False, _) => (**b).clone(),
            (_, False) => (**a).clone(),
            _ if complementary(&g) => True,
            _ => g,
        },
        Implies(a, b) => match (&**a, &**b) {
            (False, _) | (_, True) => True,
            (True, _) => (**b).clone(),
            _ => g,
        },
        Freeze(_, a) => match **a {
            True => True,
            False => False,
            _ => g,
        },
        Next(w, a) => match **a {
            False => False,
            True if w.is_infinite() => True,
            _ => g,
        },
        Prev(_, a) if **a == False => False,
        WeakPrev(_, a) | WeakNext(_, a) if **a == True => True,
        // Distance zero is within every bound, so a constant right operand
        // decides the formula at the current state.
        Until(_, a, b) | Since(_, a, b) => match (&**a, &**b) {
            (_, True) => True,
            (_, False) => False,
            (False, _) => (**b).clone(),
            _ => g,
        },
        Release(_, a, b) | Triggered(_, a, b) => match (&**a, &**b) {
            (_, True) => True,
            (_, False) => False,
            (True, _) => (**b).clone(),
            _ => g,
        },
        _ => g,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap().root
    }

    #[test]
    fn increment_bound_examples() {
        assert_eq!(increment_bound(&p("x. X y. (y <= x + 3 & y == x mod 4) U[2] p")), 7);
        assert_eq!(increment_bound(&p("x. G y. (p -> y <= x + 2)")), 3);
        assert_eq!(increment_bound(&p("p")), 1);
        assert_eq!(delta_bound(&p("x. X y. (y <= x + 3 & y == x mod 4) U[2] p")), 24);
    }

    #[test]
    fn unbound_variable_is_reported() {
        let errs = check_wellformed(&p("x. (x <= y + 1)"), Logic::Tptl, None).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("unbound variable y"));
    }

    #[test]
    fn absolute_constraint_rejected() {
        let src = parse("x. (p & x <= 3)").unwrap();
        let errs = check_wellformed(&src.root, Logic::Tptl, Some(&src.spans)).unwrap_err();
        assert!(errs[0].message.contains("absolute constraints unsupported"));
        let span = errs[0].span.unwrap();
        assert_eq!(&"x. (p & x <= 3)"[span.start..span.end], "x <= 3");
    }

    #[test]
    fn unbounded_on_closed_operand_ok() {
        assert!(check_wellformed(&p("p U q"), Logic::Tptlbp, None).is_ok());
        assert!(check_wellformed(&p("x. (p U y. (y <= x + 1))"), Logic::Tptlbp, None).is_err());
        assert!(check_wellformed(&p("x. (p U[3] y. (y <= x + 1))"), Logic::Tptlbp, None).is_ok());
    }

    #[test]
    fn tptl_rejects_past_and_bounds() {
        assert!(check_wellformed(&p("Y p"), Logic::Tptl, None).is_err());
        assert!(check_wellformed(&p("X[2] p"), Logic::Tptl, None).is_err());
        assert!(check_wellformed(&p("WX p"), Logic::Tptl, None).is_err());
        assert!(check_wellformed(&p("x. G y. (p -> y <= x + 2)"), Logic::Tptl, None).is_ok());
    }

    #[test]
    fn alpha_rename_makes_binders_unique() {
        let f = alpha_rename(&p("x. (p & x. q)"));
        let binders: Vec<_> = f
            .preorder()
            .into_iter()
            .filter_map(|g| match g {
                Formula::Freeze(x, _) => Some(x.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(binders.len(), 2);
        assert_ne!(binders[0], binders[1]);
        assert!(f.is_closed());
    }

    #[test]
    fn alpha_rename_keeps_references() {
        let f = alpha_rename(&p("x. G y. (p -> y <= x + 2)"));
        match &f {
            Formula::Freeze(x, body) => {
                let Formula::Release(_, _, inner) = &**body else { panic!() };
                let Formula::Freeze(y, c) = &**inner else { panic!() };
                let Formula::Implies(_, c) = &**c else { panic!() };
                assert_eq!(**c, Formula::Rel { lhs: y.clone(), rhs: x.clone(), c: 2 });
            }
            _ => panic!(),
        }
    }

    #[test]
    fn nnf_examples() {
        assert_eq!(nnf(&p("!(p | q)")), p("!p & !q"));
        assert_eq!(nnf(&p("!X[2] p")), p("WX[2] !p"));
        assert_eq!(nnf(&p("!(p U q)")), p("!p R !q"));
        assert_eq!(nnf(&p("!X p")), p("X !p"));
        assert_eq!(nnf(&p("!Y[1] p")), p("WY[1] !p"));
        assert_eq!(nnf(&p("!(p S q)")), p("!p T !q"));
        assert_eq!(nnf(&p("!x. (p -> x <= x + 1)")), p("x. (p & !(x <= x + 1))"));
    }

    #[test]
    fn delta_bound_examples() {
        assert_eq!(delta_bound(&p("x. G y. (p -> y <= x + 2)")), 2);
        assert_eq!(delta_bound(&p("p U q")), 1);
        assert_eq!(delta_bound(&p("x. X y. (y <= x + 2 & x. X z. (z <= x - 3))")), 6);
        assert_eq!(delta_bound(&p("x. X y. (y == x + 2 mod 3)")), 6);
        assert_eq!(delta_bound(&p("p U[3] q")), 3);
    }

    #[test]
    fn substitute_examples() {
        let x = name("x");
        assert_eq!(substitute(&p("x. y. (y <= x + 2)"), "y", &x), p("x. y. (y <= x + 2)"));
        assert_eq!(substitute(&Formula::rel("y", "x", 2), "y", &x), Formula::rel("x", "x", 2));
        assert_eq!(substitute(&p("p"), "y", &x), p("p"));
        assert_eq!(substitute(&Formula::cong("y", "z", 3, 1), "y", &x), Formula::cong("x", "z", 3, 1));
    }

    #[test]
    fn simplify_folds_constants() {
        assert_eq!(simplify(&p("x. (true & p)")), p("x. p"));
        assert_eq!(simplify(&p("x. (false & p)")), Formula::False);
        assert_eq!(simplify(&p("p | x. true")), Formula::True);
        assert_eq!(simplify(&p("X (false | p)")), p("X p"));
    }
}
