//! Interning of closed formulae `x.psi` in canonical form.
//!
//! Every label member handled by the tableau is an id into a [`Closure`].
//! Canonical forms have their binders renamed `v0, v1, ...` in preorder, so
//! formulae that differ only in binder names share an id.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use super::{map_children, name, simplify, substitute, Bound, Formula, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct FormulaId(pub u32);

impl FormulaId {
    pub const TRUE: FormulaId = FormulaId(0);
    pub const FALSE: FormulaId = FormulaId(1);
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Shape of an interned formula as seen by the expansion rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    True,
    False,
    Lit {
        prop: u32,
        positive: bool,
    },
    /// Constraint over the outer variable alone; `holds` is its truth value.
    Sync {
        holds: bool,
    },
    Next(FormulaId),
    Prev(FormulaId),
    WeakPrev(FormulaId),
    And(FormulaId, FormulaId),
    Or(FormulaId, FormulaId),
    /// `x.y.psi`, child is `x.psi[y/x]`.
    Freeze(FormulaId),
    Until {
        left: FormulaId,
        right: FormulaId,
        next: FormulaId,
    },
    Release {
        left: FormulaId,
        right: FormulaId,
        next: FormulaId,
    },
    Since {
        left: FormulaId,
        right: FormulaId,
        prev: FormulaId,
    },
    /// `prev` is the weak yesterday of the formula itself, so that the
    /// formula can hold at the first position.
    Triggered {
        left: FormulaId,
        right: FormulaId,
        prev: FormulaId,
    },
}

impl Kind {
    pub fn is_elementary(self) -> bool {
        matches!(
            self,
            Kind::True
                | Kind::False
                | Kind::Lit { .. }
                | Kind::Sync { .. }
                | Kind::Next(_)
                | Kind::Prev(_)
                | Kind::WeakPrev(_)
        )
    }
}

struct Entry {
    formula: Arc<Formula>,
    kind: OnceLock<Kind>,
}

#[derive(Default)]
struct Tables {
    entries: Vec<Arc<Entry>>,
    index: HashMap<Arc<Formula>, FormulaId>,
}

/// Append-only interner shared by every worker of one solver run.
pub struct Closure {
    tables: RwLock<Tables>,
    props: RwLock<(Vec<Name>, HashMap<Name, u32>)>,
}

impl Default for Closure {
    fn default() -> Self {
        Self::new()
    }
}

impl Closure {
    pub fn new() -> Closure {
        let c = Closure { tables: RwLock::default(), props: RwLock::default() };
        assert_eq!(c.insert(Formula::True), FormulaId::TRUE);
        assert_eq!(c.insert(Formula::False), FormulaId::FALSE);
        c
    }

    /// Canonicalizes a closed formula and returns its id.
    pub fn intern(&self, f: &Formula) -> FormulaId {
        self.insert(canonicalize(f))
    }

    fn insert(&self, f: Formula) -> FormulaId {
        if let Some(id) = self.tables.read().unwrap().index.get(&f) {
            return *id;
        }
        let mut t = self.tables.write().unwrap();
        if let Some(id) = t.index.get(&f) {
            return *id;
        }
        let id = FormulaId(t.entries.len() as u32);
        let f = Arc::new(f);
        t.entries.push(Arc::new(Entry { formula: f.clone(), kind: OnceLock::new() }));
        t.index.insert(f, id);
        id
    }

    fn entry(&self, id: FormulaId) -> Arc<Entry> {
        self.tables.read().unwrap().entries[id.0 as usize].clone()
    }

    pub fn formula(&self, id: FormulaId) -> Arc<Formula> {
        self.entry(id).formula.clone()
    }

    pub fn len(&self) -> usize {
        self.tables.read().unwrap().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prop_id(&self, p: &Name) -> u32 {
        if let Some(i) = self.props.read().unwrap().1.get(p) {
            return *i;
        }
        let mut g = self.props.write().unwrap();
        if let Some(i) = g.1.get(p) {
            return *i;
        }
        let i = g.0.len() as u32;
        g.0.push(p.clone());
        g.1.insert(p.clone(), i);
        i
    }

    pub fn prop_name(&self, i: u32) -> Name {
        self.props.read().unwrap().0[i as usize].clone()
    }

    pub fn kind(&self, id: FormulaId) -> Kind {
        let e = self.entry(id);
        *e.kind.get_or_init(|| self.classify(&e.formula))
    }

    pub fn is_elementary(&self, id: FormulaId) -> bool {
        self.kind(id).is_elementary()
    }

    fn classify(&self, f: &Formula) -> Kind {
        let (x, body) = match f {
            Formula::True => return Kind::True,
            Formula::False => return Kind::False,
            Formula::Freeze(x, body) => (x, body),
            other => panic!("closure entry is not a freeze quantification: {other}"),
        };
        let sub = |g: &Arc<Formula>| self.intern(&Formula::Freeze(x.clone(), g.clone()));
        let wrap = |g: Formula| self.intern(&Formula::Freeze(x.clone(), Arc::new(g)));
        match &**body {
            Formula::True => Kind::True,
            Formula::False => Kind::False,
            Formula::Prop(p) => Kind::Lit { prop: self.prop_id(p), positive: true },
            Formula::Not(g) => match &**g {
                Formula::Prop(p) => Kind::Lit { prop: self.prop_id(p), positive: false },
                Formula::Cong { m, c, .. } => Kind::Sync { holds: c.rem_euclid(*m as i64) != 0 },
                other => panic!("formula not in negated normal form: !{other}"),
            },
            Formula::Rel { c, .. } => Kind::Sync { holds: *c >= 0 },
            Formula::Cong { m, c, .. } => Kind::Sync { holds: c.rem_euclid(*m as i64) == 0 },
            Formula::Abs { .. } => panic!("absolute constraint reached the tableau"),
            Formula::Implies(..) => panic!("implication reached the tableau"),
            Formula::And(a, b) => Kind::And(sub(a), sub(b)),
            Formula::Or(a, b) => Kind::Or(sub(a), sub(b)),
            Formula::Freeze(y, g) => Kind::Freeze(wrap(substitute(g, y, x))),
            Formula::Next(Bound::Infinite, g) | Formula::WeakNext(Bound::Infinite, g) => Kind::Next(sub(g)),
            Formula::Prev(Bound::Infinite, g) => Kind::Prev(sub(g)),
            Formula::WeakPrev(Bound::Infinite, g) => Kind::WeakPrev(sub(g)),
            Formula::Until(Bound::Infinite, a, b) => Kind::Until {
                left: sub(a),
                right: sub(b),
                next: wrap(Formula::Next(Bound::Infinite, body.clone())),
            },
            Formula::Release(Bound::Infinite, a, b) => Kind::Release {
                left: sub(a),
                right: sub(b),
                next: wrap(Formula::Next(Bound::Infinite, body.clone())),
            },
            Formula::Since(Bound::Infinite, a, b) => Kind::Since {
                left: sub(a),
                right: sub(b),
                prev: wrap(Formula::Prev(Bound::Infinite, body.clone())),
            },
            Formula::Triggered(Bound::Infinite, a, b) => Kind::Triggered {
                left: sub(a),
                right: sub(b),
                prev: wrap(Formula::WeakPrev(Bound::Infinite, body.clone())),
            },
            other => panic!("bounded operator reached the tableau: {other}"),
        }
    }

    /// Immediate closure successors, not counting shifted variants.
    pub fn closure_children(&self, id: FormulaId) -> Vec<FormulaId> {
        let mut out = match self.kind(id) {
            Kind::True | Kind::False | Kind::Lit { .. } | Kind::Sync { .. } => vec![],
            Kind::Next(a) | Kind::Prev(a) | Kind::WeakPrev(a) | Kind::Freeze(a) => vec![a],
            Kind::And(a, b) | Kind::Or(a, b) => vec![a, b],
            Kind::Until { left, right, next } | Kind::Release { left, right, next } => {
                vec![left, right, next]
            }
            Kind::Since { left, right, prev } | Kind::Triggered { left, right, prev } => {
                vec![left, right, prev]
            }
        };
        out.dedup();
        out
    }

    pub fn display(&self, id: FormulaId) -> String {
        self.formula(id).to_string()
    }
}

/// Canonical representative of a closed formula.
pub fn canonicalize(f: &Formula) -> Formula {
    let f = simplify(&decide_by_order(&normalize_constraints(f), false));
    let mut counter = 0usize;
    let f = rename(&f, &mut HashMap::new(), &mut counter);
    orient(&f)
}

fn normalize_constraints(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => match &**g {
            // !(a <= b + c) over the integers is b <= a - c - 1.
            Formula::Rel { lhs, rhs, c } => Formula::Rel { lhs: rhs.clone(), rhs: lhs.clone(), c: -c - 1 },
            Formula::Cong { .. } => Formula::not(normalize_constraints(g)),
            _ => map_children(f, normalize_constraints),
        },
        Formula::Cong { lhs, rhs, m, c } => {
            Formula::Cong { lhs: lhs.clone(), rhs: rhs.clone(), m: *m, c: c.rem_euclid((*m).max(1) as i64) }
        }
        _ => map_children(f, normalize_constraints),
    }
}

/// Where the current state lies relative to the state a variable was
/// bound at.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Order {
    Same,
    Later,
    Earlier,
    Unknown,
}

fn moved(o: Order, future: bool) -> Order {
    match (o, future) {
        (Order::Same | Order::Later, true) => Order::Later,
        (Order::Same | Order::Earlier, false) => Order::Earlier,
        _ => Order::Unknown,
    }
}

/// Decides constraints whose truth follows from binding order. The outer
/// variable of `x.psi` takes part only when `anchored`, i.e. when `x` is
/// known to hold the current timestamp; the future child of `x.X psi`
/// still carries the previous one until it is shifted.
pub(crate) fn decide_by_order(f: &Formula, anchored: bool) -> Formula {
    match f {
        // A bare constraint under the outer binder is left to the SYNC rule.
        Formula::Freeze(_, body) if matches!(**body, Formula::Rel { .. } | Formula::Cong { .. }) => f.clone(),
        Formula::Freeze(x, body) => {
            let top = if anchored { Order::Same } else { Order::Unknown };
            let mut scope = vec![(x.clone(), 0, top)];
            let body = decide_ordered(body, &mut scope, &mut HashMap::new());
            Formula::Freeze(x.clone(), Arc::new(body))
        }
        _ => decide_ordered(f, &mut Vec::new(), &mut HashMap::new()),
    }
}

/// Replaces constraints whose truth follows from the order in which their
/// variables were bound: a variable frozen below future operators only is
/// never earlier than the outer one, and symmetrically for past operators.
fn decide_ordered(
    f: &Formula,
    scope: &mut Vec<(Name, usize, Order)>,
    ord: &mut HashMap<(usize, usize), Order>,
) -> Formula {
    match f {
        Formula::Freeze(x, body) => {
            let id = scope.len();
            for &(_, a, o) in scope.iter() {
                ord.insert((a, id), o);
            }
            scope.push((x.clone(), id, Order::Same));
            let body = decide_ordered(body, scope, ord);
            scope.pop();
            Formula::Freeze(x.clone(), Arc::new(body))
        }
        Formula::Rel { lhs, rhs, c } => {
            if lhs == rhs {
                return if *c >= 0 { Formula::True } else { Formula::False };
            }
            let find = |v: &Name| scope.iter().rev().find(|e| &e.0 == v).map(|e| e.1);
            let (Some(u), Some(v)) = (find(lhs), find(rhs)) else {
                return f.clone();
            };
            // Relation of rhs's timestamp to lhs's.
            let o = match u.cmp(&v) {
                std::cmp::Ordering::Equal => return f.clone(),
                std::cmp::Ordering::Less => ord[&(u, v)],
                std::cmp::Ordering::Greater => match ord[&(v, u)] {
                    Order::Later => Order::Earlier,
                    Order::Earlier => Order::Later,
                    o => o,
                },
            };
            // lhs <= rhs + c
            match o {
                Order::Same => {
                    if *c >= 0 {
                        Formula::True
                    } else {
                        Formula::False
                    }
                }
                Order::Later if *c >= 0 => Formula::True,
                Order::Earlier if *c < 0 => Formula::False,
                _ => f.clone(),
            }
        }
        Formula::Cong { lhs, rhs, m, c } if lhs == rhs => {
            if c.rem_euclid(*m as i64) == 0 {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Next(..)
        | Formula::WeakNext(..)
        | Formula::Until(..)
        | Formula::Release(..)
        | Formula::Prev(..)
        | Formula::WeakPrev(..)
        | Formula::Since(..)
        | Formula::Triggered(..) => {
            let future = matches!(
                f,
                Formula::Next(..) | Formula::WeakNext(..) | Formula::Until(..) | Formula::Release(..)
            );
            let saved: Vec<Order> = scope.iter().map(|e| e.2).collect();
            for e in scope.iter_mut() {
                e.2 = moved(e.2, future);
            }
            let g = map_children(f, |g| decide_ordered(g, scope, ord));
            for (e, o) in scope.iter_mut().zip(saved) {
                e.2 = o;
            }
            g
        }
        _ => map_children(f, |g| decide_ordered(g, scope, ord)),
    }
}

fn rename(f: &Formula, env: &mut HashMap<Name, Name>, counter: &mut usize) -> Formula {
    let look = |v: &Name, env: &HashMap<Name, Name>| env.get(v).cloned().unwrap_or_else(|| v.clone());
    match f {
        Formula::Freeze(x, body) => {
            let nx = name(&format!("v{counter}"));
            *counter += 1;
            let saved = env.insert(x.clone(), nx.clone());
            let body = rename(body, env, counter);
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
        _ => map_children(f, |g| rename(g, env, counter)),
    }
}

fn var_index(v: &str) -> usize {
    v.strip_prefix('v').and_then(|s| s.parse().ok()).unwrap_or(usize::MAX)
}

fn orient(f: &Formula) -> Formula {
    match f {
        Formula::Cong { lhs, rhs, m, c } if var_index(lhs) > var_index(rhs) => {
            Formula::Cong { lhs: rhs.clone(), rhs: lhs.clone(), m: *m, c: (-c).rem_euclid(*m as i64) }
        }
        _ => map_children(f, orient),
    }
}
