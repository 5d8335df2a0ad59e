//! Embedding of bounded TPTL with past into the guarded fragment: every
//! bounded operator becomes an unbounded one whose operands are guarded by
//! a constraint between two fresh variables.

use std::sync::Arc;

use crate::formula::{map_children, Bound, Formula, Fresh, Name};

/// Translates a well-formed, alpha-renamed bounded formula. Unbounded
/// operators are kept as they are.
pub fn to_gtptlp(f: &Formula) -> Formula {
    let mut fresh = Fresh::new(f.all_vars());
    go(f, &mut fresh)
}

fn go(f: &Formula, fresh: &mut Fresh) -> Formula {
    use Formula::*;
    let Some(Bound::Finite(w)) = f.bound() else {
        return map_children(f, |g| go(g, fresh));
    };
    let w = w as i64;
    let x = fresh.make("g");
    let y = fresh.make("g");
    // Future guards say the other state is at most w after x, past guards
    // that it is at most w before.
    let fut = |v: &Name| Formula::Rel { lhs: v.clone(), rhs: x.clone(), c: w };
    let past = |v: &Name| Formula::Rel { lhs: x.clone(), rhs: v.clone(), c: w };
    let fz = |v: &Name, body: Formula| Formula::Freeze(v.clone(), Arc::new(body));
    let inf = Bound::Infinite;
    let body = match f {
        Next(_, a) => Next(inf, Arc::new(fz(&y, Formula::and(fut(&y), go(a, fresh))))),
        WeakNext(_, a) => Next(inf, Arc::new(fz(&y, Formula::implies(fut(&y), go(a, fresh))))),
        Prev(_, a) => Prev(inf, Arc::new(fz(&y, Formula::and(past(&y), go(a, fresh))))),
        WeakPrev(_, a) => WeakPrev(inf, Arc::new(fz(&y, Formula::implies(past(&y), go(a, fresh))))),
        Until(_, a, b) | Release(_, a, b) | Since(_, a, b) | Triggered(_, a, b) => {
            let z = fresh.make("g");
            let is_past = matches!(f, Since(..) | Triggered(..));
            let guard = |v: &Name| if is_past { past(v) } else { fut(v) };
            let (a, b) = (go(a, fresh), go(b, fresh));
            let (left, right) = if matches!(f, Until(..) | Since(..)) {
                (Formula::implies(guard(&z), a), Formula::and(guard(&y), b))
            } else {
                (Formula::and(guard(&z), a), Formula::implies(guard(&y), b))
            };
            let (left, right) = (Arc::new(fz(&z, left)), Arc::new(fz(&y, right)));
            match f {
                Until(..) => Until(inf, left, right),
                Release(..) => Release(inf, left, right),
                Since(..) => Since(inf, left, right),
                _ => Triggered(inf, left, right),
            }
        }
        _ => unreachable!("only temporal operators carry bounds"),
    };
    fz(&x, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::closure::canonicalize;
    use crate::formula::{check_wellformed, Logic};
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap().root
    }

    fn same(a: &Formula, b: &Formula) -> bool {
        canonicalize(&Formula::freeze("r", a.clone())) == canonicalize(&Formula::freeze("r", b.clone()))
    }

    #[test]
    fn next_forms() {
        assert!(same(&to_gtptlp(&p("X[2] p")), &p("x. X y. (y <= x + 2 & p)")));
        assert!(same(&to_gtptlp(&p("WX[2] p")), &p("x. X y. (y <= x + 2 -> p)")));
        assert_eq!(to_gtptlp(&p("X p")), p("X p"));
    }

    #[test]
    fn until_form() {
        assert!(same(&to_gtptlp(&p("p U[3] q")), &p("x. ((z. (z <= x + 3 -> p)) U y. (y <= x + 3 & q))")));
    }

    #[test]
    fn past_forms_guard_backwards() {
        assert!(same(&to_gtptlp(&p("Y[1] p")), &p("x. Y y. (x <= y + 1 & p)")));
        assert!(same(&to_gtptlp(&p("WY[1] p")), &p("x. WY y. (x <= y + 1 -> p)")));
    }

    #[test]
    fn output_is_guarded_and_closed() {
        let f = to_gtptlp(&p("x. (p U[2] y. (y <= x + 1 & Y[1] q))"));
        assert!(f.is_closed());
        assert!(check_wellformed(&f, Logic::Gtptlp, None).is_ok());
        assert!(f.preorder().iter().all(|g| g.bound() != Some(Bound::Finite(2))));
    }
}
