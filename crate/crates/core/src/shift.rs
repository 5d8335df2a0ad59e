//! Temporal shift of closed formulae: `x.psi^d` behaves at the current state
//! like `psi` with `x` bound `d` time units in the past.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::formula::closure::{canonicalize, decide_by_order, Closure, FormulaId};
use crate::formula::{map_children, Bound, Formula, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Future-only logic; constraints collapse as soon as their sign is decided.
    Tptl,
    /// Guarded fragment; constraints collapse once beyond the window.
    Gtptlp { window: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ShiftError {
    #[error("negative shift {0} is undefined for future-only formulae")]
    NegativeDelta(i64),
    #[error("shift applied to a formula that is not a closed freeze quantification")]
    NotFreeze,
}

/// `max(w_1, ..., w_m, delta) * (m + 1)` where `m` is the number of bounds.
pub fn window(bounds: &[u64], delta_phi: u64) -> u64 {
    let w0 = bounds.iter().copied().fold(delta_phi, u64::max);
    w0.saturating_mul(bounds.len() as u64 + 1)
}

/// Finite bounds of the guarded temporal operators of a formula.
pub fn guarded_bounds(f: &Formula) -> Vec<u64> {
    f.preorder()
        .into_iter()
        .filter_map(|g| match g.bound() {
            Some(Bound::Finite(w)) => Some(w),
            _ => None,
        })
        .collect()
}

/// Applies the shift to a closed formula `x.psi` and returns its canonical form.
pub fn shift_formula(f: &Formula, delta: i64, variant: Variant) -> Result<Formula, ShiftError> {
    if variant == Variant::Tptl && delta < 0 {
        return Err(ShiftError::NegativeDelta(delta));
    }
    match f {
        Formula::True | Formula::False => Ok(f.clone()),
        Formula::Freeze(x, body) => {
            let body = rewrite(body, x, delta, variant);
            Ok(canonicalize(&Formula::Freeze(x.clone(), Arc::new(body))))
        }
        _ => Err(ShiftError::NotFreeze),
    }
}

fn rewrite(f: &Formula, x: &Name, delta: i64, variant: Variant) -> Formula {
    match f {
        // An inner binder of the same name shadows the outer variable.
        Formula::Freeze(y, _) if y == x => f.clone(),
        Formula::Rel { lhs, rhs, c } if lhs != rhs && (lhs == x || rhs == x) => {
            let outer_left = lhs == x;
            let c = if outer_left { c + delta } else { c - delta };
            match variant {
                Variant::Tptl if outer_left && c >= 0 => Formula::True,
                Variant::Tptl if !outer_left && c < 0 => Formula::False,
                Variant::Gtptlp { window } if c >= window as i64 => Formula::True,
                Variant::Gtptlp { window } if c < -(window as i64) => Formula::False,
                _ => Formula::Rel { lhs: lhs.clone(), rhs: rhs.clone(), c },
            }
        }
        Formula::Cong { lhs, rhs, m, c } if lhs != rhs && (lhs == x || rhs == x) => {
            let c = if lhs == x { c + delta } else { c - delta };
            Formula::Cong { lhs: lhs.clone(), rhs: rhs.clone(), m: *m, c: c.rem_euclid(*m as i64) }
        }
        _ => map_children(f, |g| rewrite(g, x, delta, variant)),
    }
}

/// Shift operator over interned formulae, memoized per `(id, delta)`.
pub struct Shifter {
    variant: Variant,
    memo: RwLock<HashMap<(FormulaId, i64), FormulaId>>,
    anchored: RwLock<HashMap<(FormulaId, i64), FormulaId>>,
}

impl Shifter {
    pub fn new(variant: Variant) -> Shifter {
        Shifter { variant, memo: RwLock::default(), anchored: RwLock::default() }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn shift(&self, closure: &Closure, id: FormulaId, delta: i64) -> Result<FormulaId, ShiftError> {
        if self.variant == Variant::Tptl && delta < 0 {
            return Err(ShiftError::NegativeDelta(delta));
        }
        if let Some(r) = self.memo.read().unwrap().get(&(id, delta)) {
            return Ok(*r);
        }
        let shifted = shift_formula(&closure.formula(id), delta, self.variant)?;
        let r = closure.intern(&shifted);
        self.memo.write().unwrap().insert((id, delta), r);
        Ok(r)
    }

    /// Shift followed by the collapse that is valid once the outer variable
    /// is bound at the current state, as it is for every formula of a label.
    /// Unlike `shift`, composing two of these is not the same as one shift
    /// by the sum.
    pub fn shift_anchored(
        &self,
        closure: &Closure,
        id: FormulaId,
        delta: i64,
    ) -> Result<FormulaId, ShiftError> {
        if let Some(r) = self.anchored.read().unwrap().get(&(id, delta)) {
            return Ok(*r);
        }
        let plain = self.shift(closure, id, delta)?;
        let r = closure.intern(&canonicalize(&decide_by_order(&closure.formula(plain), true)));
        self.anchored.write().unwrap().insert((id, delta), r);
        Ok(r)
    }

    /// Shift amount beyond which every relative constraint has collapsed.
    pub fn convergence_bound(&self, closure: &Closure, id: FormulaId) -> i64 {
        convergence_bound(&closure.formula(id), self.variant)
    }
}

pub fn convergence_bound(f: &Formula, variant: Variant) -> i64 {
    let max_c = f
        .preorder()
        .into_iter()
        .filter_map(|g| match g {
            Formula::Rel { c, .. } | Formula::Cong { c, .. } => Some(c.unsigned_abs() as i64),
            _ => None,
        })
        .max();
    match (max_c, variant) {
        (None, _) => 0,
        (Some(c), Variant::Tptl) => c + 1,
        (Some(c), Variant::Gtptlp { window }) => c + window as i64 + 1,
    }
}
