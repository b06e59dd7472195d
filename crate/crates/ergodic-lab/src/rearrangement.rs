//! Exact non-increasing rearrangements and Hardy-Littlewood majorization.
//!
//! The rearrangement of a model function is a right-continuous step
//! function `t -> mu_t(f)` with finitely many strictly decreasing positive
//! values; at most the last step has infinite width. The value is zero past
//! the total width.

use std::collections::BTreeMap;

use num::traits::{Signed, Zero};

use crate::measure::{Part, SpaceFunction};
use crate::rational::{Extended, Rational};

/// One plateau of the rearrangement: `value` on an interval of length
/// `width`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub value: Rational,
    pub width: Extended,
}

/// The step form of `t -> mu_t(f)`; only positive values are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rearrangement {
    steps: Vec<Step>,
}

impl Rearrangement {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// `mu_t(f)` for `t > 0`; right-continuous, so each step covers the
    /// half-open interval starting at its left breakpoint.
    pub fn mu_at(&self, t: &Rational) -> Rational {
        assert!(t.is_positive(), "mu_at requires t > 0");
        let mut cum = Rational::zero();
        for step in &self.steps {
            match &step.width {
                Extended::Finite(w) => {
                    cum += w;
                    if *t < cum {
                        return step.value.clone();
                    }
                }
                Extended::Infinite => return step.value.clone(),
            }
        }
        Rational::zero()
    }

    /// Cumulative right endpoints of the finite steps.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut cum = Rational::zero();
        for step in &self.steps {
            match &step.width {
                Extended::Finite(w) => {
                    cum += w;
                    out.push(cum.clone());
                }
                Extended::Infinite => break,
            }
        }
        out
    }

    /// Exact `integral of mu_t over (0, s)`, `s >= 0`.
    pub fn integral_to(&self, s: &Rational) -> Rational {
        assert!(!s.is_negative());
        let mut remaining = s.clone();
        let mut total = Rational::zero();
        for step in &self.steps {
            if remaining.is_zero() {
                break;
            }
            match &step.width {
                Extended::Finite(w) => {
                    let take = if remaining < *w {
                        remaining.clone()
                    } else {
                        w.clone()
                    };
                    total += &step.value * &take;
                    remaining -= take;
                }
                Extended::Infinite => {
                    total += &step.value * &remaining;
                    remaining = Rational::zero();
                }
            }
        }
        total
    }

    /// `lim_{t -> inf} mu_t(f)`: the value of the infinite step, or zero.
    pub fn tail_value(&self) -> Rational {
        match self.steps.last() {
            Some(step) if step.width.is_infinite() => step.value.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn has_infinite_step(&self) -> bool {
        self.steps
            .last()
            .is_some_and(|step| step.width.is_infinite())
    }

    /// Lebesgue measure of `{ t : mu_t > lambda }`.
    pub fn measure_above(&self, lambda: &Rational) -> Extended {
        let mut total = Extended::zero();
        for step in &self.steps {
            if step.value > *lambda {
                total += step.width.clone();
            }
        }
        total
    }

    /// `integral of self <= integral of other` at every `s > 0`. Both sides
    /// are piecewise linear and concave, so comparing at the union of
    /// breakpoints plus the final slopes is exact.
    fn submajorized_by(&self, other: &Rearrangement) -> bool {
        if self.tail_value() > other.tail_value() {
            return false;
        }
        let mut knots = self.breakpoints();
        knots.extend(other.breakpoints());
        knots.sort();
        knots.dedup();
        knots
            .iter()
            .all(|s| self.integral_to(s) <= other.integral_to(s))
    }
}

/// Builds the rearrangement of `f` by sorting the finitely many distinct
/// absolute values with their total level-set measures.
pub fn rearrange(f: &SpaceFunction) -> Rearrangement {
    let mut measures: BTreeMap<Rational, Extended> = BTreeMap::new();
    let mut record = |value: Rational, m: Extended| {
        let entry = measures.entry(value).or_insert_with(Extended::zero);
        *entry += m;
    };
    for part in [Part::Cell, Part::Atom] {
        if let Some(seq) = f.values(part) {
            let weight = match part {
                Part::Cell => Rational::from_integer(1.into()),
                Part::Atom => f
                    .space()
                    .atom_weight()
                    .cloned()
                    .expect("atom part implies atom weight"),
                Part::Exceptional => unreachable!(),
            };
            for v in seq.prefix() {
                if !v.is_zero() {
                    record(v.abs(), Extended::Finite(weight.clone()));
                }
            }
            for v in seq.period() {
                if !v.is_zero() {
                    record(v.abs(), Extended::Infinite);
                }
            }
        }
    }
    for (v, w) in f
        .exceptional_values()
        .iter()
        .zip(f.space().exceptional_atoms())
    {
        if !v.is_zero() {
            record(v.abs(), Extended::Finite(w.clone()));
        }
    }

    let mut steps = Vec::new();
    for (value, measure) in measures.into_iter().rev() {
        match measure {
            Extended::Finite(w) => steps.push(Step {
                value,
                width: Extended::Finite(w),
            }),
            Extended::Infinite => {
                steps.push(Step {
                    value,
                    width: Extended::Infinite,
                });
                break;
            }
        }
    }
    Rearrangement { steps }
}

/// Hardy-Littlewood majorization `g prec-prec f`: the integral of `mu(g)`
/// over `(0, s)` never exceeds that of `mu(f)`.
pub fn majorizes(f: &SpaceFunction, g: &SpaceFunction) -> bool {
    rearrange(g).submajorized_by(&rearrange(f))
}

/// Same check on precomputed rearrangements; `f` is the majorant.
pub fn majorizes_rearranged(f: &Rearrangement, g: &Rearrangement) -> bool {
    g.submajorized_by(f)
}
