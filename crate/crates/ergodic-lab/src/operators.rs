//! The closed algebra of Dunford-Schwartz operators on the canonical
//! models, a runtime verifier for the defining contractions, and the
//! Cesaro-average engine.
//!
//! Every constructor is a DS operator by structure: multipliers are bounded
//! by one and composed with injective maps that do not expand measure on
//! equal-weight parts, and block expectations average with weights summing
//! to one. `verify_ds` re-checks the contractions and Hardy-Littlewood
//! domination on sample functions anyway.

use num::integer::lcm;
use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::{EvSeq, Location, Part, SpaceFunction, SpaceModel};
use crate::rational::{Extended, Rational};
use crate::rearrangement::majorizes;
use crate::spaces::{norm_l1, norm_linf};

/// An eventually periodic subset of the 1-based indices of one part,
/// stored as a 0/1 indicator sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    indicator: EvSeq,
}

impl IndexSet {
    pub fn new(indicator: EvSeq) -> Result<Self> {
        let valid = |v: &Rational| v.is_zero() || v.is_one();
        if !indicator.prefix().iter().all(valid) || !indicator.period().iter().all(valid) {
            return Err(Error::Domain("index set indicator must be 0/1".into()));
        }
        Ok(IndexSet { indicator })
    }

    /// All indices.
    pub fn all() -> Self {
        IndexSet {
            indicator: EvSeq::constant(Rational::one()),
        }
    }

    pub fn indicator(&self) -> &EvSeq {
        &self.indicator
    }

    pub fn contains(&self, n: u64) -> bool {
        self.indicator.value_at(n).is_one()
    }

    /// Infinite exactly when a member recurs in the period.
    pub fn is_infinite(&self) -> bool {
        self.indicator.period().iter().any(|v| v.is_one())
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<u64> {
        let horizon = self.indicator.prefix_len() + self.indicator.period_len();
        (1..=horizon).find(|&n| self.contains(n))
    }

    /// Smallest member strictly greater than `n`.
    pub fn next_after(&self, n: u64) -> Option<u64> {
        let limit = n.max(self.indicator.prefix_len()) + self.indicator.period_len();
        (n + 1..=limit).find(|&m| self.contains(m))
    }

    /// `k`-th member in increasing order (1-based).
    pub fn nth(&self, k: u64) -> Option<u64> {
        assert!(k >= 1);
        let plen = self.indicator.prefix_len();
        let llen = self.indicator.period_len();
        let mut remaining = k;
        for n in 1..=plen {
            if self.contains(n) {
                remaining -= 1;
                if remaining == 0 {
                    return Some(n);
                }
            }
        }
        let period_hits: Vec<u64> = (plen + 1..=plen + llen)
            .filter(|&n| self.contains(n))
            .map(|n| n - plen)
            .collect();
        if period_hits.is_empty() {
            return None;
        }
        let per = period_hits.len() as u64;
        let full_cycles = (remaining - 1) / per;
        let offset = period_hits[((remaining - 1) % per) as usize];
        Some(plen + full_cycles * llen + offset)
    }
}

/// Location map within one part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauMap {
    Identity,
    /// Successor along an infinite eventually periodic set; identity off it.
    ShiftWithin(IndexSet),
    /// Fixed permutation of `1..=len`; identity beyond.
    Permutation(Vec<u64>),
}

impl TauMap {
    pub fn image(&self, n: u64) -> u64 {
        match self {
            TauMap::Identity => n,
            TauMap::ShiftWithin(set) => {
                if set.contains(n) {
                    set.next_after(n)
                        .expect("shift set is infinite by construction")
                } else {
                    n
                }
            }
            TauMap::Permutation(perm) => {
                if n >= 1 && n <= perm.len() as u64 {
                    perm[(n - 1) as usize]
                } else {
                    n
                }
            }
        }
    }

    fn prefix_bound(&self) -> u64 {
        match self {
            TauMap::Identity => 0,
            TauMap::ShiftWithin(set) => set.indicator.prefix_len(),
            TauMap::Permutation(perm) => perm.len() as u64,
        }
    }

    fn period_bound(&self) -> u64 {
        match self {
            TauMap::ShiftWithin(set) => set.indicator.period_len(),
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            TauMap::Identity => Ok(()),
            TauMap::ShiftWithin(set) => {
                if set.is_infinite() {
                    Ok(())
                } else {
                    Err(Error::Domain("shift requires an infinite index set".into()))
                }
            }
            TauMap::Permutation(perm) => {
                let len = perm.len() as u64;
                let mut seen = vec![false; perm.len()];
                for &p in perm {
                    if p == 0 || p > len || seen[(p - 1) as usize] {
                        return Err(Error::Domain("not a permutation of 1..=len".into()));
                    }
                    seen[(p - 1) as usize] = true;
                }
                Ok(())
            }
        }
    }
}

/// A Dunford-Schwartz operator on a canonical model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DSOperator {
    /// `T(g)(x) = phi(x) * g(tau(x))` on one infinite part; off that part
    /// the operator acts as the identity, or as zero when the flag is set.
    Multiplier {
        part: Part,
        phi: EvSeq,
        tau: TauMap,
        zero_off_part: bool,
    },
    /// Conditional expectation onto consecutive blocks of `block_size`
    /// cells/atoms of one part; identity elsewhere.
    BlockExpectation { part: Part, block_size: u64 },
    /// `T(g) = inner(e g)` restricted to the support part `e`.
    Lift {
        support: Part,
        inner: Box<DSOperator>,
    },
    /// `outer` after `inner`.
    Compose {
        outer: Box<DSOperator>,
        inner: Box<DSOperator>,
    },
}

/// One verified sample in a [`DsReport`].
#[derive(Debug, Clone)]
pub struct DsCheck {
    pub sample: usize,
    pub l1_in: Extended,
    pub l1_out: Extended,
    pub l1_ok: bool,
    pub linf_in: Rational,
    pub linf_out: Rational,
    pub linf_ok: bool,
    pub majorization_ok: bool,
}

impl DsCheck {
    pub fn ok(&self) -> bool {
        self.l1_ok && self.linf_ok && self.majorization_ok
    }
}

/// Outcome of [`DSOperator::verify_ds`]: violations are entries, not errors.
#[derive(Debug, Clone, Default)]
pub struct DsReport {
    pub checks: Vec<DsCheck>,
}

impl DsReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(DsCheck::ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &DsCheck> {
        self.checks.iter().filter(|c| !c.ok())
    }
}

impl DSOperator {
    /// Multiplier-composition operator; enforces `|phi| <= 1`, a valid
    /// location map, and an infinite part to act on.
    pub fn multiplier(part: Part, phi: EvSeq, tau: TauMap, zero_off_part: bool) -> Result<Self> {
        if part == Part::Exceptional {
            return Err(Error::Domain(
                "multiplier operators act on the cell or atom part".into(),
            ));
        }
        let bounded = |v: &Rational| v.abs() <= Rational::one();
        if !phi.prefix().iter().all(bounded) || !phi.period().iter().all(bounded) {
            return Err(Error::Domain("multiplier must satisfy |phi| <= 1".into()));
        }
        tau.validate()?;
        Ok(DSOperator::Multiplier {
            part,
            phi,
            tau,
            zero_off_part,
        })
    }

    /// Test backdoor: skips the `|phi| <= 1` check so the verifier can be
    /// exercised on a non-contraction.
    #[doc(hidden)]
    pub fn multiplier_unchecked(part: Part, phi: EvSeq, tau: TauMap, zero_off_part: bool) -> Self {
        DSOperator::Multiplier {
            part,
            phi,
            tau,
            zero_off_part,
        }
    }

    /// Identity on the whole model, hosted on `part`.
    pub fn identity_on(part: Part) -> Result<Self> {
        Self::multiplier(
            part,
            EvSeq::constant(Rational::one()),
            TauMap::Identity,
            false,
        )
    }

    /// Conditional expectation onto consecutive `block_size`-blocks of
    /// `part`: positive, unital, idempotent and integral preserving.
    pub fn block_expectation(space: &SpaceModel, block_size: u64, part: Part) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::Precondition("block size must be >= 1".into()));
        }
        if part == Part::Exceptional {
            return Err(Error::Domain(
                "block expectations act on the cell or atom part".into(),
            ));
        }
        if !space.has_part(part) {
            return Err(Error::Domain(format!("model has no {part} part")));
        }
        Ok(DSOperator::BlockExpectation { part, block_size })
    }

    /// `T~(g) = inner(e g)` with `e` the selector of `support`; the lifted
    /// operator annihilates everything off the support.
    pub fn lift(inner: DSOperator, support: Part) -> DSOperator {
        DSOperator::Lift {
            support,
            inner: Box::new(inner),
        }
    }

    pub fn compose(outer: DSOperator, inner: DSOperator) -> DSOperator {
        DSOperator::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    /// Pointwise image of `f`; the result stays eventually periodic.
    pub fn apply(&self, f: &SpaceFunction) -> Result<SpaceFunction> {
        match self {
            DSOperator::Multiplier {
                part,
                phi,
                tau,
                zero_off_part,
            } => {
                let seq = f.values(*part).ok_or_else(|| {
                    Error::Domain(format!("model has no {part} part for the multiplier"))
                })?;
                let plen = phi
                    .prefix_len()
                    .max(seq.prefix_len())
                    .max(tau.prefix_bound());
                let llen = lcm(lcm(phi.period_len(), seq.period_len()), tau.period_bound());
                let out = EvSeq::from_fn(plen, llen, |n| {
                    mul_multiplier(phi.value_at(n), seq.value_at(tau.image(n)))
                });
                let mut result = if *zero_off_part {
                    SpaceFunction::zero(f.space().clone())
                } else {
                    f.clone()
                };
                result = replace_part(result, *part, out)?;
                Ok(result)
            }
            DSOperator::BlockExpectation { part, block_size } => {
                let seq = f.values(*part).ok_or_else(|| {
                    Error::Domain(format!("model has no {part} part for the expectation"))
                })?;
                let b = *block_size;
                let plen = seq.prefix_len().div_ceil(b) * b;
                let llen = lcm(seq.period_len(), b);
                let divisor = Rational::from_integer(b.into());
                let out = EvSeq::from_fn(plen, llen, |n| {
                    let start = ((n - 1) / b) * b + 1;
                    let mut sum = Rational::zero();
                    for i in start..start + b {
                        sum += seq.value_at(i);
                    }
                    sum / &divisor
                });
                replace_part(f.clone(), *part, out)
            }
            DSOperator::Lift { support, inner } => {
                let restricted = f.only(*support);
                Ok(inner.apply(&restricted)?.only(*support))
            }
            DSOperator::Compose { outer, inner } => outer.apply(&inner.apply(f)?),
        }
    }

    /// Checks the two norm contractions and `Tf prec-prec f` exactly on
    /// each sample; violations become report entries.
    pub fn verify_ds(&self, samples: &[SpaceFunction]) -> Result<DsReport> {
        let mut report = DsReport::default();
        for (i, f) in samples.iter().enumerate() {
            let tf = self.apply(f)?;
            let l1_in = norm_l1(f);
            let l1_out = norm_l1(&tf);
            let linf_in = norm_linf(f);
            let linf_out = norm_linf(&tf);
            report.checks.push(DsCheck {
                sample: i,
                l1_ok: l1_out <= l1_in,
                linf_ok: linf_out <= linf_in,
                majorization_ok: majorizes(f, &tf),
                l1_in,
                l1_out,
                linf_in,
                linf_out,
            });
        }
        Ok(report)
    }

    /// Cesaro average `A_n(T, f) = (1/n) sum of T^k f, k < n`, exact.
    pub fn ergodic_average(&self, f: &SpaceFunction, n: u64) -> Result<SpaceFunction> {
        if n == 0 {
            return Err(Error::Precondition("average order must be >= 1".into()));
        }
        let mut acc = f.clone();
        let mut current = f.clone();
        for _ in 1..n {
            current = self.apply(&current)?;
            acc = acc.add(&current)?;
        }
        Ok(acc.scale(&Rational::new(1.into(), n.into())))
    }

    /// `A_n(T, f)(loc)` for each requested `n`, computed incrementally:
    /// multiplier operators walk the tau-orbit with a running sign product,
    /// structurally idempotent operators use `A_n = (f + (n-1) Tf) / n`,
    /// and everything else iterates `apply`.
    pub fn averages_at(
        &self,
        f: &SpaceFunction,
        loc: &Location,
        ns: &[u64],
    ) -> Result<Vec<Rational>> {
        if ns.is_empty() {
            return Ok(Vec::new());
        }
        if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "average orders must be strictly increasing and >= 1".into(),
            ));
        }
        if let Some((part, phi, tau, zero_off)) = self.orbit_form() {
            return self.orbit_averages(f, loc, ns, part, phi, tau, zero_off);
        }
        if self.structurally_idempotent() {
            let base = f.eval(loc)?;
            let image = self.apply(f)?.eval(loc)?;
            return Ok(ns
                .iter()
                .map(|&n| {
                    let nr = Rational::from_integer(n.into());
                    (&base + &image * (&nr - Rational::one())) / nr
                })
                .collect());
        }
        // General fallback: iterate the operator, tracking the value at loc.
        let n_max = *ns.last().expect("nonempty");
        let mut results = Vec::with_capacity(ns.len());
        let mut sum = f.eval(loc)?;
        let mut current = f.clone();
        let mut want = ns.iter().peekable();
        for k in 1..=n_max {
            if let Some(&&n) = want.peek() {
                if n == k {
                    results.push(&sum / Rational::from_integer(k.into()));
                    want.next();
                }
            }
            if k == n_max {
                break;
            }
            current = self.apply(&current)?;
            sum += current.eval(loc)?;
        }
        Ok(results)
    }

    /// Multiplier shape usable for orbit walking, unwrapping a single lift
    /// whose support is the acting part.
    fn orbit_form(&self) -> Option<(Part, &EvSeq, &TauMap, bool)> {
        match self {
            DSOperator::Multiplier {
                part,
                phi,
                tau,
                zero_off_part,
            } => Some((*part, phi, tau, *zero_off_part)),
            DSOperator::Lift { support, inner } => match inner.as_ref() {
                DSOperator::Multiplier { part, phi, tau, .. } if part == support => {
                    Some((*part, phi, tau, true))
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn structurally_idempotent(&self) -> bool {
        match self {
            DSOperator::BlockExpectation { .. } => true,
            DSOperator::Lift { inner, .. } => inner.structurally_idempotent(),
            _ => false,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn orbit_averages(
        &self,
        f: &SpaceFunction,
        loc: &Location,
        ns: &[u64],
        part: Part,
        phi: &EvSeq,
        tau: &TauMap,
        zero_off: bool,
    ) -> Result<Vec<Rational>> {
        let base = f.eval(loc)?;
        if loc.part != part {
            // Off the acting part the operator is the identity or zero.
            return Ok(ns
                .iter()
                .map(|&n| {
                    if zero_off {
                        &base / Rational::from_integer(n.into())
                    } else {
                        base.clone()
                    }
                })
                .collect());
        }
        let seq = f
            .values(part)
            .ok_or_else(|| Error::Domain(format!("model has no {part} part")))?;
        let n_max = *ns.last().expect("nonempty");
        let mut results = Vec::with_capacity(ns.len());
        let mut want = ns.iter().peekable();
        let mut sum = base;
        let mut product = Rational::one();
        let mut x = loc.index;
        for k in 1..=n_max {
            if let Some(&&n) = want.peek() {
                if n == k {
                    results.push(&sum / Rational::from_integer(k.into()));
                    want.next();
                }
            }
            if k == n_max {
                break;
            }
            if !product.is_zero() {
                product = mul_multiplier(phi.value_at(x), &product);
                x = tau.image(x);
                if !product.is_zero() {
                    sum += mul_multiplier(&product, seq.value_at(x));
                }
            }
        }
        Ok(results)
    }
}

/// `phi * v` with fast paths for the 0 and +/-1 multipliers the
/// constructions produce.
fn mul_multiplier(phi: &Rational, v: &Rational) -> Rational {
    if phi.is_zero() || v.is_zero() {
        Rational::zero()
    } else if phi.is_one() {
        v.clone()
    } else if (-phi).is_one() {
        -v
    } else {
        phi * v
    }
}

fn replace_part(f: SpaceFunction, part: Part, values: EvSeq) -> Result<SpaceFunction> {
    let space = f.space().clone();
    let (mut cell, mut atom) = (f.values(Part::Cell).cloned(), f.values(Part::Atom).cloned());
    match part {
        Part::Cell => cell = Some(values),
        Part::Atom => atom = Some(values),
        Part::Exceptional => {
            return Err(Error::Representation(
                "exceptional part holds plain values, not sequences".into(),
            ))
        }
    }
    SpaceFunction::new(space, cell, atom, f.exceptional_values().to_vec())
}
