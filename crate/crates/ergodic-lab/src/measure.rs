//! Canonical quasi-non-atomic measure models and the functions living on
//! them.
//!
//! A model has up to three parts: countably many unit-measure cells,
//! countably many atoms sharing a single weight, and finitely many
//! exceptional atoms with individual weights. A model is quasi-non-atomic:
//! either the atomic part is the finite exceptional list, or it consists of
//! equal-weight atoms and nothing else.
//!
//! Functions are constant on each cell/atom and are stored per part as
//! eventually periodic value sequences. That representation is closed under
//! every operation in the library and makes level-set measures, norms and
//! membership predicates exactly decidable.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::integer::lcm;
use num::traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{Extended, Rational};

/// Eventually periodic sequence of rationals, 1-indexed.
///
/// The value at index `n` is `prefix[n-1]` while `n <= prefix.len()`, and
/// cycles through `period` afterwards. Construction normalizes to the
/// canonical form (minimal period, prefix not extendable into the period),
/// so structural equality is equality as sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvSeq {
    prefix: Vec<Rational>,
    period: Vec<Rational>,
}

impl EvSeq {
    pub fn new(prefix: Vec<Rational>, period: Vec<Rational>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Representation("period must be nonempty".into()));
        }
        Ok(Self::normalized(prefix, period))
    }

    fn normalized(mut prefix: Vec<Rational>, mut period: Vec<Rational>) -> Self {
        // Minimal period: smallest divisor of the length that tiles it.
        let len = period.len();
        for d in 1..=len {
            if len.is_multiple_of(d) && (d..len).all(|i| period[i] == period[i % d]) {
                period.truncate(d);
                break;
            }
        }
        // Absorb the prefix tail into the period by rotating.
        while let Some(last) = prefix.last() {
            if last == period.last().expect("nonempty period") {
                prefix.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        EvSeq { prefix, period }
    }

    /// Constant sequence.
    pub fn constant(value: Rational) -> Self {
        Self::normalized(Vec::new(), vec![value])
    }

    /// Finitely supported sequence: `values` then zeros forever.
    pub fn finite(values: Vec<Rational>) -> Self {
        Self::normalized(values, vec![Rational::zero()])
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    /// Value at 1-based index `n`.
    pub fn value_at(&self, n: u64) -> &Rational {
        assert!(n >= 1, "indices are 1-based");
        let plen = self.prefix.len() as u64;
        if n <= plen {
            &self.prefix[(n - 1) as usize]
        } else {
            let off = (n - plen - 1) % self.period.len() as u64;
            &self.period[off as usize]
        }
    }

    pub fn prefix(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn period(&self) -> &[Rational] {
        &self.period
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn period_len(&self) -> u64 {
        self.period.len() as u64
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.iter().all(Zero::is_zero) && self.period.iter().all(Zero::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> EvSeq {
        Self::normalized(
            self.prefix.iter().map(&f).collect(),
            self.period.iter().map(&f).collect(),
        )
    }

    /// Pointwise combination; the result has prefix `max` and period `lcm`
    /// of the operands before normalization.
    pub fn zip_with(&self, other: &EvSeq, f: impl Fn(&Rational, &Rational) -> Rational) -> EvSeq {
        let plen = self.prefix_len().max(other.prefix_len());
        let llen = lcm(self.period_len(), other.period_len());
        Self::from_fn(plen, llen, |n| f(self.value_at(n), other.value_at(n)))
    }

    /// Materializes `f(1), f(2), ...` as a sequence that the caller
    /// guarantees to be periodic with period `period_len` after
    /// `prefix_len`. Debug builds probe the claim.
    pub(crate) fn from_fn(prefix_len: u64, period_len: u64, f: impl Fn(u64) -> Rational) -> EvSeq {
        assert!(period_len >= 1);
        let prefix: Vec<Rational> = (1..=prefix_len).map(&f).collect();
        let period: Vec<Rational> = (prefix_len + 1..=prefix_len + period_len).map(&f).collect();
        #[cfg(debug_assertions)]
        for j in 1..=period_len.min(3) {
            debug_assert_eq!(
                f(prefix_len + j),
                f(prefix_len + period_len + j),
                "from_fn: claimed period {period_len} does not hold at offset {j}"
            );
        }
        Self::normalized(prefix, period)
    }

    /// All values that occur somewhere in the sequence.
    pub fn distinct_values(&self) -> BTreeSet<Rational> {
        self.prefix
            .iter()
            .chain(self.period.iter())
            .cloned()
            .collect()
    }
}

/// Which part of a model a location lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Cell,
    Atom,
    Exceptional,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Part::Cell => "cell",
            Part::Atom => "atom",
            Part::Exceptional => "exceptional",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cell" => Ok(Part::Cell),
            "atom" => Ok(Part::Atom),
            "exceptional" => Ok(Part::Exceptional),
            other => Err(Error::Parse(format!(
                "unknown part `{other}` (expected cell, atom or exceptional)"
            ))),
        }
    }
}

/// A point of the model: part tag plus 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Location {
    pub part: Part,
    pub index: u64,
}

impl Location {
    pub fn new(part: Part, index: u64) -> Self {
        Location { part, index }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.part, self.index)
    }
}

impl FromStr for Location {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (part, index) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected part:index, got `{s}`")))?;
        let part: Part = part.parse()?;
        let index: u64 = index
            .parse()
            .map_err(|_| Error::Parse(format!("invalid index in `{s}`")))?;
        if index == 0 {
            return Err(Error::Parse("indices are 1-based".into()));
        }
        Ok(Location { part, index })
    }
}

/// A quasi-non-atomic sigma-finite measure model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceModel {
    cells: bool,
    atom_weight: Option<Rational>,
    exceptional_atoms: Vec<Rational>,
}

impl SpaceModel {
    pub fn new(
        cells: bool,
        atom_weight: Option<Rational>,
        exceptional_atoms: Vec<Rational>,
    ) -> Result<Self> {
        if let Some(w) = &atom_weight {
            if !w.is_positive() {
                return Err(Error::Domain("atom weight must be positive".into()));
            }
            if !exceptional_atoms.is_empty() {
                return Err(Error::Domain(
                    "a model with infinitely many equal atoms cannot also have \
                     exceptional atoms (quasi-non-atomic)"
                        .into(),
                ));
            }
        }
        if exceptional_atoms.iter().any(|w| !w.is_positive()) {
            return Err(Error::Domain(
                "exceptional atom weights must be positive".into(),
            ));
        }
        Ok(SpaceModel {
            cells,
            atom_weight,
            exceptional_atoms,
        })
    }

    /// Only the non-atomic half-line of unit cells.
    pub fn cells_only() -> Self {
        SpaceModel {
            cells: true,
            atom_weight: None,
            exceptional_atoms: Vec::new(),
        }
    }

    /// Only countably many atoms of weight `weight`.
    pub fn atoms_only(weight: Rational) -> Result<Self> {
        Self::new(false, Some(weight), Vec::new())
    }

    pub fn has_cells(&self) -> bool {
        self.cells
    }

    pub fn atom_weight(&self) -> Option<&Rational> {
        self.atom_weight.as_ref()
    }

    pub fn exceptional_atoms(&self) -> &[Rational] {
        &self.exceptional_atoms
    }

    pub fn has_part(&self, part: Part) -> bool {
        match part {
            Part::Cell => self.cells,
            Part::Atom => self.atom_weight.is_some(),
            Part::Exceptional => !self.exceptional_atoms.is_empty(),
        }
    }

    /// True for the parts holding infinitely many cells/atoms.
    pub fn part_is_infinite(&self, part: Part) -> bool {
        match part {
            Part::Cell => self.cells,
            Part::Atom => self.atom_weight.is_some(),
            Part::Exceptional => false,
        }
    }

    pub fn has_infinite_measure(&self) -> bool {
        self.cells || self.atom_weight.is_some()
    }
}

/// An element of L1 + Linf on a [`SpaceModel`]: bounded, cell-constant, with
/// eventually periodic values per part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceFunction {
    space: SpaceModel,
    cell_values: Option<EvSeq>,
    atom_values: Option<EvSeq>,
    exceptional_values: Vec<Rational>,
}

impl SpaceFunction {
    pub fn new(
        space: SpaceModel,
        cell_values: Option<EvSeq>,
        atom_values: Option<EvSeq>,
        exceptional_values: Vec<Rational>,
    ) -> Result<Self> {
        if cell_values.is_some() != space.has_cells() {
            return Err(Error::Domain(
                "cell values must be present exactly when the model has cells".into(),
            ));
        }
        if atom_values.is_some() != space.atom_weight().is_some() {
            return Err(Error::Domain(
                "atom values must be present exactly when the model has equal atoms".into(),
            ));
        }
        if exceptional_values.len() != space.exceptional_atoms().len() {
            return Err(Error::Domain(format!(
                "expected {} exceptional values, got {}",
                space.exceptional_atoms().len(),
                exceptional_values.len()
            )));
        }
        Ok(SpaceFunction {
            space,
            cell_values,
            atom_values,
            exceptional_values,
        })
    }

    /// The zero function on `space`.
    pub fn zero(space: SpaceModel) -> Self {
        let cell_values = space.has_cells().then(EvSeq::zero);
        let atom_values = space.atom_weight().is_some().then(EvSeq::zero);
        let exceptional_values = vec![Rational::zero(); space.exceptional_atoms().len()];
        SpaceFunction {
            space,
            cell_values,
            atom_values,
            exceptional_values,
        }
    }

    /// The constant function `value` on every part of `space`.
    pub fn constant(space: SpaceModel, value: Rational) -> Self {
        let cell_values = space.has_cells().then(|| EvSeq::constant(value.clone()));
        let atom_values = space
            .atom_weight()
            .is_some()
            .then(|| EvSeq::constant(value.clone()));
        let exceptional_values = vec![value; space.exceptional_atoms().len()];
        SpaceFunction {
            space,
            cell_values,
            atom_values,
            exceptional_values,
        }
    }

    pub fn space(&self) -> &SpaceModel {
        &self.space
    }

    /// Per-part value sequence, when the part exists.
    pub fn values(&self, part: Part) -> Option<&EvSeq> {
        match part {
            Part::Cell => self.cell_values.as_ref(),
            Part::Atom => self.atom_values.as_ref(),
            Part::Exceptional => None,
        }
    }

    pub fn exceptional_values(&self) -> &[Rational] {
        &self.exceptional_values
    }

    /// Value of the function at a location.
    pub fn eval(&self, loc: &Location) -> Result<Rational> {
        if loc.index == 0 {
            return Err(Error::Domain("indices are 1-based".into()));
        }
        match loc.part {
            Part::Cell => self
                .cell_values
                .as_ref()
                .map(|s| s.value_at(loc.index).clone())
                .ok_or_else(|| Error::Domain("model has no cells".into())),
            Part::Atom => self
                .atom_values
                .as_ref()
                .map(|s| s.value_at(loc.index).clone())
                .ok_or_else(|| Error::Domain("model has no equal-weight atoms".into())),
            Part::Exceptional => self
                .exceptional_values
                .get((loc.index - 1) as usize)
                .cloned()
                .ok_or_else(|| {
                    Error::Domain(format!(
                        "exceptional index {} out of range (model has {})",
                        loc.index,
                        self.exceptional_values.len()
                    ))
                }),
        }
    }

    /// Exact measure of `{ |f| > lambda }`, `lambda >= 0`. Infinite exactly
    /// when a strictly exceeding value recurs in the period of an infinite
    /// part.
    pub fn level_measure(&self, lambda: &Rational) -> Extended {
        assert!(!lambda.is_negative(), "level_measure requires lambda >= 0");
        let mut total = Extended::zero();
        for part in [Part::Cell, Part::Atom] {
            if let Some(seq) = self.values(part) {
                if seq.period().iter().any(|v| v.abs() > *lambda) {
                    return Extended::Infinite;
                }
                let count = seq.prefix().iter().filter(|v| v.abs() > *lambda).count();
                if count > 0 {
                    let weight = self.part_weight(part);
                    total += Extended::Finite(weight * Rational::from_integer(count.into()));
                }
            }
        }
        for (v, w) in self
            .exceptional_values
            .iter()
            .zip(self.space.exceptional_atoms())
        {
            if v.abs() > *lambda {
                total += Extended::Finite(w.clone());
            }
        }
        total
    }

    fn part_weight(&self, part: Part) -> Rational {
        match part {
            Part::Cell => Rational::from_integer(1.into()),
            Part::Atom => self
                .space
                .atom_weight()
                .cloned()
                .expect("atom weight present when atom values are"),
            Part::Exceptional => unreachable!("exceptional atoms carry individual weights"),
        }
    }

    /// Membership in R_mu: every positive level set has finite measure,
    /// equivalently every period value on an infinite part is zero.
    pub fn in_r_mu(&self) -> bool {
        [Part::Cell, Part::Atom].iter().all(|&part| {
            self.values(part)
                .is_none_or(|seq| seq.period().iter().all(Zero::is_zero))
        })
    }

    /// `(ef, (1-e)f)` where `e` selects the non-atomic part: the first
    /// output lives on the cells, the second on the atoms (regular and
    /// exceptional). They sum to `f` and have disjoint supports.
    pub fn split_parts(&self) -> (SpaceFunction, SpaceFunction) {
        let mut non_atomic = SpaceFunction::zero(self.space.clone());
        non_atomic.cell_values = self.cell_values.clone();
        let mut atomic = self.clone();
        if atomic.cell_values.is_some() {
            atomic.cell_values = Some(EvSeq::zero());
        }
        (non_atomic, atomic)
    }

    /// Keeps the values on `part`, zeroing every other part.
    pub fn only(&self, part: Part) -> SpaceFunction {
        let mut out = SpaceFunction::zero(self.space.clone());
        match part {
            Part::Cell => out.cell_values = self.cell_values.clone(),
            Part::Atom => out.atom_values = self.atom_values.clone(),
            Part::Exceptional => out.exceptional_values = self.exceptional_values.clone(),
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cell_values.as_ref().is_none_or(EvSeq::is_zero)
            && self.atom_values.as_ref().is_none_or(EvSeq::is_zero)
            && self.exceptional_values.iter().all(Zero::is_zero)
    }

    pub fn map_values(&self, f: impl Fn(&Rational) -> Rational) -> SpaceFunction {
        SpaceFunction {
            space: self.space.clone(),
            cell_values: self.cell_values.as_ref().map(|s| s.map(&f)),
            atom_values: self.atom_values.as_ref().map(|s| s.map(&f)),
            exceptional_values: self.exceptional_values.iter().map(&f).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &SpaceFunction,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<SpaceFunction> {
        if self.space != other.space {
            return Err(Error::Domain("functions live on different models".into()));
        }
        let zip_opt = |a: &Option<EvSeq>, b: &Option<EvSeq>| match (a, b) {
            (Some(x), Some(y)) => Some(x.zip_with(y, &f)),
            (None, None) => None,
            _ => unreachable!("same model implies same shape"),
        };
        Ok(SpaceFunction {
            space: self.space.clone(),
            cell_values: zip_opt(&self.cell_values, &other.cell_values),
            atom_values: zip_opt(&self.atom_values, &other.atom_values),
            exceptional_values: self
                .exceptional_values
                .iter()
                .zip(&other.exceptional_values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &SpaceFunction) -> Result<SpaceFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SpaceFunction) -> Result<SpaceFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> SpaceFunction {
        self.map_values(|v| -v)
    }

    pub fn scale(&self, factor: &Rational) -> SpaceFunction {
        self.map_values(|v| v * factor)
    }

    pub fn abs(&self) -> SpaceFunction {
        self.map_values(|v| v.abs())
    }

    /// `f_+ = max(f, 0)`.
    pub fn positive_part(&self) -> SpaceFunction {
        self.map_values(|v| {
            if v.is_positive() {
                v.clone()
            } else {
                Rational::zero()
            }
        })
    }

    /// `f_- = max(-f, 0)`, so `f = f_+ - f_-`.
    pub fn negative_part(&self) -> SpaceFunction {
        self.map_values(|v| {
            if v.is_negative() {
                -v
            } else {
                Rational::zero()
            }
        })
    }

    /// Distinct nonzero absolute values taken anywhere on the model.
    pub fn distinct_abs_values(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        for part in [Part::Cell, Part::Atom] {
            if let Some(seq) = self.values(part) {
                for v in seq.distinct_values() {
                    if !v.is_zero() {
                        out.insert(v.abs());
                    }
                }
            }
        }
        for v in &self.exceptional_values {
            if !v.is_zero() {
                out.insert(v.abs());
            }
        }
        out
    }

    /// Signed integral, finite exactly when the function is absolutely
    /// integrable (all period values on infinite parts vanish).
    pub fn signed_integral(&self) -> Option<Rational> {
        let mut total = Rational::zero();
        for part in [Part::Cell, Part::Atom] {
            if let Some(seq) = self.values(part) {
                if seq.period().iter().any(|v| !v.is_zero()) {
                    return None;
                }
                let weight = self.part_weight(part);
                for v in seq.prefix() {
                    total += v * &weight;
                }
            }
        }
        for (v, w) in self
            .exceptional_values
            .iter()
            .zip(self.space.exceptional_atoms())
        {
            total += v * w;
        }
        Some(total)
    }
}
