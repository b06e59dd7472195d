//! Norms of the classical fully symmetric spaces over an infinite-measure
//! model, and the membership predicates deciding which of them admit the
//! individual ergodic theorem.
//!
//! Orlicz and Lorentz spaces come from closed parametric catalogs, so the
//! structural data the predicates need (the zero threshold of the Orlicz
//! function, the limit of the Lorentz weight) is declared rather than
//! probed.

use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::measure::{Part, SpaceFunction};
use crate::rational::{pow_u32, Extended, Rational};
use crate::rearrangement::rearrange;

/// Convex, increasing, left-continuous gauge from the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrliczFunction {
    /// `u^p` with `p >= 1`; vanishes only at zero.
    Power { exponent: u32 },
    /// `((u - u0)_+)^p` with `u0 >= 0`, `p >= 1`; vanishes on `[0, u0]`.
    ShiftedPower { threshold: Rational, exponent: u32 },
}

impl OrliczFunction {
    pub fn power(exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::Domain("Orlicz exponent must be >= 1".into()));
        }
        Ok(OrliczFunction::Power { exponent })
    }

    pub fn shifted_power(threshold: Rational, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::Domain("Orlicz exponent must be >= 1".into()));
        }
        if threshold.is_negative() {
            return Err(Error::Domain("Orlicz threshold must be >= 0".into()));
        }
        Ok(OrliczFunction::ShiftedPower {
            threshold,
            exponent,
        })
    }

    /// Largest `u0` with `Phi = 0` on `[0, u0]`.
    pub fn zero_threshold(&self) -> Rational {
        match self {
            OrliczFunction::Power { .. } => Rational::zero(),
            OrliczFunction::ShiftedPower { threshold, .. } => threshold.clone(),
        }
    }

    /// `Phi(u)` for `u >= 0`, exact.
    pub fn eval(&self, u: &Rational) -> Rational {
        debug_assert!(!u.is_negative());
        match self {
            OrliczFunction::Power { exponent } => pow_u32(u, *exponent),
            OrliczFunction::ShiftedPower {
                threshold,
                exponent,
            } => {
                if u <= threshold {
                    Rational::zero()
                } else {
                    pow_u32(&(u - threshold), *exponent)
                }
            }
        }
    }
}

/// Increasing concave weight from the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LorentzWeight {
    /// `t^gamma` with `0 < gamma <= 1`; unbounded.
    Power { gamma: Rational },
    /// `min(t, cap)` with `cap > 0`; bounded by `cap`.
    Capped { cap: Rational },
}

impl LorentzWeight {
    pub fn power(gamma: Rational) -> Result<Self> {
        if !gamma.is_positive() || gamma > Rational::one() {
            return Err(Error::Domain("Lorentz exponent must be in (0, 1]".into()));
        }
        if gamma.numer().to_u32().is_none() || gamma.denom().to_u32().is_none() {
            return Err(Error::Domain("Lorentz exponent is too large".into()));
        }
        Ok(LorentzWeight::Power { gamma })
    }

    pub fn capped(cap: Rational) -> Result<Self> {
        if !cap.is_positive() {
            return Err(Error::Domain("Lorentz cap must be positive".into()));
        }
        Ok(LorentzWeight::Capped { cap })
    }

    /// `phi(inf)`, declared by the catalog member.
    pub fn limit_at_infinity(&self) -> Extended {
        match self {
            LorentzWeight::Power { .. } => Extended::Infinite,
            LorentzWeight::Capped { cap } => Extended::Finite(cap.clone()),
        }
    }

    /// `phi(t)` for `t >= 0`. Exact for `min(t, cap)` and for integer
    /// exponents; fractional powers are resolved to within `precision` by
    /// rational root bisection (exact whenever the result is rational).
    pub fn eval(&self, t: &Rational, precision: &Rational) -> Rational {
        debug_assert!(!t.is_negative());
        match self {
            LorentzWeight::Capped { cap } => {
                if t < cap {
                    t.clone()
                } else {
                    cap.clone()
                }
            }
            LorentzWeight::Power { gamma } => {
                let p = gamma.numer().to_u32().expect("validated at construction");
                let q = gamma.denom().to_u32().expect("validated at construction");
                rational_root(&pow_u32(t, p), q, precision)
            }
        }
    }
}

/// `x^(1/q)` for `x >= 0`: exact when `x` is a perfect q-th power, otherwise
/// bisected to within `precision`.
fn rational_root(x: &Rational, q: u32, precision: &Rational) -> Rational {
    if q == 1 || x.is_zero() {
        return x.clone();
    }
    let rn = x.numer().nth_root(q);
    let rd = x.denom().nth_root(q);
    if &rn.pow(q) == x.numer() && &rd.pow(q) == x.denom() {
        return Rational::new(rn, rd);
    }
    let mut lo = Rational::zero();
    let mut hi = if *x > Rational::one() {
        x.clone()
    } else {
        Rational::one()
    };
    let two = Rational::from_integer(2.into());
    while &hi - &lo > *precision {
        let mid = (&hi + &lo) / &two;
        if pow_u32(&mid, q) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Catalog of fully symmetric spaces handled by the predicates and the CLI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceDescriptor {
    L1,
    Linf,
    L1CapLinf,
    L1PlusLinf,
    Orlicz(OrliczFunction),
    Lorentz(LorentzWeight),
}

/// Exact L1 norm; infinite when a nonzero value recurs on an infinite part.
pub fn norm_l1(f: &SpaceFunction) -> Extended {
    let mut total = Extended::zero();
    for part in [Part::Cell, Part::Atom] {
        if let Some(seq) = f.values(part) {
            if seq.period().iter().any(|v| !v.is_zero()) {
                return Extended::Infinite;
            }
            let weight = match part {
                Part::Cell => Rational::one(),
                Part::Atom => f.space().atom_weight().cloned().expect("shape invariant"),
                Part::Exceptional => unreachable!(),
            };
            for v in seq.prefix() {
                total += Extended::Finite(v.abs() * &weight);
            }
        }
    }
    for (v, w) in f
        .exceptional_values()
        .iter()
        .zip(f.space().exceptional_atoms())
    {
        total += Extended::Finite(v.abs() * w);
    }
    total
}

/// Exact essential sup norm (model functions are bounded by construction).
pub fn norm_linf(f: &SpaceFunction) -> Rational {
    f.distinct_abs_values()
        .into_iter()
        .next_back()
        .unwrap_or_else(Rational::zero)
}

/// `max(norm_l1, norm_linf)`.
pub fn norm_l1_cap_linf(f: &SpaceFunction) -> Extended {
    norm_l1(f).max(Extended::Finite(norm_linf(f)))
}

/// The L1 + Linf norm, computed as the exact integral of `mu_t(f)` over
/// `(0, 1)`. Always finite for bounded functions.
pub fn norm_l1_plus_linf(f: &SpaceFunction) -> Rational {
    rearrange(f).integral_to(&Rational::one())
}

/// Luxemburg norm: `inf { a > 0 : integral of Phi(|f|/a) <= 1 }`, bisected
/// to relative tolerance `tol` (the returned bracket endpoint is an upper
/// bound). `Infinite` signals that the integral diverges for every `a`,
/// i.e. the function lies outside the Orlicz space.
pub fn luxemburg_norm(f: &SpaceFunction, phi: &OrliczFunction, tol: &Rational) -> Extended {
    assert!(tol.is_positive(), "tolerance must be positive");
    if f.is_zero() {
        return Extended::zero();
    }
    // Feasibility: recurring values must be killed exactly by the zero
    // threshold, otherwise the integral over an infinite part diverges for
    // every scale.
    if phi.zero_threshold().is_zero() && !f.in_r_mu() {
        return Extended::Infinite;
    }

    let one = Extended::Finite(Rational::one());
    let two = Rational::from_integer(2.into());
    let modular = |a: &Rational| orlicz_modular(f, phi, a);

    let mut hi = Rational::one();
    let mut guard = 0;
    while modular(&hi) > one {
        hi = &hi * &two;
        guard += 1;
        assert!(guard < 20_000, "Luxemburg bracket failed to close");
    }
    let mut lo = &hi / &two;
    while modular(&lo) <= one {
        hi = lo.clone();
        lo = &lo / &two;
        guard += 1;
        assert!(guard < 20_000, "Luxemburg bracket failed to close");
    }
    // Invariant: modular(lo) > 1 >= modular(hi); the norm lies in (lo, hi].
    while &hi - &lo > tol * &hi {
        let mid = (&hi + &lo) / &two;
        if modular(&mid) <= one {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Extended::Finite(hi)
}

/// `integral of Phi(|f|/a)`, exact.
fn orlicz_modular(f: &SpaceFunction, phi: &OrliczFunction, a: &Rational) -> Extended {
    let mut total = Extended::zero();
    for part in [Part::Cell, Part::Atom] {
        if let Some(seq) = f.values(part) {
            for v in seq.period() {
                if !phi.eval(&(v.abs() / a)).is_zero() {
                    return Extended::Infinite;
                }
            }
            let weight = match part {
                Part::Cell => Rational::one(),
                Part::Atom => f.space().atom_weight().cloned().expect("shape invariant"),
                Part::Exceptional => unreachable!(),
            };
            for v in seq.prefix() {
                total += Extended::Finite(phi.eval(&(v.abs() / a)) * &weight);
            }
        }
    }
    for (v, w) in f
        .exceptional_values()
        .iter()
        .zip(f.space().exceptional_atoms())
    {
        total += Extended::Finite(phi.eval(&(v.abs() / a)) * w);
    }
    total
}

/// Lorentz norm `integral of mu_t(f) d phi(t)`, evaluated as the exact
/// Riemann-Stieltjes sum over the rearrangement steps. An infinite-width
/// positive step contributes `value * (phi(inf) - phi(t_last))`.
pub fn lorentz_norm(f: &SpaceFunction, weight: &LorentzWeight) -> Extended {
    let r = rearrange(f);
    let scale: Rational = r
        .steps()
        .iter()
        .fold(Rational::one(), |acc, s| acc + &s.value);
    let precision = Rational::new(1.into(), 1_000_000_000_000i64.into()) / scale;

    let mut total = Rational::zero();
    let mut cum = Rational::zero();
    let mut phi_prev = Rational::zero();
    for step in r.steps() {
        match &step.width {
            Extended::Finite(w) => {
                cum += w;
                let phi_here = weight.eval(&cum, &precision);
                total += &step.value * (&phi_here - &phi_prev);
                phi_prev = phi_here;
            }
            Extended::Infinite => {
                return match weight.limit_at_infinity() {
                    Extended::Infinite => Extended::Infinite,
                    Extended::Finite(limit) => {
                        Extended::Finite(total + &step.value * (limit - phi_prev))
                    }
                };
            }
        }
    }
    Extended::Finite(total)
}

/// Whether the constant-one function of an infinite-measure model belongs
/// to the space.
pub fn contains_one(space: &SpaceDescriptor) -> bool {
    match space {
        SpaceDescriptor::L1 | SpaceDescriptor::L1CapLinf => false,
        SpaceDescriptor::Linf | SpaceDescriptor::L1PlusLinf => true,
        SpaceDescriptor::Orlicz(phi) => phi.zero_threshold().is_positive(),
        SpaceDescriptor::Lorentz(w) => w.limit_at_infinity().is_finite(),
    }
}

/// Individual ergodic theorem property on an infinite quasi-non-atomic
/// model: equivalent to the space not containing the constant one.
pub fn has_iet(space: &SpaceDescriptor) -> bool {
    !contains_one(space)
}

/// Declared catalog flag: whether the norm is order continuous
/// (`norm of f_n` falls to zero whenever `f_n` decreases to zero). This is
/// a known fact per catalog member, not something probed at runtime; it is
/// a sufficient condition for the ergodic theorem property but not a
/// necessary one (the intersection space is the classical gap).
pub fn has_order_continuous_norm(space: &SpaceDescriptor) -> bool {
    match space {
        SpaceDescriptor::L1 => true,
        SpaceDescriptor::Linf | SpaceDescriptor::L1CapLinf | SpaceDescriptor::L1PlusLinf => false,
        SpaceDescriptor::Orlicz(phi) => phi.zero_threshold().is_zero(),
        SpaceDescriptor::Lorentz(w) => w.limit_at_infinity().is_infinite(),
    }
}

/// Norm of `f` in the described space; `Infinite` means `f` is outside it.
pub fn space_norm(f: &SpaceFunction, space: &SpaceDescriptor, tol: &Rational) -> Extended {
    match space {
        SpaceDescriptor::L1 => norm_l1(f),
        SpaceDescriptor::Linf => Extended::Finite(norm_linf(f)),
        SpaceDescriptor::L1CapLinf => norm_l1_cap_linf(f),
        SpaceDescriptor::L1PlusLinf => Extended::Finite(norm_l1_plus_linf(f)),
        SpaceDescriptor::Orlicz(phi) => luxemburg_norm(f, phi, tol),
        SpaceDescriptor::Lorentz(w) => lorentz_norm(f, w),
    }
}
