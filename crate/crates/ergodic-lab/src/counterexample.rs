//! Synthesis and verification of divergence counterexamples.
//!
//! For a function outside R_mu on a quasi-non-atomic model, this module
//! builds the Dunford-Schwartz operator whose Cesaro averages oscillate at
//! a base point, together with the finite certificate witnessing the
//! oscillation: indices `n_1 < n_2 < ...` whose averages strictly alternate
//! across the `+/- a/2` thresholds.
//!
//! The construction works on one infinite part. A level band `[a, b]`
//! captures the recurring values of the driving sign of `f`; the operator
//! shifts along the band's index set `G` and multiplies by `+1`, except for
//! a `-1` at each block boundary, so the cumulative sign along the orbit
//! flips exactly at the greedily chosen indices.

use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::{EvSeq, Location, Part, SpaceFunction};
use crate::operators::{DSOperator, IndexSet, TauMap};
use crate::rational::Rational;

/// Sign of the part of `f` that drives the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrivingSign {
    Plus,
    Minus,
}

/// A level band of the driving function: `lower <= f <= upper` on an
/// infinite-measure index set of one part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelBand {
    pub part: Part,
    pub lower: Rational,
    pub upper: Rational,
    pub members: IndexSet,
    pub base_index: u64,
}

/// The synthesized divergence witness.
#[derive(Debug, Clone)]
pub struct OscillationCertificate {
    pub band: LevelBand,
    pub sign: DrivingSign,
    /// Strictly increasing average orders `n_1 < ... < n_K`.
    pub indices: Vec<u64>,
    /// `A_{n_k}(T, f)` at the base point, alternating strictly across the
    /// `+/- lower/2` thresholds.
    pub trace: Vec<Rational>,
    /// The synthesized operator, also returned alongside the certificate.
    pub operator: DSOperator,
}

impl OscillationCertificate {
    /// The oscillation threshold `a/2`.
    pub fn threshold(&self) -> Rational {
        &self.band.lower / Rational::from_integer(2.into())
    }

    pub fn base_location(&self) -> Location {
        Location::new(self.band.part, self.band.base_index)
    }
}

/// The infinite part on which `f` escapes R_mu, preferring the non-atomic
/// one; `None` when `f` is in R_mu.
fn violating_part(f: &SpaceFunction) -> Option<Part> {
    [Part::Cell, Part::Atom].into_iter().find(|&part| {
        f.space().part_is_infinite(part)
            && f.values(part)
                .is_some_and(|seq| seq.period().iter().any(|v| v.is_positive()))
    })
}

/// Finds the canonical level band of the positive part of `f`:
/// `a` is the smallest recurring positive value, `b` the largest recurring
/// value, and `G` the index set where the positive part lies in `[a, b]`.
pub fn find_level_band(f: &SpaceFunction) -> Result<LevelBand> {
    let part = violating_part(f).ok_or_else(|| {
        Error::Precondition("no level band: the positive part of the function is in R_mu".into())
    })?;
    let seq = f.values(part).expect("violating part carries values");
    let lower = seq
        .period()
        .iter()
        .filter(|v| v.is_positive())
        .min()
        .cloned()
        .expect("violating part has a recurring positive value");
    let upper = seq
        .period()
        .iter()
        .max()
        .cloned()
        .expect("period is nonempty");
    let one = Rational::one();
    let lo = lower.clone();
    let hi = upper.clone();
    let indicator = seq.map(|v| {
        if *v >= lo && *v <= hi {
            one.clone()
        } else {
            Rational::zero()
        }
    });
    let members = IndexSet::new(indicator)?;
    let base_index = members
        .first()
        .ok_or_else(|| Error::Internal("level band has no members".into()))?;
    Ok(LevelBand {
        part,
        lower,
        upper,
        members,
        base_index,
    })
}

/// Greedy minimal average orders: each `n_j` is the smallest order whose
/// running signed average strictly crosses the alternating `+/- a/2`
/// threshold. Returns the orders together with the averages at them.
fn greedy_with_trace(
    f: &SpaceFunction,
    band: &LevelBand,
    depth: u64,
) -> Result<(Vec<u64>, Vec<Rational>)> {
    if depth < 2 {
        return Err(Error::Precondition(
            "certificate depth must be at least 2".into(),
        ));
    }
    let seq = f
        .values(band.part)
        .ok_or_else(|| Error::Domain(format!("model has no {} part", band.part)))?;
    let two = Rational::from_integer(2.into());
    // Each block drifts by at least `a` per step against a threshold of
    // a/2, so the next crossing happens by 3*n_prev + 2b/a + O(1).
    let slack: u64 = ((&band.upper / &band.lower) * &two)
        .ceil()
        .to_integer()
        .try_into()
        .map_err(|_| Error::Internal("band ratio out of range".into()))?;

    let mut orders = Vec::with_capacity(depth as usize);
    let mut trace = Vec::with_capacity(depth as usize);
    let mut signed_sum = Rational::zero();
    let mut order: u64 = 0;
    let mut member = None::<u64>;
    let mut positive_phase = true;

    for _ in 0..depth {
        let bound = 3 * order + slack + 4;
        let mut found = false;
        while order < bound {
            order += 1;
            let m = match member {
                None => band.members.first(),
                Some(prev) => band.members.next_after(prev),
            }
            .ok_or_else(|| Error::Internal("band index set exhausted".into()))?;
            member = Some(m);
            let v = seq.value_at(m);
            if positive_phase {
                signed_sum += v;
            } else {
                signed_sum -= v;
            }
            let order_r = Rational::from_integer(order.into());
            let crossed = if positive_phase {
                &signed_sum * &two > &band.lower * &order_r
            } else {
                &signed_sum * &two < -(&band.lower * &order_r)
            };
            if crossed {
                orders.push(order);
                trace.push(&signed_sum / order_r);
                positive_phase = !positive_phase;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Internal(
                "greedy search exceeded its termination bound".into(),
            ));
        }
    }
    Ok((orders, trace))
}

/// Greedy minimal average orders for the block boundaries.
pub fn greedy_ns(f: &SpaceFunction, band: &LevelBand, depth: u64) -> Result<Vec<u64>> {
    greedy_with_trace(f, band, depth).map(|(ns, _)| ns)
}

/// Builds the location map and multiplier of the counterexample operator:
/// the successor map along `G`, and `+1` on `G` except `-1` at the chosen
/// block boundaries `m_{n_k}`, zero off `G`.
pub fn build_tau_phi(band: &LevelBand, orders: &[u64]) -> Result<(TauMap, EvSeq)> {
    if orders.is_empty() || orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "block boundaries must be strictly increasing".into(),
        ));
    }
    let mut boundaries = Vec::with_capacity(orders.len());
    for &n in orders {
        boundaries.push(
            band.members
                .nth(n)
                .ok_or_else(|| Error::Internal("band index set exhausted".into()))?,
        );
    }
    let indicator = band.members.indicator();
    let plen = indicator
        .prefix_len()
        .max(*boundaries.last().expect("nonempty"));
    let llen = indicator.period_len();
    let phi = EvSeq::from_fn(plen, llen, |n| {
        if !band.members.contains(n) {
            Rational::zero()
        } else if boundaries.binary_search(&n).is_ok() {
            -Rational::one()
        } else {
            Rational::one()
        }
    });
    Ok((TauMap::ShiftWithin(band.members.clone()), phi))
}

/// Synthesizes the divergence counterexample for `f` outside R_mu:
/// selects the driving sign and part, finds the level band, chooses the
/// greedy orders, assembles the lifted operator, and certifies the
/// oscillating trace of `A_n(T, f)` at the base point.
pub fn synthesize(f: &SpaceFunction, depth: u64) -> Result<(DSOperator, OscillationCertificate)> {
    if f.in_r_mu() {
        return Err(Error::Precondition(
            "averages of this function converge for every DS operator (f in R_mu)".into(),
        ));
    }
    let f_plus = f.positive_part();
    let (driver, sign) = if !f_plus.in_r_mu() {
        (f_plus, DrivingSign::Plus)
    } else {
        (f.negative_part(), DrivingSign::Minus)
    };
    debug_assert!(!driver.in_r_mu());

    let band = find_level_band(&driver)?;
    let (orders, driver_trace) = greedy_with_trace(&driver, &band, depth)?;
    let (tau, phi) = build_tau_phi(&band, &orders)?;
    let inner = DSOperator::multiplier(band.part, phi, tau, false)?;
    let operator = DSOperator::lift(inner, band.part);

    let location = Location::new(band.part, band.base_index);
    let trace = operator.averages_at(f, &location, &orders)?;
    let expected: Vec<Rational> = match sign {
        DrivingSign::Plus => driver_trace,
        DrivingSign::Minus => driver_trace.into_iter().map(|t| -t).collect(),
    };
    if trace != expected {
        return Err(Error::Certificate(format!(
            "simulated trace disagrees with the greedy construction at {location}: \
             {trace:?} vs {expected:?}"
        )));
    }
    let threshold = &band.lower / Rational::from_integer(2.into());
    if !alternates_strictly(&trace, &threshold) {
        return Err(Error::Certificate(format!(
            "synthesized trace does not alternate strictly across +/-{threshold}"
        )));
    }

    let certificate = OscillationCertificate {
        band,
        sign,
        indices: orders,
        trace,
        operator: operator.clone(),
    };
    Ok((operator, certificate))
}

/// Strict oscillation: every value exceeds the threshold in absolute value
/// and consecutive values have opposite signs.
pub fn alternates_strictly(trace: &[Rational], threshold: &Rational) -> bool {
    if trace.is_empty() {
        return false;
    }
    trace.iter().all(|t| t.abs() > *threshold)
        && trace
            .windows(2)
            .all(|w| w[0].is_positive() != w[1].is_positive())
}

/// Independent re-check of a certificate, with the recomputed trace for
/// diagnostics.
#[derive(Debug, Clone)]
pub struct TraceCheck {
    pub recomputed: Vec<Rational>,
    pub trace_matches: bool,
    pub alternates: bool,
}

impl TraceCheck {
    pub fn verified(&self) -> bool {
        self.trace_matches && self.alternates
    }
}

/// Recomputes `A_{n_k}(T, f)` at the base point by direct operator
/// iteration and compares exactly with the stored trace.
pub fn check_trace(
    operator: &DSOperator,
    f: &SpaceFunction,
    part: Part,
    base_index: u64,
    lower: &Rational,
    indices: &[u64],
    trace: &[Rational],
) -> Result<TraceCheck> {
    if indices.len() != trace.len() || indices.is_empty() {
        return Err(Error::Domain(
            "certificate indices and trace must be nonempty and equal length".into(),
        ));
    }
    let location = Location::new(part, base_index);
    let recomputed = operator.averages_at(f, &location, indices)?;
    let threshold = lower / Rational::from_integer(2.into());
    Ok(TraceCheck {
        trace_matches: recomputed == trace,
        alternates: alternates_strictly(trace, &threshold),
        recomputed,
    })
}

/// True when re-simulating the operator reproduces the certificate trace
/// exactly and the trace oscillates strictly. Any evaluation failure counts
/// as a failed verification.
pub fn verify_certificate(
    certificate: &OscillationCertificate,
    operator: &DSOperator,
    f: &SpaceFunction,
) -> bool {
    check_trace(
        operator,
        f,
        certificate.band.part,
        certificate.band.base_index,
        &certificate.band.lower,
        &certificate.indices,
        &certificate.trace,
    )
    .map(|c| c.verified())
    .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::SpaceModel;
    use crate::rational::{int, rat};

    fn atoms_fn(prefix: Vec<Rational>, period: Vec<Rational>) -> SpaceFunction {
        SpaceFunction::new(
            SpaceModel::atoms_only(int(1)).unwrap(),
            None,
            Some(EvSeq::new(prefix, period).unwrap()),
            vec![],
        )
        .unwrap()
    }

    fn cells_fn(prefix: Vec<Rational>, period: Vec<Rational>) -> SpaceFunction {
        SpaceFunction::new(
            SpaceModel::cells_only(),
            Some(EvSeq::new(prefix, period).unwrap()),
            None,
            vec![],
        )
        .unwrap()
    }

    fn one_on_atoms() -> SpaceFunction {
        SpaceFunction::constant(SpaceModel::atoms_only(int(1)).unwrap(), int(1))
    }

    #[test]
    fn band_of_the_constant_one() {
        let band = find_level_band(&one_on_atoms()).unwrap();
        assert_eq!(band.part, Part::Atom);
        assert_eq!(band.lower, int(1));
        assert_eq!(band.upper, int(1));
        assert_eq!(band.base_index, 1);
        assert!((1..=50).all(|n| band.members.contains(n)));
    }

    #[test]
    fn band_of_alternating_atoms() {
        let f = atoms_fn(vec![], vec![int(2), int(0)]);
        let band = find_level_band(&f).unwrap();
        assert_eq!(band.lower, int(2));
        assert_eq!(band.upper, int(2));
        assert_eq!(band.base_index, 1);
        assert!(band.members.contains(1) && !band.members.contains(2));
        assert!(band.members.contains(3));
    }

    #[test]
    fn band_of_two_valued_cells() {
        let f = cells_fn(vec![], vec![int(1), int(3)]);
        let band = find_level_band(&f).unwrap();
        assert_eq!(band.part, Part::Cell);
        assert_eq!(band.lower, int(1));
        assert_eq!(band.upper, int(3));
        assert_eq!(band.base_index, 1);
        assert!((1..=20).all(|n| band.members.contains(n)));
    }

    #[test]
    fn band_requires_escape_from_r_mu() {
        let f = atoms_fn(vec![int(5)], vec![int(0)]);
        assert!(matches!(find_level_band(&f), Err(Error::Precondition(_))));
    }

    #[test]
    fn greedy_orders_for_the_constant_one() {
        let f = one_on_atoms();
        let band = find_level_band(&f).unwrap();
        let (ns, trace) = greedy_with_trace(&f, &band, 4).unwrap();
        assert_eq!(ns, vec![1, 5, 17, 53]);
        assert_eq!(trace, vec![int(1), rat(-3, 5), rat(9, 17), rat(-27, 53)]);
    }

    #[test]
    fn greedy_orders_scale_with_the_band() {
        let f = atoms_fn(vec![], vec![int(2), int(0)]);
        let band = find_level_band(&f).unwrap();
        let (ns, trace) = greedy_with_trace(&f, &band, 4).unwrap();
        assert_eq!(ns, vec![1, 5, 17, 53]);
        assert_eq!(trace[0], int(2));
        assert!(trace[0] > band.lower / int(2));
    }

    #[test]
    fn greedy_rejects_exact_threshold_hits() {
        // Values 1,3 repeating: the average at n=4 lands exactly on 1/2 and
        // at n=8 exactly on -1/2; both must be skipped.
        let f = cells_fn(vec![], vec![int(1), int(3)]);
        let band = find_level_band(&f).unwrap();
        let (ns, trace) = greedy_with_trace(&f, &band, 4).unwrap();
        assert_eq!(ns, vec![1, 2, 5, 9]);
        assert_eq!(trace, vec![int(1), int(-1), rat(3, 5), rat(-5, 9)]);
    }

    #[test]
    fn phi_marks_boundaries_inside_the_band() {
        let f = one_on_atoms();
        let band = find_level_band(&f).unwrap();
        let ns = greedy_ns(&f, &band, 4).unwrap();
        let (tau, phi) = build_tau_phi(&band, &ns).unwrap();
        assert_eq!(phi.value_at(1), &int(-1));
        for n in 2..=4 {
            assert_eq!(phi.value_at(n), &int(1));
        }
        assert_eq!(phi.value_at(5), &int(-1));
        assert_eq!(phi.value_at(17), &int(-1));
        assert_eq!(phi.value_at(53), &int(-1));
        assert_eq!(phi.value_at(54), &int(1));
        match tau {
            TauMap::ShiftWithin(set) => assert!(set.contains(1)),
            other => panic!("expected a shift, got {other:?}"),
        }
        // Cumulative sign along the orbit flips exactly at the boundaries.
        let mut product = int(1);
        let mut flips = 0usize;
        for n in 1..=60u64 {
            product *= phi.value_at(n);
            let expected_flips = ns.iter().filter(|&&b| b <= n).count();
            if expected_flips != flips {
                flips = expected_flips;
            }
            let expected_sign = if flips.is_multiple_of(2) {
                int(1)
            } else {
                int(-1)
            };
            assert_eq!(product, expected_sign, "sign mismatch at orbit step {n}");
        }
    }

    #[test]
    fn phi_vanishes_off_the_band() {
        let f = atoms_fn(vec![], vec![int(2), int(0)]);
        let band = find_level_band(&f).unwrap();
        let ns = greedy_ns(&f, &band, 3).unwrap();
        let (_, phi) = build_tau_phi(&band, &ns).unwrap();
        for n in [2u64, 4, 6, 100] {
            assert_eq!(phi.value_at(n), &int(0));
        }
    }

    #[test]
    fn synthesis_for_the_constant_one() {
        let f = one_on_atoms();
        let (op, cert) = synthesize(&f, 4).unwrap();
        assert_eq!(cert.indices, vec![1, 5, 17, 53]);
        assert_eq!(
            cert.trace,
            vec![int(1), rat(-3, 5), rat(9, 17), rat(-27, 53)]
        );
        assert_eq!(cert.sign, DrivingSign::Plus);
        assert!(verify_certificate(&cert, &op, &f));
    }

    #[test]
    fn synthesis_on_cells_matches_atoms() {
        let atoms = one_on_atoms();
        let cells = SpaceFunction::constant(SpaceModel::cells_only(), int(1));
        let (_, cert_a) = synthesize(&atoms, 4).unwrap();
        let (_, cert_c) = synthesize(&cells, 4).unwrap();
        assert_eq!(cert_a.indices, cert_c.indices);
        assert_eq!(cert_a.trace, cert_c.trace);
        assert_eq!(cert_c.band.part, Part::Cell);
    }

    #[test]
    fn synthesis_dispatches_to_the_atomic_part() {
        let space = SpaceModel::new(true, Some(int(1)), vec![]).unwrap();
        let f = SpaceFunction::new(
            space,
            Some(EvSeq::zero()),
            Some(EvSeq::constant(int(1))),
            vec![],
        )
        .unwrap();
        let (op, cert) = synthesize(&f, 4).unwrap();
        assert_eq!(cert.band.part, Part::Atom);
        assert_eq!(cert.indices, vec![1, 5, 17, 53]);
        assert!(verify_certificate(&cert, &op, &f));
        // The lifted operator keeps the cells pinned at zero.
        let image = op.apply(&f).unwrap();
        assert!(image.values(Part::Cell).unwrap().is_zero());
    }

    #[test]
    fn synthesis_drives_the_negative_part_when_needed() {
        let f = atoms_fn(vec![], vec![int(-1)]);
        let (op, cert) = synthesize(&f, 4).unwrap();
        assert_eq!(cert.sign, DrivingSign::Minus);
        assert_eq!(cert.indices, vec![1, 5, 17, 53]);
        assert_eq!(
            cert.trace,
            vec![int(-1), rat(3, 5), rat(-9, 17), rat(27, 53)]
        );
        assert!(verify_certificate(&cert, &op, &f));
    }

    #[test]
    fn averages_of_f_and_its_positive_part_agree_at_the_base() {
        // f has a negative prefix value off the band: T(f_minus) = 0, so
        // A_n(f) and A_n(f_plus) coincide at the base point, and off the
        // band A_n(f) = A_n(f_plus) - f_minus/n.
        let f = atoms_fn(vec![int(-3)], vec![int(1)]);
        let (op, cert) = synthesize(&f, 3).unwrap();
        let f_plus = f.positive_part();
        let f_minus = f.negative_part();
        let base = cert.base_location();
        let ns: Vec<u64> = (1..=30).collect();
        let with_f = op.averages_at(&f, &base, &ns).unwrap();
        let with_plus = op.averages_at(&f_plus, &base, &ns).unwrap();
        assert_eq!(with_f, with_plus);

        let off = Location::new(Part::Atom, 1);
        assert!(f_minus.eval(&off).unwrap().is_positive());
        for &n in &[1u64, 2, 10] {
            let avg_f = op.ergodic_average(&f, n).unwrap().eval(&off).unwrap();
            let avg_plus = op.ergodic_average(&f_plus, n).unwrap().eval(&off).unwrap();
            let correction = f_minus.eval(&off).unwrap() / Rational::from_integer(n.into());
            assert_eq!(avg_f, avg_plus - correction);
        }
    }

    #[test]
    fn lifted_operator_reproduces_the_inner_trace() {
        let f = one_on_atoms();
        let (op, cert) = synthesize(&f, 4).unwrap();
        let inner = match &op {
            DSOperator::Lift { inner, .. } => inner.as_ref().clone(),
            other => panic!("synthesis lifts its operator, got {other:?}"),
        };
        let base = cert.base_location();
        let ns: Vec<u64> = (1..=100).collect();
        assert_eq!(
            op.averages_at(&f, &base, &ns).unwrap(),
            inner.averages_at(&f, &base, &ns).unwrap()
        );
    }

    #[test]
    fn verification_rejects_boundary_ties_and_tampering() {
        let f = one_on_atoms();
        let (op, cert) = synthesize(&f, 3).unwrap();

        // n_2 = 4 gives exactly -1/2, which the strict check must reject.
        let tied = check_trace(
            &op,
            &f,
            cert.band.part,
            cert.band.base_index,
            &cert.band.lower,
            &[1, 4, 17],
            &op.averages_at(&f, &cert.base_location(), &[1, 4, 17])
                .unwrap(),
        )
        .unwrap();
        assert!(!tied.alternates);
        assert!(!tied.verified());

        let mut tampered = cert.clone();
        tampered.trace[1] = rat(-2, 5);
        assert!(!verify_certificate(&tampered, &op, &f));
        assert!(verify_certificate(&cert, &op, &f));
    }

    #[test]
    fn synthesis_requires_escape_from_r_mu() {
        let f = atoms_fn(vec![int(7)], vec![int(0)]);
        assert!(matches!(synthesize(&f, 4), Err(Error::Precondition(_))));
        assert!(matches!(
            synthesize(&one_on_atoms(), 1),
            Err(Error::Precondition(_))
        ));
    }
}
