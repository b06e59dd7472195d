//! Shared test fixtures: a deterministic generator for models, functions
//! and operator samples, plus the independent oracles the expected values
//! are frozen from.

#![allow(dead_code)]

use ergodic_lab::rational::{int, rat, Extended, Rational};
use ergodic_lab::{EvSeq, Part, SpaceFunction, SpaceModel};
use num::traits::{Signed, Zero};

/// SplitMix64: deterministic across platforms, no dependencies.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

/// Small signed rational: numerator in -4..=4, denominator in 1..=4.
pub fn small_rational(rng: &mut Rng) -> Rational {
    rat(rng.below(9) as i64 - 4, rng.below(4) as i64 + 1)
}

pub fn positive_weight(rng: &mut Rng) -> Rational {
    rat(rng.below(4) as i64 + 1, rng.below(3) as i64 + 1)
}

/// A pool of at most `size` distinct candidate values (zero included).
pub fn value_pool(rng: &mut Rng, size: usize) -> Vec<Rational> {
    let mut pool = vec![Rational::zero()];
    while pool.len() < size {
        let v = small_rational(rng);
        if !pool.contains(&v) {
            pool.push(v);
        }
    }
    pool
}

pub fn random_model(rng: &mut Rng) -> SpaceModel {
    match rng.below(4) {
        0 => SpaceModel::cells_only(),
        1 => SpaceModel::atoms_only(positive_weight(rng)).unwrap(),
        2 => SpaceModel::new(true, Some(positive_weight(rng)), vec![]).unwrap(),
        _ => {
            let count = rng.below(3) + 1;
            let weights = (0..count).map(|_| positive_weight(rng)).collect();
            SpaceModel::new(true, None, weights).unwrap()
        }
    }
}

fn values_from(rng: &mut Rng, pool: &[Rational], len: u64) -> Vec<Rational> {
    (0..len).map(|_| rng.pick(pool).clone()).collect()
}

/// A random function on `space` drawing from `pool`. `force_r_mu` pins the
/// R_mu membership: `Some(true)` zeroes all recurring values, `Some(false)`
/// plants a nonzero recurring value on an infinite part.
pub fn random_function(
    rng: &mut Rng,
    space: &SpaceModel,
    pool: &[Rational],
    force_r_mu: Option<bool>,
) -> SpaceFunction {
    let mut seq_for = |part: Part| -> Option<EvSeq> {
        if !space.has_part(part) || part == Part::Exceptional {
            return None;
        }
        let prefix_len = rng.below(6);
        let prefix = values_from(rng, pool, prefix_len);
        let period = match force_r_mu {
            Some(true) => vec![Rational::zero()],
            _ => {
                let period_len = rng.below(3) + 1;
                values_from(rng, pool, period_len)
            }
        };
        Some(EvSeq::new(prefix, period).unwrap())
    };
    let mut cell_values = seq_for(Part::Cell);
    let mut atom_values = seq_for(Part::Atom);
    if force_r_mu == Some(false) {
        let recurring_nonzero = |s: &Option<EvSeq>| {
            s.as_ref()
                .is_some_and(|s| s.period().iter().any(|v| !v.is_zero()))
        };
        if !recurring_nonzero(&cell_values) && !recurring_nonzero(&atom_values) {
            let nonzero = pool
                .iter()
                .find(|v| !v.is_zero())
                .expect("pool has a nonzero value")
                .clone();
            let target = if space.has_cells() {
                &mut cell_values
            } else {
                &mut atom_values
            };
            let seq = target.as_ref().expect("infinite part exists");
            *target =
                Some(EvSeq::new(seq.prefix().to_vec(), vec![nonzero, Rational::zero()]).unwrap());
        }
    }
    let exceptional_values = values_from(rng, pool, space.exceptional_atoms().len() as u64);
    SpaceFunction::new(space.clone(), cell_values, atom_values, exceptional_values).unwrap()
}

/// Sample functions for `verify_ds`: a mix of integrable (recurring values
/// all zero) and genuinely bounded-only members.
pub fn ds_samples(rng: &mut Rng, space: &SpaceModel, count: usize) -> Vec<SpaceFunction> {
    let pool = value_pool(rng, 5);
    (0..count)
        .map(|i| random_function(rng, space, &pool, Some(i % 2 == 0)))
        .collect()
}

// ---------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------

/// Brute-force `mu_t(f)` straight from the infimum definition: the smallest
/// candidate level whose level set has measure at most `t`.
pub fn oracle_mu(f: &SpaceFunction, t: &Rational) -> Rational {
    let mut candidates: Vec<Rational> = vec![Rational::zero()];
    candidates.extend(f.distinct_abs_values());
    candidates.sort();
    for lambda in candidates {
        if f.level_measure(&lambda) <= Extended::Finite(t.clone()) {
            return lambda;
        }
    }
    unreachable!("the largest value always has an empty level set")
}

/// Decomposition infimum for the L1 + Linf norm: best split of `|f|` into
/// an integrable spike `(|f| - c)_+` plus a bounded floor `c`, minimized
/// over the candidate truncation levels.
pub fn oracle_l1_plus_linf(f: &SpaceFunction) -> Rational {
    let mut candidates: Vec<Rational> = vec![Rational::zero()];
    candidates.extend(f.distinct_abs_values());
    let mut best: Option<Rational> = None;
    for c in candidates {
        let spike = f.map_values(|v| {
            let a = v.abs();
            if a > c {
                a - &c
            } else {
                Rational::zero()
            }
        });
        if let Extended::Finite(l1) = ergodic_lab::norm_l1(&spike) {
            let total = l1 + &c;
            if best.as_ref().is_none_or(|b| total < *b) {
                best = Some(total);
            }
        }
    }
    best.expect("truncation at the top value is always integrable")
}

/// Exhaustive minimal-order search for the oscillation construction:
/// recomputes every candidate average from scratch, with block signs fixed
/// by the previously chosen orders.
pub fn oracle_minimal_orders(
    values: &dyn Fn(u64) -> Rational,
    lower: &Rational,
    depth: usize,
    cap: u64,
) -> Vec<u64> {
    let threshold = lower / int(2);
    let average = |n: u64, chosen: &[u64]| -> Rational {
        let mut sum = Rational::zero();
        for k in 1..=n {
            let flips = chosen.iter().filter(|&&b| b < k).count();
            let term = values(k);
            if flips % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        sum / Rational::from_integer(n.into())
    };
    let mut chosen: Vec<u64> = Vec::new();
    for j in 0..depth {
        let positive = j % 2 == 0;
        let start = chosen.last().copied().unwrap_or(0) + 1;
        let found = (start..=cap)
            .find(|&n| {
                let avg = average(n, &chosen);
                if positive {
                    avg > threshold
                } else {
                    avg < -threshold.clone()
                }
            })
            .expect("oracle search exceeded its cap");
        chosen.push(found);
    }
    chosen
}

/// Fixed divergence corpus: twenty functions outside R_mu across atomic,
/// cell and mixed models, with both signs, fractional weights and values,
/// prefixes, and gaps in the recurring pattern.
pub fn divergence_corpus() -> Vec<SpaceFunction> {
    let atoms = |weight: Rational, prefix: Vec<Rational>, period: Vec<Rational>| {
        SpaceFunction::new(
            SpaceModel::atoms_only(weight).unwrap(),
            None,
            Some(EvSeq::new(prefix, period).unwrap()),
            vec![],
        )
        .unwrap()
    };
    let cells = |prefix: Vec<Rational>, period: Vec<Rational>| {
        SpaceFunction::new(
            SpaceModel::cells_only(),
            Some(EvSeq::new(prefix, period).unwrap()),
            None,
            vec![],
        )
        .unwrap()
    };
    let mixed = |cell: (Vec<Rational>, Vec<Rational>), atom: (Vec<Rational>, Vec<Rational>)| {
        SpaceFunction::new(
            SpaceModel::new(true, Some(int(1)), vec![]).unwrap(),
            Some(EvSeq::new(cell.0, cell.1).unwrap()),
            Some(EvSeq::new(atom.0, atom.1).unwrap()),
            vec![],
        )
        .unwrap()
    };
    let cells_exc = |prefix: Vec<Rational>,
                     period: Vec<Rational>,
                     weights: Vec<Rational>,
                     values: Vec<Rational>| {
        SpaceFunction::new(
            SpaceModel::new(true, None, weights).unwrap(),
            Some(EvSeq::new(prefix, period).unwrap()),
            None,
            values,
        )
        .unwrap()
    };

    vec![
        // Atomic models.
        atoms(int(1), vec![], vec![int(1)]),
        atoms(int(1), vec![], vec![int(2), int(0)]),
        atoms(rat(1, 2), vec![], vec![int(1)]),
        atoms(int(1), vec![int(5), int(0), int(3)], vec![int(1), int(2)]),
        atoms(int(1), vec![], vec![int(-1)]),
        atoms(rat(2, 3), vec![int(-2)], vec![int(0), int(-3), int(-3)]),
        atoms(int(2), vec![], vec![rat(3, 2)]),
        // Cell models.
        cells(vec![], vec![int(1)]),
        cells(vec![], vec![int(1), int(3)]),
        cells(vec![], vec![int(0), int(2)]),
        cells(vec![int(7), rat(1, 2)], vec![int(1)]),
        cells(vec![], vec![int(-2), int(0)]),
        cells(vec![int(1)], vec![int(2), int(2), int(1)]),
        cells(vec![], vec![rat(1, 2)]),
        // Mixed models.
        mixed((vec![], vec![int(0)]), (vec![], vec![int(1)])),
        mixed((vec![], vec![int(1)]), (vec![int(4)], vec![int(0)])),
        mixed((vec![], vec![int(2), int(0)]), (vec![], vec![int(1)])),
        cells_exc(
            vec![],
            vec![int(1)],
            vec![rat(1, 2), int(2)],
            vec![int(5), int(-3)],
        ),
        mixed((vec![], vec![int(-1), int(0)]), (vec![], vec![int(0)])),
        cells_exc(
            vec![int(10)],
            vec![int(0), rat(1, 3)],
            vec![int(3)],
            vec![int(2)],
        ),
    ]
}

/// Fixed convergence corpus: twenty functions inside R_mu whose orbit mass
/// stays within four nonzero values per infinite part, so the dyadic
/// average bound is provable.
pub fn convergence_corpus() -> Vec<SpaceFunction> {
    let mut rng = Rng::new(0xC0FFEE);
    let mut out = Vec::new();
    let models = [
        SpaceModel::cells_only(),
        SpaceModel::atoms_only(int(1)).unwrap(),
        SpaceModel::atoms_only(rat(1, 2)).unwrap(),
        SpaceModel::new(true, Some(int(1)), vec![]).unwrap(),
        SpaceModel::new(true, None, vec![int(1), rat(1, 3)]).unwrap(),
    ];
    while out.len() < 20 {
        let space = &models[out.len() % models.len()];
        let pool = value_pool(&mut rng, 5);
        let mut seq_for = |has: bool| -> Option<EvSeq> {
            if !has {
                return None;
            }
            let len = rng.below(5);
            Some(EvSeq::finite(values_from(&mut rng, &pool, len)))
        };
        let cell_values = seq_for(space.has_cells());
        let atom_values = seq_for(space.atom_weight().is_some());
        let exceptional = values_from(&mut rng, &pool, space.exceptional_atoms().len() as u64);
        let f = SpaceFunction::new(space.clone(), cell_values, atom_values, exceptional).unwrap();
        assert!(f.in_r_mu());
        out.push(f);
    }
    out
}
