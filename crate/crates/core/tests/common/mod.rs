//! Shared proptest strategies.
#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use surfgw::dr::{MarkedLeg, MukaiVector};
use surfgw::pt::PLaurent;
use surfgw::rat::{rat, ratio, Rat};
use surfgw::surface::{divisors, AbelianClass, CohDegree, K3Class, TranscendentalGram};
use surfgw::{BiSeries, QLaurent};

/// Small rationals, zero about a fifth of the time.
pub fn small_rat() -> impl Strategy<Value = Rat> {
    (-11i64..=11, 1i64..=4).prop_map(|(n, d)| if n.abs() > 9 { rat(0) } else { ratio(n, d) })
}

pub fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (1i64..=9, 1i64..=4, any::<bool>()).prop_map(|(n, d, neg)| ratio(if neg { -n } else { n }, d))
}

/// A truncated series with at least one known coefficient position.
pub fn qlaurent() -> impl Strategy<Value = QLaurent> {
    (-3i64..=3, prop::collection::vec(small_rat(), 1..7), 0i64..3).prop_map(
        |(val, coeffs, extra)| {
            let prec = val + coeffs.len() as i64 + extra;
            QLaurent::new(val, coeffs, Some(prec))
        },
    )
}

/// A truncated series with a nonzero leading coefficient.
pub fn invertible_qlaurent() -> impl Strategy<Value = QLaurent> {
    (
        -3i64..=3,
        nonzero_rat(),
        prop::collection::vec(small_rat(), 0..6),
    )
        .prop_map(|(val, lead, mut rest)| {
            rest.insert(0, lead);
            let prec = val + rest.len() as i64;
            QLaurent::new(val, rest, Some(prec))
        })
}

/// A q-power series (valuation >= 0) with known coefficients through `len`.
pub fn q_power_series() -> impl Strategy<Value = QLaurent> {
    prop::collection::vec(small_rat(), 1..6).prop_map(|coeffs| {
        let prec = coeffs.len() as i64;
        QLaurent::new(0, coeffs, Some(prec))
    })
}

pub fn biseries() -> impl Strategy<Value = BiSeries> {
    (
        -2i64..=2,
        prop::collection::vec(q_power_series(), 1..4),
        2i64..5,
    )
        .prop_map(|(zv, cs, qp)| {
            let zp = zv + cs.len() as i64;
            BiSeries::new(zv, cs, Some(zp), Some(qp))
        })
}

pub fn abelian_class() -> impl Strategy<Value = AbelianClass> {
    prop::array::uniform16((-11i64..=11, 1i64..=4)).prop_map(|cs| {
        cs.into_iter()
            .enumerate()
            .fold(AbelianClass::zero(), |acc, (mask, (n, d))| {
                if n.abs() > 9 {
                    acc
                } else {
                    acc.add(&AbelianClass::monomial(mask, ratio(n, d)))
                }
            })
    })
}

/// The Gram data used by the K3 strategies: `<v1,v1> = 2`, `<v1,v2> = 1`, `<v2,v2> = -4`.
pub fn gram() -> TranscendentalGram {
    let mut g = TranscendentalGram::new();
    g.set("v1", "v1", rat(2));
    g.set("v1", "v2", rat(1));
    g.set("v2", "v2", rat(-4));
    g
}

pub fn k3_class() -> impl Strategy<Value = K3Class> {
    (small_rat(), small_rat(), small_rat(), small_rat()).prop_map(|(s, f, a, b)| {
        K3Class::new(s, f)
            .add(&K3Class::transcendental("v1", a))
            .add(&K3Class::transcendental("v2", b))
    })
}

pub fn mukai_vector() -> impl Strategy<Value = MukaiVector> {
    (small_rat(), k3_class(), small_rat()).prop_map(|(r, d, n)| MukaiVector::new(r, d, n))
}

pub fn coh_degree() -> impl Strategy<Value = CohDegree> {
    prop_oneof![
        Just(CohDegree::UNIT),
        Just(CohDegree::DIVISOR),
        Just(CohDegree::POINT)
    ]
}

/// Three nonzero multiplicities summing to zero, each of absolute value <= 3.
pub fn three_multiplicities() -> impl Strategy<Value = [i64; 3]> {
    (
        prop_oneof![-3i64..=-1, 1i64..=3],
        prop_oneof![-3i64..=-1, 1i64..=3],
    )
        .prop_filter_map("third leg must be a nonzero multiplicity", |(a, b)| {
            let c = -a - b;
            (c != 0 && c.abs() <= 3).then_some([a, b, c])
        })
}

pub fn three_legs() -> impl Strategy<Value = Vec<MarkedLeg>> {
    (
        three_multiplicities(),
        prop::collection::vec((mukai_vector(), coh_degree()), 3),
    )
        .prop_map(|(a, gs)| {
            a.into_iter()
                .zip(gs)
                .map(|(a, (gamma, gamma_degree))| MarkedLeg {
                    a,
                    gamma,
                    gamma_degree,
                })
                .collect()
        })
}

/// Primitive PT data for every `k | r`, windows chosen so that the output
/// window is nonempty.
pub fn pt_dataset(r: u64) -> impl Strategy<Value = BTreeMap<u64, PLaurent>> {
    let ks = divisors(r);
    prop::collection::vec(
        (-2i64..=0, prop::collection::vec(small_rat(), 6..10)),
        ks.len(),
    )
    .prop_map(move |data| {
        ks.iter()
            .zip(data)
            .map(|(&k, (lo, cs))| (k, PLaurent::new(lo, cs)))
            .collect()
    })
}

/// Draws `n` values from `strategy` with a fixed seed.
pub fn sample<S: Strategy>(strategy: S, n: usize, seed: u8) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]),
    );
    (0..n)
        .map(|_| {
            strategy
                .new_tree(&mut runner)
                .expect("strategy produces values")
                .current()
        })
        .collect()
}
