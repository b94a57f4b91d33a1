mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use surfgw::dr::{mukai_pairing, partition_term, partitions_le2, DrQuery};
use surfgw::forms::Forms;
use surfgw::gw::{mcf_point_hodge, mcf_point_hodge_terms, primitive_point_hodge, PointHodgeQuery};
use surfgw::pt::{pt_mcf_coefficient, pt_mcf_series, pt_mcf_weights, PtContext, SignConvention};
use surfgw::rat::{rat, sign_pow};
use surfgw::series::json;
use surfgw::surface::{divisors, phi_mr_k3, phi_r_abelian, AbelianClass, K3Class, SurfaceKind};
use surfgw::{Error, QLaurent};

proptest! {
    #[test]
    fn laurent_ring_axioms(a in qlaurent(), b in qlaurent(), c in qlaurent()) {
        prop_assert!(a.add(&b).agrees_with(&b.add(&a)));
        prop_assert!(a.mul(&b).agrees_with(&b.mul(&a)));
        prop_assert!(a.mul(&b).mul(&c).agrees_with(&a.mul(&b.mul(&c))));
        prop_assert!(a.mul(&b.add(&c)).agrees_with(&a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.sub(&a).agrees_with(&QLaurent::zero()));
    }

    #[test]
    fn inverse_is_two_sided(a in invertible_qlaurent()) {
        let inv = a.invert().unwrap();
        prop_assert!(a.mul(&inv).agrees_with(&QLaurent::one()));
        prop_assert!(inv.mul(&a).agrees_with(&QLaurent::one()));
        prop_assert_eq!(inv.valuation(), -a.valuation());
    }

    #[test]
    fn coefficients_are_never_fabricated(a in qlaurent(), cut in -4i64..8) {
        let t = a.truncate(cut);
        let p = t.precision().unwrap();
        prop_assert!(p <= cut);
        for n in p..p + 4 {
            let is_precision_error = matches!(t.coeff(n), Err(Error::InsufficientPrecision { .. }));
            prop_assert!(is_precision_error);
        }
        for n in t.valuation()..p {
            prop_assert_eq!(t.coeff(n).unwrap(), a.coeff(n).unwrap());
        }
    }

    #[test]
    fn substitution_is_a_ring_map(a in q_power_series(), b in q_power_series(), j in 1u32..4, k in 1u32..4) {
        prop_assert!(a.substitute_power(j).substitute_power(k).agrees_with(&a.substitute_power(j * k)));
        prop_assert!(a.mul(&b).substitute_power(k).agrees_with(&a.substitute_power(k).mul(&b.substitute_power(k))));
    }

    #[test]
    fn dq_and_dz_are_derivations(a in biseries(), b in biseries()) {
        let lhs = a.mul(&b).dq();
        let rhs = a.dq().mul(&b).add(&a.mul(&b.dq()));
        prop_assert!(lhs.agrees_with(&rhs));
        let lhs = a.mul(&b).dz();
        let rhs = a.dz().mul(&b).add(&a.mul(&b.dz()));
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn json_round_trip(a in qlaurent(), b in biseries()) {
        prop_assert_eq!(json::qlaurent_from_str(&json::qlaurent_to_string(&a)).unwrap(), a);
        let back = json::biseries_from_str(&json::biseries_to_string(&b)).unwrap();
        prop_assert_eq!(back.q_precision(), b.q_precision());
        prop_assert_eq!(back.z_precision(), b.z_precision());
        prop_assert!(back.agrees_with(&b));
    }

    #[test]
    fn abelian_phi_is_an_algebra_map(a in abelian_class(), b in abelian_class(), r in 1u64..7) {
        let lhs = phi_r_abelian(&a.wedge(&b), r);
        let rhs = phi_r_abelian(&a, r).wedge(&phi_r_abelian(&b, r));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(phi_r_abelian(&AbelianClass::point(), r), AbelianClass::point());
        prop_assert_eq!(phi_r_abelian(&a, 1), a);
    }

    #[test]
    fn k3_phi_is_an_isometry(x in k3_class(), y in k3_class(), m in -3i64..6, r in 1u64..6) {
        let m = 2 * m;
        let g = gram();
        let (px, py) = (phi_mr_k3(&x, m, r), phi_mr_k3(&y, m, r));
        prop_assert_eq!(px.pairing(&py, &g), x.pairing(&y, &g));
        let beta = K3Class::beta(m, r);
        let image = phi_mr_k3(&beta, m, r);
        prop_assert_eq!(image.pairing(&image, &g), rat((r * r) as i64 * m));
        prop_assert_eq!(image.s.clone(), rat(1));
        prop_assert_eq!(phi_mr_k3(&x, m, 1), x);
    }

    #[test]
    fn mukai_pairing_is_symmetric_bilinear(u in mukai_vector(), v in mukai_vector(), w in mukai_vector(), c in small_rat()) {
        let g = gram();
        prop_assert_eq!(mukai_pairing(&u, &v, &g), mukai_pairing(&v, &u, &g));
        let lhs = mukai_pairing(&u.add(&v.scale(&c)), &w, &g);
        let rhs = mukai_pairing(&u, &w, &g) + &c * mukai_pairing(&v, &w, &g);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pt_series_and_coefficient_forms_agree(
        (r, prim, nu) in prop_oneof![Just(1u64), Just(2u64), Just(3u64), Just(4u64), Just(6u64)]
            .prop_flat_map(|r| (Just(r), pt_dataset(r), -3i64..6))
    ) {
        let coeff_ctx = PtContext::uniform(r, nu, SignConvention::CoefficientLevel).unwrap();
        let series = pt_mcf_series(&coeff_ctx, &prim, None).unwrap();
        for n in series.lo()..series.hi() {
            let unwound = sign_pow(n) * series.coeff(n).unwrap();
            prop_assert_eq!(unwound, pt_mcf_coefficient(n, &coeff_ctx, &prim).unwrap());
            prop_assert_eq!(pt_mcf_weights(n, &coeff_ctx).unwrap()[0].clone(), (1, rat(1)));
        }
        // the same data supplied in the series convention
        let flipped: BTreeMap<u64, _> = prim.iter().map(|(&k, p)| (k, p.flip_signs())).collect();
        let series_ctx = PtContext::uniform(r, nu, SignConvention::SeriesLevel).unwrap();
        prop_assert_eq!(pt_mcf_series(&series_ctx, &flipped, None).unwrap(), series);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mcf_with_r_one_is_the_identity(
        k3 in any::<bool>(), g in 0i64..4, points in 0i64..3, h in -1i64..4
    ) {
        let kind = if k3 { SurfaceKind::K3 } else { SurfaceKind::Abelian };
        let f = Forms::global();
        let q = PointHodgeQuery::new(kind, g, points, h, 1).unwrap();
        prop_assert_eq!(mcf_point_hodge(f, &q).unwrap(), primitive_point_hodge(f, &q).unwrap());
    }

    #[test]
    fn mcf_has_one_summand_per_divisor(r in 1u64..40, h in 0i64..2) {
        let q = PointHodgeQuery::new(SurfaceKind::K3, 0, 0, h, r).unwrap();
        let terms = mcf_point_hodge_terms(Forms::global(), &q).unwrap();
        prop_assert_eq!(terms.iter().map(|t| t.k).collect::<Vec<_>>(), divisors(r));
    }

    #[test]
    fn point_hodge_depends_on_g_only_through_z_exponent(g in 0i64..3, h in 0i64..4) {
        let f = Forms::global();
        let q = PointHodgeQuery::new(SurfaceKind::K3, g, 0, h, 1).unwrap();
        let series = surfgw::gw::k3_point_hodge_series(f, 0, 2 * g + 2, h + 2).unwrap();
        prop_assert_eq!(primitive_point_hodge(f, &q).unwrap(), series.coeff(2 * g - 2, h - 1).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn negative_singletons_kill_their_terms(legs in three_legs()) {
        let q = DrQuery::with_model_beta(legs, 1, gram(), 3).unwrap();
        let f = Forms::global();
        for part in partitions_le2(3) {
            if part.singletons.iter().any(|&j| q.legs[j].a < 0) {
                prop_assert!(partition_term(f, &q, &part).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn partition_counts_follow_the_involution_recurrence() {
    let mut inv = vec![1usize, 1];
    for n in 2..=8 {
        inv.push(inv[n - 1] + (n - 1) * inv[n - 2]);
    }
    for (n, &expected) in inv.iter().enumerate().skip(1) {
        let parts = partitions_le2(n);
        assert_eq!(parts.len(), expected, "n = {n}");
        for p in &parts {
            let mut seen: Vec<usize> = p.singletons.clone();
            seen.extend(p.pairs.iter().flat_map(|&(a, b)| [a, b]));
            seen.sort_unstable();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
        }
    }
}
