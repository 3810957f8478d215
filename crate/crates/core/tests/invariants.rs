use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use cosetope::arith::ZMat2;
use cosetope::group::{
    brute_force_product, product_member, subgroup_closure, subgroup_intersection, Group, PermGroup,
    SlQuotient,
};
use cosetope::gs::{gs_hk_member, gs_hk_member_checked, hk_determinant};
use cosetope::modular::{matrix_to_word, word_eval, word_eval_mod, Gen, ModularWord};
use cosetope::profinite::{quotient_context, GroupWord, QuotientSpec};
use cosetope::report::{destringify, stringify};
use cosetope::Budget;

fn word() -> impl Strategy<Value = ModularWord> {
    prop::collection::vec((any::<bool>(), -4i64..=4), 0..12).prop_map(|letters| {
        let mut w = ModularWord::empty();
        for (is_s, e) in letters {
            w.push(if is_s { Gen::S } else { Gen::T }, e);
        }
        w
    })
}

fn group_word() -> impl Strategy<Value = GroupWord> {
    (prop::array::uniform4(-30i64..=30), word()).prop_map(|(e, w)| GroupWord {
        a: ZMat2::from_entries(e.map(BigInt::from)),
        w,
    })
}

fn modulus() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 6, 7, 8, 9, 10, 12])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn word_matrix_round_trip(w in word()) {
        let x = word_eval(&w);
        prop_assert_eq!(word_eval(&matrix_to_word(&x).unwrap()), x);
    }

    #[test]
    fn word_evaluation_commutes_with_reduction(w in word(), m in modulus()) {
        prop_assert_eq!(word_eval(&w).reduce(m).unwrap(), word_eval_mod(&w, m).unwrap());
    }

    #[test]
    fn projection_is_a_homomorphism(g in group_word(), h in group_word(), m in modulus()) {
        let ctx = quotient_context(&QuotientSpec::congruence(m), &Budget::default()).unwrap();
        let lhs = ctx.project(&g.mul(&h)).unwrap();
        let rhs = ctx.mul(&ctx.project(&g).unwrap(), &ctx.project(&h).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(ctx.project(&g.mul(&g.inv())).unwrap().is_identity());
    }

    #[test]
    fn determinant_is_natural(g in group_word(), m in modulus()) {
        let d = hk_determinant(&g).mod_floor(&BigInt::from(m));
        let member = gs_hk_member(&g, m, &Budget::default()).unwrap();
        prop_assert_eq!(member, d == BigInt::from(1u8) % BigInt::from(m));
    }

    #[test]
    fn determinant_criterion_matches_scan(g in group_word(), m in prop::sample::select(vec![2u64, 3, 4])) {
        // errors if the two methods disagree
        gs_hk_member_checked(&g, m, &Budget::default()).unwrap();
    }

    #[test]
    fn determinant_is_multiplicative(
        x in prop::array::uniform4(-1000i64..=1000),
        y in prop::array::uniform4(-1000i64..=1000),
        m in modulus(),
    ) {
        let (a, b) = (ZMat2::from_entries(x.map(BigInt::from)), ZMat2::from_entries(y.map(BigInt::from)));
        let ab = &a * &b;
        prop_assert_eq!(ab.det(), a.det() * b.det());
        let reduced = a.reduce(m).unwrap().try_mul(&b.reduce(m).unwrap()).unwrap();
        prop_assert_eq!(reduced, ab.reduce(m).unwrap());
        prop_assert_eq!(BigInt::from(reduced.det().value()), ab.det().mod_floor(&BigInt::from(m)));
    }

    #[test]
    fn stringify_round_trips(xs in prop::collection::vec(any::<i64>(), 0..8)) {
        let v = serde_json::json!({ "xs": xs });
        prop_assert_eq!(destringify(stringify(v.clone())), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_membership_matches_explicit_set(
        m in prop::sample::select(vec![3u64, 4, 5]),
        seeds in prop::collection::vec(any::<prop::sample::Index>(), 4),
    ) {
        let ctx = SlQuotient::new(m, false, Budget::default()).unwrap();
        let all: Vec<_> = ctx.enumerate().unwrap().iter().cloned().collect();
        let pick = |i: &prop::sample::Index| all[i.index(all.len())].clone();
        let u = subgroup_closure(&ctx, &[pick(&seeds[0]), pick(&seeds[1])]).unwrap();
        let v = subgroup_closure(&ctx, &[pick(&seeds[2]), pick(&seeds[3])]).unwrap();
        let uv = brute_force_product(&ctx, &u, &v).unwrap();
        for g in &all {
            prop_assert_eq!(product_member(&ctx, g, &u, &v), uv.contains(g));
        }
        let cap = subgroup_intersection(&ctx, &u, &v).unwrap();
        prop_assert_eq!(cap.size(), u.iter().filter(|x| v.contains(x)).count());
        // |UV| = |U||V|/|U ∩ V|
        prop_assert_eq!(uv.len() * cap.size(), u.size() * v.size());
    }

    #[test]
    fn symmetric_group_products(seeds in prop::collection::vec(any::<prop::sample::Index>(), 3)) {
        let ctx = PermGroup::symmetric(5, Budget::default());
        let all: Vec<_> = ctx.enumerate().unwrap().iter().cloned().collect();
        let pick = |i: &prop::sample::Index| all[i.index(all.len())].clone();
        let u = subgroup_closure(&ctx, &[pick(&seeds[0])]).unwrap();
        let v = subgroup_closure(&ctx, &[pick(&seeds[1]), pick(&seeds[2])]).unwrap();
        let uv = brute_force_product(&ctx, &u, &v).unwrap();
        for g in &all {
            prop_assert_eq!(product_member(&ctx, g, &u, &v), uv.contains(g));
        }
    }
}
