use apvar_core::arith::{sieve_all, Sequence};
use apvar_core::circle::{
    build_spectrum, diophantine_witness, eval_exp_sum, eval_exp_sum_grid, farey_density_f,
    farey_lower_bound, minor_arc_cross, minor_arc_integral, ArcSystem,
};
use proptest::prelude::*;

fn arcs_strategy() -> impl Strategy<Value = ArcSystem> {
    (5.0f64..12.0, 1.0f64..6.0, 400.0f64..3000.0)
        .prop_filter("Q0 ≤ Q/K²", |(k, q0, q)| q0 * k * k <= *q)
        .prop_map(|(k, q0, q)| ArcSystem::new(k, q0, q, 4000).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enlarging_k_keeps_major_points_major(
        alphas in prop::collection::vec(0.0f64..1.0, 50),
        k in 2.0f64..20.0,
        extra in 0.0f64..10.0,
        q0 in 1.0f64..10.0,
        q in 100.0f64..5000.0,
    ) {
        let small = ArcSystem::new(k, q0, q, 10_000).unwrap();
        let large = ArcSystem::new(k + extra, q0, q, 10_000).unwrap();
        for a in alphas {
            if small.is_major(a).is_some() {
                prop_assert!(large.is_major(a).is_some(), "α = {}", a);
            }
        }
    }

    #[test]
    fn farey_density_bound_holds_at_minor_points(arcs in arcs_strategy(), alphas in prop::collection::vec(0.0f64..1.0, 20)) {
        let bound = farey_lower_bound(&arcs);
        for a in alphas {
            if arcs.is_major(a).is_some() || !diophantine_witness(a, &arcs).in_range {
                continue;
            }
            let f = farey_density_f(a, &arcs).unwrap();
            prop_assert!(f >= bound * (1.0 - 1e-12), "α = {} f = {} bound = {}", a, f, bound);
        }
    }

    #[test]
    fn parseval_partition(v in prop::collection::vec(-3.0f64..3.0, 64..600), k in 5.0f64..10.0, q0 in 1.0f64..3.0) {
        let n = v.len();
        let s = Sequence::from_reals("v", v).unwrap();
        let q = (n as f64).max(q0 * k * k + 1.0);
        let arcs = ArcSystem::new(k, q0, q, n as u64).unwrap();
        let spec = build_spectrum(&s, 16 * n.next_power_of_two()).unwrap();
        let m = minor_arc_integral(&spec, &arcs).unwrap();
        let total = s.sum_squares();
        prop_assert!((m.total - total).abs() <= 1e-9 * total.max(1.0));
        prop_assert!((m.value + m.major_value - total).abs() <= m.error_bound + m.major_error_bound + 1e-9 * total);
        prop_assert!(m.value >= -m.error_bound);
    }

    #[test]
    fn grid_values_match_direct_sums(v in prop::collection::vec(-5i64..5, 16..400), ts in prop::collection::vec(0usize..1 << 30, 10)) {
        let n = v.len();
        let s = Sequence::from_ints("v", v).unwrap();
        let t = 2 * n.next_power_of_two();
        let spec = build_spectrum(&s, t).unwrap();
        for raw in ts {
            let i = raw % t;
            let direct = eval_exp_sum_grid(&s, i as u64, t as u64);
            prop_assert!((spec.value(i) - direct).norm() < 1e-8, "t = {}", i);
            let alpha = eval_exp_sum(&s, i as f64 / t as f64);
            prop_assert!((alpha - direct).norm() < 1e-8);
        }
    }
}

#[test]
fn spectrum_spot_checks_on_primes() {
    let n = 10_000;
    let seq = sieve_all(n, 2).unwrap().lambda_sequence();
    let t = 16 * n.next_power_of_two();
    let spec = build_spectrum(&seq, t).unwrap();
    for i in (0..t).step_by(t / 100 + 7) {
        let d = eval_exp_sum_grid(&seq, i as u64, t as u64);
        assert!((spec.value(i) - d).norm() < 1e-8, "t = {i}");
    }
}

#[test]
fn complement_identity_for_cross_integral() {
    let n = 20_000;
    let table = sieve_all(n, 2).unwrap();
    let a = table.lambda_sequence();
    let b = table.dk_sequence(2);
    let arcs = ArcSystem::new(8.0, 2.0, 2_000.0, n as u64).unwrap();
    let t = 16 * n.next_power_of_two();
    let sa = build_spectrum(&a, t).unwrap();
    let sb = build_spectrum(&b, t).unwrap();
    let c = minor_arc_cross(&sa, &sb, &arcs).unwrap();
    let dot = a.dot(&b);
    assert!((c.total.re - dot).abs() < 1e-9 * dot && c.total.im.abs() < 1e-9 * dot);
    let from_major = dot - c.major_value.re;
    assert!((c.value.re - from_major).abs() <= c.error_bound + c.major_error_bound + 1e-9 * dot);
}

#[test]
fn farey_bound_on_a_fixed_grid() {
    let arcs = ArcSystem::new(8.0, 4.0, 2_000.0, 4_000).unwrap();
    let bound = farey_lower_bound(&arcs);
    assert!(bound > 0.0);
    let mut checked = 0;
    for i in 0..4_000 {
        let a = (i as f64 + 0.5) / 4_000.0;
        if arcs.is_major(a).is_some() || !diophantine_witness(a, &arcs).in_range {
            continue;
        }
        checked += 1;
        let f = farey_density_f(a, &arcs).unwrap();
        assert!(f >= bound, "α = {a}: {f} < {bound}");
    }
    assert!(checked > 1_000, "{checked}");
}
