use agp::bench::{read_trace_csv, write_trace_csv};
use agp::geometry::{ConstraintSet, Vector};
use agp::objective::{zoo, Regime};
use agp::schedules::{auto_configure, params_at, regularization_at, validate, RegimeConfig};
use agp::solver::{run, Init, IterationRecord};
use agp::Value;
use proptest::prelude::*;

fn vec_of(n: usize, r: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-r..r, n).prop_map(Vector::from_vec)
}

fn bounded_set(n: usize) -> impl Strategy<Value = ConstraintSet> {
    prop_oneof![
        (vec_of(n, 2.0), vec_of(n, 2.0)).prop_map(|(a, b)| {
            let lo: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x.min(*y)).collect();
            let hi: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x.max(*y)).collect();
            ConstraintSet::boxed(lo, hi).unwrap()
        }),
        (vec_of(n, 2.0), 0.01f64..3.0).prop_map(|(c, r)| ConstraintSet::ball(
            c.as_slice().to_vec(),
            r
        )
        .unwrap()),
        (0.1f64..5.0).prop_map(move |s| ConstraintSet::simplex(n, s).unwrap()),
    ]
}

fn any_set() -> impl Strategy<Value = ConstraintSet> {
    (1usize..=10).prop_flat_map(|n| {
        prop_oneof![
            4 => bounded_set(n),
            1 => Just(ConstraintSet::whole_space(n).unwrap()),
            2 => (bounded_set(n), bounded_set(2)).prop_map(|(a, b)| ConstraintSet::product(vec![a, b]).unwrap()),
        ]
    })
}

fn set_and_points() -> impl Strategy<Value = (ConstraintSet, Vector, Vector)> {
    any_set().prop_flat_map(|s| {
        let n = s.dim();
        (Just(s), vec_of(n, 10.0), vec_of(n, 10.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projection_is_idempotent((s, v, _) in set_and_points()) {
        let p = s.project(&v).unwrap();
        let pp = s.project(&p).unwrap();
        prop_assert!((&pp - &p).amax() <= 1e-12, "{:?}", (&pp - &p).amax());
        prop_assert!(s.contains(&p, 1e-10).unwrap());
    }

    #[test]
    fn projection_is_nonexpansive((s, v, w) in set_and_points()) {
        let d = (s.project(&v).unwrap() - s.project(&w).unwrap()).norm();
        prop_assert!(d <= (&v - &w).norm() + 1e-10);
    }

    #[test]
    fn projection_is_nearest((s, v, w) in set_and_points()) {
        let p = s.project(&v).unwrap();
        let u = s.project(&w).unwrap();
        prop_assert!((&p - &v).norm() <= (&u - &v).norm() + 1e-10);
        // variational inequality <v - p, u - p> <= 0
        prop_assert!((&v - &p).dot(&(&u - &p)) <= 1e-9 * (1.0 + v.norm() * u.norm()));
    }
}

fn nc_c_config() -> impl Strategy<Value = (RegimeConfig, agp::objective::SmoothnessData)> {
    (0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0, 3.0f64..6.0).prop_map(|(l_x, l_y, l12, tau)| {
        let data = agp::objective::SmoothnessData {
            l_x,
            l_y,
            l12,
            l21: l12,
            mu: 0.0,
            theta: 0.0,
        };
        let mut cfg = auto_configure(&data, Regime::NcC).unwrap();
        if let RegimeConfig::NcC { tau: t, .. } = &mut cfg {
            *t = t.max(tau);
        }
        (cfg, data)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn nc_c_beta_grows_like_sqrt_k((cfg, data) in nc_c_config()) {
        let mut prev = 0.0;
        for k in 1..200 {
            let p = params_at(&cfg, &data, k).unwrap();
            prop_assert!(p.beta > 0.0 && p.gamma > 0.0);
            if !p.floored {
                prop_assert!(p.beta > prev, "k={k}");
            }
            prev = p.beta;
        }
        for k in [16usize, 64, 256, 1024] {
            let r = params_at(&cfg, &data, 4 * k).unwrap().beta / params_at(&cfg, &data, k).unwrap().beta;
            prop_assert!((1.9..=2.1).contains(&r), "k={k} ratio={r}");
        }
    }

    #[test]
    fn regularization_halves_every_sixteenfold((cfg, _data) in nc_c_config(), k in 1usize..10_000) {
        let c = regularization_at(&cfg, k);
        prop_assert!(regularization_at(&cfg, k + 1) < c);
        let ratio = regularization_at(&cfg, 16 * k) / c;
        prop_assert!((ratio - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn params_are_pure((cfg, data) in nc_c_config(), k in 1usize..100_000) {
        let a = params_at(&cfg, &data, k).unwrap();
        let b = params_at(&cfg, &data, k).unwrap();
        prop_assert_eq!(a.beta.to_bits(), b.beta.to_bits());
        prop_assert_eq!(a.gamma.to_bits(), b.gamma.to_bits());
        prop_assert_eq!(a.c.to_bits(), b.c.to_bits());
    }

    #[test]
    fn auto_configure_validates(seed in 0u64..1000, nx in 2usize..6, ny in 2usize..6, kind in 0usize..4) {
        let kinds = ["nc_sc", "nc_c", "sc_nc", "c_nc"];
        let regimes = [Regime::NcSc, Regime::NcC, Regime::ScNc, Regime::CNc];
        let text = format!("quadratic(seed={seed}, nx={nx}, ny={ny}, kind={})", kinds[kind]);
        let p = zoo::build(&Value::parse(&text).unwrap()).unwrap();
        let cfg = agp::schedules::auto_configure_for(&p, regimes[kind]).unwrap();
        let report = validate(&cfg, &p.constants);
        prop_assert!(report.pass, "{}", report);
    }
}

fn finite_or_nan() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        1 => Just(f64::NAN),
        1 => Just(f64::INFINITY),
    ]
}

fn record() -> impl Strategy<Value = IterationRecord> {
    (
        1usize..1_000_000,
        prop::collection::vec(finite_or_nan(), 14),
    )
        .prop_map(|(k, f)| IterationRecord {
            k,
            f_value: f[0],
            gap_norm: f[1],
            reg_gap_norm: f[2],
            beta: f[3],
            gamma: f[4],
            b: f[5],
            c: f[6],
            dx_norm: f[7],
            dy_norm: f[8],
            potential: f[9],
            monitor_slack: f[10],
            gap_x_norm: f[11],
            gap_y_norm: f[12],
            unit_gap_norm: f[13],
        })
}

fn same_bits(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a.to_bits() == b.to_bits()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn csv_round_trip_is_lossless(records in prop::collection::vec(record(), 0..20)) {
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &records).unwrap();
        let back = read_trace_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            prop_assert_eq!(a.k, b.k);
            let fa = [a.f_value, a.gap_norm, a.reg_gap_norm, a.beta, a.gamma, a.b, a.c, a.dx_norm, a.dy_norm, a.potential, a.monitor_slack, a.gap_x_norm, a.gap_y_norm, a.unit_gap_norm];
            let fb = [b.f_value, b.gap_norm, b.reg_gap_norm, b.beta, b.gamma, b.b, b.c, b.dx_norm, b.dy_norm, b.potential, b.monitor_slack, b.gap_x_norm, b.gap_y_norm, b.unit_gap_norm];
            for (x, y) in fa.iter().zip(&fb) {
                prop_assert!(same_bits(*x, *y), "{x} vs {y}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn runs_are_deterministic(seed in 0u64..10_000) {
        let p = zoo::build(&Value::parse(&format!("sine(seed={seed}, nx=3, ny=2)")).unwrap()).unwrap();
        let cfg = auto_configure(&p.constants, Regime::NcSc).unwrap();
        let a = run(&p, &cfg, 1e-6, 500, Init::ProjectOrigin).unwrap();
        let b = run(&p, &cfg, 1e-6, 500, Init::ProjectOrigin).unwrap();
        prop_assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            prop_assert!(same_bits(ra.gap_norm, rb.gap_norm) && same_bits(ra.f_value, rb.f_value));
        }
    }
}
