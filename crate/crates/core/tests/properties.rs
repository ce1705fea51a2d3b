use proptest::prelude::*;
use timofrac_core::fraccalc::{
    caputo2_apply, caputo_apply, gamma_fn, rl_integral, rl_integral_series, FracOrder,
};
use timofrac_core::{Grid, TimeSeries};

fn caputo_rel_error(n: usize, beta: f64) -> f64 {
    let h = TimeSeries::from_fn(n, 1.0 / n as f64, |t| t * t * t).unwrap();
    let v = caputo_apply(&h, FracOrder::caputo(beta).unwrap()).unwrap();
    let exact = 6.0 / gamma_fn(4.0 - beta).unwrap();
    ((v - exact) / exact).abs()
}

fn caputo2_rel_error(n: usize, beta: f64, power: i32) -> f64 {
    let h = TimeSeries::from_fn(n, 1.0 / n as f64, |t| t.powi(power)).unwrap();
    let v = caputo2_apply(&h, FracOrder::caputo(beta).unwrap()).unwrap();
    let p = power as f64;
    let exact = gamma_fn(p + 1.0).unwrap() / gamma_fn(p + 1.0 - beta).unwrap();
    ((v - exact) / exact).abs()
}

// The observed order tends to 2 - β = 1.5 from below (1.476 at 64 steps,
// 1.498 at 16384).
#[test]
fn l1_order_on_cubic() {
    let e: Vec<f64> = [128, 256, 512, 1024]
        .iter()
        .map(|&n| caputo_rel_error(n, 0.5))
        .collect();
    let orders: Vec<f64> = e.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    for w in orders.windows(2) {
        assert!(w[1] > w[0], "{orders:?}");
    }
    assert!(orders.iter().all(|&p| p > 1.48 && p < 1.5), "{orders:?}");
}

#[test]
fn second_order_scheme_order_on_quartic() {
    let e: Vec<f64> = [128, 256, 512]
        .iter()
        .map(|&n| caputo2_rel_error(n, 1.5, 4))
        .collect();
    for w in e.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.0, "{e:?}");
    }
}

#[test]
fn riemann_liouville_examples() {
    let zero = TimeSeries::new(vec![0.0; 11], 0.1).unwrap();
    assert_eq!(rl_integral(&zero, FracOrder::integral(0.5).unwrap()).unwrap(), 0.0);
    let one = TimeSeries::from_fn(100, 0.01, |_| 1.0).unwrap();
    let v = rl_integral(&one, FracOrder::integral(0.5).unwrap()).unwrap();
    assert!((v - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-12);
    let lin = TimeSeries::from_fn(20, 0.1, |t| t).unwrap();
    let v = rl_integral(&lin, FracOrder::integral(1.0).unwrap()).unwrap();
    assert!((v - 2.0).abs() < 1e-13);
}

#[test]
fn riemann_liouville_semigroup() {
    let dt = 1e-3;
    let n = 1000;
    let u = TimeSeries::from_fn(n, dt, |t| (2.0 * t).cos() + t).unwrap();
    let (b, g) = (0.3, 0.4);
    let inner = rl_integral_series(&u, FracOrder::integral(g).unwrap()).unwrap();
    let nested = rl_integral(
        &TimeSeries::new(inner, dt).unwrap(),
        FracOrder::integral(b).unwrap(),
    )
    .unwrap();
    let direct = rl_integral(&u, FracOrder::integral(b + g).unwrap()).unwrap();
    assert!((nested - direct).abs() < 1e-4, "{nested} vs {direct}");
}

proptest! {
    #[test]
    fn caputo_is_linear(
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
        beta in 0.05f64..0.95,
        f1 in 0.1f64..4.0,
        f2 in 0.1f64..4.0,
    ) {
        let n = 64;
        let dt = 1.0 / n as f64;
        let u = TimeSeries::from_fn(n, dt, |t| (f1 * t).sin()).unwrap();
        let v = TimeSeries::from_fn(n, dt, |t| (f2 * t).exp()).unwrap();
        let w = TimeSeries::new(
            u.values().iter().zip(v.values()).map(|(x, y)| a * x + b * y).collect(),
            dt,
        ).unwrap();
        let o = FracOrder::caputo(beta).unwrap();
        let lhs = caputo_apply(&w, o).unwrap();
        let rhs = a * caputo_apply(&u, o).unwrap() + b * caputo_apply(&v, o).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn projection_is_idempotent_and_annihilates_moments(
        coeffs in prop::collection::vec(-3.0f64..3.0, 5),
        n_cells in 8usize..200,
        length in 0.2f64..5.0,
    ) {
        let g = Grid::new(length, n_cells).unwrap();
        let u = g.sample(|x| {
            coeffs.iter().enumerate().map(|(k, c)| c * (k as f64 * x / length * 2.7).cos()).sum()
        });
        let p = g.project_constraints(&u);
        let pp = g.project_constraints(&p);
        let scale = p.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        prop_assert!(g.satisfies_constraints(&p, 1e-12));
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn projection_is_linear(
        a in -4.0f64..4.0,
        f in 0.5f64..6.0,
        n_cells in 8usize..100,
    ) {
        let g = Grid::new(1.0, n_cells).unwrap();
        let u = g.sample(|x| (f * x).sin());
        let v = g.sample(|x| x * x * x);
        let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let pu = g.project_constraints(&u);
        let pv = g.project_constraints(&v);
        let pw = g.project_constraints(&w);
        for i in 0..g.n_nodes() {
            prop_assert!((pw[i] - (a * pu[i] + pv[i])).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn ix_is_exact_on_piecewise_linear(
        vals in prop::collection::vec(-10.0f64..10.0, 9..40),
    ) {
        let g = Grid::new(1.0, vals.len() - 1).unwrap();
        let out = g.ix(&vals);
        let mut acc = 0.0;
        for i in 1..vals.len() {
            acc += 0.5 * g.dx() * (vals[i - 1] + vals[i]);
            prop_assert!((out[i] - acc).abs() < 1e-12);
        }
    }

    #[test]
    fn duality_for_moment_free_fields(
        f in 0.5f64..5.0,
        h in 0.5f64..5.0,
    ) {
        let g = Grid::new(1.0, 128).unwrap();
        let u = g.project_constraints(&g.sample(|x| (f * x).cos() + x * x));
        let v = g.sample(|x| (h * x).sin());
        let lhs = g.inner(&u, &g.ix2(&v));
        let rhs = -g.inner(&g.ix(&u), &g.ix(&v));
        prop_assert!((lhs - rhs).abs() < 50.0 * g.dx() * g.dx());
    }

    #[test]
    fn l2_norm_is_a_norm(
        s in -5.0f64..5.0,
        f in 0.1f64..5.0,
        h in 0.1f64..5.0,
    ) {
        let g = Grid::new(2.0, 64).unwrap();
        let u = g.sample(|x| (f * x).sin());
        let v = g.sample(|x| (h * x).exp());
        let su: Vec<f64> = u.iter().map(|x| s * x).collect();
        let uv: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        prop_assert!((g.norm_l2(&su) - s.abs() * g.norm_l2(&u)).abs() < 1e-12 * (1.0 + g.norm_l2(&su)));
        prop_assert!(g.norm_l2(&uv) <= g.norm_l2(&u) + g.norm_l2(&v) + 1e-12);
    }
}
