mod common;

use std::cell::RefCell;

use common::{masses, random_connected, random_nested, rng};
use polya_core::engine::UrnState;
use polya_core::graph::Network;
use polya_core::optimize::{
    frank_wolfe_simplex, nash_solve, optimize_cure_step, optimize_init, DescentConfig, GameConfig,
    InitObjective, Objective, OptimizeError,
};
use polya_core::oracle::{expected_exposure, infection_rate_time1, ExposureOptions};
use rand::Rng;

/// Remembers every point the descent evaluates.
struct Recording<O> {
    inner: O,
    seen: RefCell<Vec<Vec<f64>>>,
}

impl<O: Objective> Objective for Recording<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>), OptimizeError> {
        self.seen.borrow_mut().push(x.to_vec());
        self.inner.evaluate(x)
    }
}

fn i1(net: &Network, red: &[f64], black: &[f64]) -> f64 {
    infection_rate_time1(net, red, black).unwrap().value
}

#[test]
fn iterates_descend_and_stay_feasible() {
    let mut r = rng(51);
    for _ in 0..40 {
        let n = r.gen_range(2..=10);
        let net = random_connected(n, 0.4, &mut r);
        let red = masses(n, 0.5, 5.0, &mut r);
        let budget = r.gen_range(1.0..100.0);
        let f = Recording {
            inner: InitObjective {
                net: &net,
                red: &red,
            },
            seen: RefCell::new(Vec::new()),
        };
        let cfg = DescentConfig {
            stoptime: 300,
            ..Default::default()
        };
        let res = frank_wolfe_simplex(&f, budget, &cfg).unwrap();
        for w in res.trace.windows(2) {
            assert!(
                w[1].objective <= w[0].objective,
                "{} then {}",
                w[0].objective,
                w[1].objective
            );
        }
        for x in f.seen.borrow().iter() {
            assert!(x.iter().all(|&v| v >= 0.0));
            assert!((x.iter().sum::<f64>() - budget).abs() <= 1e-12 * budget);
        }
    }
}

/// Smallest value of `f` over the grid `{x = budget·k/steps, Σk = steps}`.
fn grid_minimum(n: usize, steps: usize, budget: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    fn rec(
        k: &mut Vec<usize>,
        left: usize,
        n: usize,
        budget: f64,
        steps: usize,
        f: &dyn Fn(&[f64]) -> f64,
        best: &mut f64,
    ) {
        if k.len() == n - 1 {
            k.push(left);
            let x: Vec<f64> = k
                .iter()
                .map(|&c| budget * c as f64 / steps as f64)
                .collect();
            *best = best.min(f(&x));
            k.pop();
            return;
        }
        for c in 0..=left {
            k.push(c);
            rec(k, left - c, n, budget, steps, f, best);
            k.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(&mut Vec::new(), steps, n, budget, steps, &f, &mut best);
    best
}

#[test]
fn gap_bounds_the_suboptimality() {
    let mut r = rng(52);
    for _ in 0..30 {
        let n = r.gen_range(2..=4);
        let net = random_connected(n, 0.5, &mut r);
        let red = masses(n, 0.5, 5.0, &mut r);
        let budget = r.gen_range(1.0..20.0);
        let grid = grid_minimum(n, 60, budget, |b| i1(&net, &red, b));
        let res = optimize_init(&net, &red, budget, &DescentConfig::default()).unwrap();
        // f* <= grid, so f(y_k) - grid <= f(y_k) - f* <= g_k.
        for p in &res.trace {
            assert!(
                p.objective - grid <= p.gap + 1e-12,
                "iteration {}",
                p.iteration
            );
        }
        assert!(res.objective <= grid + 1e-12);

        let state = UrnState::new(&net, &red, &masses(n, 0.5, 5.0, &mut r)).unwrap();
        let y = masses(n, 0.0, 5.0, &mut r);
        let opts = ExposureOptions::default();
        let e = |x: &[f64]| expected_exposure(&state, x, &y, &opts).unwrap().value;
        let grid = grid_minimum(n, 40, budget, e);
        let res = optimize_cure_step(&state, budget, &y, &DescentConfig::default(), &opts).unwrap();
        for p in &res.trace {
            assert!(p.objective - grid <= p.gap + 1e-12);
        }
        assert!(res.objective <= grid + 1e-12);
    }
}

#[test]
fn complete_graph_is_no_worse_than_uniform() {
    for n in 2..=8 {
        let net = Network::complete(n);
        let red = vec![3.0; n];
        let budget = 7.0 * n as f64;
        let res = optimize_init(&net, &red, budget, &DescentConfig::default()).unwrap();
        assert!(res.objective <= i1(&net, &red, &vec![budget / n as f64; n]) + 1e-9);
    }
}

#[test]
fn outer_nodes_get_almost_nothing() {
    let mut r = rng(53);
    for _ in 0..20 {
        let n = r.gen_range(3..=12);
        let net = random_nested(n, &mut r);
        let red = vec![r.gen_range(0.5..5.0); n];
        let budget = r.gen_range(1.0..50.0);
        let res = optimize_init(&net, &red, budget, &DescentConfig::default()).unwrap();
        let on_outer: f64 = net.outer_nodes().iter().map(|&i| res.x[i]).sum();
        assert!(
            on_outer < 1e-3 * budget,
            "{on_outer} of {budget} on outer nodes"
        );
    }
}

/// No single transfer of mass between two coordinates helps either player by
/// more than the certified exploitability.
fn assert_stable(state: &UrnState, x: &[f64], y: &[f64], eps: f64) {
    let opts = ExposureOptions::default();
    let e = |x: &[f64], y: &[f64]| expected_exposure(state, x, y, &opts).unwrap().value;
    let v = e(x, y);
    let n = x.len();
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            for frac in [0.25, 0.5, 1.0] {
                let mut x2 = x.to_vec();
                x2[to] += frac * x2[from];
                x2[from] *= 1.0 - frac;
                assert!(e(&x2, y) >= v - eps - 1e-9, "curing move {from}->{to}");
                let mut y2 = y.to_vec();
                y2[to] += frac * y2[from];
                y2[from] *= 1.0 - frac;
                assert!(e(x, &y2) <= v + eps + 1e-9, "infection move {from}->{to}");
            }
        }
    }
}

#[test]
fn equilibria_resist_single_coordinate_moves() {
    let mut r = rng(54);
    for _ in 0..6 {
        let n = r.gen_range(2..=6);
        let net = random_connected(n, 0.4, &mut r);
        let state = UrnState::new(
            &net,
            &masses(n, 1.0, 5.0, &mut r),
            &masses(n, 1.0, 5.0, &mut r),
        )
        .unwrap();
        let (bb, br) = (r.gen_range(1.0..20.0), r.gen_range(1.0..20.0));
        let s = nash_solve(&state, bb, br, &GameConfig::default()).unwrap();
        assert!(s.exploitability >= 0.0);
        assert!((s.curing.iter().sum::<f64>() - bb).abs() <= 1e-9 * bb);
        assert!((s.infection.iter().sum::<f64>() - br).abs() <= 1e-9 * br);
        assert!(s.converged, "exploitability {:e}", s.exploitability);
        assert_stable(&state, &s.curing, &s.infection, s.exploitability);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let net = Network::path(3);
    let bad = DescentConfig {
        stoptime: 0,
        ..Default::default()
    };
    assert!(optimize_init(&net, &[1.0; 3], 1.0, &bad).is_err());
    assert!(optimize_init(&net, &[1.0; 3], -1.0, &DescentConfig::default()).is_err());
    assert!(optimize_init(&net, &[0.0; 3], 1.0, &DescentConfig::default()).is_err());
    let state = UrnState::new(&net, &[1.0; 3], &[1.0; 3]).unwrap();
    let cfg = GameConfig {
        rounds: 0,
        ..Default::default()
    };
    assert!(nash_solve(&state, 1.0, 1.0, &cfg).is_err());
}
