mod common;

use common::{masses, random_connected, random_nested, rel_err, rng};
use polya_core::engine::{Reinforcement, UrnState};
use polya_core::graph::{verify_automorphism, Network, Permutation};
use polya_core::oracle::{
    expected_exposure, infection_rate_time1, infection_rate_time1_red_gradient, Enumerator,
    ExposureOptions, Schedule,
};
use rand::Rng;

fn i1(net: &Network, red: &[f64], black: &[f64]) -> f64 {
    infection_rate_time1(net, red, black).unwrap().value
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

/// A state a few random steps into a run, so exposure tests see uneven urns.
fn advanced_state<'a>(net: &'a Network, r: &mut impl Rng) -> UrnState<'a> {
    let n = net.node_count();
    let mut state = UrnState::new(net, &masses(n, 0.2, 4.0, r), &masses(n, 0.2, 4.0, r)).unwrap();
    for _ in 0..r.gen_range(0..4) {
        let delta = Reinforcement::new(masses(n, 0.0, 3.0, r), masses(n, 0.0, 3.0, r));
        let y: Vec<f64> = (0..n).map(|_| r.gen()).collect();
        state.step(&delta, &y).unwrap();
    }
    state
}

#[test]
fn time1_closed_form_matches_enumeration() {
    let mut r = rng(31);
    for _ in 0..100 {
        let n = r.gen_range(1..=8);
        let net = random_connected(n, 0.4, &mut r);
        let red = masses(n, 0.1, 5.0, &mut r);
        let black = masses(n, 0.0, 5.0, &mut r);
        let schedule = Schedule::constant(n, 1.0, 1.0);
        let exact = Enumerator::default()
            .average_infection_rate(&net, &red, &black, &schedule, 1)
            .unwrap();
        assert!((i1(&net, &red, &black) - exact).abs() < 1e-14);
    }
}

#[test]
fn time1_is_convex_in_black_and_concave_in_red() {
    let mut r = rng(32);
    for _ in 0..1000 {
        let n = r.gen_range(1..=10);
        let net = random_connected(n, 0.4, &mut r);
        let red = masses(n, 0.1, 5.0, &mut r);
        let (b1, b2) = (masses(n, 0.0, 10.0, &mut r), masses(n, 0.0, 10.0, &mut r));
        let mid = i1(&net, &red, &midpoint(&b1, &b2));
        assert!(mid <= 0.5 * (i1(&net, &red, &b1) + i1(&net, &red, &b2)) + 1e-15);

        let black = masses(n, 0.1, 5.0, &mut r);
        let (r1, r2) = (masses(n, 0.1, 10.0, &mut r), masses(n, 0.1, 10.0, &mut r));
        let mid = i1(&net, &midpoint(&r1, &r2), &black);
        assert!(mid >= 0.5 * (i1(&net, &r1, &black) + i1(&net, &r2, &black)) - 1e-15);
    }
}

#[test]
fn exposure_is_convex_in_curing_and_concave_in_infection() {
    let mut r = rng(33);
    let opts = ExposureOptions::default();
    let e = |s: &UrnState, x: &[f64], y: &[f64]| expected_exposure(s, x, y, &opts).unwrap().value;
    for _ in 0..1000 {
        let n = r.gen_range(1..=7);
        let net = random_connected(n, 0.4, &mut r);
        let state = advanced_state(&net, &mut r);
        let y = masses(n, 0.0, 5.0, &mut r);
        let (x1, x2) = (masses(n, 0.0, 10.0, &mut r), masses(n, 0.0, 10.0, &mut r));
        assert!(
            e(&state, &midpoint(&x1, &x2), &y)
                <= 0.5 * (e(&state, &x1, &y) + e(&state, &x2, &y)) + 1e-15
        );
        let x = masses(n, 0.0, 5.0, &mut r);
        let (y1, y2) = (masses(n, 0.0, 10.0, &mut r), masses(n, 0.0, 10.0, &mut r));
        assert!(
            e(&state, &x, &midpoint(&y1, &y2))
                >= 0.5 * (e(&state, &x, &y1) + e(&state, &x, &y2)) - 1e-15
        );
    }
}

fn central_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], j: usize, scale: f64) -> f64 {
    let h = 1e-6 * scale;
    let mut plus = at.to_vec();
    let mut minus = at.to_vec();
    plus[j] += h;
    minus[j] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

#[test]
fn gradients_match_finite_differences() {
    let mut r = rng(34);
    let opts = ExposureOptions::default();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.gen_range(1..=7);
        let net = random_connected(n, 0.4, &mut r);
        let red = masses(n, 0.5, 5.0, &mut r);
        let black = masses(n, 0.5, 5.0, &mut r);
        let g = infection_rate_time1(&net, &red, &black).unwrap().grad_black;
        let gr = infection_rate_time1_red_gradient(&net, &red, &black).unwrap();
        let state = advanced_state(&net, &mut r);
        let x = masses(n, 0.5, 5.0, &mut r);
        let y = masses(n, 0.5, 5.0, &mut r);
        let ev = expected_exposure(&state, &x, &y, &opts).unwrap();
        for j in 0..n {
            let fd = central_difference(|b| i1(&net, &red, b), &black, j, 5.0);
            worst = worst.max(rel_err(g[j], fd));
            let fd = central_difference(|rr| i1(&net, rr, &black), &red, j, 5.0);
            worst = worst.max(rel_err(gr[j], fd));
            let fd = central_difference(
                |xx| expected_exposure(&state, xx, &y, &opts).unwrap().value,
                &x,
                j,
                5.0,
            );
            worst = worst.max(rel_err(ev.grad_curing[j], fd));
            let fd = central_difference(
                |yy| expected_exposure(&state, &x, yy, &opts).unwrap().value,
                &y,
                j,
                5.0,
            );
            worst = worst.max(rel_err(ev.grad_infection[j], fd));
        }
    }
    assert!(worst < 1e-6, "worst relative error {worst:e}");
}

/// `E[S̃_n | F_{n-1}]` by summing over every joint draw vector.
fn naive_exposure(state: &UrnState, x: &[f64], y: &[f64]) -> f64 {
    let n = state.node_count();
    let s = state.super_proportions();
    let step = Reinforcement::new(y.to_vec(), x.to_vec());
    let mut total = 0.0;
    for code in 0u32..(1 << n) {
        let z: Vec<bool> = (0..n).map(|i| code >> i & 1 == 1).collect();
        let p: f64 = (0..n)
            .map(|i| if z[i] { s[i] } else { 1.0 - s[i] })
            .product();
        let mut next = state.clone();
        next.apply_draws(&step, &z).unwrap();
        total += p * next.super_proportions().iter().sum::<f64>() / n as f64;
    }
    total
}

#[test]
fn exposure_matches_full_enumeration() {
    let mut r = rng(35);
    for _ in 0..200 {
        let n = r.gen_range(1..=4);
        let net = random_connected(n, 0.5, &mut r);
        let state = advanced_state(&net, &mut r);
        let x = masses(n, 0.0, 5.0, &mut r);
        let y = masses(n, 0.0, 5.0, &mut r);
        let v = expected_exposure(&state, &x, &y, &ExposureOptions::default())
            .unwrap()
            .value;
        assert!((v - naive_exposure(&state, &x, &y)).abs() < 1e-12);
    }
}

#[test]
fn infection_rate_is_monotone_in_both_colours() {
    let mut r = rng(36);
    let e = Enumerator::default();
    for _ in 0..60 {
        let n = r.gen_range(1..=3);
        let steps = r.gen_range(1..=3);
        let net = random_connected(n, 0.5, &mut r);
        let red = masses(n, 0.2, 3.0, &mut r);
        let black = masses(n, 0.2, 3.0, &mut r);
        let schedule = Schedule::constant(n, r.gen_range(0.0..3.0), r.gen_range(0.0..3.0));
        let base = e
            .average_infection_rate(&net, &red, &black, &schedule, steps)
            .unwrap();
        let j = r.gen_range(0..n);
        let bump = r.gen_range(0.1..3.0);
        let mut more_black = black.clone();
        more_black[j] += bump;
        let mut more_red = red.clone();
        more_red[j] += bump;
        let lower = e
            .average_infection_rate(&net, &red, &more_black, &schedule, steps)
            .unwrap();
        let higher = e
            .average_infection_rate(&net, &more_red, &black, &schedule, steps)
            .unwrap();
        assert!(lower <= base + 1e-12, "black bump raised {base} to {lower}");
        assert!(
            higher >= base - 1e-12,
            "red bump lowered {base} to {higher}"
        );
    }
}

#[test]
fn moving_black_from_outer_node_onto_its_container_helps() {
    let mut r = rng(37);
    let mut checked = 0;
    for _ in 0..300 {
        let n = r.gen_range(3..=12);
        let net = random_nested(n, &mut r);
        let red = masses(n, 0.1, 5.0, &mut r);
        let black = masses(n, 0.0, 5.0, &mut r);
        for i in net.outer_nodes() {
            for &j in net.neighbors(i) {
                if !net.strictly_nested(i, j) {
                    continue;
                }
                let mut merged = black.clone();
                merged[j] += merged[i];
                merged[i] = 0.0;
                assert!(i1(&net, &red, &merged) <= i1(&net, &red, &black) + 1e-15);
                checked += 1;
            }
        }
    }
    assert!(checked > 300);
}

#[test]
fn orbit_averaging_never_hurts() {
    let mut r = rng(38);
    for n in 3..=9 {
        let net = Network::cycle(n);
        let rot = Permutation::new((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        let orbits = verify_automorphism(&net, &rot).unwrap();
        let red = vec![2.0; n];
        for _ in 0..50 {
            let black = masses(n, 0.0, 10.0, &mut r);
            let avg = orbits.average(&black);
            assert!(i1(&net, &red, &avg) <= i1(&net, &red, &black) + 1e-15);
        }
    }
    // Star with the leaves rotated; red is constant on leaves.
    let net = Network::star(5);
    let sigma = Permutation::new(vec![0, 2, 3, 4, 5, 1]).unwrap();
    let orbits = verify_automorphism(&net, &sigma).unwrap();
    let red = [3.0, 1.0, 1.0, 1.0, 1.0, 1.0];
    for _ in 0..50 {
        let black = masses(6, 0.0, 10.0, &mut r);
        assert!(i1(&net, &red, &orbits.average(&black)) <= i1(&net, &red, &black) + 1e-15);
    }
}

#[test]
fn gradient_signs() {
    let mut r = rng(39);
    for _ in 0..200 {
        let n = r.gen_range(1..=8);
        let net = random_connected(n, 0.4, &mut r);
        let red = masses(n, 0.1, 5.0, &mut r);
        let black = masses(n, 0.0, 5.0, &mut r);
        let g = infection_rate_time1(&net, &red, &black).unwrap();
        assert!(g.grad_black.iter().all(|&v| v < 0.0));
        let gr = infection_rate_time1_red_gradient(&net, &red, &black).unwrap();
        assert!(gr.iter().all(|&v| v >= 0.0));
        let state = advanced_state(&net, &mut r);
        let ev = expected_exposure(
            &state,
            &masses(n, 0.0, 3.0, &mut r),
            &masses(n, 0.0, 3.0, &mut r),
            &ExposureOptions::default(),
        )
        .unwrap();
        assert!(ev.grad_curing.iter().all(|&v| v <= 0.0));
        assert!(ev.grad_infection.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn joint_probabilities_sum_to_one() {
    let mut r = rng(40);
    for _ in 0..40 {
        let n = r.gen_range(1..=4);
        let steps = r.gen_range(1..=(12 / n).min(4));
        let net = random_connected(n, 0.5, &mut r);
        let schedule = Schedule::constant(n, r.gen_range(0.0..3.0), r.gen_range(0.0..3.0));
        let total = Enumerator::default()
            .partition_sanity(
                &net,
                &masses(n, 0.1, 3.0, &mut r),
                &masses(n, 0.1, 3.0, &mut r),
                &schedule,
                steps,
            )
            .unwrap();
        assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn enumeration_cap_is_enforced() {
    let net = Network::path(5);
    let s = Schedule::constant(5, 1.0, 1.0);
    let e = Enumerator::with_cap(10);
    assert!(e
        .average_infection_rate(&net, &[1.0; 5], &[1.0; 5], &s, 3)
        .is_ok());
    assert!(e
        .average_infection_rate(&net, &[1.0; 5], &[1.0; 5], &s, 4)
        .is_err());
}
