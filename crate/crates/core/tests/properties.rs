mod common;

use common::*;
use contracta_core::certificate::{certificate_with_radii, compute_certificate, ConstraintRadii};
use contracta_core::metric::{check_inclusion_equivalence, set_distance, EQUAL_TOL};
use contracta_core::numerics::{matrix_power, singular_extremes, symmetric_eigen};
use contracta_core::onestep::{is_lambda_contractive, SystemModel};
use contracta_core::polytope::{is_subset, CSetPolytope, HPolytope};
use contracta_core::seeds::{accept_user_seed, lyapunov_for_gain, polytopic_inner_seed, EllipsoidSeed};
use contracta_core::DenseMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn same_set(a: &HPolytope, b: &HPolytope) -> bool {
    is_subset(a, b).unwrap() && is_subset(b, a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_semigroup(seed in any::<u64>(), i in 0usize..5, j in 0usize..5) {
        let a = random_matrix(&mut rng(seed), 3, 3, 0.6);
        let lhs = matrix_power(&a, i + j).unwrap();
        let rhs = matrix_power(&a, i).unwrap().matmul(&matrix_power(&a, j).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn singular_values_2x2_closed_form(seed in any::<u64>()) {
        let m = random_matrix(&mut rng(seed), 2, 2, 3.0);
        let (p, q, r, s) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let t = p * p + q * q + r * r + s * s;
        let det = p * s - q * r;
        let disc = (t * t - 4.0 * det * det).max(0.0).sqrt();
        let big = ((t + disc) / 2.0).sqrt();
        let small = (det.abs() / big.max(1e-300)).min(big);
        let (lo, hi) = singular_extremes(&m).unwrap();
        prop_assert!((hi - big).abs() <= 1e-9 * (1.0 + big));
        prop_assert!((lo - small).abs() <= 1e-9 * (1.0 + big));
    }

    #[test]
    fn singular_values_match_gram_eigenvalues(seed in any::<u64>(), rows in 1usize..4, cols in 1usize..4) {
        let m = random_matrix(&mut rng(seed), rows, cols, 2.0);
        let gram = m.matmul(&m.transpose()).unwrap();
        let eig = symmetric_eigen(&gram).unwrap();
        let (lo, hi) = singular_extremes(&m).unwrap();
        let top = eig.values.last().unwrap().max(0.0).sqrt();
        prop_assert!((hi - top).abs() <= 1e-9 * (1.0 + top));
        if rows <= cols {
            let bottom = eig.values[0].max(0.0).sqrt();
            prop_assert!((lo - bottom).abs() <= 1e-9 * (1.0 + top));
        }
    }

    #[test]
    fn radial_scales_linearly(seed in any::<u64>(), dim in 1usize..3, mu in 0.1f64..5.0) {
        let mut g = rng(seed);
        let c = random_cset(&mut g, dim);
        let xi = random_direction(&mut g, dim);
        let scaled = c.scale(mu).unwrap();
        let r = c.radial(&xi).unwrap();
        prop_assert!((scaled.radial(&xi).unwrap() - mu * r).abs() <= 1e-12 * (1.0 + mu * r));
    }

    #[test]
    fn subset_bounds_radial(seed in any::<u64>(), dim in 1usize..3) {
        let mut g = rng(seed);
        let outer = random_cset(&mut g, dim);
        let inner = random_subset(&mut g, &outer);
        prop_assert!(is_subset(&inner, &outer).unwrap());
        for _ in 0..16 {
            let xi = random_direction(&mut g, dim);
            prop_assert!(inner.radial(&xi).unwrap() <= outer.radial(&xi).unwrap() + 1e-9);
        }
    }

    #[test]
    fn projection_undoes_cylinder_lift(seed in any::<u64>(), dim in 1usize..3) {
        let p = random_cset(&mut rng(seed), dim);
        let mut rows: Vec<Vec<f64>> = p.facets().map(|(h, _)| h.iter().copied().chain([0.0]).collect()).collect();
        let mut b = p.b().to_vec();
        for s in [1.0, -1.0] {
            let mut r = vec![0.0; dim + 1];
            r[dim] = s;
            rows.push(r);
            b.push(1.0);
        }
        let cylinder = HPolytope::from_rows(&rows, &b).unwrap();
        let back = cylinder.project(dim).unwrap();
        prop_assert!(same_set(&back, &p));
    }

    #[test]
    fn vertices_reproduce_support(seed in any::<u64>(), dim in 1usize..3) {
        let mut g = rng(seed);
        let p = random_cset(&mut g, dim);
        let verts = p.vertices().unwrap();
        for _ in 0..24 {
            let a = random_direction(&mut g, dim);
            let hull = verts.iter().map(|v| v.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((hull - p.support(&a).unwrap()).abs() <= 1e-8);
        }
    }

    #[test]
    fn redundancy_removal_keeps_the_set(seed in any::<u64>()) {
        let p = random_cset(&mut rng(seed), 2);
        let q = p.remove_redundancy().unwrap();
        prop_assert!(q.num_facets() <= p.num_facets());
        prop_assert!(same_set(&p, &q));
    }

    #[test]
    fn metric_axioms(seed in any::<u64>(), dim in 1usize..3) {
        let mut g = rng(seed);
        let (c, d, e) = (random_cset(&mut g, dim), random_cset(&mut g, dim), random_cset(&mut g, dim));
        let cd = set_distance(&c, &d).unwrap().distance;
        let dc = set_distance(&d, &c).unwrap().distance;
        prop_assert!((cd - dc).abs() <= 1e-12);
        let ce = set_distance(&c, &e).unwrap().distance;
        let de = set_distance(&d, &e).unwrap().distance;
        prop_assert!(cd <= ce + de + 1e-9);
        let cc = set_distance(&c, &c).unwrap();
        prop_assert!(cc.distance <= EQUAL_TOL && cc.sets_equal());
        prop_assert!(cd > EQUAL_TOL || same_set(&c, &d));
    }

    #[test]
    fn inclusion_characterization_matches_distance(seed in any::<u64>(), dim in 1usize..3) {
        let mut g = rng(seed);
        let d = random_cset(&mut g, dim);
        let c = random_subset(&mut g, &d);
        let dist = set_distance(&c, &d).unwrap().distance;
        prop_assert!(check_inclusion_equivalence(&c, &d, dist * (1.0 + 1e-9) + 1e-12).unwrap());
        if dist > 1e-6 {
            prop_assert!(!check_inclusion_equivalence(&c, &d, dist * 0.99).unwrap());
        }
    }

    #[test]
    fn eta_nonincreasing_in_lambda(seed in any::<u64>()) {
        let sys = random_controllable_2d(&mut rng(seed));
        let etas: Vec<f64> = (1..=20).map(|i| compute_certificate(&sys, i as f64 / 20.0).unwrap().eta).collect();
        prop_assert!(etas.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(etas.iter().all(|&e| (0.0..1.0).contains(&e)));
    }

    #[test]
    fn conservative_radii_stay_sound(seed in any::<u64>(), shrink in 0.2f64..1.0, grow in 1.0f64..3.0) {
        let sys = random_controllable_2d(&mut rng(seed));
        let exact = ConstraintRadii::of(&sys).unwrap();
        let loose = ConstraintRadii {
            r_x_lo: exact.r_x_lo * shrink,
            r_x_hi: exact.r_x_hi * grow,
            r_u_lo: exact.r_u_lo * shrink,
        };
        let a = certificate_with_radii(&sys, 0.9, exact).unwrap();
        let b = certificate_with_radii(&sys, 0.9, loose).unwrap();
        prop_assert!(b.eta < 1.0 && b.eta >= a.eta - 1e-15);
    }
}

fn stabilized_diagonal(g: &mut ChaCha8Rng, n: usize) -> (SystemModel, DenseMatrix, f64) {
    let poles: Vec<f64> = (0..n).map(|_| g.gen_range(0.9..1.3)).collect();
    let gains: Vec<f64> = (0..n).map(|_| g.gen_range(0.2..0.5)).collect();
    let lambda = g.gen_range(0.3..0.6);
    let sys = SystemModel::new(
        DenseMatrix::diagonal(&poles),
        DenseMatrix::identity(n),
        CSetPolytope::hypercube(n, 10.0).unwrap(),
        CSetPolytope::hypercube(n, 1.0).unwrap(),
    )
    .unwrap();
    let k = DenseMatrix::diagonal(&poles.iter().zip(&gains).map(|(p, r)| r - p).collect::<Vec<_>>());
    (sys, k, lambda)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn seeds_are_contractive_at_reported_rate(seed in any::<u64>(), n in 1usize..3) {
        let mut g = rng(seed);
        let (sys, k, lambda) = stabilized_diagonal(&mut g, n);
        let p = lyapunov_for_gain(&sys, &k, lambda).unwrap();
        let seed = EllipsoidSeed { k, p, beta: g.gen_range(0.05..0.5), lambda };
        match polytopic_inner_seed(&sys, &seed) {
            Ok((c, rate)) => {
                prop_assert!((rate - lambda * (n as f64).sqrt()).abs() <= 1e-12);
                prop_assert!(is_lambda_contractive(&sys, rate, &c).unwrap());
            }
            Err(e) => prop_assert!(matches!(e, contracta_core::Error::InvalidSeed(_) | contracta_core::Error::RateTooWeak(_)), "{e}"),
        }
    }

    #[test]
    fn accepted_seeds_closed_under_shrinking(seed in any::<u64>(), mu in 0.05f64..=1.0) {
        let mut g = rng(seed);
        let sys = random_controllable_2d(&mut g);
        let c = sys.x().scale(g.gen_range(0.05..0.3)).unwrap();
        let lambda = 1.0;
        if let Ok(c) = accept_user_seed(&sys, lambda, &c) {
            prop_assert!(accept_user_seed(&sys, lambda, &c.scale(mu).unwrap()).is_ok());
        }
    }
}

#[test]
fn sampled_directions_bracket_distance() {
    let mut g = rng(11);
    for _ in 0..10 {
        let c = random_cset(&mut g, 2);
        let d = random_cset(&mut g, 2);
        let exact = set_distance(&c, &d).unwrap().distance;
        let mut sampled = 0.0f64;
        for i in 0..10_000 {
            let t = i as f64 / 10_000.0 * std::f64::consts::TAU;
            let xi = [t.cos(), t.sin()];
            sampled = sampled.max((c.radial(&xi).unwrap().ln() - d.radial(&xi).unwrap().ln()).abs());
        }
        assert!(sampled <= exact + 1e-9 && exact <= sampled + 1e-3, "sampled {sampled}, exact {exact}");
    }
}

#[test]
fn seed_properties_are_not_vacuous() {
    let (mut built, mut accepted) = (0, 0);
    for s in 0..40 {
        let mut g = rng(s);
        let n = 1 + (s as usize % 2);
        let (sys, k, lambda) = stabilized_diagonal(&mut g, n);
        let p = lyapunov_for_gain(&sys, &k, lambda).unwrap();
        let seed = EllipsoidSeed { k, p, beta: g.gen_range(0.05..0.5), lambda };
        built += polytopic_inner_seed(&sys, &seed).is_ok() as usize;
        let sys = random_controllable_2d(&mut g);
        let c = sys.x().scale(g.gen_range(0.05..0.3)).unwrap();
        accepted += accept_user_seed(&sys, 1.0, &c).is_ok() as usize;
    }
    assert!(built >= 10 && accepted >= 5, "built {built}, accepted {accepted}");
}
