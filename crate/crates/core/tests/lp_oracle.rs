//! Simplex results against brute-force vertex enumeration in dimension ≤ 3.

use contracta_core::lp::{solve_lp, LinearProgram, LpOutcome};
use contracta_core::DenseMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOX: f64 = 5.0;

/// Gaussian elimination with partial pivoting; None when nearly singular.
fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        rhs.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Best objective over all feasible vertices of `{Ax ≤ b, |x|∞ ≤ BOX}`.
fn vertex_oracle(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let d = c.len();
    let mut all_rows = rows.to_vec();
    let mut all_b = b.to_vec();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut r = vec![0.0; d];
            r[i] = s;
            all_rows.push(r);
            all_b.push(BOX);
        }
    }
    let mut best: Option<f64> = None;
    for idx in combinations(all_rows.len(), d) {
        let a = idx.iter().map(|&i| all_rows[i].clone()).collect();
        let rhs = idx.iter().map(|&i| all_b[i]).collect();
        let Some(x) = solve(a, rhs) else { continue };
        let feasible = all_rows
            .iter()
            .zip(&all_b)
            .all(|(r, bi)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bi + 1e-9);
        if feasible {
            let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
            best = Some(best.map_or(v, |bv| bv.max(v)));
        }
    }
    best
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let d = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=6);
    let c = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let rows = (0..m).map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
    let b = (0..m).map(|_| rng.gen_range(-2.0..4.0)).collect();
    (c, rows, b)
}

fn program(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> LinearProgram {
    let d = c.len();
    LinearProgram::new(c.to_vec(), DenseMatrix::from_rows(rows).unwrap(), b.to_vec())
        .unwrap()
        .with_bounds(vec![Some(-BOX); d], vec![Some(BOX); d])
        .unwrap()
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut optimal, mut infeasible) = (0, 0);
    for case in 0..400 {
        let (c, rows, b) = random_instance(&mut rng);
        let p = program(&c, &rows, &b);
        let oracle = vertex_oracle(&c, &rows, &b);
        match (solve_lp(&p).unwrap(), oracle) {
            (LpOutcome::Optimal { value, x }, Some(best)) => {
                assert!((value - best).abs() <= 1e-9 * (1.0 + best.abs()), "case {case}: {value} vs {best}");
                assert!(p.max_violation(&x) <= 1e-9, "case {case}: infeasible optimizer");
                optimal += 1;
            }
            (LpOutcome::Infeasible, None) => infeasible += 1,
            (got, want) => panic!("case {case}: simplex {got:?}, oracle {want:?}"),
        }
    }
    assert!(optimal > 100 && infeasible > 10, "{optimal} optimal, {infeasible} infeasible");
}

#[test]
fn free_variables_unbounded_direction() {
    let rows = DenseMatrix::from_rows(&[[1.0, -1.0], [-1.0, -1.0]]).unwrap();
    let p = LinearProgram::new(vec![0.0, -1.0], rows, vec![0.0, 0.0]).unwrap();
    assert!(matches!(solve_lp(&p).unwrap(), LpOutcome::Optimal { value, .. } if value.abs() < 1e-12));
    let rows = DenseMatrix::from_rows(&[[1.0, -1.0], [-1.0, -1.0]]).unwrap();
    let p = LinearProgram::new(vec![0.0, 1.0], rows, vec![0.0, 0.0]).unwrap();
    assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Unbounded);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solves_are_bit_identical(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, rows, b) = random_instance(&mut rng);
        let p = program(&c, &rows, &b);
        let first = solve_lp(&p).unwrap();
        let second = solve_lp(&p.clone()).unwrap();
        match (&first, &second) {
            (LpOutcome::Optimal { value: v1, x: x1 }, LpOutcome::Optimal { value: v2, x: x2 }) => {
                prop_assert_eq!(v1.to_bits(), v2.to_bits());
                prop_assert!(x1.iter().zip(x2).all(|(a, b)| a.to_bits() == b.to_bits()));
            }
            _ => prop_assert_eq!(first, second),
        }
    }
}
