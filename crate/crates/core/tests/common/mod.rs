#![allow(dead_code)]

use contracta_core::onestep::SystemModel;
use contracta_core::polytope::{CSetPolytope, HPolytope};
use contracta_core::DenseMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random interval around 0 or random polygon with 3 to 7 facets plus a box cap.
pub fn random_cset(rng: &mut ChaCha8Rng, dim: usize) -> CSetPolytope {
    if dim == 1 {
        let lo = rng.gen_range(0.3..3.0);
        let hi = rng.gen_range(0.3..3.0);
        return CSetPolytope::new(HPolytope::axis_box(&[-lo], &[hi]).unwrap()).unwrap();
    }
    assert_eq!(dim, 2);
    let k = rng.gen_range(3..=7);
    let mut rows: Vec<[f64; 2]> = Vec::new();
    let mut b = Vec::new();
    for _ in 0..k {
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        rows.push([t.cos(), t.sin()]);
        b.push(rng.gen_range(0.5..2.0));
    }
    let cap = rng.gen_range(1.5..3.0);
    for r in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
        rows.push(r);
        b.push(cap);
    }
    CSetPolytope::new(HPolytope::from_rows(&rows, &b).unwrap()).unwrap()
}

/// A random C-set strictly inside `outer` (a random set intersected with a shrunk copy of `outer`).
pub fn random_subset(rng: &mut ChaCha8Rng, outer: &CSetPolytope) -> CSetPolytope {
    let shrunk = outer.scale(rng.gen_range(0.3..0.95)).unwrap();
    let other = random_cset(rng, outer.dim());
    CSetPolytope::new(shrunk.intersect(&other).unwrap().remove_redundancy().unwrap()).unwrap()
}

/// Unit vector in a random direction.
pub fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random controllable `(A, B)` in `ℝ²` with a single input and box constraints.
pub fn random_controllable_2d(rng: &mut ChaCha8Rng) -> SystemModel {
    loop {
        let a = DenseMatrix::from_rows(&[
            [rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)],
            [rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)],
        ])
        .unwrap();
        let b = DenseMatrix::from_rows(&[[rng.gen_range(-1.0..1.0)], [rng.gen_range(-1.0..1.0)]]).unwrap();
        let x = CSetPolytope::symmetric_box(&[rng.gen_range(3.0..8.0), rng.gen_range(3.0..8.0)]).unwrap();
        let u = CSetPolytope::hypercube(1, rng.gen_range(0.5..2.0)).unwrap();
        let sys = SystemModel::new(a, b, x, u).unwrap();
        if sys.reachability_sigma_min() > 0.05 {
            return sys;
        }
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: f64) -> DenseMatrix {
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-r..r)).collect()).unwrap()
}
