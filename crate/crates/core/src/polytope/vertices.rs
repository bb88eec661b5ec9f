use crate::error::{Error, Result};
use crate::numerics::{solve_linear, DenseMatrix};
use crate::tol;

use super::{HPolytope, VERTEX_DEDUP_TOL};

pub const MAX_VERTEX_DIM: usize = 4;

/// Intersect every `dim`-subset of facets and keep the feasible points.
pub(super) fn enumerate(p: &HPolytope) -> Result<Vec<Vec<f64>>> {
    let d = p.dim();
    if d > MAX_VERTEX_DIM {
        return Err(Error::Unsupported(format!(
            "vertex enumeration in dimension {d} (limit {MAX_VERTEX_DIM})"
        )));
    }
    if p.is_empty()? {
        return Err(Error::EmptySet);
    }
    if !p.is_bounded()? {
        return Err(Error::Unbounded);
    }
    let q = p.remove_redundancy()?;
    let m = q.num_facets();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    if m < d {
        return Ok(out);
    }
    loop {
        let rows: Vec<&[f64]> = idx.iter().map(|&i| q.h().row(i)).collect();
        let a = DenseMatrix::from_rows(&rows)?;
        let rhs: Vec<f64> = idx.iter().map(|&i| q.b()[i]).collect();
        if let Some(x) = solve_linear(&a, &rhs, 1e-10) {
            let slack = tol::feas() * (1.0 + x.iter().fold(0.0f64, |s, v| s.max(v.abs())));
            if q.max_violation(&x) <= slack
                && !out.iter().any(|v| {
                    v.iter().zip(&x).all(|(a, b)| (a - b).abs() <= VERTEX_DEDUP_TOL)
                })
            {
                out.push(x);
            }
        }
        // Next combination in lexicographic order.
        let mut k = d;
        loop {
            if k == 0 {
                out.sort_by(|a, b| {
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                return Ok(out);
            }
            k -= 1;
            if idx[k] < m - d + k {
                idx[k] += 1;
                for t in k + 1..d {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_corners() {
        let v = HPolytope::hypercube(2, 1.0).unwrap().vertices().unwrap();
        assert_eq!(v, vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn rectangle_corners() {
        let v = HPolytope::symmetric_box(&[2.0, 1.0]).unwrap().vertices().unwrap();
        assert_eq!(v.len(), 4);
        for p in &v {
            assert_eq!(p[0].abs(), 2.0);
            assert_eq!(p[1].abs(), 1.0);
        }
    }

    #[test]
    fn simplex_3d() {
        let p = HPolytope::from_rows(
            &[[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0], [1.0, 1.0, 1.0]],
            &[0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let v = p.vertices().unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn degenerate_apex_deduplicated() {
        // Square pyramid: four facets meet at the apex.
        let p = HPolytope::from_rows(
            &[[0.0, 0.0, -1.0], [1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, -1.0, 1.0]],
            &[0.0, 1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(p.vertices().unwrap().len(), 5);
    }

    #[test]
    fn errors() {
        assert!(matches!(HPolytope::hypercube(5, 1.0).unwrap().vertices(), Err(Error::Unsupported(_))));
        let half = HPolytope::from_rows(&[[1.0, 0.0]], &[1.0]).unwrap();
        assert_eq!(half.vertices().unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn one_dimensional() {
        let v = HPolytope::axis_box(&[-3.0], &[2.0]).unwrap().vertices().unwrap();
        assert_eq!(v, vec![vec![-3.0], vec![2.0]]);
    }
}
