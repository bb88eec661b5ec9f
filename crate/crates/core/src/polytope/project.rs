use crate::error::{Error, Result};
use crate::numerics::{norm2, DenseMatrix};
use crate::tol;

use super::HPolytope;

/// Environment variable capping the facet count after each elimination.
pub const MAX_FACETS_ENV: &str = "CONTRACTA_MAX_FACETS";
pub const DEFAULT_MAX_FACETS: usize = 10_000;

/// Coefficients below this (relative to the row norm) count as zero.
const ZERO_COEF: f64 = 1e-12;

pub fn max_facets() -> usize {
    std::env::var(MAX_FACETS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v > 0)
        .unwrap_or(DEFAULT_MAX_FACETS)
}

pub(super) fn fourier_motzkin(p: &HPolytope, keep: usize) -> Result<HPolytope> {
    if keep == 0 || keep >= p.dim() {
        return Err(Error::InvalidParameter(format!(
            "projection keeps {keep} of {} coordinates",
            p.dim()
        )));
    }
    let cap = max_facets();
    let mut cur = p.remove_redundancy()?;
    for var in (keep..p.dim()).rev() {
        cur = eliminate_last(&cur, var, cap)?.remove_redundancy()?;
    }
    Ok(cur)
}

/// Eliminate coordinate `var`, which must be the last one of `p`.
fn eliminate_last(p: &HPolytope, var: usize, cap: usize) -> Result<HPolytope> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut zero = Vec::new();
    for (i, (h, _)) in p.facets().enumerate() {
        let c = h[var];
        if c.abs() <= ZERO_COEF * norm2(h) {
            zero.push(i);
        } else if c > 0.0 {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }

    let count = zero.len() + pos.len() * neg.len();
    if count > cap {
        return Err(Error::FacetLimit { count, cap });
    }

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut offs = Vec::with_capacity(count);
    let mut push = |row: Vec<f64>, b: f64| -> Result<()> {
        let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale <= ZERO_COEF {
            if b < -tol::feas() {
                return Err(Error::EmptySet);
            }
            return Ok(());
        }
        rows.push(row);
        offs.push(b);
        Ok(())
    };

    for &i in &zero {
        let (h, b) = p.facet(i);
        push(h[..var].to_vec(), b)?;
    }
    for &i in &pos {
        let (hp, bp) = p.facet(i);
        let cp = hp[var];
        for &j in &neg {
            let (hn, bn) = p.facet(j);
            let cn = -hn[var];
            let row: Vec<f64> = (0..var).map(|t| hp[t] / cp + hn[t] / cn).collect();
            push(row, bp / cp + bn / cn)?;
        }
    }

    if rows.is_empty() {
        return HPolytope::whole_space(var);
    }
    HPolytope::new(DenseMatrix::from_rows(&rows)?, offs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::is_subset;

    fn same_set(p: &HPolytope, q: &HPolytope) -> bool {
        is_subset(p, q).unwrap() && is_subset(q, p).unwrap()
    }

    #[test]
    fn hand_elimination() {
        // x - u ≤ 0, u ≤ 1, -u ≤ 1, -x ≤ 2  ⟹  -2 ≤ x ≤ 1
        let p = HPolytope::from_rows(&[[1.0, -1.0], [0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]], &[0.0, 1.0, 1.0, 2.0]).unwrap();
        let s = p.project(1).unwrap();
        assert!((s.support(&[1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.support(&[-1.0]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(s.num_facets(), 2);
    }

    #[test]
    fn cube_shadow() {
        let c = HPolytope::hypercube(3, 1.0).unwrap();
        let s = c.project(2).unwrap();
        assert!(same_set(&s, &HPolytope::hypercube(2, 1.0).unwrap()));
        assert_eq!(s.num_facets(), 4);
    }

    #[test]
    fn unconstrained_tail_gives_whole_space() {
        // Only constrains the eliminated coordinate.
        let p = HPolytope::from_rows(&[[0.0, 1.0], [0.0, -1.0]], &[1.0, 1.0]).unwrap();
        let s = p.project(1).unwrap();
        assert_eq!(s.num_facets(), 0);
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn empty_input_rejected() {
        let p = HPolytope::from_rows(&[[1.0, 1.0], [-1.0, -1.0]], &[-1.0, -1.0]).unwrap();
        assert_eq!(p.project(1).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn invalid_keep() {
        let c = HPolytope::hypercube(2, 1.0).unwrap();
        assert!(c.project(0).is_err());
        assert!(c.project(2).is_err());
    }
}
