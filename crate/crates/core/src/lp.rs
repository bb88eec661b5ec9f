//! Dense two-phase simplex for small inequality-form linear programs.
//!
//! Problems have the shape `maximize cᵀx  s.t.  A x ≤ b,  l ≤ x ≤ u` with
//! optional per-variable bounds. Variables are mapped to nonnegative ones
//! (shifts, reflections, or a split into positive and negative parts), slack
//! and artificial columns are appended, and a tableau is pivoted with Bland's
//! smallest-index rule. Once the optimal basis is known the basic values are
//! recomputed from the original data to shed accumulated tableau round-off.

use crate::error::{Error, Result};
use crate::numerics::{dot, solve_linear, DenseMatrix};
use crate::tol;

const MAX_PIVOTS: usize = 50_000;

/// `maximize objective·x  s.t.  constraints·x ≤ rhs`, plus optional bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: DenseMatrix,
    rhs: Vec<f64>,
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
}

impl LinearProgram {
    /// All variables free.
    pub fn new(objective: Vec<f64>, constraints: DenseMatrix, rhs: Vec<f64>) -> Result<Self> {
        if constraints.cols() != objective.len() && constraints.rows() > 0 {
            return Err(Error::DimensionMismatch {
                context: "LP constraint columns",
                expected: objective.len(),
                found: constraints.cols(),
            });
        }
        if rhs.len() != constraints.rows() {
            return Err(Error::DimensionMismatch {
                context: "LP right-hand side",
                expected: constraints.rows(),
                found: rhs.len(),
            });
        }
        if objective.iter().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("LP data"));
        }
        let n = objective.len();
        let constraints = if constraints.rows() == 0 {
            DenseMatrix::zeros(0, n)
        } else {
            constraints
        };
        Ok(Self {
            objective,
            constraints,
            rhs,
            lower: vec![None; n],
            upper: vec![None; n],
        })
    }

    /// Attach per-variable bounds (`None` means unbounded on that side).
    pub fn with_bounds(mut self, lower: Vec<Option<f64>>, upper: Vec<Option<f64>>) -> Result<Self> {
        let n = self.objective.len();
        for (what, v) in [("lower bounds", &lower), ("upper bounds", &upper)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    context: what,
                    expected: n,
                    found: v.len(),
                });
            }
            if v.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("LP bounds"));
            }
        }
        self.lower = lower;
        self.upper = upper;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rhs.len() {
            worst = worst.max(dot(self.constraints.row(i), x) - self.rhs[i]);
        }
        for (j, &xj) in x.iter().enumerate() {
            if let Some(l) = self.lower[j] {
                worst = worst.max(l - xj);
            }
            if let Some(u) = self.upper[j] {
                worst = worst.max(xj - u);
            }
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn optimizer(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + y
    Shift { col: usize, offset: f64 },
    /// x = offset - y
    Reflect { col: usize, offset: f64 },
    /// x = y⁺ - y⁻
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    /// Rows of `a y ≤ b`, y ≥ 0.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    maps: Vec<VarMap>,
}

fn to_standard_form(p: &LinearProgram) -> StandardForm {
    let n = p.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        match (p.lower[j], p.upper[j]) {
            (Some(l), Some(u)) => {
                maps.push(VarMap::Shift { col: ncols, offset: l });
                extra_rows.push((ncols, u - l));
                ncols += 1;
            }
            (Some(l), None) => {
                maps.push(VarMap::Shift { col: ncols, offset: l });
                ncols += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap::Reflect { col: ncols, offset: u });
                ncols += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }
    let mut c = vec![0.0; ncols];
    for (j, map) in maps.iter().enumerate() {
        let cj = p.objective[j];
        match *map {
            VarMap::Shift { col, .. } => c[col] += cj,
            VarMap::Reflect { col, .. } => c[col] -= cj,
            VarMap::Split { pos, neg } => {
                c[pos] += cj;
                c[neg] -= cj;
            }
        }
    }
    let mut a = Vec::with_capacity(p.num_constraints() + extra_rows.len());
    let mut b = Vec::with_capacity(a.capacity());
    for i in 0..p.num_constraints() {
        let row = p.constraints.row(i);
        let mut out = vec![0.0; ncols];
        let mut rhs = p.rhs[i];
        for (j, map) in maps.iter().enumerate() {
            let aij = row[j];
            if aij == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shift { col, offset } => {
                    out[col] += aij;
                    rhs -= aij * offset;
                }
                VarMap::Reflect { col, offset } => {
                    out[col] -= aij;
                    rhs -= aij * offset;
                }
                VarMap::Split { pos, neg } => {
                    out[pos] += aij;
                    out[neg] -= aij;
                }
            }
        }
        a.push(out);
        b.push(rhs);
    }
    for (col, width) in extra_rows {
        let mut out = vec![0.0; ncols];
        out[col] = 1.0;
        a.push(out);
        b.push(width);
    }
    StandardForm { a, b, c, maps }
}

struct Tableau {
    /// m rows × (ncols + 1); last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= piv;
        }
        self.t[r][c] = 1.0;
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= f * p;
            }
            row[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c_j - c_Bᵀ B⁻¹ a_j` for the given cost vector.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb == 0.0 {
                continue;
            }
            for (dj, tij) in d.iter_mut().zip(&self.t[i][..self.width]) {
                *dj -= cb * tij;
            }
        }
        d
    }

    /// Maximize `cost` over the columns allowed by `allowed`. Returns false if
    /// unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<bool> {
        let opt_tol = tol::opt();
        let piv_tol = tol::pivot();
        for _ in 0..MAX_PIVOTS {
            let d = self.reduced_costs(cost);
            // Bland: lowest-index improving column.
            let entering = (0..self.width).find(|&j| allowed(j) && d[j] > opt_tol);
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let aij = self.t[i][col];
                if aij <= piv_tol {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / aij;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((row, _)) => self.pivot(row, col),
            }
        }
        Err(Error::LpIterationLimit(MAX_PIVOTS))
    }
}

/// Solve a linear program.
pub fn solve_lp(p: &LinearProgram) -> Result<LpOutcome> {
    let sf = to_standard_form(p);
    let m = sf.b.len();
    let ny = sf.c.len();
    let scale = 1.0 + sf.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    // Columns: y (ny) | slack (m) | artificial (one per negative-rhs row).
    let neg_rows: Vec<usize> = (0..m).filter(|&i| sf.b[i] < 0.0).collect();
    let n_art = neg_rows.len();
    let width = ny + m + n_art;
    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_of_row = vec![None; m];
    for (k, &i) in neg_rows.iter().enumerate() {
        art_of_row[i] = Some(ny + m + k);
    }
    for i in 0..m {
        let mut row = vec![0.0; width + 1];
        row[..ny].copy_from_slice(&sf.a[i]);
        row[ny + i] = 1.0;
        row[width] = sf.b[i];
        if let Some(art) = art_of_row[i] {
            for v in row.iter_mut() {
                *v = -*v;
            }
            row[art] = 1.0;
            basis.push(art);
        } else {
            basis.push(ny + i);
        }
        t.push(row);
    }
    let mut tab = Tableau { t, basis, width };
    let is_art = |j: usize| j >= ny + m;

    if n_art > 0 {
        let mut cost1 = vec![0.0; width];
        for c in cost1.iter_mut().skip(ny + m) {
            *c = -1.0;
        }
        tab.optimize(&cost1, &|_| true)?;
        let infeas: f64 = (0..m)
            .filter(|&i| is_art(tab.basis[i]))
            .map(|i| tab.rhs(i).max(0.0))
            .sum();
        if infeas > tol::feas() * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop rows that cannot be.
        let mut i = 0;
        while i < tab.t.len() {
            if is_art(tab.basis[i]) {
                let col = (0..ny + m)
                    .filter(|&j| tab.t[i][j].abs() > tol::pivot())
                    .max_by(|&a, &b| tab.t[i][a].abs().total_cmp(&tab.t[i][b].abs()));
                match col {
                    Some(c) => {
                        tab.pivot(i, c);
                        i += 1;
                    }
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost2 = vec![0.0; width];
    cost2[..ny].copy_from_slice(&sf.c);
    if !tab.optimize(&cost2, &|j| !is_art(j))? {
        return Ok(LpOutcome::Unbounded);
    }

    // Basic values from the tableau, then re-solved from the original rows.
    let mut z = vec![0.0; width];
    for (i, &bi) in tab.basis.iter().enumerate() {
        z[bi] = tab.rhs(i).max(0.0);
    }
    if let Some(polished) = resolve_basis(&sf, &tab.basis, m, ny) {
        if polished.iter().all(|v| *v >= -tol::feas() * scale) {
            z[..ny + m].copy_from_slice(&polished);
        }
    }
    let x = recover(&sf.maps, &z[..ny]);
    let value = p.objective_value(&x);
    Ok(LpOutcome::Optimal { value, x })
}

/// Solve `[A I] z = b` restricted to the basic columns when the basis is
/// square (no rows were dropped in phase one).
fn resolve_basis(sf: &StandardForm, basis: &[usize], m: usize, ny: usize) -> Option<Vec<f64>> {
    if basis.len() != m || basis.iter().any(|&j| j >= ny + m) {
        return None;
    }
    let mut bm = DenseMatrix::zeros(m, m);
    for (k, &col) in basis.iter().enumerate() {
        for i in 0..m {
            bm[(i, k)] = if col < ny {
                sf.a[i][col]
            } else if col - ny == i {
                1.0
            } else {
                0.0
            };
        }
    }
    let zb = solve_linear(&bm, &sf.b, 1e-13)?;
    let mut z = vec![0.0; ny + m];
    for (k, &col) in basis.iter().enumerate() {
        z[col] = zb[k].max(0.0);
    }
    Some(z)
}

fn recover(maps: &[VarMap], y: &[f64]) -> Vec<f64> {
    maps.iter()
        .map(|map| match *map {
            VarMap::Shift { col, offset } => offset + y[col],
            VarMap::Reflect { col, offset } => offset - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> LinearProgram {
        LinearProgram::new(c.to_vec(), DenseMatrix::from_rows(a).unwrap(), b.to_vec()).unwrap()
    }

    #[test]
    fn single_box() {
        let out = solve_lp(&lp(&[1.0], &[&[1.0], &[-1.0]], &[1.0, 0.0])).unwrap();
        assert_eq!(out.status(), LpStatus::Optimal);
        assert!((out.value().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_interval_is_infeasible() {
        let out = solve_lp(&lp(&[1.0], &[&[1.0], &[-1.0]], &[-1.0, -2.0])).unwrap();
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn box_support_per_coordinate() {
        for n in 1..=4 {
            let mut rows = Vec::new();
            let mut b = Vec::new();
            for i in 0..n {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                rows.push(r.clone());
                r[i] = -1.0;
                rows.push(r);
                b.extend([10.0, 10.0]);
            }
            let mut c = vec![0.0; n];
            c[0] = 1.0;
            let p = LinearProgram::new(c, DenseMatrix::from_rows(&rows).unwrap(), b).unwrap();
            let out = solve_lp(&p).unwrap();
            assert!((out.value().unwrap() - 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unbounded_half_line() {
        let out = solve_lp(&lp(&[1.0], &[&[-1.0]], &[0.0])).unwrap();
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn no_constraints() {
        let p = LinearProgram::new(vec![0.0, 0.0], DenseMatrix::zeros(0, 2), vec![]).unwrap();
        assert_eq!(solve_lp(&p).unwrap().status(), LpStatus::Optimal);
        let p = LinearProgram::new(vec![1.0], DenseMatrix::zeros(0, 1), vec![]).unwrap();
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn structural_errors_are_not_infeasibility() {
        let err = LinearProgram::new(vec![1.0, 2.0], DenseMatrix::from_rows(&[[1.0]]).unwrap(), vec![1.0])
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = LinearProgram::new(vec![1.0], DenseMatrix::from_rows(&[[1.0]]).unwrap(), vec![1.0, 2.0])
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn bounds_are_honoured() {
        // max x + y s.t. x + y <= 10, 1 <= x <= 2, y <= 3
        let p = lp(&[1.0, 1.0], &[&[1.0, 1.0]], &[10.0])
            .with_bounds(vec![Some(1.0), None], vec![Some(2.0), Some(3.0)])
            .unwrap();
        let out = solve_lp(&p).unwrap();
        assert!((out.value().unwrap() - 5.0).abs() < 1e-12);
        // min x (max -x) with x >= 1 and only upper-bounded y.
        let p = lp(&[-1.0, 0.0], &[&[1.0, 1.0]], &[10.0])
            .with_bounds(vec![Some(1.0), None], vec![None, Some(3.0)])
            .unwrap();
        assert!((solve_lp(&p).unwrap().value().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Cycles under Dantzig's rule; Bland's rule must reach the optimum 1.25.
        let p = lp(
            &[0.75, -20.0, 0.5, -6.0],
            &[
                &[0.25, -8.0, -1.0, 9.0],
                &[0.5, -12.0, -0.5, 3.0],
                &[0.0, 0.0, 1.0, 0.0],
            ],
            &[0.0, 0.0, 1.0],
        )
        .with_bounds(vec![Some(0.0); 4], vec![None; 4])
        .unwrap();
        let out = solve_lp(&p).unwrap();
        assert!((out.value().unwrap() - 1.25).abs() < 1e-9);
    }

    #[test]
    fn deterministic_bits() {
        let p = lp(
            &[0.3, -0.7],
            &[&[1.0, 2.0], &[-3.0, 1.0], &[0.5, -1.5], &[-1.0, -1.0]],
            &[4.0, 3.0, 2.0, 5.0],
        );
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&p).unwrap();
        let (va, xa) = (a.value().unwrap(), a.optimizer().unwrap().to_vec());
        let (vb, xb) = (b.value().unwrap(), b.optimizer().unwrap().to_vec());
        assert_eq!(va.to_bits(), vb.to_bits());
        assert!(xa.iter().zip(&xb).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}
