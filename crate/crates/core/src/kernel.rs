//! Cached pair geometry for the nonlocal operators: log distances between
//! all node pairs plus closed-form kernel masses for the exterior.

use crate::error::{Error, Result};
use crate::geometry::{dist, Domain, DomainShape};
use crate::math::LogSumAcc;

/// Fractional order `s` and integrability exponent `p` with `0 < s < 1 < p`.
#[derive(Clone, Copy, Debug)]
pub struct SeminormParams {
    pub s: f64,
    pub p: f64,
    /// accumulate power sums in log domain (default); plain summation is
    /// only safe for small p and is kept for cross-checks
    pub log_domain: bool,
}

impl SeminormParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::OutOfRange(format!("s must lie in (0,1), got {s}")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::OutOfRange(format!("p must exceed 1, got {p}")));
        }
        Ok(Self {
            s,
            p,
            log_domain: true,
        })
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }
}

/// Precomputed `log|x_i - x_j|` for interior x interior and interior x collar
/// pairs. O(n^2) memory, built once per domain and shared by every operator
/// and solver iteration.
#[derive(Clone, Debug)]
pub struct KernelTable {
    n_int: usize,
    n_col: usize,
    log_r_int: Vec<f64>, // packed upper triangle, i < j
    log_r_col: Vec<f64>, // n_int x n_col row-major
}

impl KernelTable {
    pub fn build(d: &Domain) -> Self {
        let n = d.interior_count();
        let nc = d.collar_count();
        let nodes = d.interior_nodes();
        let collar = d.collar_nodes();
        let mut log_r_int = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                log_r_int.push(dist(&nodes[i], &nodes[j]).ln());
            }
        }
        let mut log_r_col = Vec::with_capacity(n * nc);
        for node in nodes.iter() {
            for c in collar.iter() {
                log_r_col.push(dist(node, c).ln());
            }
        }
        Self {
            n_int: n,
            n_col: nc,
            log_r_int,
            log_r_col,
        }
    }

    #[inline]
    fn tri_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n_int);
        i * self.n_int - i * (i + 1) / 2 + (j - i - 1)
    }

    /// `log|x_i - x_j|` for distinct interior nodes.
    #[inline]
    pub fn log_dist(&self, i: usize, j: usize) -> f64 {
        if i < j {
            self.log_r_int[self.tri_index(i, j)]
        } else {
            self.log_r_int[self.tri_index(j, i)]
        }
    }

    /// `log|x_i - c|` for interior node `i` and collar node `c`.
    #[inline]
    pub fn log_dist_collar(&self, i: usize, c: usize) -> f64 {
        self.log_r_col[i * self.n_col + c]
    }

    pub fn interior_count(&self) -> usize {
        self.n_int
    }

    pub fn collar_count(&self) -> usize {
        self.n_col
    }
}

/// Log of the exterior kernel mass `M_i` entering the seminorm quadrature as
/// `2 |u_i|^p M_i h^N`.
///
/// 1D: the power-law kernel integrates in closed form over the whole
/// exterior, `M_i = ((x_i - a)^-sp + (b - x_i)^-sp) / sp`.
///
/// 2D: collar-node quadrature plus the isotropic radial bound
/// `2 pi R_i^-sp / sp` for everything beyond the collar.
pub fn log_exterior_mass(d: &Domain, kt: &KernelTable, sp: f64, i: usize) -> f64 {
    match d.shape() {
        DomainShape::Interval { a, b } => {
            let x = d.node(i)[0];
            let m = ((x - a).powf(-sp) + (b - x).powf(-sp)) / sp;
            m.ln()
        }
        DomainShape::Rectangle { .. } => {
            let np = 2.0 + sp; // N + sp with N = 2
            let log_cell = 2.0 * d.h().ln();
            let mut acc = LogSumAcc::new();
            for c in 0..kt.collar_count() {
                acc.push(-np * kt.log_dist_collar(i, c) + log_cell);
            }
            let r = d.collar_outer_distance(i);
            acc.push((2.0 * std::f64::consts::PI / sp).ln() - sp * r.ln());
            acc.log_total()
        }
    }
}

/// Log kernel mass strictly beyond the collar band, used when collar nodes
/// are summed explicitly.
pub fn log_beyond_collar_mass(d: &Domain, sp: f64, i: usize) -> f64 {
    match d.shape() {
        DomainShape::Interval { a, b } => {
            let x = d.node(i)[0];
            let w = d.collar_width();
            let m = ((x - a + w).powf(-sp) + (b - x + w).powf(-sp)) / sp;
            m.ln()
        }
        DomainShape::Rectangle { .. } => {
            let r = d.collar_outer_distance(i);
            (2.0 * std::f64::consts::PI / sp).ln() - sp * r.ln()
        }
    }
}

/// Exterior masses for every node, cached by the solvers.
pub fn log_exterior_masses(d: &Domain, kt: &KernelTable, sp: f64) -> Vec<f64> {
    (0..d.interior_count())
        .map(|i| log_exterior_mass(d, kt, sp, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_domain;

    #[test]
    fn table_is_symmetric_and_finite() {
        let d = build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 9, 1.0).unwrap();
        let kt = KernelTable::build(&d);
        for i in 0..9 {
            for j in 0..9 {
                if i == j {
                    continue;
                }
                assert!(kt.log_dist(i, j).is_finite());
                assert_eq!(kt.log_dist(i, j), kt.log_dist(j, i));
                let want = (d.node(i)[0] - d.node(j)[0]).abs().ln();
                assert!((kt.log_dist(i, j) - want).abs() < 1e-15);
            }
            for c in 0..kt.collar_count() {
                assert!(kt.log_dist_collar(i, c).is_finite());
            }
        }
    }

    #[test]
    fn interval_exterior_mass_closed_form() {
        let d = build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 3, 1.0).unwrap();
        let kt = KernelTable::build(&d);
        let sp = 1.0; // s=0.5, p=2
        let x = d.node(0)[0]; // 0.25
        let want = ((x).powf(-1.0) + (1.0 - x).powf(-1.0)) / 1.0;
        assert!((log_exterior_mass(&d, &kt, sp, 0).exp() - want).abs() < 1e-12);
        // beyond-collar mass is strictly smaller
        assert!(log_beyond_collar_mass(&d, sp, 0) < log_exterior_mass(&d, &kt, sp, 0));
    }

    #[test]
    fn square_exterior_mass_dominates_beyond_collar_tail() {
        let d = build_domain(
            DomainShape::Rectangle {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            },
            5,
            1.0,
        )
        .unwrap();
        let kt = KernelTable::build(&d);
        for i in 0..d.interior_count() {
            let full = log_exterior_mass(&d, &kt, 1.0, i);
            let tail = log_beyond_collar_mass(&d, 1.0, i);
            assert!(full > tail);
            assert!(full.is_finite());
        }
    }
}
