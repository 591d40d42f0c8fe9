//! Discretized domains: 1D intervals and axis-aligned rectangles with a
//! uniform node lattice, an exterior collar band, and exact boundary
//! distances.
//!
//! Node layout on an interval `(a, b)` with `n` interior nodes:
//! `h = (b - a) / (n + 1)`, nodes `x_i = a + i h`, `i = 1..n`. Boundary
//! lattice points are excluded (fields vanish there and `log u` is singular).
//! Quadrature is the one-point cell rule `int f ~= sum_i f(x_i) h^N`.
//!
//! The collar is the continuation of the same lattice strictly outside the
//! closed domain, out to `collar_width` (snapped to a whole number of cells).
//! Fields are identically zero on the collar; the nonlocal operators combine
//! collar nodes with closed-form kernel tails for the rest of the exterior.

use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainShape {
    Interval { a: f64, b: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
}

#[derive(Clone, Debug)]
pub struct Domain {
    shape: DomainShape,
    dimension: usize,
    h: f64,
    collar_width: f64,
    interior: Vec<[f64; 2]>,
    collar: Vec<[f64; 2]>,
    deltas: Vec<f64>,
    nx: usize,
    ny: usize,
}

/// Builds the uniform lattice for `shape` with `n_per_axis` interior nodes
/// along the first axis. For rectangles the second axis reuses the same cell
/// size, so the side lengths must be commensurate with it.
pub fn build_domain(shape: DomainShape, n_per_axis: usize, collar_width: f64) -> Result<Domain> {
    if n_per_axis < 3 {
        return Err(Error::InvalidSpec(format!(
            "n_per_axis must be >= 3, got {n_per_axis}"
        )));
    }
    if !collar_width.is_finite() || collar_width <= 0.0 {
        return Err(Error::InvalidSpec(format!(
            "collar_width must be positive, got {collar_width}"
        )));
    }
    match shape {
        DomainShape::Interval { a, b } => {
            if !(b > a) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "interval needs b > a, got ({a}, {b})"
                )));
            }
            let n = n_per_axis;
            let h = (b - a) / (n + 1) as f64;
            let m = collar_cells(collar_width, h);
            let mut interior = Vec::with_capacity(n);
            for i in 1..=n {
                interior.push([a + i as f64 * h, 0.0]);
            }
            let mut collar = Vec::with_capacity(2 * m);
            for j in 1..=m {
                collar.push([a - j as f64 * h, 0.0]);
            }
            for j in 1..=m {
                collar.push([b + j as f64 * h, 0.0]);
            }
            let deltas = interior.iter().map(|p| (p[0] - a).min(b - p[0])).collect();
            Ok(Domain {
                shape,
                dimension: 1,
                h,
                collar_width: m as f64 * h,
                interior,
                collar,
                deltas,
                nx: n,
                ny: 1,
            })
        }
        DomainShape::Rectangle { x0, x1, y0, y1 } => {
            if !(x1 > x0) || !(y1 > y0) {
                return Err(Error::InvalidSpec(format!(
                    "rectangle needs x1 > x0 and y1 > y0, got ({x0}, {x1}, {y0}, {y1})"
                )));
            }
            let nx = n_per_axis;
            let h = (x1 - x0) / (nx + 1) as f64;
            // second axis shares the cell size; side must be a whole number of cells
            let ky = (y1 - y0) / h;
            let ky_round = ky.round();
            if (ky - ky_round).abs() > 1e-9 * ky.max(1.0) {
                return Err(Error::InvalidSpec(format!(
                    "rectangle sides must be commensurate with the lattice: \
                     (y1-y0)/h = {ky} is not a whole number of cells"
                )));
            }
            let ny = ky_round as usize - 1;
            if ny < 3 {
                return Err(Error::InvalidSpec(format!(
                    "rectangle too thin for the lattice: only {ny} interior rows"
                )));
            }
            let m = collar_cells(collar_width, h);
            let mut interior = Vec::with_capacity(nx * ny);
            for j in 1..=ny {
                for i in 1..=nx {
                    interior.push([x0 + i as f64 * h, y0 + j as f64 * h]);
                }
            }
            let eps = 1e-9 * h;
            let mut collar = Vec::new();
            let (ilo, ihi) = (-(m as i64), (nx + 1) as i64 + m as i64);
            let (jlo, jhi) = (-(m as i64), (ny + 1) as i64 + m as i64);
            for j in jlo..=jhi {
                for i in ilo..=ihi {
                    let p = [x0 + i as f64 * h, y0 + j as f64 * h];
                    let outside = p[0] < x0 - eps
                        || p[0] > x1 + eps
                        || p[1] < y0 - eps
                        || p[1] > y1 + eps;
                    if outside {
                        collar.push(p);
                    }
                }
            }
            let deltas = interior
                .iter()
                .map(|p| (p[0] - x0).min(x1 - p[0]).min(p[1] - y0).min(y1 - p[1]))
                .collect();
            Ok(Domain {
                shape,
                dimension: 2,
                h,
                collar_width: m as f64 * h,
                interior,
                collar,
                deltas,
                nx,
                ny,
            })
        }
    }
}

fn collar_cells(width: f64, h: f64) -> usize {
    ((width / h).round() as usize).max(1)
}

impl Domain {
    pub fn shape(&self) -> DomainShape {
        self.shape
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Lattice spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Quadrature weight of one node cell, `h^N`.
    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dimension as i32)
    }

    /// Collar width after snapping to whole cells.
    pub fn collar_width(&self) -> f64 {
        self.collar_width
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn collar_count(&self) -> usize {
        self.collar.len()
    }

    pub fn interior_nodes(&self) -> &[[f64; 2]] {
        &self.interior
    }

    pub fn collar_nodes(&self) -> &[[f64; 2]] {
        &self.collar
    }

    pub fn node(&self, i: usize) -> [f64; 2] {
        self.interior[i]
    }

    /// Exact distance from interior node `i` to the boundary.
    pub fn delta(&self, i: usize) -> f64 {
        self.deltas[i]
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Largest nodal boundary distance (attained within `h` of the incenter).
    pub fn max_nodal_delta(&self) -> f64 {
        self.deltas.iter().cloned().fold(0.0, f64::max)
    }

    /// Exact inradius of the continuous domain.
    pub fn inradius(&self) -> f64 {
        match self.shape {
            DomainShape::Interval { a, b } => (b - a) / 2.0,
            DomainShape::Rectangle { x0, x1, y0, y1 } => (x1 - x0).min(y1 - y0) / 2.0,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self.shape {
            DomainShape::Interval { a, b } => b - a,
            DomainShape::Rectangle { x0, x1, y0, y1 } => (x1 - x0).hypot(y1 - y0),
        }
    }

    pub fn nodes_per_axis(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Distance from an interior node to the outer edge of the collar band;
    /// the kernel mass beyond this radius is handled by closed-form tails.
    pub fn collar_outer_distance(&self, i: usize) -> f64 {
        self.deltas[i] + self.collar_width
    }
}

/// Exact boundary-distance field over the interior nodes.
pub fn distance_field(d: &Domain) -> ScalarField {
    ScalarField::new(d, d.deltas.clone()).expect("delta field is always valid")
}

pub fn dist(p: &[f64; 2], q: &[f64; 2]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    (dx * dx + dy * dy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_lattice_matches_closed_form() {
        let d = build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 3, 0.5).unwrap();
        assert_eq!(d.h(), 0.25);
        let xs: Vec<f64> = d.interior_nodes().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.25, 0.5, 0.75]);
        assert_eq!(d.cell_measure(), 0.25);
        // collar snapped to whole cells: 0.5 / 0.25 = 2 per side
        assert_eq!(d.collar_count(), 4);
        assert_eq!(d.collar_width(), 0.5);
    }

    #[test]
    fn unit_square_has_n_squared_interior_nodes() {
        let d = build_domain(
            DomainShape::Rectangle {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            },
            3,
            1.0,
        )
        .unwrap();
        assert_eq!(d.interior_count(), 9);
        assert_eq!(d.dimension(), 2);
        assert!((d.cell_measure() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 2, 0.5).is_err());
        assert!(build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 5, 0.0).is_err());
        assert!(build_domain(DomainShape::Interval { a: 1.0, b: 1.0 }, 5, 0.5).is_err());
        assert!(build_domain(
            DomainShape::Rectangle {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 0.37
            },
            5,
            0.5
        )
        .is_err());
    }

    #[test]
    fn commensurate_rectangle_is_accepted() {
        // 2:1 rectangle, h = 2/20 = 0.1, 19 x 9 interior nodes
        let d = build_domain(
            DomainShape::Rectangle {
                x0: 0.0,
                x1: 2.0,
                y0: 0.0,
                y1: 1.0,
            },
            19,
            0.3,
        )
        .unwrap();
        assert_eq!(d.nodes_per_axis(), (19, 9));
        assert_eq!(d.interior_count(), 19 * 9);
        assert!((d.h() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn distance_field_closed_forms() {
        let d = build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 9, 1.0).unwrap();
        let delta = distance_field(&d);
        let x3 = d.node(2)[0]; // 0.3
        assert!((x3 - 0.3).abs() < 1e-12);
        assert!((delta[2] - 0.3).abs() < 1e-12);
        assert!((delta[4] - 0.5).abs() < 1e-12);

        let r = build_domain(
            DomainShape::Rectangle {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            },
            3,
            1.0,
        )
        .unwrap();
        // node (0.25, 0.5)
        let idx = r
            .interior_nodes()
            .iter()
            .position(|p| (p[0] - 0.25).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12)
            .unwrap();
        assert!((r.delta(idx) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn nodes_strictly_inside_and_collar_strictly_outside() {
        for d in [
            build_domain(DomainShape::Interval { a: -1.0, b: 2.0 }, 7, 1.5).unwrap(),
            build_domain(
                DomainShape::Rectangle {
                    x0: 0.0,
                    x1: 1.0,
                    y0: 0.0,
                    y1: 1.0,
                },
                5,
                0.8,
            )
            .unwrap(),
        ] {
            for i in 0..d.interior_count() {
                assert!(d.delta(i) > 0.0);
            }
            for p in d.collar_nodes() {
                let inside = match d.shape() {
                    DomainShape::Interval { a, b } => p[0] >= a && p[0] <= b,
                    DomainShape::Rectangle { x0, x1, y0, y1 } => {
                        p[0] >= x0 && p[0] <= x1 && p[1] >= y0 && p[1] <= y1
                    }
                };
                assert!(!inside, "collar node {:?} not strictly outside", p);
            }
            // no duplicate nodes across interior + collar
            let mut all: Vec<[f64; 2]> = d.interior_nodes().to_vec();
            all.extend_from_slice(d.collar_nodes());
            for i in 0..all.len() {
                for j in (i + 1)..all.len() {
                    assert!(dist(&all[i], &all[j]) > 0.5 * d.h());
                }
            }
        }
    }

    #[test]
    fn delta_is_one_lipschitz_and_capped_by_inradius() {
        let d = build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 16, 1.0).unwrap();
        let n = d.interior_count();
        for i in 0..n {
            assert!(d.delta(i) <= d.inradius() + 1e-15);
            for j in 0..n {
                let dd = (d.delta(i) - d.delta(j)).abs();
                assert!(dd <= dist(&d.node(i), &d.node(j)) + 1e-12);
            }
        }
        assert!(d.inradius() - d.max_nodal_delta() <= d.h() + 1e-15);
    }
}
