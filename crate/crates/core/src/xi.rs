//! Admissible Lipschitz field built from dyadic levels of the boundary
//! distance: a piecewise-linear profile through `(t_n, 2^-n)` composed with
//! `delta`, then scaled so its weighted geometric mean is exactly 1.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::weight::{dyadic_levels, log_geometric_mean_k, DyadicLevels, Weight};

#[derive(Clone, Debug)]
pub struct XiConstruction {
    /// decreasing dyadic levels t_1 > t_2 > ...
    pub levels: Vec<f64>,
    /// profile breakpoints (t, phi(t)) in increasing t, starting at (0, 0)
    pub breakpoints: Vec<(f64, f64)>,
    /// normalized field, k(xi) = 1
    pub xi: ScalarField,
    /// scale applied to the raw profile composition to reach k = 1
    pub scale_k: f64,
    pub levels_meta: DyadicLevels,
}

impl XiConstruction {
    /// Raw (unnormalized) profile value `phi(t)`; linear continuation with
    /// the slope of the last dyadic segment beyond `t_1`.
    pub fn phi(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        let last = bp.len() - 1;
        if t >= bp[last].0 {
            let (t1, v1) = bp[last];
            let (t0, v0) = bp[last - 1];
            let slope = (v1 - v0) / (t1 - t0);
            return v1 + slope * (t - t1);
        }
        let mut k = 0;
        while k + 1 < last && t >= bp[k + 1].0 {
            k += 1;
        }
        let (ta, va) = bp[k];
        let (tb, vb) = bp[k + 1];
        va + (vb - va) * (t - ta) / (tb - ta)
    }

    /// Unnormalized composition `xi_1 = phi(delta)` at node `i`.
    pub fn xi1(&self, i: usize) -> f64 {
        self.xi[i] / self.scale_k
    }
}

const MAX_DYADIC: usize = 60;

pub fn build_xi(w: &Weight, delta: &ScalarField, d: &Domain) -> Result<XiConstruction> {
    let meta = dyadic_levels(w, delta, d, MAX_DYADIC);
    if meta.levels.is_empty() {
        return Err(Error::DegenerateLevel(
            "no dyadic level resolvable on this grid".into(),
        ));
    }
    let levels = meta.levels.clone();
    let m = levels.len();
    // ascending breakpoints (0,0), (t_m, 2^-m), ..., (t_1, 1/2)
    let mut breakpoints = Vec::with_capacity(m + 1);
    breakpoints.push((0.0, 0.0));
    for k in 0..m {
        let n = m - k; // level index
        breakpoints.push((levels[n - 1], 0.5f64.powi(n as i32)));
    }

    let mut xc = XiConstruction {
        levels,
        breakpoints,
        xi: ScalarField::constant(d, 0.0),
        scale_k: 1.0,
        levels_meta: meta,
    };

    let xi1: Vec<f64> = delta.values().iter().map(|&t| xc.phi(t)).collect();
    for (i, &v) in xi1.iter().enumerate() {
        if v <= 0.0 && w.node_mass(i) > 0.0 {
            return Err(Error::DegenerateLevel(format!(
                "profile vanishes at node {i} inside the weight support"
            )));
        }
    }
    let xi1 = ScalarField::new(d, xi1)?;
    let scale = (-log_geometric_mean_k(&xi1, w)).exp();
    xc.scale_k = scale;
    xc.xi = xi1.scaled(scale);
    Ok(xc)
}
