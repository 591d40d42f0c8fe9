//! Normalized weights, the distribution function of the boundary distance,
//! dyadic levels, the geometric-mean functional `k`, and the 1D co-area
//! self-check.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::Domain;

/// Nonnegative node weights normalized so that `sum_i w_i * cell = 1`.
#[derive(Clone, Debug)]
pub struct Weight {
    values: Vec<f64>,
    cell: f64,
}

impl Weight {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell
    }

    /// Quadrature mass carried by node `i` (`w_i * h^N`); masses sum to 1.
    pub fn node_mass(&self, i: usize) -> f64 {
        self.values[i] * self.cell
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Scales a nonnegative raw field so its quadrature sum is exactly 1.
pub fn normalize_weight(raw: &ScalarField, d: &Domain) -> Result<Weight> {
    if raw.len() != d.interior_count() {
        return Err(Error::FieldLength {
            expected: d.interior_count(),
            got: raw.len(),
        });
    }
    if let Some(i) = raw.values().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidWeight(format!(
            "negative weight {} at node {i}",
            raw[i]
        )));
    }
    let cell = d.cell_measure();
    let total: f64 = raw.values().iter().map(|v| v * cell).sum();
    if total <= 0.0 {
        return Err(Error::InvalidWeight("weight is identically zero".into()));
    }
    Ok(Weight {
        values: raw.values().iter().map(|v| v / total).collect(),
        cell,
    })
}

/// Distribution of the weight over superlevel sets of `delta`:
/// `sigma(t) = sum of node masses where delta > t`. Nonincreasing step
/// function with `sigma(0) = 1` and `sigma(inradius) = 0`.
pub fn omega_distribution(w: &Weight, delta: &ScalarField, d: &Domain, t: f64) -> Result<f64> {
    if !(0.0..=d.inradius() + 1e-12).contains(&t) {
        return Err(Error::OutOfRange(format!(
            "sigma level t={t} outside [0, {}]",
            d.inradius()
        )));
    }
    Ok(delta
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &dl)| dl > t)
        .map(|(i, _)| w.node_mass(i))
        .sum())
}

/// Result of [`dyadic_levels`]: the levels plus how the list was cut off.
#[derive(Clone, Debug)]
pub struct DyadicLevels {
    pub levels: Vec<f64>,
    pub requested: usize,
    /// next level would have dropped below the lattice spacing
    pub truncated_below_h: bool,
    /// next level stopped decreasing (grid cannot resolve finer levels)
    pub stagnated: bool,
}

/// Levels `t_n` solving `sigma(t_n) = 1 - 2^-n` on the discrete step
/// distribution, i.e. the smallest `t` with `sigma(t) <= 1 - 2^-n`, found by
/// bisection and snapped to the jump point. The list stops at `n_max`, when a
/// level falls below `h`, or when levels stop strictly decreasing.
pub fn dyadic_levels(w: &Weight, delta: &ScalarField, d: &Domain, n_max: usize) -> DyadicLevels {
    let mut out = DyadicLevels {
        levels: Vec::new(),
        requested: n_max,
        truncated_below_h: false,
        stagnated: false,
    };
    let sigma = |t: f64| -> f64 {
        delta
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &dl)| dl > t)
            .map(|(i, _)| w.node_mass(i))
            .sum()
    };
    // candidate jump points: distinct node delta values
    let mut jumps: Vec<f64> = delta.values().to_vec();
    jumps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    jumps.dedup();

    for n in 1..=n_max {
        let target = 1.0 - 0.5f64.powi(n as i32);
        if sigma(0.0) <= target {
            // already below target at t = 0 (cannot happen for target < 1)
            break;
        }
        let mut lo = 0.0;
        let mut hi = d.inradius();
        debug_assert!(sigma(hi) <= target);
        for _ in 0..128 {
            let mid = 0.5 * (lo + hi);
            if sigma(mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // snap to the node value inside the final bracket, if any
        let t = jumps
            .iter()
            .copied()
            .find(|&v| v > lo && v <= hi + 1e-15 * d.inradius())
            .unwrap_or(hi);
        if t < d.h() {
            out.truncated_below_h = true;
            break;
        }
        if let Some(&prev) = out.levels.last() {
            if t >= prev {
                out.stagnated = true;
                break;
            }
        }
        out.levels.push(t);
    }
    out
}

/// `k(u) = exp(sum_i log|u_i| * mass_i)` together with a flag marking the
/// degenerate case `u = 0` somewhere on the support of the weight, where the
/// exact value is 0.
#[derive(Clone, Copy, Debug)]
pub struct GeometricMean {
    pub value: f64,
    /// true iff `u` vanishes at a node carrying positive weight
    pub zero_on_support: bool,
}

pub fn geometric_mean_k(u: &ScalarField, w: &Weight) -> GeometricMean {
    let mut log_sum = 0.0;
    for (i, &v) in u.values().iter().enumerate() {
        let mass = w.node_mass(i);
        if mass == 0.0 {
            continue;
        }
        if v == 0.0 {
            return GeometricMean {
                value: 0.0,
                zero_on_support: true,
            };
        }
        log_sum += v.abs().ln() * mass;
    }
    GeometricMean {
        value: log_sum.exp(),
        zero_on_support: false,
    }
}

/// `log k(u)` for strictly positive handling elsewhere; `-inf` in the
/// degenerate case.
pub fn log_geometric_mean_k(u: &ScalarField, w: &Weight) -> f64 {
    let mut log_sum = 0.0;
    for (i, &v) in u.values().iter().enumerate() {
        let mass = w.node_mass(i);
        if mass == 0.0 {
            continue;
        }
        if v == 0.0 {
            return f64::NEG_INFINITY;
        }
        log_sum += v.abs().ln() * mass;
    }
    log_sum
}

/// Essential sup over levels `t` in `[0, eps]` of the weight's level-set
/// integral. 1D: the level set of `delta` is two points, evaluated by
/// nearest-node lookup. 2D: a band of width `h` around the level serves as
/// the surrogate for the length integral.
pub fn k_eps(w: &Weight, d: &Domain, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < d.inradius()) {
        return Err(Error::OutOfRange(format!(
            "eps={eps} outside (0, {})",
            d.inradius()
        )));
    }
    let steps = 2048usize;
    let mut best: f64 = 0.0;
    match d.shape() {
        crate::geometry::DomainShape::Interval { a, b } => {
            let (nx, _) = d.nodes_per_axis();
            let h = d.h();
            let nearest = |x: f64| -> usize {
                let i = ((x - a) / h).round() as i64;
                (i.clamp(1, nx as i64) - 1) as usize
            };
            for k in 0..=steps {
                let t = eps * k as f64 / steps as f64;
                let v = w.values()[nearest(a + t)] + w.values()[nearest(b - t)];
                best = best.max(v);
            }
        }
        crate::geometry::DomainShape::Rectangle { .. } => {
            let h = d.h();
            for k in 0..=steps {
                let t = eps * k as f64 / steps as f64;
                let band: f64 = (0..d.interior_count())
                    .filter(|&i| (d.delta(i) - t).abs() < 0.5 * h)
                    .map(|i| w.values()[i] * h)
                    .sum();
                best = best.max(band);
            }
        }
    }
    Ok(best)
}

/// 1D co-area self-check: `|int_,O g dx - int_0^R (g(a+t) + g(b-t)) dt|` with
/// `g` taken piecewise constant on node cells. Both sides are evaluated
/// exactly for that representation, so the discrepancy isolates errors in the
/// distance/level-set bookkeeping rather than quadrature noise.
pub fn coarea_check_1d(g: &ScalarField, d: &Domain) -> Result<f64> {
    let (a, b) = match d.shape() {
        crate::geometry::DomainShape::Interval { a, b } => (a, b),
        _ => {
            return Err(Error::Unsupported(
                "coarea_check_1d needs a 1D interval domain".into(),
            ))
        }
    };
    let h = d.h();
    let big_t = d.inradius();
    let lhs: f64 = g.values().iter().map(|v| v * h).sum();

    // overlap of each node cell with the swept segments [a, a+T] and [b-T, b]
    let mut rhs = 0.0;
    for (i, p) in d.interior_nodes().iter().enumerate() {
        let (lo, hi) = (p[0] - 0.5 * h, p[0] + 0.5 * h);
        let left = (hi.min(a + big_t) - lo.max(a)).max(0.0);
        let right = (hi.min(b) - lo.max(b - big_t)).max(0.0);
        rhs += g[i] * (left + right);
    }
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, distance_field, DomainShape};

    fn interval(n: usize) -> Domain {
        build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, n, 1.0).unwrap()
    }

    #[test]
    fn uniform_weight_normalizes_to_near_one() {
        // n=99: node masses are 1/99 each, so values are 1/(99 h) = 1.0101..
        let d = interval(99);
        let w = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        let total: f64 = (0..w.len()).map(|i| w.node_mass(i)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // uniform raw stays uniform; values sit within O(h) of 1
        for v in w.values() {
            assert!((v - 1.0).abs() < 2.0 * d.h());
        }
    }

    #[test]
    fn normalization_is_scale_invariant() {
        let d = interval(50);
        let w1 = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        let w5 = normalize_weight(&ScalarField::constant(&d, 5.0), &d).unwrap();
        for (a, b) in w1.values().iter().zip(w5.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_negative_and_zero_weights() {
        let d = interval(5);
        let mut vals = vec![1.0; 5];
        vals[2] = -0.1;
        let raw = ScalarField::new(&d, vals).unwrap();
        assert!(matches!(
            normalize_weight(&raw, &d),
            Err(Error::InvalidWeight(_))
        ));
        let zero = ScalarField::constant(&d, 0.0);
        assert!(normalize_weight(&zero, &d).is_err());
    }

    #[test]
    fn sigma_endpoints_and_interval_closed_form() {
        let d = interval(101);
        let delta = distance_field(&d);
        let w = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        assert_eq!(omega_distribution(&w, &delta, &d, 0.0).unwrap(), 1.0);
        // closed form sigma(t) = 1 - 2t for the uniform interval
        let s = omega_distribution(&w, &delta, &d, 0.25).unwrap();
        assert!((s - 0.5).abs() < 2.0 * d.h(), "sigma(0.25) = {s}");
        let top = omega_distribution(&w, &delta, &d, d.inradius()).unwrap();
        assert_eq!(top, 0.0);
        assert!(omega_distribution(&w, &delta, &d, -0.1).is_err());
        assert!(omega_distribution(&w, &delta, &d, 0.9).is_err());
    }

    #[test]
    fn sigma_is_nonincreasing() {
        let d = interval(40);
        let delta = distance_field(&d);
        let raw = ScalarField::from_fn(&d, |p| 0.3 + p[0]).unwrap();
        let w = normalize_weight(&raw, &d).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..=50 {
            let t = d.inradius() * k as f64 / 50.0;
            let s = omega_distribution(&w, &delta, &d, t).unwrap();
            assert!(s <= prev + 1e-15);
            prev = s;
        }
    }

    #[test]
    fn dyadic_levels_interval_uniform() {
        let d = interval(101);
        let delta = distance_field(&d);
        let w = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        let lv = dyadic_levels(&w, &delta, &d, 10);
        // analytic t_n = 2^-(n+1), quantized to node values
        assert!((lv.levels[0] - 0.25).abs() < 2.0 * d.h());
        assert!((lv.levels[1] - 0.125).abs() < 2.0 * d.h());
        for pair in lv.levels.windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn dyadic_levels_single_level_is_near_median() {
        let d = interval(101);
        let delta = distance_field(&d);
        let w = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        let lv = dyadic_levels(&w, &delta, &d, 1);
        assert_eq!(lv.levels.len(), 1);
        let s = omega_distribution(&w, &delta, &d, lv.levels[0]).unwrap();
        assert!(s <= 0.5 && s >= 0.5 - 2.0 * d.h());
    }

    #[test]
    fn dyadic_levels_truncate_on_coarse_grid() {
        let d = interval(9);
        let delta = distance_field(&d);
        let w = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        let lv = dyadic_levels(&w, &delta, &d, 20);
        assert!(lv.levels.len() < 20);
        assert!(lv.truncated_below_h || lv.stagnated);
        for &t in &lv.levels {
            assert!(t >= d.h());
        }
    }

    #[test]
    fn k_of_constant_is_the_constant() {
        let d = interval(33);
        let raw = ScalarField::from_fn(&d, |p| 1.0 + p[0]).unwrap();
        let w = normalize_weight(&raw, &d).unwrap();
        let k = geometric_mean_k(&ScalarField::constant(&d, 3.7), &w);
        assert!((k.value - 3.7).abs() < 1e-12);
        assert!(!k.zero_on_support);
    }

    #[test]
    fn k_of_delta_under_uniform_weight() {
        // int_0^1 log min(x, 1-x) dx = -1 - log 2, so k(delta) = e^-1 / 2.
        // The nodal quadrature converges at rate h*log(1/h) (boundary log
        // singularity), so that is the tolerance asserted here.
        let exact = (-1.0f64).exp() / 2.0;
        let mut errs = Vec::new();
        for n in [101, 201] {
            let d = interval(n);
            let w = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
            let k = geometric_mean_k(&distance_field(&d), &w);
            let err = (k.value - exact).abs();
            let h = d.h();
            assert!(
                err <= 0.3 * h * (1.0 + (1.0 / h).ln()),
                "n={n}: err={err:.3e}"
            );
            errs.push(err);
        }
        // convergence under grid refinement (rate ~ h log(1/h), factor ~1.8)
        assert!(errs[1] < errs[0] / 1.5);
    }

    #[test]
    fn k_flags_zero_on_support() {
        let d = interval(10);
        let w = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        let mut vals = vec![1.0; 10];
        for v in vals.iter_mut().take(5) {
            *v = 0.0;
        }
        let u = ScalarField::new(&d, vals).unwrap();
        let k = geometric_mean_k(&u, &w);
        assert_eq!(k.value, 0.0);
        assert!(k.zero_on_support);

        // zeros off the support do not trigger the flag
        let mut wraw = vec![1.0; 10];
        for v in wraw.iter_mut().take(5) {
            *v = 0.0;
        }
        let w2 = normalize_weight(&ScalarField::new(&d, wraw).unwrap(), &d).unwrap();
        let k2 = geometric_mean_k(&u, &w2);
        assert!(!k2.zero_on_support);
        assert!(k2.value > 0.0);
    }

    #[test]
    fn k_eps_closed_forms() {
        let d = interval(99);
        let h = d.h();
        let uni = normalize_weight(&ScalarField::constant(&d, 1.0), &d).unwrap();
        let k = k_eps(&uni, &d, 0.1).unwrap();
        assert!((k - 2.0).abs() < 3.0 * h, "uniform K_eps = {k}");

        // omega(x) = 2x: omega(t) + omega(1-t) = 2 identically
        let lin = normalize_weight(&ScalarField::from_fn(&d, |p| 2.0 * p[0]).unwrap(), &d).unwrap();
        let k = k_eps(&lin, &d, 0.1).unwrap();
        assert!((k - 2.0).abs() < 5.0 * h, "linear K_eps = {k}");

        // weight vanishing on a collar of width 0.2 near the boundary
        let delta = distance_field(&d);
        let vals: Vec<f64> = (0..d.interior_count())
            .map(|i| if delta[i] < 0.2 { 0.0 } else { 1.0 })
            .collect();
        let cut = normalize_weight(&ScalarField::new(&d, vals).unwrap(), &d).unwrap();
        assert_eq!(k_eps(&cut, &d, 0.1).unwrap(), 0.0);

        assert!(k_eps(&uni, &d, 0.0).is_err());
        assert!(k_eps(&uni, &d, 0.6).is_err());
    }

    #[test]
    fn coarea_exact_for_cellwise_fields() {
        let d = interval(101);
        assert!(coarea_check_1d(&ScalarField::constant(&d, 1.0), &d).unwrap() < 1e-12);
        assert!(coarea_check_1d(&distance_field(&d), &d).unwrap() < 1e-12);
        let g = ScalarField::from_fn(&d, |p| (3.0 * p[0]).sin().exp()).unwrap();
        assert!(coarea_check_1d(&g, &d).unwrap() < 1e-12);

        let sq = build_domain(
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
        assert!(coarea_check_1d(&ScalarField::constant(&sq, 1.0), &sq).is_err());
    }

    #[test]
    fn coarea_both_sides_match_quadrature_at_double_resolution() {
        // the t-integral evaluated by brute midpoint quadrature at 10x
        // resolution converges to the same cellwise value
        let d = interval(51);
        let g = ScalarField::from_fn(&d, |p| 1.0 + p[0] * p[0]).unwrap();
        let h = d.h();
        let lhs: f64 = g.values().iter().map(|v| v * h).sum();
        let fine = 10 * 51 * 4;
        let big_t = d.inradius();
        let ht = big_t / fine as f64;
        let nearest = |x: f64| -> f64 {
            let i = (x / h).round() as i64;
            if i < 1 || i > 51 {
                0.0
            } else {
                g[(i - 1) as usize]
            }
        };
        let mut rhs = 0.0;
        for k in 0..fine {
            let t = (k as f64 + 0.5) * ht;
            rhs += (nearest(t) + nearest(1.0 - t)) * ht;
        }
        assert!(
            (lhs - rhs).abs() < h * h * 10.0,
            "lhs={lhs} rhs={rhs} diff={}",
            (lhs - rhs).abs()
        );
    }
}
