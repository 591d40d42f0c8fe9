//! Independent reference implementations used to validate the fast paths:
//! plain-arithmetic double sums with their own distance computations, and
//! brute-force searches for the two minimization problems on tiny grids.
//! Nothing here calls into the log-domain evaluators or the descent engine.

use crate::field::ScalarField;
use crate::geometry::{dist, Domain, DomainShape};
use crate::kernel::SeminormParams;
use crate::weight::Weight;

/// Direct evaluation of `[u]_{s,p}`: naive `powf` double sum over interior
/// pairs plus the exterior closed form (1D) or collar quadrature with radial
/// tail (2D). No caching, no log-domain accumulation.
pub fn direct_seminorm(u: &ScalarField, d: &Domain, prm: &SeminormParams) -> f64 {
    let n = u.len();
    let nn = d.dimension() as f64;
    let (s, p) = (prm.s, prm.p);
    let sp = s * p;
    let nodes = d.interior_nodes();
    let uv = u.values();
    let h2n = d.h().powf(2.0 * nn);
    let hn = d.h().powf(nn);

    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = dist(&nodes[i], &nodes[j]);
            sum += (uv[i] - uv[j]).abs().powf(p) / r.powf(nn + sp) * h2n;
        }
    }
    for i in 0..n {
        sum += 2.0 * uv[i].abs().powf(p) * exterior_mass(d, i, sp) * hn;
    }
    sum.powf(1.0 / p)
}

fn exterior_mass(d: &Domain, i: usize, sp: f64) -> f64 {
    match d.shape() {
        DomainShape::Interval { a, b } => {
            let x = d.node(i)[0];
            ((x - a).powf(-sp) + (b - x).powf(-sp)) / sp
        }
        DomainShape::Rectangle { .. } => {
            let node = d.node(i);
            let hn = d.h().powf(2.0);
            let mut m = 0.0;
            for c in d.collar_nodes() {
                m += dist(&node, c).powf(-(2.0 + sp)) * hn;
            }
            m + 2.0 * std::f64::consts::PI * d.collar_outer_distance(i).powf(-sp) / sp
        }
    }
}

/// Direct evaluation of `L_p u (x_i)`: signed sum over interior and collar
/// nodes plus the beyond-collar tail, in plain arithmetic.
pub fn direct_frac_p_laplacian(u: &ScalarField, d: &Domain, prm: &SeminormParams, i: usize) -> f64 {
    let nn = d.dimension() as f64;
    let sp = prm.sp();
    let p = prm.p;
    let nodes = d.interior_nodes();
    let uv = u.values();
    let ui = uv[i];
    let hn = d.h().powf(nn);

    let term = |diff: f64, r: f64| diff.abs().powf(p - 2.0) * diff / r.powf(nn + sp);
    let mut sum = 0.0;
    for (j, &uj) in uv.iter().enumerate() {
        if j == i || uj == ui {
            continue;
        }
        sum += term(uj - ui, dist(&nodes[i], &nodes[j])) * hn;
    }
    for c in d.collar_nodes() {
        if ui != 0.0 {
            sum += term(-ui, dist(&nodes[i], c)) * hn;
        }
    }
    let beyond = match d.shape() {
        DomainShape::Interval { a, b } => {
            let x = nodes[i][0];
            let w = d.collar_width();
            ((x - a + w).powf(-sp) + (b - x + w).powf(-sp)) / sp
        }
        DomainShape::Rectangle { .. } => {
            2.0 * std::f64::consts::PI * d.collar_outer_distance(i).powf(-sp) / sp
        }
    };
    if ui != 0.0 {
        sum += -ui.abs().powf(p - 2.0) * ui * beyond;
    }
    2.0 * sum
}

/// Direct Hölder quotient `H(u) / k(u)` with plain loops. The interior-collar
/// candidates are dominated by the boundary candidates (every collar node is
/// farther from `x_i` than the nearest boundary point), so the max runs over
/// interior pairs and boundary candidates.
fn direct_quotient(uv: &[f64], nodes: &[[f64; 2]], deltas: &[f64], s: f64, masses: &[f64]) -> f64 {
    let n = uv.len();
    let mut hol = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            hol = hol.max((uv[i] - uv[j]).abs() / dist(&nodes[i], &nodes[j]).powf(s));
        }
    }
    for i in 0..n {
        hol = hol.max(uv[i].abs() / deltas[i].powf(s));
    }
    let log_k: f64 = (0..n).map(|i| uv[i].abs().ln() * masses[i]).sum();
    hol * (-log_k).exp()
}

#[derive(Clone, Debug)]
pub struct BruteResult {
    pub value: f64,
    /// minimizer, normalized to `k(u) = 1`
    pub u: ScalarField,
    pub lattice_evals: usize,
}

/// Exhaustive lattice search for `min [u]_{s,p}^p / k(u)^p` over the positive
/// cone, followed by cyclic coordinate refinement with shrinking
/// multiplicative steps. Only sensible for a handful of nodes.
pub fn brute_force_lambda(
    d: &Domain,
    w: &Weight,
    prm: &SeminormParams,
    n_levels: usize,
) -> BruteResult {
    let n = d.interior_count();
    let masses: Vec<f64> = (0..n).map(|i| w.node_mass(i)).collect();
    let objective = |uv: &[f64]| -> f64 {
        let u = ScalarField::new(d, uv.to_vec()).expect("finite positive candidate");
        let log_k: f64 = (0..n).map(|i| uv[i].ln() * masses[i]).sum();
        let smn = direct_seminorm(&u, d, prm);
        (prm.p * (smn.ln() - log_k)).exp()
    };

    let levels: Vec<f64> = (0..n_levels)
        .map(|k| {
            let t = k as f64 / (n_levels - 1) as f64;
            (0.25f64.ln() + t * (4.0f64 / 0.25).ln()).exp()
        })
        .collect();

    // odometer over the lattice
    let mut idx = vec![0usize; n];
    let mut best_u = vec![levels[0]; n];
    let mut best = f64::INFINITY;
    let mut evals = 0usize;
    loop {
        let cand: Vec<f64> = idx.iter().map(|&k| levels[k]).collect();
        let v = objective(&cand);
        evals += 1;
        if v < best {
            best = v;
            best_u = cand;
        }
        let mut c = 0;
        loop {
            idx[c] += 1;
            if idx[c] < n_levels {
                break;
            }
            idx[c] = 0;
            c += 1;
            if c == n {
                break;
            }
        }
        if c == n {
            break;
        }
    }

    let (value, u) = coordinate_refine(best_u, best, &objective);
    let log_k: f64 = (0..n).map(|i| u[i].ln() * masses[i]).sum();
    let u_norm: Vec<f64> = u.iter().map(|v| v * (-log_k).exp()).collect();
    BruteResult {
        value,
        u: ScalarField::new(d, u_norm).unwrap(),
        lattice_evals: evals,
    }
}

/// Lattice search for `min |u|_s / k(u)` over positive node values (21
/// levels per node by default), followed by the same coordinate refinement.
pub fn brute_force_mu(d: &Domain, w: &Weight, s: f64, n_levels: usize) -> BruteResult {
    let n = d.interior_count();
    let masses: Vec<f64> = (0..n).map(|i| w.node_mass(i)).collect();
    let nodes = d.interior_nodes().to_vec();
    let deltas = d.deltas().to_vec();
    let objective =
        move |uv: &[f64]| -> f64 { direct_quotient(uv, &nodes, &deltas, s, &masses) };

    let levels: Vec<f64> = (0..n_levels)
        .map(|k| {
            let t = k as f64 / (n_levels - 1) as f64;
            (0.2f64.ln() + t * (2.8f64 / 0.2).ln()).exp()
        })
        .collect();

    let mut idx = vec![0usize; n];
    let mut best_u = vec![levels[0]; n];
    let mut best = f64::INFINITY;
    let mut evals = 0usize;
    loop {
        let cand: Vec<f64> = idx.iter().map(|&k| levels[k]).collect();
        let v = objective(&cand);
        evals += 1;
        if v < best {
            best = v;
            best_u = cand;
        }
        let mut c = 0;
        loop {
            idx[c] += 1;
            if idx[c] < n_levels {
                break;
            }
            idx[c] = 0;
            c += 1;
            if c == n {
                break;
            }
        }
        if c == n {
            break;
        }
    }

    let (value, u) = coordinate_refine(best_u, best, &objective);
    let masses: Vec<f64> = (0..n).map(|i| w.node_mass(i)).collect();
    let log_k: f64 = (0..n).map(|i| u[i].ln() * masses[i]).sum();
    let u_norm: Vec<f64> = u.iter().map(|v| v * (-log_k).exp()).collect();
    BruteResult {
        value,
        u: ScalarField::new(d, u_norm).unwrap(),
        lattice_evals: evals,
    }
}

/// Cyclic per-coordinate multiplicative search with shrinking step.
fn coordinate_refine(
    mut u: Vec<f64>,
    mut best: f64,
    objective: &impl Fn(&[f64]) -> f64,
) -> (f64, Vec<f64>) {
    let n = u.len();
    let mut step = 1.1f64;
    while step - 1.0 > 1e-12 {
        let mut improved = false;
        for i in 0..n {
            for fac in [step, 1.0 / step] {
                let saved = u[i];
                u[i] *= fac;
                let v = objective(&u);
                if v < best - 1e-300 {
                    best = v;
                    improved = true;
                } else {
                    u[i] = saved;
                }
            }
        }
        if !improved {
            step = 1.0 + (step - 1.0) * 0.5;
        }
    }
    (best, u)
}
