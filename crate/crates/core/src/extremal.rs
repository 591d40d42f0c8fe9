//! Minimization of the log Rayleigh quotient
//! `F(w) = log [e^w]_{s,p} - sum_i w_i omega_i h^N`
//! over node fields `w = log u`. Working in log coordinates keeps `u`
//! positive without barriers and turns the multiplicative constraint
//! `k(u) = 1` into a translation of `w` that is fixed after convergence.
//! At the minimum, `Lambda_p = [u_p]_{s,p}^p` and `u_p` solves the
//! Euler-Lagrange system `<(-Delta_p)^s u, e_i> = Lambda_p omega_i u_i^{-1}
//! h^N` in the nodal basis.

use crate::descent::{self, LineSearchParams, Objective};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::kernel::{log_exterior_masses, KernelTable, SeminormParams};
use crate::math::{LogSumAcc, SignedLogAcc};
use crate::nonlocal::gagliardo_seminorm_log;
use crate::weight::Weight;

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// sup-norm gradient tolerance; defaults to 1e-8 for grids up to 200
    /// nodes and 1e-6 above
    pub grad_tol: Option<f64>,
    pub max_iter: usize,
    pub ls: LineSearchParams,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            grad_tol: None,
            max_iter: 50_000,
        ls: LineSearchParams::default(),
        }
    }
}

impl SolveOptions {
    pub fn effective_grad_tol(&self, n: usize) -> f64 {
        self.grad_tol
            .unwrap_or(if n <= 200 { 1e-8 } else { 1e-6 })
    }
}

#[derive(Clone, Debug)]
pub struct ExtremalSolution {
    pub p: f64,
    /// `log Lambda_p = p log [u_p]_{s,p}`
    pub log_lambda: f64,
    /// positive extremal with `k(u_p) = 1`
    pub u_p: ScalarField,
    /// `log k(u_p)` after the final shift (zero to rounding)
    pub log_k: f64,
    /// sup over nodal test fields of the Euler-Lagrange defect, relative to
    /// `Lambda_p`
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `|grad|_inf` after each accepted descent step
    pub grad_sup_history: Vec<f64>,
    /// nodal-basis EL residual after each accepted descent step
    pub el_residual_history: Vec<f64>,
    /// set when `min u_p < 1e-12 max u_p` (weight degenerate on a region)
    pub degenerate: bool,
}

/// Objective for the descent engine; caches kernel geometry and exterior
/// masses for one `(domain, s, p)` instance.
pub(crate) struct RayleighObjective<'a> {
    d: &'a Domain,
    kt: &'a KernelTable,
    prm: SeminormParams,
    /// omega_i h^N, summing to 1
    masses: Vec<f64>,
    log_ext: Vec<f64>,
    u: Vec<f64>,
    acc: Vec<SignedLogAcc>,
}

impl<'a> RayleighObjective<'a> {
    pub(crate) fn new(d: &'a Domain, kt: &'a KernelTable, w: &Weight, prm: SeminormParams) -> Self {
        let n = d.interior_count();
        Self {
            d,
            kt,
            prm,
            masses: (0..n).map(|i| w.node_mass(i)).collect(),
            log_ext: log_exterior_masses(d, kt, prm.sp()),
            u: vec![0.0; n],
            acc: vec![SignedLogAcc::new(); n],
        }
    }

    /// `log G = log [u]_{s,p}^p` for `u = e^w`.
    fn log_g(&mut self, w: &[f64]) -> f64 {
        let n = w.len();
        let p = self.prm.p;
        let nn = self.d.dimension() as f64;
        let nsp = nn + self.prm.sp();
        let log_h = self.d.h().ln();
        for i in 0..n {
            self.u[i] = w[i].exp();
        }
        let mut acc = LogSumAcc::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let ad = (self.u[i] - self.u[j]).abs();
                if ad == 0.0 {
                    continue;
                }
                acc.push(LN_2 + p * ad.ln() - nsp * self.kt.log_dist(i, j) + 2.0 * nn * log_h);
            }
        }
        for i in 0..n {
            acc.push(LN_2 + p * w[i] + self.log_ext[i] + nn * log_h);
        }
        acc.log_total()
    }
}

impl Objective for RayleighObjective<'_> {
    fn value(&mut self, w: &[f64]) -> f64 {
        let dot: f64 = w.iter().zip(&self.masses).map(|(a, b)| a * b).sum();
        self.log_g(w) / self.prm.p - dot
    }

    fn value_grad(&mut self, w: &[f64], grad: &mut Vec<f64>) -> f64 {
        let n = w.len();
        let p = self.prm.p;
        let nn = self.d.dimension() as f64;
        let nsp = nn + self.prm.sp();
        let log_h = self.d.h().ln();
        for i in 0..n {
            self.u[i] = w[i].exp();
            self.acc[i] = SignedLogAcc::new();
        }
        let mut total = LogSumAcc::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let dv = self.u[i] - self.u[j];
                if dv == 0.0 {
                    continue;
                }
                let lad = dv.abs().ln();
                let lr = self.kt.log_dist(i, j);
                total.push(LN_2 + p * lad - nsp * lr + 2.0 * nn * log_h);
                let gm = (p - 1.0) * lad - nsp * lr;
                let sg = dv.signum();
                self.acc[i].push(gm, sg);
                self.acc[j].push(gm, -sg);
            }
        }
        for i in 0..n {
            total.push(LN_2 + p * w[i] + self.log_ext[i] + nn * log_h);
            // relative to the pair constant LN_2 + 2 nn log_h + w_i
            self.acc[i].push((p - 1.0) * w[i] + self.log_ext[i] - nn * log_h, 1.0);
        }
        let log_g = total.log_total();

        grad.clear();
        for i in 0..n {
            let (sign, lm) = self.acc[i].signed_log_total();
            let ratio = sign * (w[i] + LN_2 + 2.0 * nn * log_h + lm - log_g).exp();
            grad.push(ratio - self.masses[i]);
        }
        let dot: f64 = w.iter().zip(&self.masses).map(|(a, b)| a * b).sum();
        log_g / p - dot
    }
}

/// Scale-invariant objective `log([u]_{s,p} / k(u))` evaluated at `u = e^w`.
pub fn log_rayleigh(
    wlog: &ScalarField,
    d: &Domain,
    kt: &KernelTable,
    w: &Weight,
    prm: &SeminormParams,
) -> f64 {
    let mut obj = RayleighObjective::new(d, kt, w, *prm);
    obj.value(wlog.values())
}

/// Objective together with its gradient; exposed for derivative checks.
pub fn log_rayleigh_with_grad(
    wlog: &ScalarField,
    d: &Domain,
    kt: &KernelTable,
    w: &Weight,
    prm: &SeminormParams,
) -> (f64, Vec<f64>) {
    let mut obj = RayleighObjective::new(d, kt, w, *prm);
    let mut grad = Vec::new();
    let f = obj.value_grad(wlog.values(), &mut grad);
    (f, grad)
}

/// Minimizes the log Rayleigh quotient from the strictly positive `init`
/// field. On return `k(u_p) = 1` exactly (final shift) and `log_lambda`
/// is `p` times the log seminorm of the shifted minimizer.
pub fn solve_extremal(
    d: &Domain,
    kt: &KernelTable,
    w: &Weight,
    prm: &SeminormParams,
    init: &ScalarField,
    opts: &SolveOptions,
) -> Result<ExtremalSolution> {
    let n = d.interior_count();
    if init.len() != n {
        return Err(Error::FieldLength {
            expected: n,
            got: init.len(),
        });
    }
    if init.min() <= 0.0 {
        return Err(Error::InvalidInit(
            "extremal solve needs a strictly positive init field".into(),
        ));
    }
    let w0: Vec<f64> = init.values().iter().map(|v| v.ln()).collect();
    let mut obj = RayleighObjective::new(d, kt, w, *prm);
    let grad_tol = opts.effective_grad_tol(n);

    let mut el_history = Vec::new();
    let res = descent::minimize(
        &mut obj,
        &w0,
        grad_tol,
        opts.max_iter,
        &opts.ls,
        |wcur, gcur| {
            let r = wcur
                .iter()
                .zip(gcur)
                .fold(0.0f64, |m, (wi, gi)| m.max(gi.abs() / wi.exp()));
            el_history.push(r);
        },
    );

    // fix the translation symmetry: shift so k(u) = 1
    let shift: f64 = res
        .w
        .iter()
        .enumerate()
        .map(|(i, wi)| wi * w.node_mass(i))
        .sum();
    let wfinal: Vec<f64> = res.w.iter().map(|wi| wi - shift).collect();
    let u_p = ScalarField::new(d, wfinal.iter().map(|wi| wi.exp()).collect())?;
    let log_k: f64 = wfinal
        .iter()
        .enumerate()
        .map(|(i, wi)| wi * w.node_mass(i))
        .sum();
    let log_lambda = prm.p * gagliardo_seminorm_log(&u_p, d, kt, prm);

    let mut sol = ExtremalSolution {
        p: prm.p,
        log_lambda,
        u_p,
        log_k,
        el_residual: 0.0,
        iterations: res.iterations,
        converged: res.converged,
        grad_sup_history: res.grad_sup_history,
        el_residual_history: el_history,
        degenerate: false,
    };
    sol.el_residual = euler_lagrange_residual(&sol, d, kt, w, prm);
    sol.degenerate = sol.u_p.min() < 1e-12 * sol.u_p.sup_norm();
    Ok(sol)
}

/// Sup over the nodal basis fields `e_i` of
/// `|<(-Delta_p)^s u_p, e_i> - Lambda_p omega_i u_p(x_i)^{-1} h^N|`,
/// normalized by `Lambda_p`. Up to a positive nodal scaling this is the
/// sup-norm of the objective gradient.
pub fn euler_lagrange_residual(
    sol: &ExtremalSolution,
    d: &Domain,
    kt: &KernelTable,
    w: &Weight,
    prm: &SeminormParams,
) -> f64 {
    let n = d.interior_count();
    let nn = d.dimension() as f64;
    let nsp = nn + prm.sp();
    let p = prm.p;
    let log_h = d.h().ln();
    let log_ext = log_exterior_masses(d, kt, prm.sp());
    let uv = sol.u_p.values();

    let mut worst = 0.0f64;
    for i in 0..n {
        // <A u, e_i> = 2 sum_j |d_ij|^{p-2} d_ij K_ij h^{2N}
        //            + 2 |u_i|^{p-2} u_i M_i h^N
        let mut acc = SignedLogAcc::new();
        for j in 0..n {
            if j == i {
                continue;
            }
            let dv = uv[i] - uv[j];
            if dv == 0.0 {
                continue;
            }
            acc.push(
                LN_2 + (p - 1.0) * dv.abs().ln() - nsp * kt.log_dist(i, j) + 2.0 * nn * log_h,
                dv.signum(),
            );
        }
        if uv[i] != 0.0 {
            acc.push(
                LN_2 + (p - 1.0) * uv[i].abs().ln() + log_ext[i] + nn * log_h,
                uv[i].signum(),
            );
        }
        let (sign, lm) = acc.signed_log_total();
        // scale by Lambda_p in log domain before exponentiating
        let pairing_over_lambda = sign * (lm - sol.log_lambda).exp();
        let rhs = w.node_mass(i) / uv[i];
        worst = worst.max((pairing_over_lambda - rhs).abs());
    }
    worst
}
