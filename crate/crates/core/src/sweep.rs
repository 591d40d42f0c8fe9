//! Warm-started sweeps over increasing `p`, tracking the convergence of
//! `(Lambda_p^{1/p}, u_p)` toward the Hölder-quotient limit pair.

use crate::config::{prepare, ExperimentConfig, InitConfig, LimitInitConfig, Prepared};
use crate::error::{Error, Result};
use crate::extremal::solve_extremal;
use crate::field::ScalarField;
use crate::kernel::SeminormParams;
use crate::limit::{minimize_holder_quotient, LimitSolution};
use crate::nonlocal::holder_seminorm;
use crate::weight::log_geometric_mean_k;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub p: f64,
    /// `Lambda_p^{1/p} = exp(log_lambda / p)`
    pub lambda_root: f64,
    /// `|u_p|_s`
    pub holder_of_up: f64,
    pub el_residual: f64,
    /// `sup |u_p - u_{p_prev}|`; 0 for the first record
    pub sup_dist_to_prev: f64,
    pub log_lambda: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    /// last converged extremal (the `u_inf` proxy)
    pub u_last: ScalarField,
    /// geometric mean of `u_last / v` (the `k_inf` proxy; both factors are
    /// `k`-normalized, so this measures consistency rather than scale)
    pub k_last: f64,
    pub limit: LimitSolution,
    /// `sup |v k_last - u_last|`, the discrete residual of the relation
    /// between the limit extremal and the quotient minimizer
    pub vsu_sup_dist: f64,
    /// p values whose solves hit the iteration cap
    pub flagged_p: Vec<f64>,
}

pub fn run_p_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let prep = prepare(cfg)?;
    run_p_sweep_prepared(&prep, cfg)
}

pub fn run_p_sweep_prepared(prep: &Prepared, cfg: &ExperimentConfig) -> Result<SweepResult> {
    let d = &prep.domain;
    let kt = &prep.table;
    let w = &prep.weight;
    let opts = cfg.solve_options();

    let delta_s_init = || -> Result<ScalarField> {
        let raw =
            ScalarField::new(d, prep.delta.values().iter().map(|t| t.powf(cfg.s)).collect())?;
        let shift = log_geometric_mean_k(&raw, w);
        Ok(raw.scaled((-shift).exp()))
    };
    let mut init = match cfg.solver.init {
        InitConfig::Xi | InitConfig::Warm => prep.xi.xi.clone(),
        InitConfig::DeltaS => delta_s_init()?,
    };

    let mut records = Vec::with_capacity(cfg.p_list.len());
    let mut flagged = Vec::new();
    let mut prev_u: Option<ScalarField> = None;
    let mut last_converged: Option<ScalarField> = None;

    for &p in &cfg.p_list {
        let prm = SeminormParams::new(cfg.s, p)?;
        let sol = solve_extremal(d, kt, w, &prm, &init, &opts)?;
        if !sol.converged {
            flagged.push(p);
        }
        let lambda_root = (sol.log_lambda / p).exp();
        let hol = holder_seminorm(&sol.u_p, d, kt, cfg.s).value;
        let sup_dist = prev_u.as_ref().map_or(0.0, |u| sol.u_p.sup_dist(u));
        records.push(SweepRecord {
            p,
            lambda_root,
            holder_of_up: hol,
            el_residual: sol.el_residual,
            sup_dist_to_prev: sup_dist,
            log_lambda: sol.log_lambda,
            converged: sol.converged,
        });
        if sol.converged {
            last_converged = Some(sol.u_p.clone());
        }
        prev_u = Some(sol.u_p.clone());
        // warm start the next stage regardless of convergence
        init = sol.u_p;
    }

    let u_last = last_converged.ok_or_else(|| {
        Error::SweepFailed("no solve in the sweep reached the gradient tolerance".into())
    })?;

    let limit_init = match cfg.limit.init {
        LimitInitConfig::UPFinal => u_last.clone(),
        LimitInitConfig::Xi => prep.xi.xi.clone(),
    };
    let limit = minimize_holder_quotient(d, kt, w, cfg.s, &limit_init, &cfg.limit_options())?;

    // geometric mean of the ratio u_last / v
    let k_last: f64 = (0..d.interior_count())
        .map(|i| (u_last[i].ln() - limit.v[i].ln()) * w.node_mass(i))
        .sum::<f64>()
        .exp();
    let vsu_sup_dist = (0..d.interior_count())
        .map(|i| (limit.v[i] * k_last - u_last[i]).abs())
        .fold(0.0f64, f64::max);

    Ok(SweepResult {
        records,
        u_last,
        k_last,
        limit,
        vsu_sup_dist,
        flagged_p: flagged,
    })
}
