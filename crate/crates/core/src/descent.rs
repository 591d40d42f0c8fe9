//! Gradient descent with Armijo backtracking, shared by the extremal and
//! limit solvers. The step doubles after each accepted iterate and halves
//! inside the line search, which is enough for these smoothed objectives
//! once sweeps warm-start each stage.

#[derive(Clone, Copy, Debug)]
pub struct LineSearchParams {
    /// Armijo sufficient-decrease coefficient
    pub c1: f64,
    pub shrink: f64,
    pub grow: f64,
    pub alpha0: f64,
    pub alpha_min: f64,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            shrink: 0.5,
            grow: 2.0,
            alpha0: 1.0,
            alpha_min: 1e-20,
        }
    }
}

/// Smooth objective with gradient, evaluated in-place. `&mut self` lets
/// implementations keep scratch buffers.
pub trait Objective {
    fn value(&mut self, w: &[f64]) -> f64;
    /// Returns the value and writes the gradient.
    fn value_grad(&mut self, w: &[f64], grad: &mut Vec<f64>) -> f64;
}

#[derive(Clone, Debug)]
pub struct DescentResult {
    pub w: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    pub grad_sup: f64,
    pub iterations: usize,
    pub converged: bool,
    /// sup-norm of the gradient after each accepted step
    pub grad_sup_history: Vec<f64>,
}

/// Minimizes `obj` from `w0`, stopping when the gradient sup-norm reaches
/// `grad_tol` or after `max_iter` accepted steps. `on_accept` runs after each
/// accepted step with the current iterate and gradient.
pub fn minimize(
    obj: &mut impl Objective,
    w0: &[f64],
    grad_tol: f64,
    max_iter: usize,
    ls: &LineSearchParams,
    mut on_accept: impl FnMut(&[f64], &[f64]),
) -> DescentResult {
    let n = w0.len();
    let mut w = w0.to_vec();
    let mut grad = Vec::with_capacity(n);
    let mut f = obj.value_grad(&w, &mut grad);
    let mut alpha = ls.alpha0;
    let mut history = Vec::new();
    let mut trial = vec![0.0; n];
    let mut iterations = 0;

    for _ in 0..max_iter {
        let gsup = sup_norm(&grad);
        if gsup <= grad_tol {
            break;
        }
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        alpha = (alpha * ls.grow).min(1e12);
        let mut accepted = false;
        while alpha >= ls.alpha_min {
            for i in 0..n {
                trial[i] = w[i] - alpha * grad[i];
            }
            let ft = obj.value(&trial);
            if ft <= f - ls.c1 * alpha * gnorm2 {
                accepted = true;
                break;
            }
            alpha *= ls.shrink;
        }
        if !accepted {
            // line search exhausted: gradient no longer yields descent at
            // representable step sizes
            break;
        }
        std::mem::swap(&mut w, &mut trial);
        f = obj.value_grad(&w, &mut grad);
        iterations += 1;
        history.push(sup_norm(&grad));
        on_accept(&w, &grad);
    }

    let grad_sup = sup_norm(&grad);
    DescentResult {
        converged: grad_sup <= grad_tol,
        w,
        value: f,
        grad_sup,
        grad,
        iterations,
        grad_sup_history: history,
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
