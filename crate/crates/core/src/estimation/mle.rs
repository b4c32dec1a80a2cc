//! Physical maximum-likelihood fit shared by state and process tomography.
//!
//! The unknown is a PSD matrix `X = T T†` with `T` lower triangular (real
//! diagonal), so every iterate is physical. Expected counts are linear in
//! `X`: `μ_s = e_s · Tr(X A_s)` for Hermitian PSD effects `A_s`. The overall
//! scale of `X` is free and absorbs the unknown source normalization.

use std::collections::VecDeque;

use nalgebra::Cholesky;

use super::{Likelihood, MleConfig};
use crate::error::{Error, Result};
use crate::qstate::{eig_unchecked, ComplexMatrix, C64};

pub(crate) struct CountModel {
    pub effects: Vec<ComplexMatrix>,
    pub exposures: Vec<f64>,
    pub counts: Vec<f64>,
}

pub(crate) struct Fit {
    pub x: ComplexMatrix,
    pub nll: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    /// Per-count objective after each accepted iteration, starting value first.
    #[cfg_attr(not(test), allow(dead_code))]
    pub trace: Vec<f64>,
}

const EMPTY_BIN_GUARD: f64 = 1.0;
const MU_FLOOR: f64 = 1e-300;

impl CountModel {
    fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    fn total_counts(&self) -> f64 {
        self.counts.iter().sum()
    }

    fn expected(&self, x: &ComplexMatrix) -> Vec<f64> {
        self.effects
            .iter()
            .zip(&self.exposures)
            .map(|(a, e)| e * x.trace_product(a).re)
            .collect()
    }

    /// Per-count objective and its derivative with respect to each `μ_s`.
    fn objective(&self, mu: &[f64], form: Likelihood) -> (f64, Vec<f64>) {
        let norm = self.total_counts();
        let mut value = 0.0;
        let mut deriv = Vec::with_capacity(mu.len());
        for (&m, &n) in mu.iter().zip(&self.counts) {
            match form {
                Likelihood::GaussianPoisson => {
                    let denom = 2.0 * m + EMPTY_BIN_GUARD;
                    let r = n - m;
                    value += r * r / denom;
                    deriv.push(-2.0 * r * (n + m + EMPTY_BIN_GUARD) / (denom * denom) / norm);
                }
                Likelihood::ExactPoisson => {
                    let m = m.max(MU_FLOOR);
                    value += m - if n > 0.0 { n * m.ln() } else { 0.0 };
                    deriv.push((1.0 - n / m) / norm);
                }
            }
        }
        (value / norm, deriv)
    }
}

fn unpack(theta: &[f64], dim: usize) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(dim);
    let mut k = 0;
    for i in 0..dim {
        for j in 0..i {
            t[(i, j)] = C64::new(theta[k], theta[k + 1]);
            k += 2;
        }
        t[(i, i)] = C64::new(theta[k], 0.0);
        k += 1;
    }
    t
}

fn pack(t: &ComplexMatrix) -> Vec<f64> {
    let dim = t.dim();
    let mut theta = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..i {
            theta.push(t[(i, j)].re);
            theta.push(t[(i, j)].im);
        }
        theta.push(t[(i, i)].re);
    }
    theta
}

/// Lower-triangular `T` with `T T† = x + δI`.
pub(crate) fn cholesky_factor(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = x.dim();
    let jitter = 1e-6 * x.trace().re.abs().max(f64::MIN_POSITIVE) / dim as f64;
    let shifted = x.hermitize().to_nalgebra() + nalgebra::DMatrix::identity(dim, dim) * C64::new(jitter, 0.0);
    let chol = Cholesky::new(shifted)
        .ok_or_else(|| Error::InvalidArgument("initial estimate is not positive definite".into()))?;
    Ok(ComplexMatrix::from_nalgebra(&chol.l()))
}

/// Hermitizes and clips negative eigenvalues to zero.
pub(crate) fn project_psd(x: &ComplexMatrix) -> ComplexMatrix {
    let eig = eig_unchecked(&x.hermitize());
    let mut out = ComplexMatrix::zeros(x.dim());
    for (&l, v) in eig.values.iter().zip(&eig.vectors) {
        if l > 0.0 {
            out.add_scaled(&ComplexMatrix::projector(v), C64::new(l, 0.0));
        }
    }
    out
}

struct Evaluation {
    value: f64,
    gradient: Vec<f64>,
}

fn evaluate(model: &CountModel, theta: &[f64], form: Likelihood) -> Evaluation {
    let dim = model.dim();
    let t = unpack(theta, dim);
    let x = t.matmul(&t.adjoint());
    let mu = model.expected(&x);
    let (value, deriv) = model.objective(&mu, form);
    let mut w = ComplexMatrix::zeros(dim);
    for ((a, e), d) in model.effects.iter().zip(&model.exposures).zip(&deriv) {
        if *d != 0.0 {
            w.add_scaled(a, C64::new(d * e, 0.0));
        }
    }
    let g = w.matmul(&t);
    let mut gradient = Vec::with_capacity(theta.len());
    for i in 0..dim {
        for j in 0..i {
            gradient.push(2.0 * g[(i, j)].re);
            gradient.push(2.0 * g[(i, j)].im);
        }
        gradient.push(2.0 * g[(i, i)].re);
    }
    Evaluation { value, gradient }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Limited-memory BFGS with Armijo backtracking. Steps are accepted only on
/// strict decrease, so the objective is non-increasing across iterations.
pub(crate) fn minimize(
    model: &CountModel,
    init: &ComplexMatrix,
    cfg: &MleConfig,
) -> Result<Fit> {
    cfg.validate()?;
    if model.total_counts() <= 0.0 {
        return Err(Error::EmptyData);
    }
    // scale the start so that expected and observed totals agree
    let mu0: f64 = model.expected(init).iter().sum();
    let start = if mu0 > 0.0 {
        init.scale_real(model.total_counts() / mu0)
    } else {
        return Err(Error::InvalidArgument("initial estimate predicts no counts".into()));
    };
    let mut theta = pack(&cholesky_factor(&start)?);
    let mut current = evaluate(model, &theta, cfg.likelihood);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut trace = vec![current.value];

    while iterations < cfg.max_iterations {
        let gnorm = norm(&current.gradient);
        if gnorm < cfg.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        // two-loop recursion
        let mut q = current.gradient.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let alpha = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= alpha * yi;
            }
            alphas.push(alpha);
        }
        let gamma = history
            .back()
            .map(|(s, y, _)| dot(s, y) / dot(y, y))
            .unwrap_or_else(|| 1.0 / gnorm.max(1e-300));
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
            let beta = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (alpha - beta) * si;
            }
        }
        let mut direction: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&direction, &current.gradient);
        if !(slope < 0.0) {
            history.clear();
            direction = current.gradient.iter().map(|g| -g / gnorm).collect();
            slope = dot(&direction, &current.gradient);
        }

        let mut step = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = theta
                .iter()
                .zip(&direction)
                .map(|(t, d)| t + step * d)
                .collect();
            let eval = evaluate(model, &trial, cfg.likelihood);
            if eval.value.is_finite() && eval.value <= current.value + 1e-4 * step * slope
                && eval.value < current.value
            {
                break Some((trial, eval));
            }
            step *= 0.5;
            if step < 1e-20 {
                break None;
            }
        };
        match accepted {
            Some((trial, eval)) => {
                let s: Vec<f64> = trial.iter().zip(&theta).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = eval
                    .gradient
                    .iter()
                    .zip(&current.gradient)
                    .map(|(a, b)| a - b)
                    .collect();
                let sy = dot(&s, &y);
                if sy > 1e-300 {
                    history.push_back((s, y, 1.0 / sy));
                    if history.len() > cfg.history {
                        history.pop_front();
                    }
                }
                theta = trial;
                current = eval;
                trace.push(current.value);
            }
            None if !history.is_empty() => history.clear(),
            None => break,
        }
    }

    let t = unpack(&theta, model.dim());
    let x = t.matmul(&t.adjoint());
    Ok(Fit {
        nll: current.value * model.total_counts(),
        gradient_norm: norm(&current.gradient),
        x,
        iterations,
        converged,
        trace,
    })
}
