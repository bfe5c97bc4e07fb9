use nalgebra::{DMatrix, DVector};

use super::line_search::strong_wolfe;
use super::{ConvergedReason, Objective, SearchConfig, SearchResult};
use crate::error::{Error, Result};

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// BFGS with an inverse-Hessian approximation and a strong Wolfe line search.
///
/// The first step (and every step after a reset) uses the steepest-descent
/// direction with length capped at 1, and the inverse Hessian is rescaled by
/// `sᵀy / yᵀy` before its first update. When the line search fails with a
/// stale approximation, the approximation is reset to the identity once;
/// a second failure from a fresh identity ends the search.
///
/// Iterates only move on sufficient decrease, so the returned error never
/// exceeds the starting error. A non-finite value or gradient at the starting
/// point aborts with [`Error::NonFiniteObjective`].
pub fn minimize<O: Objective + ?Sized>(objective: &O, x0: &[f64], config: &SearchConfig) -> Result<SearchResult> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut f, mut g) = objective.value_and_gradient(&x);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteObjective { last_finite: x, last_error: f, iterations: 0 });
    }
    let start_error = f;
    let mut evaluations = 1;
    let mut inv_hessian = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut iterations = 0;

    let reason = loop {
        if f <= config.error_tolerance {
            break ConvergedReason::ErrorTol;
        }
        if max_abs(&g) <= config.gradient_tolerance {
            break ConvergedReason::GradientTol;
        }
        if iterations >= config.max_iterations {
            break ConvergedReason::MaxIter;
        }
        let gv = DVector::from_column_slice(&g);
        let mut direction = -(&inv_hessian * &gv);
        if !(direction.dot(&gv) < 0.0) {
            inv_hessian.fill_with_identity();
            fresh = true;
            direction = -gv.clone();
        }
        let initial_step = if fresh { (1.0 / gv.norm()).min(1.0) } else { 1.0 };
        let (trial, used) = strong_wolfe(objective, &x, f, &g, direction.as_slice(), initial_step);
        evaluations += used;
        let Some(trial) = trial else {
            if fresh {
                break ConvergedReason::LineSearchFail;
            }
            inv_hessian.fill_with_identity();
            fresh = true;
            continue;
        };

        let s = &direction * trial.alpha;
        let y = DVector::from_column_slice(&trial.gradient) - &gv;
        let sy = s.dot(&y);
        if sy > 0.0 && sy.is_finite() {
            if fresh {
                inv_hessian *= sy / y.dot(&y);
            }
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy = &inv_hessian * &y;
            let yhy = y.dot(&hy);
            inv_hessian += (&s * s.transpose()) * (rho * (1.0 + rho * yhy))
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
            fresh = false;
        }
        for (xi, si) in x.iter_mut().zip(s.iter()) {
            *xi += si;
        }
        f = trial.value;
        g = trial.gradient;
        iterations += 1;
    };

    Ok(SearchResult {
        best_params: x,
        best_error: f,
        start_error,
        iterations,
        evaluations,
        converged_reason: reason,
    })
}
