use serde::{Deserialize, Serialize};

use super::{log_likelihood, Sample, SkewTParams};
use crate::error::{domain, Error, Result};
use crate::optim::NelderMead;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: SkewTParams,
    /// Maximised objective (log likelihood or log posterior).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Moment-based starting point: median, IQR/1.35, skew-signed α, ν = 10.
pub fn initial_guess(data: &Sample) -> Result<SkewTParams> {
    let mut omega = data.iqr() / 1.35;
    if !(omega > 0.0) {
        omega = data.sd();
    }
    if !(omega > 0.0) {
        return Err(domain("cannot fit a skewed t to constant data"));
    }
    let skew = data.skewness();
    let alpha = skew.signum() * (2.0 * skew.abs()).min(5.0);
    SkewTParams::new(alpha, 10.0, data.median(), omega)
}

/// Maximise `objective` over `(α, ln ν, ξ, ln ω)` with Nelder–Mead.
/// Returns [`Error::FitFailed`] carrying the best point when the simplex
/// does not converge within the budget.
pub fn fit_with<F>(data: &Sample, objective: F, init: Option<SkewTParams>) -> Result<FitResult>
where
    F: Fn(&SkewTParams) -> f64,
{
    let start = match init {
        Some(p) => {
            p.validate()?;
            p
        }
        None => initial_guess(data)?,
    };
    let to_params = |x: &[f64]| SkewTParams { alpha: x[0], nu: x[1].exp(), xi: x[2], omega: x[3].exp() };
    let x0 = [start.alpha, start.nu.ln(), start.xi, start.omega.ln()];
    let steps = [0.5 * start.alpha.abs().max(1.0), 0.5, 0.25 * start.omega, 0.3];
    let neg = |x: &[f64]| {
        let p = to_params(x);
        if !(p.nu > 0.0 && p.nu.is_finite() && p.omega > 0.0 && p.omega.is_finite()) {
            return f64::INFINITY;
        }
        -objective(&p)
    };
    let m = NelderMead::default().minimize(neg, &x0, &steps);
    let result = FitResult {
        params: to_params(&m.x),
        objective: -m.value,
        iterations: m.iterations,
        converged: m.converged,
    };
    if !result.objective.is_finite() {
        return Err(Error::Numeric("objective is not finite anywhere near the start".into()));
    }
    if !m.converged {
        return Err(Error::FitFailed(Box::new(result)));
    }
    Ok(result)
}

/// Maximum-likelihood fit.
pub fn fit_mle(data: &Sample) -> Result<FitResult> {
    let values = data.values();
    fit_with(data, |p| log_likelihood(values, p).unwrap_or(f64::NEG_INFINITY), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skewt::sample;

    #[test]
    fn constant_data_is_rejected() {
        let s = Sample::new(vec![2.0; 10]).unwrap();
        assert!(matches!(fit_mle(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn recovers_location_and_scale() {
        let truth = SkewTParams::new(3.0, 5.0, 1.0, 2.0).unwrap();
        let data = Sample::new(sample(&truth, 2000, 11).unwrap()).unwrap();
        let fit = fit_mle(&data).unwrap();
        assert!(fit.converged);
        assert!((fit.params.xi - 1.0).abs() < 0.3, "{:?}", fit.params);
        assert!((fit.params.omega - 2.0).abs() < 0.4, "{:?}", fit.params);
        assert!(fit.params.alpha > 1.5);
        let at_truth = log_likelihood(data.values(), &truth).unwrap();
        assert!(fit.objective >= at_truth - 1e-6);
    }
}
