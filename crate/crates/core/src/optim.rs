//! Derivative-free minimisation with the Nelder–Mead simplex.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Total function-iteration budget across restarts.
    pub max_iter: usize,
    /// Converged once every vertex is within this distance of the best one.
    pub x_tol: f64,
    /// ... or once the spread of function values falls below this.
    pub f_tol: f64,
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_iter: 2000, x_tol: 1e-8, f_tol: 1e-10, restarts: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimise `f` from `x0` with an initial simplex spanned by `steps`.
    /// Non-finite function values are treated as `+∞`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64], steps: &[f64]) -> Minimum {
        assert_eq!(x0.len(), steps.len(), "one step per coordinate");
        let mut eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut best = self.run(&mut eval, x0, steps, self.max_iter);
        let mut used = best.iterations;
        for _ in 0..self.restarts {
            if used >= self.max_iter {
                break;
            }
            let again = self.run(&mut eval, &best.x, steps, self.max_iter - used);
            used += again.iterations;
            let improved = best.value - again.value;
            let settled = again.converged && improved.abs() <= self.f_tol.max(1e-12 * best.value.abs());
            if again.value <= best.value {
                best = again;
            }
            if settled {
                break;
            }
        }
        best.iterations = used;
        best
    }

    fn run<F: FnMut(&[f64]) -> f64>(&self, f: &mut F, x0: &[f64], steps: &[f64], budget: usize) -> Minimum {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += steps[i];
            let fx = f(&x);
            simplex.push((x, fx));
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if self.has_converged(&simplex) {
                converged = true;
                break;
            }
            iterations += 1;

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|v| v.0[j]).sum::<f64>() / n as f64)
                .collect();
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect()
            };

            let xr = along(1.0);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            // Shrink towards the best vertex.
            let best = simplex[0].0.clone();
            for v in simplex.iter_mut().skip(1) {
                for (x, b) in v.0.iter_mut().zip(&best) {
                    *x = b + 0.5 * (*x - b);
                }
                v.1 = f(&v.0);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value, iterations, converged }
    }

    fn has_converged(&self, simplex: &[(Vec<f64>, f64)]) -> bool {
        let best = &simplex[0];
        let worst = simplex.last().expect("non-empty simplex");
        if best.1.is_finite() && worst.1.is_finite() && worst.1 - best.1 <= self.f_tol {
            return true;
        }
        let diameter = simplex
            .iter()
            .flat_map(|v| v.0.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        diameter <= self.x_tol
    }
}
