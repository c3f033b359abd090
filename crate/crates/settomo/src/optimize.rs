//! Dense BFGS with backtracking line search, sized for the 16-parameter
//! density-matrix fits.

/// Outcome of one optimizer run.
#[derive(Clone, Debug)]
pub struct OptimizeOutcome {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    /// True when the gradient tolerance was reached before the iteration cap.
    pub converged: bool,
}

/// Minimize a smooth cost with analytic gradient starting from `x0`.
///
/// `f` returns (cost, gradient). Stops when the sup-norm of the gradient
/// drops below `gradient_tolerance` or after `max_iterations` BFGS steps.
pub fn bfgs<F>(f: F, x0: &[f64], max_iterations: usize, gradient_tolerance: f64) -> OptimizeOutcome
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut cost, mut grad) = f(&x);
    // Inverse-Hessian approximation, dense row-major.
    let mut h = identity(n);
    let mut iterations = 0;
    let mut converged = sup_norm(&grad) <= gradient_tolerance;

    while !converged && iterations < max_iterations {
        iterations += 1;
        let direction = neg_matvec(&h, &grad, n);
        let slope: f64 = direction.iter().zip(&grad).map(|(d, g)| d * g).sum();
        let (direction, slope) = if slope < 0.0 {
            (direction, slope)
        } else {
            // Reset a non-descent direction to steepest descent.
            h = identity(n);
            let d: Vec<f64> = grad.iter().map(|g| -g).collect();
            let s: f64 = d.iter().zip(&grad).map(|(d, g)| d * g).sum();
            (d, s)
        };

        // Backtracking Armijo line search.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + step * di)
                .collect();
            let (trial_cost, trial_grad) = f(&trial);
            if trial_cost <= cost + 1e-4 * step * slope {
                accepted = Some((trial, trial_cost, trial_grad));
                break;
            }
            step *= 0.5;
        }
        let Some((new_x, new_cost, new_grad)) = accepted else {
            break; // line search stalled; current point is the answer
        };

        let s: Vec<f64> = new_x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if sy > 1e-12 * s_norm * y_norm {
            bfgs_update(&mut h, &s, &y, sy, n);
        }

        x = new_x;
        cost = new_cost;
        grad = new_grad;
        converged = sup_norm(&grad) <= gradient_tolerance || cost <= 1e-30;
    }

    OptimizeOutcome {
        x,
        cost,
        iterations,
        converged,
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn neg_matvec(h: &[f64], g: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += h[i * n + j] * g[j];
        }
        out[i] = -acc;
    }
    out
}

/// H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ with ρ = 1/(sᵀy).
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    let mut hy = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += h[i * n + j] * y[j];
        }
        hy[i] = acc;
    }
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            let term = -rho * (hy[i] * s[j] + s[i] * hy[j])
                + rho * rho * yhy * s[i] * s[j]
                + rho * s[i] * s[j];
            h[i * n + j] += term;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn minimizes_quadratic_bowl() {
        // f(x) = Σ cᵢ (xᵢ − tᵢ)²
        let targets = [1.0, -2.0, 0.5, 3.0];
        let scales = [1.0, 10.0, 0.3, 5.0];
        let f = |x: &[f64]| {
            let mut cost = 0.0;
            let mut grad = vec![0.0; 4];
            for i in 0..4 {
                let d = x[i] - targets[i];
                cost += scales[i] * d * d;
                grad[i] = 2.0 * scales[i] * d;
            }
            (cost, grad)
        };
        let out = bfgs(f, &[0.0; 4], 500, 1e-12);
        assert!(out.converged);
        for i in 0..4 {
            assert_abs_diff_eq!(out.x[i], targets[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let cost = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let grad = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (cost, grad)
        };
        let out = bfgs(f, &[-1.2, 1.0], 2000, 1e-10);
        assert!(out.cost < 1e-15);
        assert_abs_diff_eq!(out.x[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(out.x[1], 1.0, epsilon = 1e-6);
    }
}
