use std::collections::VecDeque;

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub line_search_max: usize,
    pub history_size: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            max_iters: 500,
            grad_tol: 1e-8,
            line_search_max: 40,
            history_size: 10,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if self.max_iters == 0 || !(self.grad_tol > 0.0) || self.line_search_max == 0 {
            return Err(NumericsError::InvalidOptions);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub loss: f64,
    pub iters: usize,
    /// Loss at the start point followed by the loss after each accepted step.
    pub history: Vec<f64>,
    pub converged: bool,
}

const ARMIJO_C: f64 = 1e-4;
const SHRINK: f64 = 0.5;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check(loss: f64, grad: &[f64]) -> Result<(), NumericsError> {
    if !loss.is_finite() {
        return Err(NumericsError::NonFinite { index: None });
    }
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(NumericsError::NonFinite { index: Some(i) });
    }
    Ok(())
}

/// Limited-memory BFGS with a backtracking Armijo line search.
///
/// `loss_and_grad` returns the loss and fills the gradient slice.
pub fn minimize_qn<F>(
    mut loss_and_grad: F,
    x0: &[f64],
    opts: &OptimizerOptions,
) -> Result<Minimum, NumericsError>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<f64, NumericsError>,
{
    opts.validate()?;
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = loss_and_grad(&x, &mut g)?;
    check(f, &g)?;
    let mut history = vec![f];
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iters = 0;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    while iters < opts.max_iters {
        if inf_norm(&g) <= opts.grad_tol {
            return Ok(Minimum {
                x,
                loss: f,
                iters,
                history,
                converged: true,
            });
        }

        // Two-loop recursion for d = -H·g.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = mem.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|qi| *qi *= gamma);
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }

        let mut step = if mem.is_empty() {
            (1.0 / inf_norm(&g)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = false;
        for _ in 0..opts.line_search_max {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            let f_new = loss_and_grad(&x_new, &mut g_new)?;
            check(f_new, &g_new)?;
            if f_new <= f + ARMIJO_C * step * slope {
                let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-300 {
                    if mem.len() == opts.history_size.max(1) {
                        mem.pop_front();
                    }
                    mem.push_back((s, y, 1.0 / sy));
                }
                x.copy_from_slice(&x_new);
                g.copy_from_slice(&g_new);
                f = f_new;
                accepted = true;
                break;
            }
            step *= SHRINK;
        }
        iters += 1;
        if !accepted {
            if mem.is_empty() {
                // Even steepest descent cannot decrease the loss: stationary to
                // working precision.
                return Ok(Minimum {
                    x,
                    loss: f,
                    iters,
                    history,
                    converged: false,
                });
            }
            mem.clear();
            continue;
        }
        history.push(f);
    }
    let converged = inf_norm(&g) <= opts.grad_tol;
    Ok(Minimum {
        x,
        loss: f,
        iters,
        history,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_parabola() {
        let r = minimize_qn(
            |x, g| {
                g[0] = 2.0 * (x[0] - 3.0);
                Ok((x[0] - 3.0).powi(2))
            },
            &[0.0],
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert!((r.x[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let opts = OptimizerOptions {
            max_iters: 2000,
            ..Default::default()
        };
        let r = minimize_qn(
            |x, g| {
                let (a, b) = (x[0], x[1]);
                g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
                g[1] = 200.0 * (b - a * a);
                Ok((1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2))
            },
            &[-1.2, 1.0],
            &opts,
        )
        .unwrap();
        assert!(
            (r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4,
            "{:?}",
            r.x
        );
    }

    #[test]
    fn constant_loss_returns_start() {
        let r = minimize_qn(
            |_, g| {
                g.iter_mut().for_each(|v| *v = 0.0);
                Ok(7.0)
            },
            &[1.0, 2.0],
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert_eq!(r.x, vec![1.0, 2.0]);
        assert!(r.iters <= 1);
    }

    #[test]
    fn nan_gradient_names_index() {
        let err = minimize_qn(
            |_, g| {
                g[0] = 0.0;
                g[1] = f64::NAN;
                Ok(1.0)
            },
            &[0.0, 0.0],
            &OptimizerOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, NumericsError::NonFinite { index: Some(1) }));
    }

    #[test]
    fn rejects_bad_options() {
        let opts = OptimizerOptions {
            max_iters: 0,
            ..Default::default()
        };
        assert!(minimize_qn(|_, _| Ok(0.0), &[0.0], &opts).is_err());
    }
}
