//! Gauss–Legendre rules and a globally adaptive panel integrator for
//! vector-valued integrands.
//!
//! The adaptive driver keeps a list of panels, estimates the error of each
//! by comparing one n-point rule on the panel against the same rule on its
//! two halves, and bisects the worst panel until the summed estimate drops
//! under the absolute budget.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Integrates a scalar function over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One accepted panel of an adaptive partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub error: f64,
}

/// Settings of the adaptive panel refinement.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOpts {
    /// Absolute error budget summed over all panels.
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Panels narrower than this are never split.
    pub min_width: f64,
}

/// Refines an initial partition until the summed per-panel error estimate of
/// the vector integrand `f` is below `opts.abs_tol`.
///
/// `f(x, out)` writes the integrand components at `x` into `out`, whose
/// length is `dim`. The error of a panel is the largest component-wise
/// difference between the single-panel rule and the bisected rule.
pub fn refine_partition<F>(
    rule: &GaussLegendre,
    breakpoints: &[f64],
    dim: usize,
    opts: AdaptiveOpts,
    f: F,
) -> Result<Vec<Panel>>
where
    F: Fn(f64, &mut [f64]),
{
    let mut scratch = vec![0.0; dim];
    let mut whole = vec![0.0; dim];
    let mut left = vec![0.0; dim];
    let mut right = vec![0.0; dim];

    let mut estimate = |a: f64, b: f64| -> f64 {
        let m = 0.5 * (a + b);
        panel_sum(rule, a, b, &f, &mut scratch, &mut whole);
        panel_sum(rule, a, m, &f, &mut scratch, &mut left);
        panel_sum(rule, m, b, &f, &mut scratch, &mut right);
        whole
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(w, (l, r))| (w - (l + r)).abs())
            .fold(0.0, f64::max)
    };

    let mut panels: Vec<Panel> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| Panel {
            a: w[0],
            b: w[1],
            error: 0.0,
        })
        .collect();
    for p in panels.iter_mut() {
        p.error = estimate(p.a, p.b);
    }

    loop {
        let total: f64 = panels.iter().map(|p| p.error).sum();
        if total <= opts.abs_tol {
            break;
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::Quadrature(format!(
                "error estimate {total:.3e} above budget {:.3e} after {} panels",
                opts.abs_tol,
                panels.len()
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.b - p.a > 2.0 * opts.min_width)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .ok_or_else(|| {
                Error::Quadrature(format!(
                    "error estimate {total:.3e} above budget {:.3e}; panels at minimum width",
                    opts.abs_tol
                ))
            })?;
        let p = panels[worst];
        let m = 0.5 * (p.a + p.b);
        let lo = Panel {
            a: p.a,
            b: m,
            error: estimate(p.a, m),
        };
        let hi = Panel {
            a: m,
            b: p.b,
            error: estimate(m, p.b),
        };
        panels[worst] = lo;
        panels.insert(worst + 1, hi);
    }
    Ok(panels)
}

fn panel_sum<F>(rule: &GaussLegendre, a: f64, b: f64, f: &F, scratch: &mut [f64], acc: &mut [f64])
where
    F: Fn(f64, &mut [f64]),
{
    acc.iter_mut().for_each(|v| *v = 0.0);
    for (x, w) in rule.mapped(a, b) {
        f(x, scratch);
        for (a, s) in acc.iter_mut().zip(scratch.iter()) {
            *a += w * s;
        }
    }
}

/// Cumulative integral of uniformly sampled data, `out[n] ≈ ∫₀^{t_n} f`.
///
/// Trapezoid sums with third-order Gregory endpoint corrections for n ≥ 3;
/// the first two steps integrate the cubic through the first four samples.
/// Exact for cubics. With fewer than four samples this reduces to the plain
/// trapezoid.
pub fn cumulative_gregory(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = cumulative_trapezoid(values, dt);
    if n < 4 {
        return out;
    }
    let f = values;
    out[1] = dt / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    out[2] = dt / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
    let fwd1 = f[1] - f[0];
    let fwd2 = f[2] - 2.0 * f[1] + f[0];
    let fwd3 = f[3] - 3.0 * f[2] + 3.0 * f[1] - f[0];
    for i in 3..n {
        let bwd1 = f[i] - f[i - 1];
        let bwd2 = f[i] - 2.0 * f[i - 1] + f[i - 2];
        let bwd3 = f[i] - 3.0 * f[i - 1] + 3.0 * f[i - 2] - f[i - 3];
        out[i] -= dt / 12.0 * (bwd1 - fwd1) + dt / 24.0 * (bwd2 + fwd2) + 19.0 * dt / 720.0 * (bwd3 - fwd3);
    }
    out
}

/// Cumulative trapezoid, `out[0] = 0`.
pub fn cumulative_trapezoid(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    if values.is_empty() {
        return out;
    }
    out.push(0.0);
    let mut acc = 0.0;
    for w in values.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}
