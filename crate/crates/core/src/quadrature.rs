//! Gauss–Legendre rules and tensor-product integration over boxes.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature order must be positive".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi's initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
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
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Tensor-product Gauss–Legendre integral of `f` over the box
/// `[lower₀, upper₀] × … `, `order` points per axis. Points are evaluated in
/// parallel; the reduction order is fixed, so results are reproducible.
pub fn integrate_box<F>(f: F, lower: &[f64], upper: &[f64], order: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if lower.len() != upper.len() || lower.is_empty() {
        return Err(Error::Dimension(format!(
            "box bounds of lengths {} and {}",
            lower.len(),
            upper.len()
        )));
    }
    let dim = lower.len();
    let total = order
        .checked_pow(dim as u32)
        .filter(|&t| t <= 1 << 28)
        .ok_or(Error::SizeLimit {
            what: "quadrature points",
            value: usize::MAX,
            limit: 1 << 28,
        })?;
    let (x, w) = gauss_legendre(order)?;
    let half: Vec<f64> = lower.iter().zip(upper).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lower.iter().zip(upper).map(|(a, b)| 0.5 * (b + a)).collect();
    let jacobian: f64 = half.iter().product();

    // one parallel task per node of the first axis
    let inner = total / order;
    let partial: Vec<f64> = (0..order)
        .into_par_iter()
        .map(|i0| {
            let mut point = vec![0.0; dim];
            let mut sum = 0.0;
            for rest in 0..inner {
                let mut weight = w[i0];
                point[0] = mid[0] + half[0] * x[i0];
                let mut r = rest;
                for d in 1..dim {
                    let i = r % order;
                    r /= order;
                    point[d] = mid[d] + half[d] * x[i];
                    weight *= w[i];
                }
                sum += weight * f(&point);
            }
            sum
        })
        .collect();
    Ok(jacobian * partial.iter().sum::<f64>())
}

/// Composite Gauss–Legendre over a rectangle: `panels × panels` cells of
/// `order × order` points each.
pub fn integrate_rectangle<F>(
    f: &F,
    lower: [f64; 2],
    upper: [f64; 2],
    panels: usize,
    order: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let step = [
        (upper[0] - lower[0]) / panels as f64,
        (upper[1] - lower[1]) / panels as f64,
    ];
    let cells: Vec<(usize, usize)> = (0..panels)
        .flat_map(|i| (0..panels).map(move |j| (i, j)))
        .collect();
    let parts = cells
        .par_iter()
        .map(|&(i, j)| {
            let lo = [
                lower[0] + i as f64 * step[0],
                lower[1] + j as f64 * step[1],
            ];
            let hi = [lo[0] + step[0], lo[1] + step[1]];
            integrate_cell(f, lo, hi, order)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(parts.iter().sum())
}

fn integrate_cell<F>(f: &F, lo: [f64; 2], hi: [f64; 2], order: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let (x, w) = gauss_legendre(order)?;
    let h = [0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1])];
    let m = [0.5 * (hi[0] + lo[0]), 0.5 * (hi[1] + lo[1])];
    let mut sum = 0.0;
    for i in 0..order {
        for j in 0..order {
            sum += w[i] * w[j] * f(&[m[0] + h[0] * x[i], m[1] + h[1] * x[j]]);
        }
    }
    Ok(sum * h[0] * h[1])
}

/// Result of [`integrate_rectangle_adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveIntegral {
    pub value: f64,
    /// Change between the last two refinements.
    pub change: f64,
    pub panels: usize,
}

/// Doubles the panel count per axis until two successive composite results
/// differ by less than `tol`.
pub fn integrate_rectangle_adaptive<F>(
    f: &F,
    lower: [f64; 2],
    upper: [f64; 2],
    tol: f64,
) -> Result<AdaptiveIntegral>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const ORDER: usize = 12;
    let mut panels = 4;
    let mut previous = integrate_rectangle(f, lower, upper, panels, ORDER)?;
    loop {
        panels *= 2;
        let value = integrate_rectangle(f, lower, upper, panels, ORDER)?;
        let change = (value - previous).abs();
        if change < tol {
            return Ok(AdaptiveIntegral {
                value,
                change,
                panels,
            });
        }
        if panels >= 256 {
            return Err(Error::Accuracy { change });
        }
        previous = value;
    }
}
