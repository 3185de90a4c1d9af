//! Quadrature helpers shared by the measure oracle and the contour integrals.

use num_complex::Complex;

use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// Romberg integration of a complex vector-valued function over `[a, b]`.
///
/// Stops when two successive extrapolated rows agree to `tol` (absolute,
/// scaled by the magnitude of the result), or fails after `2^max_level` panels.
pub fn romberg<F>(f: F, a: f64, b: f64, dim: usize, tol: f64, max_level: u32) -> Result<Vec<C64>>
where
    F: Fn(f64) -> Vec<C64>,
{
    let h0 = b - a;
    if h0 == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); dim]);
    }
    let fa = f(a);
    let fb = f(b);
    let mut prev: Vec<Vec<C64>> = vec![(0..dim).map(|l| 0.5 * h0 * (fa[l] + fb[l])).collect()];
    let mut change = f64::INFINITY;
    for level in 1..=max_level {
        let panels = 1usize << level;
        let h = h0 / panels as f64;
        let mut mid = vec![C64::new(0.0, 0.0); dim];
        for k in (1..panels).step_by(2) {
            let v = f(a + k as f64 * h);
            for l in 0..dim {
                mid[l] += v[l];
            }
        }
        let mut row = Vec::with_capacity(level as usize + 1);
        row.push((0..dim).map(|l| 0.5 * prev[0][l] + h * mid[l]).collect::<Vec<_>>());
        let mut factor = 1.0;
        for j in 1..=level as usize {
            factor *= 4.0;
            let next: Vec<C64> = (0..dim)
                .map(|l| row[j - 1][l] + (row[j - 1][l] - prev[j - 1][l]) / (factor - 1.0))
                .collect();
            row.push(next);
        }
        let best = &row[level as usize];
        let last = &prev[level as usize - 1];
        change = (0..dim).map(|l| (best[l] - last[l]).norm()).fold(0.0, f64::max);
        let size = best.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if level >= 4 && change <= tol * (1.0 + size) {
            return Ok(best.clone());
        }
        prev = row;
    }
    Err(Error::Quadrature { nodes: (1usize << max_level) + 1, change })
}

/// Trapezoid rule for a `2π`-periodic function with node count doubled from
/// `start` until the change drops below `tol`.
pub fn periodic_trapezoid<F>(f: F, dim: usize, start: usize, max_nodes: usize, tol: f64) -> Result<Vec<C64>>
where
    F: Fn(f64) -> Vec<C64>,
{
    let mut n = start.max(4);
    let mut sum = vec![C64::new(0.0, 0.0); dim];
    for k in 0..n {
        add(&mut sum, &f(std::f64::consts::TAU * k as f64 / n as f64));
    }
    let mut value: Vec<C64> = sum.iter().map(|s| s / n as f64).collect();
    let mut change = f64::INFINITY;
    while 2 * n <= max_nodes {
        // the new nodes are the midpoints of the old ones
        for k in 0..n {
            add(&mut sum, &f(std::f64::consts::TAU * (k as f64 + 0.5) / n as f64));
        }
        n *= 2;
        let next: Vec<C64> = sum.iter().map(|s| s / n as f64).collect();
        change = next.iter().zip(&value).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let size = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
        value = next;
        if change <= tol * (1.0 + size) {
            return Ok(value);
        }
    }
    Err(Error::Quadrature { nodes: n, change })
}

fn add(acc: &mut [C64], v: &[C64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}
