//! Tensor Gauss-Legendre quadrature on cubes and ordered simplices with
//! dyadic refinement.

use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Gauss-Legendre points per axis and subinterval.
    pub order: usize,
    /// Two successive refinements must agree to this (relative to max(1, |I|)).
    pub tol: f64,
    /// Largest refinement level; level `r` uses `2^r` subintervals per axis.
    pub max_level: u32,
    /// Largest simplex dimension accepted by the iterated integrals.
    pub max_k: usize,
    /// Largest number of forms accepted by the iterated integrals.
    pub max_n: usize,
    /// Budget of integrand evaluations for a single refinement level.
    pub max_points: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { order: 8, tol: 1e-9, max_level: 4, max_k: 3, max_n: 4, max_points: 20_000_000 }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::Config("quadrature order must be at least 2".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("quadrature tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(order: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(order).map_err(|_| Error::Config("quadrature order must be at least 2".into()))?;
    let mut v: Vec<(f64, f64)> = rule.as_node_weight_pairs().iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(v)
}

/// Composite rule with `2^level` equal subintervals of `[0, 1]`.
fn composite(base: &[(f64, f64)], level: u32) -> Vec<(f64, f64)> {
    let n = 1usize << level;
    let h = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n * base.len());
    for i in 0..n {
        for (x, w) in base {
            out.push(((i as f64 + x) * h, w * h));
        }
    }
    out
}

fn tensor_sum(rule: &[(f64, f64)], m: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    if m == 0 {
        return f(&[]);
    }
    let n = rule.len();
    let mut idx = vec![0usize; m];
    let mut x = vec![0.0; m];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for a in 0..m {
            x[a] = rule[idx[a]].0;
            w *= rule[idx[a]].1;
        }
        total += w * f(&x);
        let mut a = 0;
        loop {
            if a == m {
                return total;
            }
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Integral over `[0, 1]^m`, refined until two successive levels agree.
pub fn integrate_cube(f: &dyn Fn(&[f64]) -> f64, m: usize, spec: &QuadSpec) -> Result<f64> {
    spec.validate()?;
    let base = gauss_legendre_unit(spec.order)?;
    if m == 0 {
        return Ok(f(&[]));
    }
    let mut prev = tensor_sum(&base, m, f);
    let mut last_diff = f64::INFINITY;
    for level in 1..=spec.max_level {
        let pts = ((base.len() << level) as f64).powi(m as i32);
        if pts > spec.max_points as f64 {
            break;
        }
        let cur = tensor_sum(&composite(&base, level), m, f);
        last_diff = (cur - prev).abs();
        if last_diff <= spec.tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Numeric { message: format!("quadrature in dimension {} did not converge", m), estimate: last_diff })
}

/// Integral over `{0 <= w_1 <= ... <= w_m <= 1}` via the collapsed map
/// `w_m = u_m, w_l = u_l w_{l+1}`.
pub fn integrate_ordered_simplex(f: &dyn Fn(&[f64]) -> f64, m: usize, spec: &QuadSpec) -> Result<f64> {
    let g = move |u: &[f64]| {
        let mut w = vec![0.0; m];
        let mut jac = 1.0;
        let mut upper = 1.0;
        for l in (0..m).rev() {
            w[l] = u[l] * upper;
            jac *= upper;
            upper = w[l];
        }
        f(&w) * jac
    };
    integrate_cube(&g, m, spec)
}
