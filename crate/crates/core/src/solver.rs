//! Bracketed scalar root finding.
//!
//! Brent's method: inverse quadratic interpolation and secant steps,
//! safeguarded by bisection so the bracket always shrinks.

use serde::{Deserialize, Serialize};

use crate::error::{CdsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once `|f(x)|` is at most this.
    pub f_tol: f64,
    /// Stop once the bracket is narrower than this (absolute).
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            f_tol: 1e-12,
            x_tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

const REL_TOL: f64 = 4.0 * f64::EPSILON;

/// Finds a root of `f` in `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    find_root_bracketed(f, (lo, f_lo), (hi, f_hi), cfg)
}

/// As [`find_root`], reusing already computed end-point values.
pub fn find_root_bracketed<F>(
    mut f: F,
    lo: (f64, f64),
    hi: (f64, f64),
    cfg: &SolverConfig,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut x_pre, mut f_pre) = lo;
    let (mut x_cur, mut f_cur) = hi;
    if f_pre.is_nan() || f_cur.is_nan() {
        return Err(CdsError::Solver("function is NaN at a bracket end".into()));
    }
    if f_pre == 0.0 {
        return Ok(Root {
            x: x_pre,
            fx: 0.0,
            iterations: 0,
        });
    }
    if f_cur == 0.0 {
        return Ok(Root {
            x: x_cur,
            fx: 0.0,
            iterations: 0,
        });
    }
    if f_pre.signum() == f_cur.signum() {
        return Err(CdsError::Solver(format!(
            "root not bracketed: f({x_pre}) = {f_pre:e}, f({x_cur}) = {f_cur:e}"
        )));
    }

    let (mut x_blk, mut f_blk) = (0.0, 0.0);
    let (mut s_pre, mut s_cur) = (0.0, 0.0);
    for iter in 0..cfg.max_iter {
        if f_pre != 0.0 && f_cur != 0.0 && f_pre.signum() != f_cur.signum() {
            x_blk = x_pre;
            f_blk = f_pre;
            s_pre = x_cur - x_pre;
            s_cur = s_pre;
        }
        if f_blk.abs() < f_cur.abs() {
            x_pre = x_cur;
            x_cur = x_blk;
            x_blk = x_pre;
            f_pre = f_cur;
            f_cur = f_blk;
            f_blk = f_pre;
        }

        let delta = 0.5 * (cfg.x_tol + REL_TOL * x_cur.abs());
        let s_bis = 0.5 * (x_blk - x_cur);
        if f_cur == 0.0 || f_cur.abs() <= cfg.f_tol || s_bis.abs() < delta {
            return Ok(Root {
                x: x_cur,
                fx: f_cur,
                iterations: iter,
            });
        }

        if s_pre.abs() > delta && f_cur.abs() < f_pre.abs() {
            let s_try = if x_pre == x_blk {
                // secant
                -f_cur * (x_cur - x_pre) / (f_cur - f_pre)
            } else {
                // inverse quadratic interpolation
                let d_pre = (f_pre - f_cur) / (x_pre - x_cur);
                let d_blk = (f_blk - f_cur) / (x_blk - x_cur);
                -f_cur * (f_blk * d_blk - f_pre * d_pre) / (d_blk * d_pre * (f_blk - f_pre))
            };
            if 2.0 * s_try.abs() < s_pre.abs().min(3.0 * s_bis.abs() - delta) {
                s_pre = s_cur;
                s_cur = s_try;
            } else {
                s_pre = s_bis;
                s_cur = s_bis;
            }
        } else {
            s_pre = s_bis;
            s_cur = s_bis;
        }

        x_pre = x_cur;
        f_pre = f_cur;
        if s_cur.abs() > delta {
            x_cur += s_cur;
        } else {
            x_cur += if s_bis > 0.0 { delta } else { -delta };
        }
        f_cur = f(x_cur)?;
        if f_cur.is_nan() {
            return Err(CdsError::Solver(format!("function is NaN at {x_cur}")));
        }
    }
    Err(CdsError::Solver(format!(
        "no convergence after {} iterations (last x = {x_cur}, f = {f_cur:e})",
        cfg.max_iter
    )))
}
