//! Solvers for the unique root `a*` of `w(h, a) = 0` in `Z_p((h))^p`.
//!
//! The fixed-point recursion `a <- h^{-1}(w_0 + sum_{i>=2} w_i a^i)` is the
//! default and authoritative method: it divides only by the monomial `h`, so
//! the trusted path is approximation-free. A Hensel-Newton mode cross-checks
//! it and exercises windowed unit inversion (the root is simple mod p because
//! `dw/da(0) = -h` is a unit).

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::laurent::{HLaurentSeries, SeriesPrecision};
use crate::padic::PadicContext;
use crate::wpoly::{w_coefficients, w_polynomial, AlphaPolynomial, HPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    FixedPoint,
    Newton,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveMethod::FixedPoint => write!(f, "fixed_point"),
            SolveMethod::Newton => write!(f, "newton"),
        }
    }
}

/// Result of a root solve: the series, iteration count, and the p-adic
/// valuation floor of the residual `w(h, a*)` over the window.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub alpha_star: HLaurentSeries,
    pub iterations: u32,
    pub residual_valuation: u32,
    pub method: SolveMethod,
}

/// Default solve window at prime `p`: self-limiting floor, `max_exp = 2p`.
pub fn default_window(p: u64, precision: u32) -> Result<SeriesPrecision> {
    let ctx = PadicContext::new(p, precision)?;
    Ok(SeriesPrecision::default_for(ctx))
}

fn check_window(prec: &SeriesPrecision) -> Result<()> {
    let needed = prec.ctx().p() as i64 + 1;
    if prec.max_exp() < needed {
        return Err(Error::WindowTooSmall {
            needed,
            max_exp: prec.max_exp(),
        });
    }
    Ok(())
}

fn iteration_budget(prec: &SeriesPrecision) -> u32 {
    4 * prec.ctx().precision()
}

/// Iterate `a <- h^{-1}(w_0 + sum_{i>=2} w_i a^i)` from `a = 0` until two
/// successive iterates agree mod `p^N`. Returns the whole iterate sequence,
/// starting at zero.
pub fn fixed_point_iterates(prec: &SeriesPrecision) -> Result<Vec<HLaurentSeries>> {
    check_window(prec)?;
    let p = prec.ctx().p();
    let mut g_coeffs = w_coefficients(p)?;
    g_coeffs[1] = HPolynomial::zero(); // drop the -h a term; it becomes the division by h
    let g = AlphaPolynomial::from_coeffs(g_coeffs);
    let budget = iteration_budget(prec);
    let mut iterates = vec![HLaurentSeries::zero(prec.clone())];
    for _ in 0..budget {
        let current = iterates.last().expect("nonempty");
        let next = g.eval(current)?.div_h_pow(1);
        let stable = next == *current;
        iterates.push(next);
        if stable {
            return Ok(iterates);
        }
    }
    Err(Error::NonConvergence {
        budget,
        precision: prec.ctx().precision(),
    })
}

/// Newton iteration `a <- a - w(a)/w'(a)` from `a = 0`, using windowed unit
/// inversion for the derivative. Returns the iterate sequence from zero.
pub fn newton_iterates(prec: &SeriesPrecision) -> Result<Vec<HLaurentSeries>> {
    check_window(prec)?;
    let p = prec.ctx().p();
    let w = w_polynomial(p)?;
    let dw = w.derivative();
    let budget = iteration_budget(prec);
    let mut iterates = vec![HLaurentSeries::zero(prec.clone())];
    for _ in 0..budget {
        let current = iterates.last().expect("nonempty");
        let residual = w.eval(current)?;
        let slope_inv = dw.eval(current)?.invert()?;
        let next = current - &(&residual * &slope_inv);
        let stable = next == *current;
        iterates.push(next);
        if stable {
            return Ok(iterates);
        }
    }
    Err(Error::NonConvergence {
        budget,
        precision: prec.ctx().precision(),
    })
}

fn finish(
    prec: &SeriesPrecision,
    iterates: Vec<HLaurentSeries>,
    method: SolveMethod,
) -> Result<SolveReport> {
    let alpha_star = iterates.last().expect("nonempty").clone();
    let iterations = (iterates.len() - 1) as u32;
    // one extra residual verification pass, decoupled from convergence detection
    let p = prec.ctx().p();
    let residual = w_polynomial(p)?.eval(&alpha_star)?;
    let residual_valuation = residual.min_valuation();
    let n = prec.ctx().precision();
    if residual_valuation < n {
        return Err(Error::ResidualTooLow {
            valuation: residual_valuation,
            precision: n,
        });
    }
    assert!(
        alpha_star.terms_desc().all(|(_, c)| c.valuation() >= 1),
        "root must vanish mod p"
    );
    Ok(SolveReport {
        alpha_star,
        iterations,
        residual_valuation,
        method,
    })
}

pub fn solve_alpha_fixed_point_with(prec: &SeriesPrecision) -> Result<SolveReport> {
    let iterates = fixed_point_iterates(prec)?;
    finish(prec, iterates, SolveMethod::FixedPoint)
}

/// Solve with the fixed-point recursion in the default window.
pub fn solve_alpha_fixed_point(p: u64, precision: u32) -> Result<SolveReport> {
    solve_alpha_fixed_point_with(&default_window(p, precision)?)
}

pub fn solve_alpha_newton_with(prec: &SeriesPrecision) -> Result<SolveReport> {
    let iterates = newton_iterates(prec)?;
    finish(prec, iterates, SolveMethod::Newton)
}

/// Solve by Hensel-Newton iteration in the default window.
pub fn solve_alpha_newton(p: u64, precision: u32) -> Result<SolveReport> {
    solve_alpha_newton_with(&default_window(p, precision)?)
}

/// Closed forms for the two leading coefficients of the root:
/// `c1 = (-1)^{p+1} p` at `h^-1` and `c3 = (1 + (-1)^{p+1} p(p-1)/2) p^3` at `h^-3`.
pub fn eq12_closed_forms(p: u64) -> (BigInt, BigInt) {
    let pb = BigInt::from(p);
    let sign: BigInt = if p % 2 == 0 {
        BigInt::from(-1)
    } else {
        BigInt::from(1)
    };
    let c1 = &sign * &pb;
    let half = &pb * (&pb - BigInt::from(1)) / BigInt::from(2);
    let c3 = (BigInt::from(1) + &sign * half) * &pb * &pb * &pb;
    (c1, c3)
}
