//! The total power operation: the combinatorial coefficients `d_{i,tau}`, the
//! polynomial form of `psi^p` on the deformation ring, its specialization
//! along the unique degree-p subgroup to the K(1)-local ring, and the
//! Frobenius congruence check `psi^p(h) = h^p mod p`.
//!
//! The `d_{i,tau}` are sums over compositions with bounded parts; they are
//! computed over exact integers by explicit backtracking, with a convolution
//! dynamic program as the independent witness. The sums are tiny, so clarity
//! wins over asymptotic cleverness.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::{HLaurentSeries, SeriesPrecision};
use crate::solver::{
    solve_alpha_fixed_point_with, solve_alpha_newton_with, SolveMethod, SolveReport,
};
use crate::wpoly::{w_coefficients, AlphaPolynomial, HPolynomial};

/// Constraint set for one block of the `d_{i,tau}` sum: compositions of
/// `total` into exactly `parts` parts, each in `[lower, upper]`, with the last
/// part at least `last_min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositionSpec {
    pub total: u32,
    pub parts: u32,
    pub lower: u32,
    pub upper: u32,
    pub last_min: u32,
}

impl CompositionSpec {
    /// The block with `total = tau + i`, `parts = tau - n`, parts bounded by
    /// `p + 1`, and last part at least `i + 1`.
    pub fn new(p: u64, i: u32, tau: u32, n: u32) -> Self {
        CompositionSpec {
            total: tau + i,
            parts: tau - n,
            lower: 1,
            upper: p as u32 + 1,
            last_min: i + 1,
        }
    }

    /// Visit every composition satisfying the constraints.
    pub fn enumerate(&self, mut visit: impl FnMut(&[u32])) {
        let mut buf = Vec::with_capacity(self.parts as usize);
        self.extend(&mut buf, self.total, &mut visit);
    }

    fn extend(&self, buf: &mut Vec<u32>, remaining: u32, visit: &mut impl FnMut(&[u32])) {
        let left = self.parts - buf.len() as u32;
        if left == 0 {
            if remaining == 0 {
                visit(buf);
            }
            return;
        }
        let is_last = left == 1;
        let lo = if is_last {
            self.lower.max(self.last_min)
        } else {
            self.lower
        };
        for m in lo..=self.upper {
            if m > remaining {
                break;
            }
            // prune: the rest must still be able to reach the total
            let rest = remaining - m;
            let future = left - 1;
            if rest < future * self.lower || rest > future * self.upper {
                continue;
            }
            buf.push(m);
            self.extend(buf, rest, visit);
            buf.pop();
        }
    }
}

fn check_d_indices(p: u64, i: u32, tau: u32) -> Result<()> {
    if u64::from(i) > p {
        return Err(Error::IndexOutOfRange {
            what: "i",
            got: u64::from(i),
            allowed: format!("0..={p}"),
        });
    }
    if tau == 0 || u64::from(tau) > p {
        return Err(Error::IndexOutOfRange {
            what: "tau",
            got: u64::from(tau),
            allowed: format!("1..={p}"),
        });
    }
    Ok(())
}

/// `d_{i,tau}` by explicit backtracking over the composition blocks.
pub fn d_coefficient(p: u64, i: u32, tau: u32) -> Result<HPolynomial> {
    check_d_indices(p, i, tau)?;
    let w = w_coefficients(p)?;
    let w0 = w[0].coefficient(0);
    let mut acc = HPolynomial::zero();
    for n in 0..tau {
        let spec = CompositionSpec::new(p, i, tau, n);
        let mut block = HPolynomial::zero();
        spec.enumerate(|comp| {
            let mut product = HPolynomial::one();
            for &m in comp {
                product = &product * &w[m as usize];
            }
            block = &block + &product;
        });
        let signed = if (tau - n) % 2 == 1 { -&block } else { block };
        let weight = num_traits::pow::pow(w0.clone(), n as usize);
        acc = &acc + &signed.scale(&weight);
    }
    Ok(acc)
}

/// `d_{i,tau}` by convolution dynamic programming over part count and running
/// total, carrying polynomial values; independent witness for
/// [`d_coefficient`].
pub fn d_coefficient_oracle(p: u64, i: u32, tau: u32) -> Result<HPolynomial> {
    check_d_indices(p, i, tau)?;
    let w = w_coefficients(p)?;
    let w0 = w[0].coefficient(0);
    let upper = p as usize + 1;
    let total = (tau + i) as usize;
    // dp[s][t]: sum of w_{m_1}...w_{m_s} over compositions of t into s
    // unconstrained parts in [1, p+1]
    let max_parts = tau as usize;
    let mut dp = vec![vec![HPolynomial::zero(); total + 1]; max_parts + 1];
    dp[0][0] = HPolynomial::one();
    for s in 1..=max_parts {
        for t in 0..=total {
            let mut sum = HPolynomial::zero();
            for m in 1..=upper.min(t) {
                if !dp[s - 1][t - m].is_zero() {
                    sum = &sum + &(&dp[s - 1][t - m] * &w[m]);
                }
            }
            dp[s][t] = sum;
        }
    }
    let mut acc = HPolynomial::zero();
    for n in 0..tau {
        let parts = (tau - n) as usize;
        let last_lo = (i + 1).max(1) as usize;
        let mut block = HPolynomial::zero();
        for last in last_lo..=upper {
            if last > total {
                break;
            }
            let head = total - last;
            block = &block + &(&dp[parts - 1][head] * &w[last]);
        }
        let signed = if (tau - n) % 2 == 1 { -&block } else { block };
        let weight = num_traits::pow::pow(w0.clone(), n as usize);
        acc = &acc + &signed.scale(&weight);
    }
    Ok(acc)
}

/// `psi^p` applied to `h`, as a polynomial of degree at most `p` in the
/// subgroup parameter with exact h-polynomial coefficients.
///
/// The standalone linear term of the defining formula is folded into the
/// degree-1 coefficient (adding 1), so the value is a plain polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiEPolynomial {
    p: u64,
    body: AlphaPolynomial,
}

impl PsiEPolynomial {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn body(&self) -> &AlphaPolynomial {
        &self.body
    }

    pub fn alpha_degree(&self) -> usize {
        self.body.degree().unwrap_or(0)
    }
}

/// Assemble `psi^p(h) = a + sum_{i=0}^p a^i sum_{tau=1}^p w_{tau+1} d_{i,tau}`.
pub fn psi_e(p: u64) -> Result<PsiEPolynomial> {
    let w = w_coefficients(p)?;
    let mut coeffs = Vec::with_capacity(p as usize + 1);
    for i in 0..=p as u32 {
        let mut inner = HPolynomial::zero();
        for tau in 1..=p as u32 {
            let d = d_coefficient(p, i, tau)?;
            inner = &inner + &(&w[tau as usize + 1] * &d);
        }
        coeffs.push(inner);
    }
    coeffs[1] = &coeffs[1] + &HPolynomial::one();
    let body = AlphaPolynomial::from_coeffs(coeffs);
    let psi = PsiEPolynomial { p, body };
    debug_assert!(psi.alpha_degree() <= p as usize);
    debug_assert_eq!(psi.body.coefficient(0).degree(), Some(p as u32));
    Ok(psi)
}

/// Specialize along the unique degree-p subgroup: Horner evaluation at the
/// residual-verified root series.
pub fn specialize_alpha(psi: &PsiEPolynomial, alpha_star: &HLaurentSeries) -> Result<HLaurentSeries> {
    assert_eq!(
        psi.p,
        alpha_star.context().p(),
        "prime mismatch between psi and the root series"
    );
    psi.body.eval(alpha_star)
}

/// Independent assembly in the written term order: running powers of the root
/// against freshly computed inner sums, no Horner sharing.
pub fn assemble_power_sum(p: u64, alpha_star: &HLaurentSeries) -> Result<HLaurentSeries> {
    let w = w_coefficients(p)?;
    let prec = alpha_star.precision();
    let mut acc = alpha_star.clone();
    let mut power = HLaurentSeries::one(prec.clone());
    for i in 0..=p as u32 {
        let mut inner = HPolynomial::zero();
        for tau in 1..=p as u32 {
            let d = d_coefficient(p, i, tau)?;
            inner = &inner + &(&w[tau as usize + 1] * &d);
        }
        acc = &acc + &(&power * &inner.eval_series(prec)?);
        power = &power * alpha_star;
    }
    Ok(acc)
}

/// Full pipeline: solve for the root, then specialize.
pub fn psi_f_with(prec: &SeriesPrecision, method: SolveMethod) -> Result<HLaurentSeries> {
    let report: SolveReport = match method {
        SolveMethod::FixedPoint => solve_alpha_fixed_point_with(prec)?,
        SolveMethod::Newton => solve_alpha_newton_with(prec)?,
    };
    let psi = psi_e(prec.ctx().p())?;
    specialize_alpha(&psi, &report.alpha_star)
}

/// `psi^p(h)` in the K(1)-local ring at the given precision, default window.
pub fn psi_f(p: u64, precision: u32) -> Result<HLaurentSeries> {
    let prec = crate::solver::default_window(p, precision)?;
    psi_f_with(&prec, SolveMethod::FixedPoint)
}

/// Outcome of the Frobenius congruence check `psi = h^p mod p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusCheck {
    pub passed: bool,
    /// First offending term by descending exponent, as `(exponent, coeff mod p)`.
    pub witness: Option<(i64, u64)>,
}

/// True iff the mod-p reduction of the series is the single monomial `h^p`.
pub fn frobenius_check(series: &HLaurentSeries) -> FrobeniusCheck {
    let p = series.context().p();
    let pb = series.context().p_big().clone();
    let mut saw_hp = false;
    for (exp, coeff) in series.terms_desc() {
        let r = (coeff.residue() % &pb).to_u64().expect("residue mod p fits u64");
        if r == 0 {
            continue;
        }
        if exp == i64::try_from(p).expect("prime fits i64") {
            if r == 1 {
                saw_hp = true;
                continue;
            }
            return FrobeniusCheck {
                passed: false,
                witness: Some((exp, r)),
            };
        }
        return FrobeniusCheck {
            passed: false,
            witness: Some((exp, r)),
        };
    }
    if saw_hp {
        FrobeniusCheck {
            passed: true,
            witness: None,
        }
    } else {
        FrobeniusCheck {
            passed: false,
            witness: Some((i64::try_from(p).expect("prime fits i64"), 0)),
        }
    }
}
