//! The degree-(p+1) polynomial `w(h, a)` presenting the ring of degree-p
//! subgroups, its coefficient list `w_i`, and polynomials in the subgroup
//! parameter `a` with h-polynomial coefficients.
//!
//! Coefficients are kept as exact integers, never pre-reduced mod `p^N`, so
//! one table serves every working precision and the combinatorial sums over
//! them stay exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::laurent::{fmt_signed_terms, HLaurentSeries, SeriesPrecision};
use crate::padic::is_prime;

/// Exact integer-coefficient polynomial in `h`, normalized (no zero terms).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HPolynomial {
    terms: BTreeMap<u32, BigInt>,
}

impl HPolynomial {
    pub fn zero() -> Self {
        HPolynomial::default()
    }

    pub fn constant(value: impl Into<BigInt>) -> Self {
        Self::monomial(0, value.into())
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The generator `h`.
    pub fn h() -> Self {
        Self::monomial(1, BigInt::one())
    }

    pub fn monomial(exp: u32, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        HPolynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, BigInt)>) -> Self {
        let mut map: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            let entry = map.entry(e).or_insert_with(BigInt::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        HPolynomial { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coefficient(&self, exp: u32) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    /// True when the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.degree().unwrap_or(0) == 0
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HPolynomial {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Coefficient-wise canonical residues in `[0, p)`.
    pub fn mod_p(&self, p: u64) -> Self {
        let pb = BigInt::from(p);
        Self::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (*e, num_integer::Integer::mod_floor(c, &pb))),
        )
    }

    /// Inject into the series ring; fails when the degree exceeds the window.
    pub fn eval_series(&self, prec: &SeriesPrecision) -> Result<HLaurentSeries> {
        if let Some(d) = self.degree() {
            if i64::from(d) > prec.max_exp() {
                return Err(Error::WindowTooSmall {
                    needed: i64::from(d),
                    max_exp: prec.max_exp(),
                });
            }
        }
        Ok(HLaurentSeries::from_terms(
            prec.clone(),
            self.terms.iter().map(|(e, c)| (i64::from(*e), c.clone())),
        ))
    }

    pub fn signed_terms_desc(&self) -> Vec<(i64, BigInt)> {
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| (i64::from(*e), c.clone()))
            .collect()
    }
}

impl std::ops::Add for &HPolynomial {
    type Output = HPolynomial;
    fn add(self, rhs: &HPolynomial) -> HPolynomial {
        HPolynomial::from_terms(
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(e, c)| (*e, c.clone())),
        )
    }
}

impl std::ops::Sub for &HPolynomial {
    type Output = HPolynomial;
    fn sub(self, rhs: &HPolynomial) -> HPolynomial {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &HPolynomial {
    type Output = HPolynomial;
    fn neg(self) -> HPolynomial {
        HPolynomial {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl std::ops::Mul for &HPolynomial {
    type Output = HPolynomial;
    fn mul(self, rhs: &HPolynomial) -> HPolynomial {
        let mut out: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let entry = out.entry(e1 + e2).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        HPolynomial { terms: out }
    }
}

impl fmt::Display for HPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_signed_terms(f, &self.signed_terms_desc(), None)
    }
}

/// Polynomial in the subgroup parameter `a` with [`HPolynomial`] coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaPolynomial {
    coeffs: Vec<HPolynomial>,
}

impl AlphaPolynomial {
    /// Build from coefficients indexed by `a`-degree; trailing zeros trimmed.
    pub fn from_coeffs(mut coeffs: Vec<HPolynomial>) -> Self {
        while coeffs.last().is_some_and(HPolynomial::is_zero) {
            coeffs.pop();
        }
        AlphaPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        AlphaPolynomial { coeffs: vec![] }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficient(&self, i: usize) -> HPolynomial {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coefficients(&self) -> &[HPolynomial] {
        &self.coeffs
    }

    /// Formal derivative in `a` with exact integer scaling.
    pub fn derivative(&self) -> AlphaPolynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&BigInt::from(i)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Coefficient-wise reduction mod `p`.
    pub fn mod_p(&self, p: u64) -> AlphaPolynomial {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.mod_p(p)).collect())
    }

    /// Horner evaluation at `a` in the series ring.
    pub fn eval(&self, a: &HLaurentSeries) -> Result<HLaurentSeries> {
        let prec = a.precision();
        let mut acc = HLaurentSeries::zero(prec.clone());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * a) + &c.eval_series(prec)?;
        }
        Ok(acc)
    }
}

impl std::ops::Add for &AlphaPolynomial {
    type Output = AlphaPolynomial;
    fn add(self, rhs: &AlphaPolynomial) -> AlphaPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| &self.coefficient(i) + &rhs.coefficient(i))
            .collect();
        AlphaPolynomial::from_coeffs(coeffs)
    }
}

impl std::ops::Neg for &AlphaPolynomial {
    type Output = AlphaPolynomial;
    fn neg(self) -> AlphaPolynomial {
        AlphaPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl std::ops::Sub for &AlphaPolynomial {
    type Output = AlphaPolynomial;
    fn sub(self, rhs: &AlphaPolynomial) -> AlphaPolynomial {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &AlphaPolynomial {
    type Output = AlphaPolynomial;
    fn mul(self, rhs: &AlphaPolynomial) -> AlphaPolynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return AlphaPolynomial::zero();
        }
        let mut coeffs = vec![HPolynomial::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        AlphaPolynomial::from_coeffs(coeffs)
    }
}

fn ensure_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Binomial coefficient with the conventions `C(n, k) = 0` for `k < 0` or `k > n`.
fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = k as u64;
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for x in 1..=k {
        acc = acc * BigUint::from(n - k + x) / BigUint::from(x);
    }
    BigInt::from(acc)
}

/// The coefficient list `[w_0, ..., w_{p+1}]` from the binomial closed form.
///
/// `w_1 = -h` is the only h-dependent entry; all others are the constants
/// `(-1)^{p(p-i+1)} [ C(p, i-1) + (-1)^{p+1} p C(p, i) ]`, with `C(p, -1) = 0`
/// so the `i = 0` case agrees with `w_0 = (-1)^{p+1} p`.
pub fn w_coefficients(p: u64) -> Result<Vec<HPolynomial>> {
    ensure_prime(p)?;
    let mut out = Vec::with_capacity(p as usize + 2);
    for i in 0..=p + 1 {
        if i == 1 {
            out.push(-&HPolynomial::h());
            continue;
        }
        let sign_parity = (p % 2) * ((p + 1 - i) % 2);
        let inner_sign = if p % 2 == 0 {
            BigInt::from(-1)
        } else {
            BigInt::one()
        };
        let value = binomial(p, i as i64 - 1) + inner_sign * BigInt::from(p) * binomial(p, i as i64);
        let value = if sign_parity == 1 { -value } else { value };
        out.push(HPolynomial::constant(value));
    }
    Ok(out)
}

/// The same coefficient list obtained by multiplying out the product form
/// `(a - p)(a + (-1)^p)^p - (h - p^2 + (-1)^p) a` with exact integers.
pub fn w_expand_oracle(p: u64) -> Result<Vec<HPolynomial>> {
    ensure_prime(p)?;
    let s: i64 = if p % 2 == 0 { 1 } else { -1 };
    let alpha = AlphaPolynomial::from_coeffs(vec![HPolynomial::zero(), HPolynomial::one()]);
    let linear = AlphaPolynomial::from_coeffs(vec![HPolynomial::constant(s), HPolynomial::one()]);
    let shifted = AlphaPolynomial::from_coeffs(vec![
        HPolynomial::constant(-BigInt::from(p)),
        HPolynomial::one(),
    ]);
    let mut product = shifted;
    for _ in 0..p {
        product = &product * &linear;
    }
    // subtract (h - p^2 + (-1)^p) * a
    let p_sq = BigInt::from(p) * BigInt::from(p);
    let h_term = &HPolynomial::h() - &HPolynomial::constant(p_sq - BigInt::from(s));
    let correction = &AlphaPolynomial::from_coeffs(vec![h_term]) * &alpha;
    let w = &product - &correction;
    let mut coeffs: Vec<HPolynomial> = (0..=p as usize + 1).map(|i| w.coefficient(i)).collect();
    debug_assert_eq!(w.degree(), Some(p as usize + 1));
    while coeffs.len() < p as usize + 2 {
        coeffs.push(HPolynomial::zero());
    }
    Ok(coeffs)
}

/// `w(h, a)` as an [`AlphaPolynomial`], from the closed-form coefficients.
pub fn w_polynomial(p: u64) -> Result<AlphaPolynomial> {
    Ok(AlphaPolynomial::from_coeffs(w_coefficients(p)?))
}

/// `a (a^p - h)`, the mod-p form of `w(h, a)`.
pub fn w_mod_p_form(p: u64) -> AlphaPolynomial {
    let mut coeffs = vec![HPolynomial::zero(); p as usize + 2];
    coeffs[1] = -&HPolynomial::h();
    coeffs[p as usize + 1] = HPolynomial::one();
    AlphaPolynomial::from_coeffs(coeffs)
}
