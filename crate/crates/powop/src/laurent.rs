//! Arithmetic in the completed Laurent ring `W((h))^p` with coefficients
//! restricted to `Z_p`, represented as finite-support series mod `p^N`.
//!
//! Truncation is two-sided: mod-`p^N` reduction bounds negative support by
//! itself (coefficients of deep negative terms pick up growing valuations and
//! vanish), while positive support is bounded by an explicit `max_exp` window.
//! An optional explicit floor drops deep negative exponents for output
//! windowing; the computational pipelines keep the self-limiting policy so the
//! core stays exact mod `p^N`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicInt};

/// Lower-end truncation policy for a series window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinExpPolicy {
    /// No cutoff; rely on coefficient valuations reaching `N`.
    SelfLimiting,
    /// Exponents `<= floor` are dropped; the floor is the `O(h^f)` marker.
    Floor(i64),
}

/// Window and p-adic context shared by the terms of a series.
#[derive(Debug, Clone)]
pub struct SeriesPrecision {
    ctx: Arc<PadicContext>,
    max_exp: i64,
    min_policy: MinExpPolicy,
}

impl SeriesPrecision {
    pub fn new(ctx: Arc<PadicContext>, max_exp: i64) -> Self {
        SeriesPrecision {
            ctx,
            max_exp,
            min_policy: MinExpPolicy::SelfLimiting,
        }
    }

    /// Window with an explicit truncation floor; floors must be `<= -1`.
    pub fn with_floor(ctx: Arc<PadicContext>, max_exp: i64, floor: i64) -> Result<Self> {
        if floor > -1 {
            return Err(Error::InvalidFloor(floor));
        }
        Ok(SeriesPrecision {
            ctx,
            max_exp,
            min_policy: MinExpPolicy::Floor(floor),
        })
    }

    /// Default window for computations at prime `p`: retain exponents up to `2p`.
    pub fn default_for(ctx: Arc<PadicContext>) -> Self {
        let max_exp = 2 * ctx.p() as i64;
        SeriesPrecision::new(ctx, max_exp)
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    pub fn max_exp(&self) -> i64 {
        self.max_exp
    }

    pub fn min_policy(&self) -> MinExpPolicy {
        self.min_policy
    }

    pub fn admits(&self, exp: i64) -> bool {
        if exp > self.max_exp {
            return false;
        }
        match self.min_policy {
            MinExpPolicy::SelfLimiting => true,
            MinExpPolicy::Floor(f) => exp > f,
        }
    }

    /// Tightest window compatible with both operands; contexts must match.
    fn combine(&self, other: &SeriesPrecision) -> SeriesPrecision {
        assert!(
            self.ctx.same_as(&other.ctx),
            "series context mismatch: (p={}, N={}) vs (p={}, N={})",
            self.ctx.p(),
            self.ctx.precision(),
            other.ctx.p(),
            other.ctx.precision()
        );
        let min_policy = match (self.min_policy, other.min_policy) {
            (MinExpPolicy::SelfLimiting, p) | (p, MinExpPolicy::SelfLimiting) => p,
            (MinExpPolicy::Floor(a), MinExpPolicy::Floor(b)) => MinExpPolicy::Floor(a.max(b)),
        };
        SeriesPrecision {
            ctx: Arc::clone(&self.ctx),
            max_exp: self.max_exp.min(other.max_exp),
            min_policy,
        }
    }

    /// Same context and floor, different positive cutoff.
    pub fn with_max_exp(&self, max_exp: i64) -> SeriesPrecision {
        SeriesPrecision {
            ctx: Arc::clone(&self.ctx),
            max_exp,
            min_policy: self.min_policy,
        }
    }
}

/// Finite-support element of `Z_p((h))` truncated mod `p^N`.
///
/// Terms map exponents to nonzero residues; normalization drops residue-0
/// coefficients and out-of-window exponents after every operation.
#[derive(Debug, Clone)]
pub struct HLaurentSeries {
    prec: SeriesPrecision,
    terms: BTreeMap<i64, BigUint>,
}

impl HLaurentSeries {
    fn normalized(prec: SeriesPrecision, terms: BTreeMap<i64, BigUint>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(e, c)| prec.admits(*e) && !c.is_zero())
            .collect();
        HLaurentSeries { prec, terms }
    }

    pub fn zero(prec: SeriesPrecision) -> Self {
        HLaurentSeries {
            prec,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(prec: SeriesPrecision) -> Self {
        Self::monomial(prec, 0, &BigInt::from(1))
    }

    pub fn monomial(prec: SeriesPrecision, exp: i64, coeff: &BigInt) -> Self {
        Self::from_terms(prec, [(exp, coeff.clone())])
    }

    pub fn from_terms(
        prec: SeriesPrecision,
        terms: impl IntoIterator<Item = (i64, BigInt)>,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            let r = prec.ctx.from_bigint(&c);
            let entry = map.entry(e).or_insert_with(BigUint::zero);
            *entry = (&*entry + r.residue()) % prec.ctx.modulus();
        }
        Self::normalized(prec, map)
    }

    pub fn precision(&self) -> &SeriesPrecision {
        &self.prec
    }

    pub fn context(&self) -> &Arc<PadicContext> {
        &self.prec.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn top_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn bottom_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Coefficient at `exp` (zero when absent).
    pub fn coefficient(&self, exp: i64) -> PadicInt {
        match self.terms.get(&exp) {
            Some(c) => self.prec.ctx.from_biguint(c),
            None => self.prec.ctx.zero(),
        }
    }

    /// Signed minimal representative of the coefficient at `exp`.
    pub fn signed_coefficient(&self, exp: i64) -> BigInt {
        self.coefficient(exp).signed_residue()
    }

    /// Terms in strictly descending exponent order.
    pub fn terms_desc(&self) -> impl Iterator<Item = (i64, PadicInt)> + '_ {
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| (*e, self.prec.ctx.from_biguint(c)))
    }

    /// Idempotent normalization: drop residue-0 coefficients, enforce the window.
    pub fn reduce(self) -> Self {
        Self::normalized(self.prec.clone(), self.terms)
    }

    /// Divide by the monomial `h^k`: shift every exponent down by `k`.
    pub fn div_h_pow(&self, k: u32) -> Self {
        let shifted = self
            .terms
            .iter()
            .map(|(e, c)| (e - k as i64, c.clone()))
            .collect();
        Self::normalized(self.prec.clone(), shifted)
    }

    /// Multiply by the scalar `c`.
    pub fn scale(&self, c: &PadicInt) -> Self {
        assert!(
            self.prec.ctx.same_as(c.context()),
            "scalar context mismatch"
        );
        let m = self.prec.ctx.modulus();
        let terms = self
            .terms
            .iter()
            .map(|(e, r)| (*e, (r * c.residue()) % m))
            .collect();
        Self::normalized(self.prec.clone(), terms)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec.clone());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Invert a unit of the form `c h^m (1 + eps)` where `c` is a p-adic unit
    /// and every term of `eps` has positive p-valuation or positive h-exponent.
    ///
    /// The pivot is the lowest exponent carrying a unit coefficient; the
    /// geometric series for `(1 + eps)^{-1}` is iterated until it stabilizes
    /// mod `p^N` within the window.
    pub fn invert(&self) -> Result<Self> {
        let p_big = self.prec.ctx.p_big().clone();
        let pivot = self
            .terms
            .iter()
            .find(|(_, c)| !(*c % &p_big).is_zero())
            .map(|(e, c)| (*e, c.clone()));
        let Some((m, c)) = pivot else {
            return Err(Error::SeriesNotInvertible);
        };
        let c_inv = self.prec.ctx.from_biguint(&c).invert()?;
        // normalized = self * c^{-1} * h^{-m} = 1 + eps
        let normalized = Self::normalized(
            self.prec.clone(),
            self.terms
                .iter()
                .map(|(e, r)| (e - m, (r * c_inv.residue()) % self.prec.ctx.modulus()))
                .collect(),
        );
        let eps = &normalized - &Self::one(self.prec.clone());
        let span = match eps.bottom_exponent() {
            Some(b) => (self.prec.max_exp - b).unsigned_abs() as u32,
            None => 0,
        };
        let budget = 4 * (self.prec.ctx.precision() + span + 2);
        let one = Self::one(self.prec.clone());
        let mut sum = one.clone();
        for _ in 0..budget {
            let next = &one - &(&eps * &sum);
            if next == sum {
                // undo the pivot normalization
                let shifted = Self::normalized(
                    self.prec.clone(),
                    sum.terms.iter().map(|(e, r)| (e - m, r.clone())).collect(),
                );
                return Ok(shifted.scale(&c_inv));
            }
            sum = next;
        }
        Err(Error::InversionBudgetExhausted { budget })
    }

    /// Apply an explicit truncation floor: exponents `<= floor` are dropped.
    pub fn truncate_below(&self, floor: i64) -> Result<Self> {
        let prec = SeriesPrecision::with_floor(
            Arc::clone(&self.prec.ctx),
            self.prec.max_exp,
            floor,
        )?;
        Ok(Self::normalized(prec, self.terms.clone()))
    }

    /// Reduce every coefficient to a lower working precision.
    pub fn reduce_precision(&self, n: u32) -> Result<Self> {
        let ctx = PadicContext::new(self.prec.ctx.p(), n)?;
        let prec = SeriesPrecision {
            ctx,
            max_exp: self.prec.max_exp,
            min_policy: self.prec.min_policy,
        };
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, c % prec.ctx.modulus()))
            .collect();
        Ok(Self::normalized(prec, terms))
    }

    /// Minimum p-adic valuation over retained coefficients; `N` when empty.
    pub fn min_valuation(&self) -> u32 {
        self.terms_desc()
            .map(|(_, c)| c.valuation())
            .min()
            .unwrap_or_else(|| self.prec.ctx.precision())
    }

    fn assert_ctx(&self, other: &HLaurentSeries) {
        assert!(
            self.prec.ctx.same_as(&other.prec.ctx),
            "series context mismatch: (p={}, N={}) vs (p={}, N={})",
            self.prec.ctx.p(),
            self.prec.ctx.precision(),
            other.prec.ctx.p(),
            other.prec.ctx.precision()
        );
    }

    /// Signed terms in descending exponent order, for display and serialization.
    pub fn signed_terms_desc(&self) -> Vec<(i64, BigInt)> {
        self.terms_desc()
            .map(|(e, c)| (e, c.signed_residue()))
            .collect()
    }

    /// The `O(h^f)` marker exponent, present only under an explicit floor.
    pub fn truncation_floor(&self) -> Option<i64> {
        match self.prec.min_policy {
            MinExpPolicy::Floor(f) => Some(f),
            MinExpPolicy::SelfLimiting => None,
        }
    }
}

impl PartialEq for HLaurentSeries {
    /// Term-wise equality at shared (p, N); windows are not compared.
    fn eq(&self, other: &Self) -> bool {
        self.prec.ctx.same_as(&other.prec.ctx) && self.terms == other.terms
    }
}

impl Eq for HLaurentSeries {}

impl std::ops::Add for &HLaurentSeries {
    type Output = HLaurentSeries;
    fn add(self, rhs: &HLaurentSeries) -> HLaurentSeries {
        self.assert_ctx(rhs);
        let prec = self.prec.combine(&rhs.prec);
        let m = prec.ctx.modulus();
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            let entry = terms.entry(*e).or_insert_with(BigUint::zero);
            *entry = (&*entry + c) % m;
        }
        HLaurentSeries::normalized(prec, terms)
    }
}

impl std::ops::Sub for &HLaurentSeries {
    type Output = HLaurentSeries;
    fn sub(self, rhs: &HLaurentSeries) -> HLaurentSeries {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &HLaurentSeries {
    type Output = HLaurentSeries;
    fn neg(self) -> HLaurentSeries {
        let m = self.prec.ctx.modulus();
        let terms = self.terms.iter().map(|(e, c)| (*e, (m - c) % m)).collect();
        HLaurentSeries::normalized(self.prec.clone(), terms)
    }
}

impl std::ops::Mul for &HLaurentSeries {
    type Output = HLaurentSeries;
    fn mul(self, rhs: &HLaurentSeries) -> HLaurentSeries {
        self.assert_ctx(rhs);
        let prec = self.prec.combine(&rhs.prec);
        let m = prec.ctx.modulus();
        let mut terms: BTreeMap<i64, BigUint> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = e1 + e2;
                if !prec.admits(e) {
                    continue;
                }
                let entry = terms.entry(e).or_insert_with(BigUint::zero);
                *entry = (&*entry + c1 * c2) % m;
            }
        }
        HLaurentSeries::normalized(prec, terms)
    }
}

/// Shared term formatter: `14580h^-2`, `- 6h^2`, bare constants at exponent 0.
pub(crate) fn fmt_signed_terms(
    f: &mut fmt::Formatter<'_>,
    terms: &[(i64, BigInt)],
    floor: Option<i64>,
) -> fmt::Result {
    if terms.is_empty() {
        return match floor {
            Some(fl) => write!(f, "O(h^{fl})"),
            None => write!(f, "0"),
        };
    }
    for (idx, (exp, coeff)) in terms.iter().enumerate() {
        let negative = coeff.sign() == num_bigint::Sign::Minus;
        let mag = coeff.magnitude();
        if idx == 0 {
            if negative {
                write!(f, "-")?;
            }
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let unit = mag == &BigUint::from(1u32);
        match (*exp, unit) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => write!(f, "h")?,
            (1, false) => write!(f, "{mag}h")?,
            (e, true) => write!(f, "h^{e}")?,
            (e, false) => write!(f, "{mag}h^{e}")?,
        }
    }
    if let Some(fl) = floor {
        write!(f, " + O(h^{fl})")?;
    }
    Ok(())
}

impl fmt::Display for HLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_signed_terms(f, &self.signed_terms_desc(), self.truncation_floor())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn prec(p: u64, n: u32, max_exp: i64) -> SeriesPrecision {
        SeriesPrecision::new(PadicContext::new(p, n).unwrap(), max_exp)
    }

    fn series(pr: &SeriesPrecision, terms: &[(i64, i64)]) -> HLaurentSeries {
        HLaurentSeries::from_terms(
            pr.clone(),
            terms.iter().map(|(e, c)| (*e, BigInt::from(*c))),
        )
    }

    #[test]
    fn add_examples() {
        let pr = prec(5, 6, 4);
        let x = series(&pr, &[(-1, -2)]);
        let y = series(&pr, &[(-1, 2)]);
        assert!((&x + &y).is_zero());

        let a = series(&pr, &[(2, 1)]);
        let b = series(&pr, &[(-1, -6)]);
        assert_eq!(&a + &b, series(&pr, &[(2, 1), (-1, -6)]));

        let pr = prec(3, 2, 4);
        let x = series(&pr, &[(1, 8)]);
        let y = series(&pr, &[(1, 1)]);
        assert!((&x + &y).is_zero());
    }

    #[test]
    fn mul_examples() {
        let pr = prec(2, 10, 4);
        let x = series(&pr, &[(-1, -2)]);
        assert_eq!(&x * &x, series(&pr, &[(-2, 4)]));

        let y = series(&pr, &[(-1, -2), (-4, -8)]);
        assert_eq!(&y * &y, series(&pr, &[(-2, 4), (-5, 32), (-8, 64)]));

        let one = HLaurentSeries::one(pr.clone());
        assert_eq!(&y * &one, y);
    }

    #[test]
    fn div_h_pow_examples() {
        let pr = prec(5, 4, 4);
        let c = series(&pr, &[(0, 3)]);
        assert_eq!(c.div_h_pow(1), series(&pr, &[(-1, 3)]));

        let x = series(&pr, &[(2, 1), (-1, -6)]);
        assert_eq!(x.div_h_pow(2), series(&pr, &[(0, 1), (-3, -6)]));

        let z = HLaurentSeries::zero(pr.clone());
        assert!(z.div_h_pow(5).is_zero());
    }

    #[test]
    fn reduce_examples() {
        let pr = prec(2, 3, 4);
        assert!(series(&pr, &[(-9, 8)]).is_zero());

        let pr3 = prec(3, 2, 10);
        assert_eq!(series(&pr3, &[(5, 9), (1, 1)]), series(&pr3, &[(1, 1)]));

        let x = series(&pr3, &[(1, 2), (-2, 5)]);
        assert_eq!(x.clone().reduce(), x);
    }

    #[test]
    fn invert_monomial() {
        let pr = prec(3, 4, 4);
        let h = series(&pr, &[(1, 1)]);
        assert_eq!(h.invert().unwrap(), series(&pr, &[(-1, 1)]));
    }

    #[test]
    fn invert_h_plus_3() {
        let pr = prec(3, 4, 4);
        let x = series(&pr, &[(1, 1), (0, 3)]);
        let inv = x.invert().unwrap();
        assert_eq!(
            inv,
            series(&pr, &[(-1, 1), (-2, -3), (-3, 9), (-4, -27)])
        );
        assert_eq!(&x * &inv, HLaurentSeries::one(pr));
    }

    #[test]
    fn invert_non_unit() {
        let pr = prec(2, 5, 4);
        let x = series(&pr, &[(1, 2)]);
        assert!(matches!(x.invert(), Err(Error::SeriesNotInvertible)));
    }

    #[test]
    fn invert_within_window_only() {
        // 1/(1+h) truncates above max_exp; the product is exactly 1 in-window.
        let pr = prec(5, 3, 6);
        let x = series(&pr, &[(0, 1), (1, 1)]);
        let inv = x.invert().unwrap();
        assert_eq!(&x * &inv, HLaurentSeries::one(pr));
    }

    #[test]
    fn explicit_floor_windows_output() {
        let pr = prec(3, 6, 4);
        let x = series(&pr, &[(1, 2), (-2, 5), (-4, 7)]);
        let windowed = x.truncate_below(-3).unwrap();
        assert_eq!(windowed.signed_terms_desc().len(), 2);
        assert_eq!(windowed.truncation_floor(), Some(-3));
        assert!(matches!(x.truncate_below(0), Err(Error::InvalidFloor(0))));
    }

    #[test]
    fn display_format() {
        let pr = prec(3, 16, 4);
        let s = series(
            &pr,
            &[(3, 1), (2, -6), (1, -96), (0, 594), (-1, -1158), (-2, 14580)],
        );
        assert_eq!(
            s.to_string(),
            "h^3 - 6h^2 - 96h + 594 - 1158h^-1 + 14580h^-2"
        );
        let w = s.truncate_below(-3).unwrap();
        assert_eq!(
            w.to_string(),
            "h^3 - 6h^2 - 96h + 594 - 1158h^-1 + 14580h^-2 + O(h^-3)"
        );
        assert_eq!(HLaurentSeries::zero(pr).to_string(), "0");
    }

    #[test]
    fn mul_lifting_coherence() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(417);
        for _ in 0..50 {
            let hi = prec(3, 9, 5);
            let lo = 4u32;
            let mut xs = vec![];
            let mut ys = vec![];
            for _ in 0..4 {
                xs.push((rng.gen_range(-5i64..=5), rng.gen::<i32>() as i64));
                ys.push((rng.gen_range(-5i64..=5), rng.gen::<i32>() as i64));
            }
            let x = series(&hi, &xs);
            let y = series(&hi, &ys);
            let product_then_reduce = (&x * &y).reduce_precision(lo).unwrap();
            let reduce_then_product =
                &x.reduce_precision(lo).unwrap() * &y.reduce_precision(lo).unwrap();
            assert_eq!(product_then_reduce, reduce_then_product);
        }
    }

    proptest! {
        #[test]
        fn ring_axioms(
            xs in proptest::collection::vec((-6i64..=4, any::<i32>()), 0..5),
            ys in proptest::collection::vec((-6i64..=4, any::<i32>()), 0..5),
            zs in proptest::collection::vec((-6i64..=4, any::<i32>()), 0..5),
        ) {
            let pr = prec(3, 5, 8);
            let to = |v: &Vec<(i64, i32)>| series(&pr, &v.iter().map(|(e, c)| (*e, *c as i64)).collect::<Vec<_>>());
            let (x, y, z) = (to(&xs), to(&ys), to(&zs));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &HLaurentSeries::zero(pr.clone()), x.clone());
            prop_assert_eq!(&x * &HLaurentSeries::one(pr.clone()), x.clone());
            prop_assert_eq!(&x - &x, HLaurentSeries::zero(pr.clone()));
        }

        #[test]
        fn reduce_idempotent(xs in proptest::collection::vec((-6i64..=4, any::<i64>()), 0..6)) {
            let pr = prec(2, 7, 6);
            let x = series(&pr, &xs);
            prop_assert_eq!(x.clone().reduce(), x);
        }

        #[test]
        fn shift_roundtrip(xs in proptest::collection::vec((-6i64..=2, any::<i64>()), 0..5), k in 0u32..4) {
            // monomial_div(x * h^k, k) == x whenever the shift stays in-window.
            let pr = prec(5, 4, 8);
            let x = series(&pr, &xs);
            let top = x.top_exponent().unwrap_or(0);
            prop_assume!(top + k as i64 <= pr.max_exp());
            let hk = HLaurentSeries::monomial(pr.clone(), k as i64, &BigInt::from(1));
            prop_assert_eq!((&x * &hk).div_h_pow(k), x);
        }
    }
}
