//! Fixed-precision p-adic integer arithmetic.
//!
//! Values are residues mod `p^N` with a valuation, unit inversion, and exact
//! division by powers of `p`. Residues are stored canonically in `[0, p^N)`;
//! the signed minimal representative in `(-p^N/2, p^N/2]` is computed only at
//! display time so output reads like ordinary signed integers.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin primality test for `u64`.
///
/// The witness set is sufficient for every 64-bit integer.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &WITNESSES {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for &a in &WITNESSES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime `p` and working precision `N`; element values are residues mod `p^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicContext {
    p: u64,
    precision: u32,
    p_big: BigUint,
    modulus: BigUint,
}

impl PadicContext {
    /// Build a context for residues mod `p^precision`.
    ///
    /// `p` must pass a deterministic primality check and `precision >= 1`.
    pub fn new(p: u64, precision: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let p_big = BigUint::from(p);
        let modulus = p_big.pow(precision);
        Ok(Arc::new(PadicContext {
            p,
            precision,
            p_big,
            modulus,
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub(crate) fn p_big(&self) -> &BigUint {
        &self.p_big
    }

    /// Same prime and precision.
    pub fn same_as(&self, other: &Self) -> bool {
        self.p == other.p && self.precision == other.precision
    }

    /// Canonical residue of an arbitrary signed integer.
    pub fn from_bigint(self: &Arc<Self>, value: &BigInt) -> PadicInt {
        let m = BigInt::from(self.modulus.clone());
        let residue = value.mod_floor(&m).to_biguint().expect("mod_floor is non-negative");
        PadicInt {
            ctx: Arc::clone(self),
            residue,
        }
    }

    pub fn from_biguint(self: &Arc<Self>, value: &BigUint) -> PadicInt {
        PadicInt {
            ctx: Arc::clone(self),
            residue: value % &self.modulus,
        }
    }

    pub fn int(self: &Arc<Self>, value: i64) -> PadicInt {
        self.from_bigint(&BigInt::from(value))
    }

    pub fn zero(self: &Arc<Self>) -> PadicInt {
        PadicInt {
            ctx: Arc::clone(self),
            residue: BigUint::zero(),
        }
    }

    pub fn one(self: &Arc<Self>) -> PadicInt {
        self.int(1)
    }
}

/// A residue mod `p^N`, immutable after construction.
#[derive(Debug, Clone)]
pub struct PadicInt {
    ctx: Arc<PadicContext>,
    residue: BigUint,
}

impl PadicInt {
    pub fn context(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    /// Canonical representative in `[0, p^N)`.
    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    /// Signed minimal representative in `(-p^N/2, p^N/2]`.
    pub fn signed_residue(&self) -> BigInt {
        let m = self.ctx.modulus();
        let half = m / 2u32;
        if self.residue > half {
            BigInt::from(self.residue.clone()) - BigInt::from(m.clone())
        } else {
            BigInt::from(self.residue.clone())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Largest `v <= N` with `p^v` dividing the residue; `N` for zero.
    pub fn valuation(&self) -> u32 {
        if self.residue.is_zero() {
            return self.ctx.precision;
        }
        let mut v = 0;
        let mut r = self.residue.clone();
        let p = self.ctx.p_big();
        while v < self.ctx.precision {
            let (q, rem) = r.div_rem(p);
            if !rem.is_zero() {
                break;
            }
            r = q;
            v += 1;
        }
        v
    }

    /// Multiplicative inverse mod `p^N`; fails on non-units.
    pub fn invert(&self) -> Result<PadicInt> {
        let v = self.valuation();
        if v > 0 {
            return Err(Error::NotInvertible {
                valuation: v,
                precision: self.ctx.precision,
            });
        }
        let a = BigInt::from(self.residue.clone());
        let m = BigInt::from(self.ctx.modulus().clone());
        let ext = a.extended_gcd(&m);
        debug_assert!(ext.gcd.is_one());
        Ok(self.ctx.from_bigint(&ext.x))
    }

    /// Exact division by `p^k`; the result lives at precision `N - k`.
    ///
    /// Requires `valuation >= k` and `k < N`; the caller tracks the precision drop.
    pub fn div_exact_p(&self, k: u32) -> Result<PadicInt> {
        if k == 0 {
            return Ok(self.clone());
        }
        let v = self.valuation();
        if v < k {
            return Err(Error::InexactDivision {
                valuation: v,
                requested: k,
            });
        }
        if k >= self.ctx.precision {
            return Err(Error::ZeroPrecision);
        }
        let ctx = PadicContext::new(self.ctx.p, self.ctx.precision - k)?;
        let divisor = self.ctx.p_big().pow(k);
        Ok(ctx.from_biguint(&(&self.residue / divisor)))
    }

    /// Reduce to a lower working precision `1 <= n <= N`.
    pub fn reduce_precision(&self, n: u32) -> Result<PadicInt> {
        if n == 0 {
            return Err(Error::ZeroPrecision);
        }
        assert!(
            n <= self.ctx.precision,
            "cannot raise precision from {} to {}",
            self.ctx.precision,
            n
        );
        let ctx = PadicContext::new(self.ctx.p, n)?;
        Ok(ctx.from_biguint(&self.residue))
    }

    fn assert_ctx(&self, other: &PadicInt) {
        assert!(
            self.ctx.same_as(&other.ctx),
            "p-adic context mismatch: (p={}, N={}) vs (p={}, N={})",
            self.ctx.p,
            self.ctx.precision,
            other.ctx.p,
            other.ctx.precision
        );
    }
}

impl PartialEq for PadicInt {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_as(&other.ctx) && self.residue == other.residue
    }
}

impl Eq for PadicInt {}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signed_residue())
    }
}

impl std::ops::Add for &PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: &PadicInt) -> PadicInt {
        self.assert_ctx(rhs);
        PadicInt {
            ctx: Arc::clone(&self.ctx),
            residue: (&self.residue + &rhs.residue) % self.ctx.modulus(),
        }
    }
}

impl std::ops::Sub for &PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: &PadicInt) -> PadicInt {
        self.assert_ctx(rhs);
        PadicInt {
            ctx: Arc::clone(&self.ctx),
            residue: (&self.residue + self.ctx.modulus() - &rhs.residue) % self.ctx.modulus(),
        }
    }
}

impl std::ops::Mul for &PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: &PadicInt) -> PadicInt {
        self.assert_ctx(rhs);
        PadicInt {
            ctx: Arc::clone(&self.ctx),
            residue: (&self.residue * &rhs.residue) % self.ctx.modulus(),
        }
    }
}

impl std::ops::Neg for &PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        if self.residue.is_zero() {
            return self.clone();
        }
        PadicInt {
            ctx: Arc::clone(&self.ctx),
            residue: self.ctx.modulus() - &self.residue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64, n: u32) -> Arc<PadicContext> {
        PadicContext::new(p, n).unwrap()
    }

    #[test]
    fn primality() {
        for p in [2u64, 3, 5, 7, 11, 13, 101, 65537] {
            assert!(is_prime(p), "{p}");
        }
        for c in [0u64, 1, 4, 9, 91, 561, 6700417 * 2] {
            assert!(!is_prime(c), "{c}");
        }
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(matches!(PadicContext::new(6, 4), Err(Error::NotPrime(6))));
        assert!(matches!(PadicContext::new(2, 0), Err(Error::ZeroPrecision)));
    }

    #[test]
    fn add_examples() {
        let c = ctx(2, 5);
        assert_eq!(&c.int(30) + &c.int(3), c.int(1));
        let c = ctx(3, 4);
        assert_eq!(&c.int(0) + &c.int(17), c.int(17));
        assert_eq!(&c.int(80) + &c.int(1), c.zero());
    }

    #[test]
    fn mul_examples() {
        let c = ctx(2, 5);
        assert_eq!(&c.int(3) * &c.int(11), c.int(1));
        let c = ctx(3, 4);
        assert_eq!(&c.int(1) * &c.int(55), c.int(55));
        assert_eq!(&c.int(27) * &c.int(3), c.zero());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(ctx(3, 10).int(108).valuation(), 3);
        assert_eq!(ctx(2, 10).int(96).valuation(), 5);
        assert_eq!(ctx(5, 4).int(0).valuation(), 4);
    }

    #[test]
    fn invert_examples() {
        let c = ctx(2, 5);
        assert_eq!(c.int(3).invert().unwrap(), c.int(11));
        let c3 = ctx(3, 4);
        assert_eq!(c3.int(1).invert().unwrap(), c3.int(1));
        assert!(matches!(
            c.int(6).invert(),
            Err(Error::NotInvertible { valuation: 1, .. })
        ));
    }

    #[test]
    fn signed_residue_is_minimal() {
        let c = ctx(3, 4); // modulus 81
        assert_eq!(c.int(-162 % 81).signed_residue(), BigInt::from(0));
        assert_eq!(c.int(80).signed_residue(), BigInt::from(-1));
        assert_eq!(c.int(40).signed_residue(), BigInt::from(40));
        assert_eq!(c.int(41).signed_residue(), BigInt::from(-40));
        let c2 = ctx(2, 3); // modulus 8, boundary 4 stays positive
        assert_eq!(c2.int(4).signed_residue(), BigInt::from(4));
    }

    #[test]
    fn div_exact_p_drops_precision() {
        let c = ctx(3, 5);
        let x = c.int(54); // 2 * 27
        let y = x.div_exact_p(3).unwrap();
        assert_eq!(y.context().precision(), 2);
        assert_eq!(y, PadicContext::new(3, 2).unwrap().int(2));
        assert!(matches!(
            c.int(5).div_exact_p(1),
            Err(Error::InexactDivision { .. })
        ));
    }

    #[test]
    fn random_unit_inverses() {
        // 1000 random units per context.
        for (p, n) in [(2u64, 20u32), (3, 12), (13, 8)] {
            let c = ctx(p, n);
            let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15 ^ p);
            let mut found = 0;
            while found < 1000 {
                let x = c.int(rng.gen::<i64>());
                if x.valuation() > 0 {
                    continue;
                }
                found += 1;
                assert_eq!(&x * &x.invert().unwrap(), c.one());
            }
        }
    }

    #[test]
    fn lifting_coherence_all_ops() {
        // A (p, N+k) computation reduced mod p^N equals the (p, N) computation.
        for (p, n, k) in [(2u64, 6u32, 5u32), (3, 4, 3), (5, 3, 4)] {
            let hi = ctx(p, n + k);
            let lo = ctx(p, n);
            let mut rng = ChaCha8Rng::seed_from_u64(p * 7919);
            for _ in 0..200 {
                let a = rng.gen::<i64>();
                let b = rng.gen::<i64>();
                let (ah, bh) = (hi.int(a), hi.int(b));
                let (al, bl) = (lo.int(a), lo.int(b));
                assert_eq!((&ah + &bh).reduce_precision(n).unwrap(), &al + &bl);
                assert_eq!((&ah * &bh).reduce_precision(n).unwrap(), &al * &bl);
                assert_eq!(ah.valuation().min(n), al.valuation());
                if al.valuation() == 0 {
                    assert_eq!(
                        ah.invert().unwrap().reduce_precision(n).unwrap(),
                        al.invert().unwrap()
                    );
                }
            }
        }
    }

    fn sample_contexts() -> Vec<Arc<PadicContext>> {
        vec![ctx(2, 9), ctx(3, 5), ctx(5, 4), ctx(13, 3)]
    }

    proptest! {
        #[test]
        fn ring_axioms(ci in 0usize..4, a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
            let cx = &sample_contexts()[ci];
            let (x, y, z) = (cx.int(a), cx.int(b), cx.int(c));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &cx.zero(), x.clone());
            prop_assert_eq!(&x * &cx.one(), x.clone());
            prop_assert_eq!(&x + &(-&x), cx.zero());
        }

        #[test]
        fn valuation_of_product(ci in 0usize..4, a in any::<i64>(), b in any::<i64>()) {
            let cx = &sample_contexts()[ci];
            let (x, y) = (cx.int(a), cx.int(b));
            let n = cx.precision();
            prop_assert_eq!((&x * &y).valuation(), (x.valuation() + y.valuation()).min(n));
        }
    }
}
