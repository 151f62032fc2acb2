//! Rank data for symmetric groups: counts of index-`p^m` sublattices of
//! `Z_p^r` (closed form and Hermite-normal-form enumeration) and of
//! isomorphism classes of finite `Z_p^r`-sets of a given order.
//!
//! A finite `Z_p^r`-set splits into transitive orbits, and a transitive set of
//! size `p^m` is `Z_p^r` modulo an open sublattice of index `p^m`; so the
//! order-`k` count is the coefficient of `x^k` in
//! `prod_{m>=0} (1 - x^{p^m})^{-c_m}` with `c_m` the sublattice count.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Parameters for a rank computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankQuery {
    pub p: u64,
    pub rank: u32,
    pub index: RankIndex,
}

/// What to count: sublattices of index `p^m`, or set classes of order `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankIndex {
    IndexExponent(u32),
    SetOrder(u32),
}

/// A count together with the query that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankResult {
    pub query: RankQuery,
    pub count: BigUint,
}

impl RankQuery {
    pub fn run(&self) -> RankResult {
        let count = match self.index {
            RankIndex::IndexExponent(m) => sublattice_count_closed(self.p, self.rank, m),
            RankIndex::SetOrder(k) => zpn_set_count(self.p, self.rank, k),
        };
        RankResult {
            query: *self,
            count,
        }
    }
}

/// Number of index-`p^m` sublattices of `Z_p^rank`:
/// `prod_{t=1}^{rank-1} (p^{m+t} - 1)/(p^t - 1)`, the Gaussian binomial
/// `[m + rank - 1, rank - 1]_p`. The empty product (`rank = 1`) is 1.
///
/// Individual factors need not be integers; the product is divided exactly.
pub fn sublattice_count_closed(p: u64, rank: u32, m: u32) -> BigUint {
    assert!(rank >= 1, "rank must be at least 1");
    let pb = BigUint::from(p);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for t in 1..rank {
        num *= pb.pow(m + t) - BigUint::one();
        den *= pb.pow(t) - BigUint::one();
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero(), "Gaussian binomial is an integer");
    q
}

const BRUTE_FORCE_RANK_BOUND: u32 = 6;
const BRUTE_FORCE_M_BOUND: u32 = 8;
const BRUTE_FORCE_BUDGET: u64 = 10_000_000;

/// Count sublattices by enumerating Hermite-normal-form bases: upper
/// triangular `rank x rank` matrices with diagonal `p^{e_1}, ..., p^{e_r}`,
/// `sum e_j = m`, and above-diagonal entries in `[0, diagonal of their column)`.
///
/// Feasible only for `rank <= 6` and `m <= 8`; distinctness of the enumerated
/// bases is verified with a hash set.
pub fn sublattice_count_bruteforce(p: u64, rank: u32, m: u32) -> Result<BigUint> {
    if rank == 0 || rank > BRUTE_FORCE_RANK_BOUND || m > BRUTE_FORCE_M_BOUND {
        return Err(Error::BruteForceInfeasible { rank, m });
    }
    let r = rank as usize;
    let pb = BigUint::from(p);
    let mut seen: HashSet<Vec<BigUint>> = HashSet::new();
    let mut diagonal_exponents = vec![0u32; r];
    enumerate_diagonals(&mut diagonal_exponents, 0, m, &mut |exps| {
        let diag: Vec<BigUint> = exps.iter().map(|e| pb.pow(*e)).collect();
        let mut matrix = vec![BigUint::zero(); r * r];
        for (j, d) in diag.iter().enumerate() {
            matrix[j * r + j] = d.clone();
        }
        fill_offsets(&mut matrix, &diag, r, 0, 1, &mut seen)
    })?;
    Ok(BigUint::from(seen.len()))
}

fn enumerate_diagonals(
    buf: &mut Vec<u32>,
    pos: usize,
    remaining: u32,
    visit: &mut impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    if pos == buf.len() - 1 {
        buf[pos] = remaining;
        return visit(buf);
    }
    for e in 0..=remaining {
        buf[pos] = e;
        enumerate_diagonals(buf, pos + 1, remaining - e, visit)?;
    }
    Ok(())
}

/// Fill above-diagonal entries column by column; entry `(i, j)` ranges over
/// `[0, diag[j])`.
fn fill_offsets(
    matrix: &mut Vec<BigUint>,
    diag: &[BigUint],
    r: usize,
    i: usize,
    j: usize,
    seen: &mut HashSet<Vec<BigUint>>,
) -> Result<()> {
    if j == r {
        if seen.len() as u64 >= BRUTE_FORCE_BUDGET {
            return Err(Error::BruteForceBudget {
                budget: BRUTE_FORCE_BUDGET,
            });
        }
        seen.insert(matrix.clone());
        return Ok(());
    }
    let (next_i, next_j) = if i + 1 < j { (i + 1, j) } else { (0, j + 1) };
    let mut value = BigUint::zero();
    while value < diag[j] {
        matrix[i * r + j] = value.clone();
        fill_offsets(matrix, diag, r, next_i, next_j, seen)?;
        value += BigUint::one();
    }
    matrix[i * r + j] = BigUint::zero();
    Ok(())
}

/// Multichoose `C(c + j - 1, j)`: ways to pick `j` orbits from `c`
/// interchangeable types with repetition.
fn multichoose(c: &BigUint, j: u32) -> BigUint {
    if j == 0 {
        return BigUint::one();
    }
    if c.is_zero() {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for x in 0..j {
        acc *= c + BigUint::from(x);
        acc /= BigUint::from(x + 1);
    }
    acc
}

/// Number of isomorphism classes of order-`k` sets with a `Z_p^rank` action:
/// the coefficient of `x^k` in `prod_{m>=0} (1 - x^{p^m})^{-c_m}`, computed by
/// partition dynamic programming over orbit sizes `1, p, p^2, ... <= k`.
pub fn zpn_set_count(p: u64, rank: u32, k: u32) -> BigUint {
    assert!(rank >= 1, "rank must be at least 1");
    let k = k as usize;
    let mut dp = vec![BigUint::zero(); k + 1];
    dp[0] = BigUint::one();
    let mut orbit = 1u64;
    let mut m = 0u32;
    while orbit as usize <= k {
        let c = sublattice_count_closed(p, rank, m);
        let s = orbit as usize;
        let mut next = vec![BigUint::zero(); k + 1];
        for (t, slot) in next.iter_mut().enumerate() {
            let mut sum = BigUint::zero();
            let mut j = 0u32;
            while j as usize * s <= t {
                let prev = &dp[t - j as usize * s];
                if !prev.is_zero() {
                    sum += multichoose(&c, j) * prev;
                }
                j += 1;
            }
            *slot = sum;
        }
        dp = next;
        m += 1;
        match orbit.checked_mul(p) {
            Some(next_orbit) => orbit = next_orbit,
            None => break,
        }
    }
    dp[k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(sublattice_count_closed(2, 1, 5), big(1));
        assert_eq!(sublattice_count_closed(7, 1, 0), big(1));
        assert_eq!(sublattice_count_closed(2, 2, 2), big(7));
        assert_eq!(sublattice_count_closed(2, 3, 1), big(7));
        assert_eq!(sublattice_count_closed(2, 2, 1), big(3));
        assert_eq!(sublattice_count_closed(2, 2, 3), big(15));
        // the factors are not separately integral here; the product is
        assert_eq!(sublattice_count_closed(5, 3, 3), big(20306));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(sublattice_count_bruteforce(2, 2, 1).unwrap(), big(3));
        assert_eq!(sublattice_count_bruteforce(3, 2, 1).unwrap(), big(4));
        assert_eq!(sublattice_count_bruteforce(2, 1, 3).unwrap(), big(1));
    }

    #[test]
    fn bruteforce_matches_closed_form_on_grid() {
        for p in [2u64, 3, 5] {
            for rank in 1..=3u32 {
                for m in 0..=3u32 {
                    assert_eq!(
                        sublattice_count_bruteforce(p, rank, m).unwrap(),
                        sublattice_count_closed(p, rank, m),
                        "p = {p}, rank = {rank}, m = {m}"
                    );
                }
            }
        }
    }

    #[test]
    fn bruteforce_bounds_enforced() {
        assert!(matches!(
            sublattice_count_bruteforce(2, 7, 0),
            Err(Error::BruteForceInfeasible { rank: 7, m: 0 })
        ));
        assert!(matches!(
            sublattice_count_bruteforce(2, 2, 9),
            Err(Error::BruteForceInfeasible { rank: 2, m: 9 })
        ));
    }

    #[test]
    fn set_count_examples() {
        assert_eq!(zpn_set_count(2, 1, 1), big(1));
        assert_eq!(zpn_set_count(5, 3, 1), big(1));
        assert_eq!(zpn_set_count(2, 1, 2), big(2));
        assert_eq!(zpn_set_count(2, 1, 3), big(2));
    }

    #[test]
    fn transitive_sets_are_a_subclass() {
        for p in [2u64, 3] {
            for rank in 1..=3u32 {
                for m in 0..=2u32 {
                    let k = (p as u32).pow(m);
                    assert!(
                        zpn_set_count(p, rank, k) >= sublattice_count_closed(p, rank, m),
                        "p = {p}, rank = {rank}, m = {m}"
                    );
                }
            }
        }
    }

    /// Direct enumeration of partitions of `k` into p-power parts.
    fn ppower_partitions(p: u64, k: u32) -> BigUint {
        fn recurse(p: u64, remaining: u64, max_part: u64) -> u64 {
            if remaining == 0 {
                return 1;
            }
            let mut count = 0;
            let mut part = 1u64;
            while part <= remaining.min(max_part) {
                count += recurse(p, remaining - part, part);
                match part.checked_mul(p) {
                    Some(next) => part = next,
                    None => break,
                }
            }
            count
        }
        BigUint::from(recurse(p, u64::from(k), u64::from(k)))
    }

    #[test]
    fn rank_one_counts_are_ppower_partitions() {
        for k in 1..=64u32 {
            assert_eq!(zpn_set_count(2, 1, k), ppower_partitions(2, k), "k = {k}");
        }
        for k in 1..=30u32 {
            assert_eq!(zpn_set_count(3, 1, k), ppower_partitions(3, k), "k = {k}");
        }
    }

    #[test]
    fn sublattice_counts_nondecreasing_in_m() {
        for p in [2u64, 3, 5] {
            for rank in 2..=3u32 {
                let mut prev = BigUint::zero();
                for m in 0..=3u32 {
                    let c = sublattice_count_closed(p, rank, m);
                    assert!(c >= prev, "p = {p}, rank = {rank}, m = {m}");
                    prev = c;
                }
            }
        }
    }

    #[test]
    fn query_dispatch() {
        let q = RankQuery {
            p: 2,
            rank: 2,
            index: RankIndex::IndexExponent(2),
        };
        assert_eq!(q.run().count, big(7));
        let q = RankQuery {
            p: 2,
            rank: 1,
            index: RankIndex::SetOrder(3),
        };
        assert_eq!(q.run().count, big(2));
    }
}
