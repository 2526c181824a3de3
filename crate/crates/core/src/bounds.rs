//! Exact evaluation of the closed-form counts and upper bounds on anticode
//! and ball sizes. Everything is computed in arbitrary precision; nothing
//! is ever rounded down.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type BigCount = BigUint;

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial, so the division is exact.
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `C(n, k)` with the convention that any negative argument, or `k > n`,
/// gives zero.
pub fn binomial_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 {
        BigUint::zero()
    } else {
        binomial(n as u64, k as u64)
    }
}

fn check_k_le_n(n: u64, k: u64) -> Result<()> {
    if k > n {
        Err(Error::InvalidArgument(format!(
            "need k <= n, got n = {n}, k = {k}"
        )))
    } else {
        Ok(())
    }
}

/// `n (n-1) ... (n-k+1) = n!/(n-k)!`, the size of a cylinder over `k`
/// deleted symbols.
pub fn falling_factorial(n: u64, k: u64) -> Result<BigUint> {
    check_k_le_n(n, k)?;
    Ok((n - k + 1..=n).fold(BigUint::one(), |acc, i| acc * i))
}

/// `k! C(n,k)^2`, an upper bound on the size of a radius-`k` ball.
pub fn ball_size_upper(n: u64, k: u64) -> Result<BigUint> {
    check_k_le_n(n, k)?;
    let c = binomial(n, k);
    Ok(falling_factorial(k, k)? * &c * &c)
}

/// `4n (k-1)! C(n-1, k-1)^2`, for `1 <= k <= n`.
pub fn prop5_bound(n: u64, k: u64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "bound is undefined for k = 0".into(),
        ));
    }
    check_k_le_n(n, k)?;
    let c = binomial(n - 1, k - 1);
    Ok(BigUint::from(4 * n) * falling_factorial(k - 1, k - 1)? * &c * &c)
}

/// One term of [`intersection_bound_sum`], for `lambda = |A ∪ B|` where
/// `A, B` are the size-`k` deletion sets taking `alpha, beta` to `gamma`.
pub fn intersection_bound_term(n: u64, k: u64, lambda: u64) -> BigUint {
    let (n, k, l) = (n as i64, k as i64, lambda as i64);
    // Step (1): A ∪ B is a size-lambda cover of G(alpha, beta), whose cover
    // number is k.
    let union_choices = (BigUint::one() << k as usize) * binomial_signed(n - k, l - k);
    // Step (2): split A ∪ B into A and B.
    let split = binomial_signed(l, k) * binomial_signed(k, 2 * k - l);
    // Step (3): interleave A - B with B - A.
    let interleave = binomial_signed(2 * (l - k), l - k);
    // Step (4): place each of the 2k - lambda symbols of A ∩ B.
    let common = 2 * k - l;
    let placements = if common < 0 || common > n {
        BigUint::zero()
    } else {
        falling_factorial(n as u64, common as u64).expect("common <= n")
    };
    union_choices * split * interleave * placements
}

/// The exact count bounding `|B_k(alpha) ∩ B_k(beta)|` for
/// `d(alpha, beta) = k`: the number of outcomes of the selection process
/// (choose `lambda`, then `A ∪ B`, then `A` and `B`, then the interleaving,
/// then the placements of `A ∩ B`), summed over `k <= lambda <= 2k`.
pub fn intersection_bound_sum(n: u64, k: u64) -> Result<BigUint> {
    check_k_le_n(n, k)?;
    Ok((k..=2 * k)
        .map(|lambda| intersection_bound_term(n, k, lambda))
        .sum())
}

/// `ceil(2^(k + c k^(2/3))) * n!/(n-k)!` with the power evaluated by
/// outward-rounded interval arithmetic.
pub fn theorem1_bound(n: u64, k: u64, c: &Ratio<BigUint>) -> Result<BigUint> {
    let ff = falling_factorial(n, k)?;
    Ok(ceil_pow2_exponent(k, c) * ff)
}

/// `ceil(2^(k + c k^(2/3)))`.
pub fn ceil_pow2_exponent(k: u64, c: &Ratio<BigUint>) -> BigUint {
    let k2 = BigUint::from(k) * k;
    // Exact case: c k^(2/3) is rational iff c = 0 or k is a perfect cube.
    let cube_root = k2.cbrt();
    if c.is_zero() || &cube_root * &cube_root * &cube_root == k2 {
        let extra = c * Ratio::from_integer(cube_root);
        return ceil_pow2_rational(k, &extra);
    }

    let mut precision = 64usize;
    loop {
        let (lo, hi) = pow2_interval(k, c, &k2, precision);
        // lo <= 2^e <= hi, and 2^e is irrational here, so once both ends
        // round up to the same integer that integer is the ceiling.
        let (lo_ceil, hi_ceil) = (ceil_fixed(&lo, precision), ceil_fixed(&hi, precision));
        if lo_ceil == hi_ceil || precision >= 4096 {
            return hi_ceil;
        }
        precision *= 2;
    }
}

/// `ceil(2^(k + q))` for rational `q >= 0`.
fn ceil_pow2_rational(k: u64, q: &Ratio<BigUint>) -> BigUint {
    let whole = q.to_integer();
    let frac = q - Ratio::from_integer(whole.clone());
    let base = BigUint::one() << (k as usize + whole.to_usize().expect("exponent fits"));
    if frac.is_zero() {
        return base;
    }
    // 2^(p/r) is irrational for 0 < p/r < 1; bracket it.
    let (p, r) = (frac.numer().clone(), frac.denom().clone());
    // ceil(base * 2^(p/r)) = smallest y with y^r >= base^r * 2^p.
    let r_us = r.to_u32().expect("denominator fits");
    let target = base.pow(r_us) << p.to_usize().expect("numerator fits");
    let mut y = target.nth_root(r_us);
    while y.pow(r_us) < target {
        y += 1u32;
    }
    y
}

/// Fixed-point bounds on `2^(k + c k^(2/3))` scaled by `2^precision`.
fn pow2_interval(k: u64, c: &Ratio<BigUint>, k2: &BigUint, precision: usize) -> (BigUint, BigUint) {
    let scale = BigUint::one() << precision;
    // k^(2/3) in [t_lo, t_hi] / 2^precision.
    let scaled = k2 << (3 * precision);
    let t_lo = scaled.cbrt();
    let t_hi = &t_lo + 1u32;
    // c * k^(2/3) in [q_lo, q_hi] / 2^precision.
    let q_lo = (c.numer() * &t_lo) / c.denom();
    let q_hi = (c.numer() * &t_hi).div_ceil(c.denom());
    (
        pow2_fixed(k, &q_lo, precision, &scale, false),
        pow2_fixed(k, &q_hi, precision, &scale, true),
    )
}

/// `2^(k + q / 2^precision)` in fixed point, rounded in the given direction.
fn pow2_fixed(k: u64, q: &BigUint, precision: usize, scale: &BigUint, up: bool) -> BigUint {
    let whole = (q >> precision).to_usize().expect("exponent fits") + k as usize;
    let frac = q & (scale - 1u32);
    // Multiply in 2^(2^-i) for each set fractional bit i.
    let mut acc = scale.clone();
    let mut root: BigUint = scale << 1; // 2 in fixed point
    for i in 1..=precision {
        let radicand: BigUint = &root << precision;
        let floor = radicand.sqrt();
        root = if up && &floor * &floor != radicand {
            floor + 1u32
        } else {
            floor
        };
        if frac.bit((precision - i) as u64) {
            let prod = &acc * &root;
            acc = if up {
                prod.div_ceil(scale)
            } else {
                prod >> precision
            };
        }
    }
    acc << whole
}

fn ceil_fixed(x: &BigUint, precision: usize) -> BigUint {
    let scale = BigUint::one() << precision;
    x.div_ceil(&scale)
}
