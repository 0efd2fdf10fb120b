//! Integer and rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_int(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

/// Least common multiple of the denominators of `v`.
pub fn common_denominator(v: &[Rat]) -> Int {
    v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales `v` by its common denominator, returning the integer vector and the scale.
pub fn clear_denominators(v: &[Rat]) -> (Vec<Int>, Int) {
    let d = common_denominator(v);
    let out = v
        .iter()
        .map(|x| (x * rat_from_int(&d)).to_integer())
        .collect();
    (out, d)
}

pub fn is_integral_vec(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &Int) -> Int {
    assert!(!n.is_negative(), "isqrt of negative integer");
    n.sqrt()
}

/// Ceiling of the square root of a non-negative integer.
pub fn isqrt_ceil(n: &Int) -> Int {
    let r = isqrt(n);
    if &(&r * &r) == n {
        r
    } else {
        r + 1
    }
}

pub fn is_square(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = isqrt(n);
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Ceiling of the square root of a non-negative rational.
pub fn rat_sqrt_ceil(x: &Rat) -> Int {
    assert!(!x.is_negative());
    // sqrt(p/q) <= ceil(sqrt(p*q)) / q
    let pq = x.numer() * x.denom();
    let r = isqrt_ceil(&pq);
    Integer::div_ceil(&r, x.denom())
}

/// Ceiling of a rational.
pub fn rat_ceil(x: &Rat) -> Int {
    x.ceil().to_integer()
}

/// Trial-division factorization of |n| into (prime, exponent) pairs, ascending.
pub fn factor_integer(n: &Int) -> Vec<(Int, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut p = int(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == int(2) { 1 } else { 2 };
    }
    if n > Int::one() {
        out.push((n, 1));
    }
    out
}

/// Writes n = s^2 * d with d squarefree (sign carried by d).
pub fn squarefree_decomposition(n: &Int) -> (Int, Int) {
    assert!(!n.is_zero());
    let mut s = Int::one();
    let mut d = if n.is_negative() { -Int::one() } else { Int::one() };
    for (p, e) in factor_integer(n) {
        s *= num_traits::pow(p.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            d *= p;
        }
    }
    (s, d)
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

pub fn is_prime(n: &Int) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => factor_integer(n).len() == 1 && factor_integer(n)[0].1 == 1,
    }
}

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime_u64(p)).collect()
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &Int, p: &Int) -> u32 {
    assert!(!n.is_zero());
    let mut n = n.clone();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// Serializes a rational as "p/q".
pub fn rat_to_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().ok()?;
            let d: Int = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<Int>().ok().map(Rat::from_integer),
    }
}

pub fn rats_to_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

pub fn parse_rats(v: &[String]) -> Option<Vec<Rat>> {
    v.iter().map(|s| parse_rat(s)).collect()
}

/// Sign of a + b*sqrt(d) for d > 0 non-square.
pub fn sign_quadratic(a: &Rat, b: &Rat, d: &Int) -> i32 {
    let sa = sgn(a);
    let sb = sgn(b);
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    // opposite signs: compare a^2 with b^2 d
    let lhs = a * a;
    let rhs = b * b * rat_from_int(d);
    if lhs > rhs {
        sa
    } else {
        sb
    }
}

pub fn sgn(x: &Rat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Converts a rational to f64 through a bounded number of significant bits.
pub fn rat_to_f64(x: &Rat) -> f64 {
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = nb - db - 60;
    let (n2, d2) = if shift > 0 {
        (n.clone(), d << (shift as usize))
    } else {
        (n << ((-shift) as usize), d.clone())
    };
    let q = (n2 / d2).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

/// Natural log of |x| for a nonzero rational, stable for large numerators and denominators.
pub fn ln_abs_rat(x: &Rat) -> f64 {
    ln_abs_int(x.numer()) - ln_abs_int(x.denom())
}

pub fn ln_abs_int(n: &Int) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: Int = n.abs() >> (shift as usize);
    top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decomposition(&int(-20)), (int(2), int(-5)));
        assert_eq!(squarefree_decomposition(&int(45)), (int(3), int(5)));
        assert_eq!(squarefree_decomposition(&int(-1)), (int(1), int(-1)));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat_to_string(&ratio(-3, 6)), "-1/2");
        assert_eq!(rat_to_string(&rat(4)), "4/1");
        assert_eq!(parse_rat("7"), Some(rat(7)));
        assert_eq!(parse_rat(" 2/-4 "), Some(ratio(-1, 2)));
        assert_eq!(parse_rat("1/0"), None);
    }

    #[test]
    fn quadratic_signs() {
        // 1 - sqrt(2) < 0, 3 - 2 sqrt(2) > 0
        assert_eq!(sign_quadratic(&rat(1), &rat(-1), &int(2)), -1);
        assert_eq!(sign_quadratic(&rat(3), &rat(-2), &int(2)), 1);
        assert_eq!(sign_quadratic(&rat(0), &rat(-2), &int(2)), -1);
    }

    #[test]
    fn sqrt_bounds() {
        assert_eq!(isqrt_ceil(&int(10)), int(4));
        assert_eq!(isqrt_ceil(&int(9)), int(3));
        assert_eq!(rat_sqrt_ceil(&ratio(9, 4)), int(2));
        assert_eq!(rat_sqrt_ceil(&ratio(10, 4)), int(2));
    }

    #[test]
    fn large_logs() {
        let big = num_traits::pow(int(10), 400);
        let l = ln_abs_int(&big);
        assert!((l - 400.0 * 10f64.ln()).abs() < 1e-6);
        assert!((rat_to_f64(&ratio(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
    }
}
