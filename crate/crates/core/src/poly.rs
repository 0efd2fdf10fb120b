//! Univariate polynomials over Q (Sturm sequences, real root isolation) and over F_p
//! (squarefree, distinct-degree and equal-degree factorization).
//!
//! Coefficient vectors are stored lowest degree first.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{rat, rat_from_int, Int, Rat};

pub fn trim(p: &mut Vec<Rat>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[Rat]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

pub fn derivative(p: &[Rat]) -> Vec<Rat> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * rat(i as i64))
        .collect()
}

pub fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Polynomial division with remainder over Q.
pub fn divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r = a.to_vec();
    trim(&mut r);
    let mut q = vec![Rat::zero(); r.len().saturating_sub(db).max(1)];
    let lead = b[db].clone();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            r[i + shift] -= &c * bc;
        }
        q[shift] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn monic_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while degree(&b).is_some() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(d) = degree(&a) {
        let lead = a[d].clone();
        for c in a.iter_mut() {
            *c = &*c / &lead;
        }
    }
    a
}

fn sign_at(p: &[Rat], x: &Rat) -> i32 {
    let v = eval(p, x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

fn sign_at_infinity(p: &[Rat], positive: bool) -> i32 {
    let Some(d) = degree(p) else { return 0 };
    let s = if p[d].is_positive() { 1 } else { -1 };
    if positive || d % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Sturm sequence of a polynomial.
pub fn sturm_sequence(p: &[Rat]) -> Vec<Vec<Rat>> {
    let mut seq = vec![p.to_vec(), derivative(p)];
    trim(&mut seq[1]);
    while degree(seq.last().unwrap()).is_some_and(|d| d > 0) {
        let n = seq.len();
        let (_, r) = divrem(&seq[n - 2], &seq[n - 1]);
        if degree(&r).is_none() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Number of distinct real roots of a squarefree polynomial.
pub fn count_real_roots(p: &[Rat]) -> usize {
    let seq = sturm_sequence(p);
    let neg = variations(seq.iter().map(|q| sign_at_infinity(q, false)));
    let pos = variations(seq.iter().map(|q| sign_at_infinity(q, true)));
    neg - pos
}

/// Number of distinct roots in the half-open interval (a, b].
pub fn count_roots_in(seq: &[Vec<Rat>], a: &Rat, b: &Rat) -> usize {
    let va = variations(seq.iter().map(|q| sign_at(q, a)));
    let vb = variations(seq.iter().map(|q| sign_at(q, b)));
    va - vb
}

/// Bound on the absolute value of every complex root.
pub fn cauchy_bound(p: &[Rat]) -> Rat {
    let d = degree(p).expect("zero polynomial");
    let lead = p[d].abs();
    let m = p[..d]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(Rat::zero(), |a, b| if b > a { b } else { a });
    m + Rat::one()
}

/// Pairwise disjoint rational intervals (a, b), one per real root of a squarefree
/// polynomial, with the polynomial nonzero and of opposite signs at a and b.
pub fn isolate_real_roots(p: &[Rat]) -> Vec<(Rat, Rat)> {
    let seq = sturm_sequence(p);
    let bound = cauchy_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let n = count_roots_in(&seq, &a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 && !eval(p, &b).is_zero() && !eval(p, &a).is_zero() {
            out.push((a, b));
            continue;
        }
        let mut mid = (&a + &b) / rat(2);
        let mut k = 3;
        while eval(p, &mid).is_zero() {
            mid = (&a * rat(k - 1) + &b) / rat(k);
            k += 1;
        }
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Bisects a sign-change interval until its width is below `width`.
pub fn refine_root(p: &[Rat], mut a: Rat, mut b: Rat, width: &Rat) -> (Rat, Rat) {
    let sa = sign_at(p, &a);
    while &(&b - &a) > width {
        let mid = (&a + &b) / rat(2);
        let sm = sign_at(p, &mid);
        if sm == 0 {
            return (mid.clone(), mid);
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a, b)
}

pub fn int_poly_to_rat(p: &[Int]) -> Vec<Rat> {
    p.iter().map(rat_from_int).collect()
}

/// Polynomials over F_p with p < 2^32, lowest degree first.
pub mod fp {
    use super::*;

    pub type Poly = Vec<u64>;

    pub fn trim(a: &mut Poly) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn from_int(p: &[Int], m: u64) -> Poly {
        let mi = Int::from(m);
        let mut out: Poly = p
            .iter()
            .map(|c| {
                let r = ((c % &mi) + &mi) % &mi;
                r.try_into().unwrap()
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        pow_mod(a, p - 2, p)
    }

    pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1u64 % p;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn add(a: &Poly, b: &Poly, p: u64) -> Poly {
        let n = a.len().max(b.len());
        let mut out: Poly = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect();
        trim(&mut out);
        out
    }

    pub fn sub(a: &Poly, b: &Poly, p: u64) -> Poly {
        let n = a.len().max(b.len());
        let mut out: Poly = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &Poly, b: &Poly, p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    pub fn divrem(a: &Poly, b: &Poly, p: u64) -> (Poly, Poly) {
        assert!(!b.is_empty(), "division by zero polynomial");
        let db = b.len() - 1;
        let inv = inv_mod(b[db], p);
        let mut r = a.clone();
        trim(&mut r);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let c = r[dr] * inv % p;
            let shift = dr - db;
            for (i, &bc) in b.iter().enumerate() {
                r[i + shift] = (r[i + shift] + p - c * bc % p) % p;
            }
            q[shift] = c;
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(a: &Poly, b: &Poly, p: u64) -> Poly {
        divrem(a, b, p).1
    }

    pub fn monic(a: &Poly, p: u64) -> Poly {
        match a.last() {
            None => Vec::new(),
            Some(&l) => {
                let inv = inv_mod(l, p);
                a.iter().map(|c| c * inv % p).collect()
            }
        }
    }

    pub fn gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
        let mut a = a.clone();
        let mut b = b.clone();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        monic(&a, p)
    }

    pub fn derivative(a: &Poly, p: u64) -> Poly {
        let mut out: Poly = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * (i as u64 % p) % p)
            .collect();
        trim(&mut out);
        out
    }

    pub fn pow_rem(base: &Poly, mut e: Int, m: &Poly, p: u64) -> Poly {
        let mut result: Poly = vec![1];
        let mut b = rem(base, m, p);
        let two = Int::from(2);
        while !e.is_zero() {
            if (&e % &two).is_one() {
                result = rem(&mul(&result, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e /= &two;
        }
        result
    }

    pub fn is_one(a: &Poly) -> bool {
        a.len() == 1 && a[0] == 1
    }

    pub fn is_squarefree(f: &Poly, p: u64) -> bool {
        let d = derivative(f, p);
        !d.is_empty() && gcd(f, &d, p).len() == 1
    }

    /// Irreducibility over F_p (Ben-Or / Rabin style gcd test).
    pub fn is_irreducible(f: &Poly, p: u64) -> bool {
        let n = f.len() - 1;
        if n <= 1 {
            return n == 1;
        }
        if !is_squarefree(f, p) {
            return false;
        }
        let x: Poly = vec![0, 1];
        let mut xp = x.clone();
        for _ in 1..=n / 2 {
            xp = pow_rem(&xp, Int::from(p), f, p);
            let g = gcd(f, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    fn pth_root(f: &Poly, p: u64) -> Poly {
        f.iter().step_by(p as usize).copied().collect()
    }

    /// Squarefree decomposition into (factor, multiplicity) pairs.
    pub fn squarefree_factors(f: &Poly, p: u64) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        let f = monic(f, p);
        if f.len() <= 1 {
            return out;
        }
        let d = derivative(&f, p);
        let mut c = gcd(&f, &d, p);
        let mut w = divrem(&f, &c, p).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = gcd(&w, &c, p);
            let fac = divrem(&w, &y, p).0;
            if fac.len() > 1 {
                out.push((monic(&fac, p), i));
            }
            w = y;
            c = divrem(&c, &w, p).0;
            i += 1;
        }
        if c.len() > 1 {
            let root = pth_root(&c, p);
            for (g, j) in squarefree_factors(&root, p) {
                out.push((g, j * p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a squarefree monic polynomial.
    fn distinct_degree(f: &Poly, p: u64) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = f.clone();
        let x: Poly = vec![0, 1];
        let mut xp = x.clone();
        let mut d = 0;
        while f.len() > 2 * (d + 1) {
            d += 1;
            xp = pow_rem(&xp, Int::from(p), &f, p);
            let g = gcd(&f, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                f = divrem(&f, &g, p).0;
                xp = rem(&xp, &f, p);
                out.push((g, d));
            }
        }
        if f.len() > 1 {
            let deg = f.len() - 1;
            out.push((f, deg));
        }
        out
    }

    fn equal_degree(f: &Poly, d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let n = f.len() - 1;
        if n == d {
            return vec![monic(f, p)];
        }
        loop {
            let a: Poly = {
                let mut a: Poly = (0..n).map(|_| rng.gen_range(0..p)).collect();
                trim(&mut a);
                a
            };
            if a.len() < 2 {
                continue;
            }
            let b = if p == 2 {
                // trace map a + a^2 + ... + a^(2^(d-1))
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..d {
                    t = rem(&mul(&t, &t, p), f, p);
                    acc = add(&acc, &t, p);
                }
                acc
            } else {
                let e = (num_traits::pow(Int::from(p), d) - 1) / 2;
                sub(&pow_rem(&a, e, f, p), &vec![1], p)
            };
            let g = gcd(f, &b, p);
            if g.len() > 1 && g.len() < f.len() {
                let h = divrem(f, &g, p).0;
                let mut out = equal_degree(&g, d, p, rng);
                out.extend(equal_degree(&monic(&h, p), d, p, rng));
                return out;
            }
        }
    }

    /// Complete factorization of a polynomial over F_p into monic irreducibles with
    /// multiplicities, sorted by (degree, coefficients).
    pub fn factor(f: &Poly, p: u64) -> Vec<(Poly, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p);
        let mut out = Vec::new();
        for (sq, mult) in squarefree_factors(f, p) {
            for (g, d) in distinct_degree(&sq, p) {
                for h in equal_degree(&g, d, p, &mut rng) {
                    out.push((h, mult));
                }
            }
        }
        out.sort_by(|a, b| {
            a.0.len()
                .cmp(&b.0.len())
                .then_with(|| a.0.iter().rev().cmp(b.0.iter().rev()))
        });
        out
    }
}

/// Outcome of the irreducibility screen for a monic integer polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Proven(String),
    Reducible(String),
    Undecided,
}

/// Sound irreducibility screen: reductions mod small primes, factor-degree patterns,
/// and for degree <= 3 an exhaustive integer root search.
pub fn irreducibility_screen(poly: &[Int]) -> Irreducibility {
    let n = poly.len() - 1;
    if n == 1 {
        return Irreducibility::Proven("degree 1".into());
    }
    // integer roots divide the constant term
    if poly[0].is_zero() {
        return Irreducibility::Reducible("x divides the polynomial".into());
    }
    let c0 = poly[0].abs();
    let small_root = crate::arith::factor_integer(&c0).len() < 64;
    if small_root && c0 <= Int::from(1_000_000u64) {
        let c: u64 = c0.clone().try_into().unwrap();
        let rp = int_poly_to_rat(poly);
        for d in 1..=c {
            if !c.is_multiple_of(d) {
                continue;
            }
            for s in [1i64, -1] {
                let r = rat(s * d as i64);
                if eval(&rp, &r).is_zero() {
                    return Irreducibility::Reducible(format!("integer root {}", r));
                }
            }
        }
        if n <= 3 {
            return Irreducibility::Proven("no rational root (degree <= 3)".into());
        }
    }
    // possible degrees of a nontrivial factor, intersected across primes
    let mut possible: Vec<bool> = (0..=n).map(|d| d > 0 && d < n).collect();
    for p in crate::arith::primes_up_to(100) {
        let f = fp::from_int(poly, p);
        if f.len() != n + 1 || !fp::is_squarefree(&f, p) {
            continue;
        }
        if fp::is_irreducible(&f, p) {
            return Irreducibility::Proven(format!("irreducible mod {}", p));
        }
        let degs: Vec<usize> = fp::factor(&f, p).iter().map(|(g, _)| g.len() - 1).collect();
        let mut sums = vec![false; n + 1];
        sums[0] = true;
        for d in degs {
            for s in (d..=n).rev() {
                if sums[s - d] {
                    sums[s] = true;
                }
            }
        }
        for d in 0..=n {
            possible[d] = possible[d] && sums[d];
        }
        if !possible.iter().any(|&b| b) {
            return Irreducibility::Proven("incompatible factor degrees mod small primes".into());
        }
    }
    Irreducibility::Undecided
}
