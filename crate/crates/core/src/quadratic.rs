//! Quadratic fields: fundamental units by continued fractions, roots of unity, an exact
//! principality test and T2-reduction of ideal classes.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{int, isqrt, is_square, rat, rat_from_int, sign_quadratic, Int, Rat};
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::ideal::IntegralIdeal;

fn data(field: &NumberField) -> &crate::field::QuadraticData {
    field.quadratic().expect("quadratic field")
}

/// Writes x = a + b·sqrt(d0).
pub fn ab(field: &NumberField, x: &FieldElement) -> (Rat, Rat) {
    let s = &data(field).sqrt_d0.coords;
    let b = &x.coords[1] / &s[1];
    let a = &x.coords[0] - &b * &s[0];
    (a, b)
}

pub fn from_ab(field: &NumberField, a: &Rat, b: &Rat) -> FieldElement {
    field.from_rat(a.clone()).add(&data(field).sqrt_d0.scale(b))
}

/// T2(x) = sum over embeddings of |σ(x)|^2, equal to 2(a^2 + |d0| b^2).
pub fn t2(field: &NumberField, x: &FieldElement) -> Rat {
    bilinear(field, x, x)
}

fn bilinear(field: &NumberField, x: &FieldElement, y: &FieldElement) -> Rat {
    let (a1, b1) = ab(field, x);
    let (a2, b2) = ab(field, y);
    let d = rat_from_int(&data(field).d0.abs());
    rat(2) * (a1 * a2 + d * b1 * b2)
}

/// Sign of the real number x under the embedding with sqrt(d0) > 0 (real fields only).
pub fn sign(field: &NumberField, x: &FieldElement) -> i32 {
    let (a, b) = ab(field, x);
    sign_quadratic(&a, &b, &data(field).d0)
}

fn floor_quadratic(p: &Int, q: &Int, d: &Int) -> Int {
    // floor((p + sqrt d) / q) for q != 0
    let mut t = (p + isqrt(d)).div_floor(q);
    let inv_q = Rat::new(Int::one(), q.clone());
    let le = |t: &Int| {
        let a = Rat::new(p.clone(), q.clone()) - rat_from_int(t);
        sign_quadratic(&a, &inv_q, d) >= 0
    };
    while !le(&t) {
        t -= 1;
    }
    while le(&(&t + 1)) {
        t += 1;
    }
    t
}

/// Fundamental unit ε > 1 (embedding with sqrt(d0) > 0) of a real quadratic field, found
/// among the continued-fraction convergents p/q of -ω' as η = p + qω.
pub fn compute_fundamental_unit(field: &NumberField) -> FieldElement {
    let q = data(field);
    let d = q.d0.clone();
    let (mut pp, mut qq) = if d.mod_floor(&int(4)) == int(1) {
        (int(-1), int(2))
    } else {
        (int(0), int(1))
    };
    let (mut p1, mut p2) = (Int::one(), Int::zero());
    let (mut q1, mut q2) = (Int::zero(), Int::one());
    loop {
        let a = floor_quadratic(&pp, &qq, &d);
        let p = &a * &p1 + &p2;
        let qn = &a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p.clone());
        q2 = std::mem::replace(&mut q1, qn.clone());
        if qn.is_positive() {
            let eta = field
                .from_rat(rat_from_int(&p))
                .add(&q.omega.scale(&rat_from_int(&qn)));
            if field.norm(&eta).abs().is_one() {
                return normalize_unit(field, eta);
            }
        }
        pp = &a * &qq - &pp;
        qq = (&d - &pp * &pp) / &qq;
    }
}

fn normalize_unit(field: &NumberField, u: FieldElement) -> FieldElement {
    let u = if sign(field, &u) < 0 { u.neg() } else { u };
    let one = field.one();
    if sign(field, &u.sub(&one)) < 0 {
        field.inv(&u).expect("unit")
    } else {
        u
    }
}

/// Roots of unity: (w, generator). Imaginary fields enumerate the norm-1 solutions of
/// A^2 + |d0| B^2 = 4.
pub fn compute_roots_of_unity(field: &NumberField) -> (u64, FieldElement) {
    let d0 = data(field).d0.clone();
    if d0.is_positive() {
        return (2, field.from_int(-1));
    }
    let dabs = d0.abs();
    let mut units = Vec::new();
    let mut b = Int::zero();
    while &b * &b * &dabs <= int(4) {
        let rem = int(4) - &b * &b * &dabs;
        if let Some(a) = is_square(&rem) {
            for sa in [1, -1] {
                for sb in [1, -1] {
                    let x = from_ab(
                        field,
                        &Rat::new(&a * int(sa), int(2)),
                        &Rat::new(&b * int(sb), int(2)),
                    );
                    if field.is_integral(&x) && !units.contains(&x) {
                        units.push(x);
                    }
                }
            }
        }
        b += 1;
    }
    let w = units.len() as u64;
    let mut best: Option<(FieldElement, (Rat, Rat))> = None;
    for u in &units {
        let order = (1..=w)
            .find(|&k| field.pow(u, k as i64).unwrap() == field.one())
            .unwrap();
        if order != w {
            continue;
        }
        let key = ab(field, u);
        if best.as_ref().is_none_or(|(_, k)| key > *k) {
            best = Some((u.clone(), key));
        }
    }
    (w, best.unwrap().0)
}

/// Canonical associate of a nonzero element: minimal T2, then maximal a, then maximal b.
pub fn normalize_generator(field: &NumberField, x: &FieldElement) -> FieldElement {
    let q = data(field);
    let mut cands = Vec::new();
    if let Some(eps) = &q.unit {
        let eps_inv = field.inv(eps).expect("unit");
        let mut cur = x.clone();
        let mut t = t2(field, &cur);
        for step in [eps, &eps_inv] {
            loop {
                let next = field.mul(&cur, step);
                let tn = t2(field, &next);
                if tn < t {
                    cur = next;
                    t = tn;
                } else {
                    break;
                }
            }
        }
        for step in [eps, &eps_inv] {
            let nb = field.mul(&cur, step);
            if t2(field, &nb) == t {
                cands.push(nb.clone());
                cands.push(nb.neg());
            }
        }
        cands.push(cur.neg());
        cands.push(cur);
    } else {
        let (w, zeta) = &q.torsion;
        let mut cur = x.clone();
        for _ in 0..*w {
            cands.push(cur.clone());
            cur = field.mul(&cur, zeta);
        }
    }
    cands
        .into_iter()
        .max_by(|u, v| {
            t2(field, v)
                .cmp(&t2(field, u))
                .then_with(|| ab(field, u).cmp(&ab(field, v)))
        })
        .unwrap()
}

/// Searches for a generator of an integral ideal of norm n among x = (A + B sqrt(d0))/2
/// with |N(x)| = n. The search is complete: for real fields every principal ideal has a
/// generator with |B| <= 2 sqrt(n ε / d0). Returns the generator (if any) and the bound.
pub fn principal_generator(field: &NumberField, ideal: &IntegralIdeal) -> (Option<FieldElement>, Int) {
    let q = data(field);
    let n = ideal.norm.clone();
    let d0 = q.d0.clone();
    let dabs = d0.abs();
    let bound = match &q.unit {
        None => isqrt(&(int(4) * &n / &dabs)),
        Some(eps) => {
            let (a, b) = ab(field, eps);
            let e_up = a.ceil().to_integer() + b.abs().ceil().to_integer() * (isqrt(&d0) + 1);
            isqrt(&(int(4) * &n * e_up / &d0)) + 1
        }
    };
    let signs: &[i64] = if d0.is_negative() { &[1] } else { &[1, -1] };
    let mut b = Int::zero();
    while b <= bound {
        for &s in signs {
            let rem = int(4) * &n * int(s) + &b * &b * &d0;
            if rem.is_negative() {
                continue;
            }
            let Some(a) = is_square(&rem) else { continue };
            for sa in [1, -1] {
                for sb in [1, -1] {
                    let x = from_ab(
                        field,
                        &Rat::new(&a * int(sa), int(2)),
                        &Rat::new(&b * int(sb), int(2)),
                    );
                    if field.is_integral(&x) && ideal.contains(field, &x) {
                        return (Some(x), bound);
                    }
                }
            }
        }
        b += 1;
    }
    (None, bound)
}

/// Replaces an ideal J by an equivalent ideal of small norm: with x a T2-shortest vector
/// of the conjugate ideal, J' = (x / N(J)) J. Returns (J', λ) with J = λ J'.
pub fn reduce_ideal(field: &NumberField, ideal: &IntegralIdeal) -> Result<(IntegralIdeal, FieldElement)> {
    let basis = ideal.basis_elements(field);
    let mut v1 = field.conjugate(&basis[0]);
    let mut v2 = field.conjugate(&basis[1]);
    loop {
        if bilinear(field, &v2, &v2) < bilinear(field, &v1, &v1) {
            std::mem::swap(&mut v1, &mut v2);
        }
        let mu = bilinear(field, &v1, &v2) / bilinear(field, &v1, &v1);
        let mu = (mu + Rat::new(Int::one(), int(2))).floor();
        if mu.is_zero() {
            break;
        }
        v2 = v2.sub(&v1.scale(&mu));
    }
    let n = rat_from_int(&ideal.norm);
    let scale = v1.scale(&n.recip());
    let gens: Vec<FieldElement> = basis.iter().map(|b| field.mul(b, &scale)).collect();
    let reduced = IntegralIdeal::from_z_basis(field, &gens)?;
    let lambda = field.inv(&scale)?;
    if reduced.norm.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok((reduced, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn fundamental_units() {
        let cases: &[(i64, (Rat, Rat))] = &[
            (2, (rat(1), rat(1))),
            (3, (rat(2), rat(1))),
            (5, (ratio(1, 2), ratio(1, 2))),
            (6, (rat(5), rat(2))),
            (7, (rat(8), rat(3))),
            (13, (ratio(3, 2), ratio(1, 2))),
            (94, (rat(2143295), rat(221064))),
        ];
        for (d, expect) in cases {
            let k = NumberField::quadratic_from_d(*d).unwrap();
            let eps = k.quadratic().unwrap().unit.clone().unwrap();
            assert_eq!(&ab(&k, &eps), expect, "d = {d}");
        }
    }

    #[test]
    fn fundamental_unit_of_nonmonic_presentation() {
        // x^2 + x - 1 defines Q(sqrt 5)
        let k = NumberField::new(vec![int(-1), int(1), int(1)], None).unwrap();
        let eps = k.quadratic().unwrap().unit.clone().unwrap();
        assert_eq!(ab(&k, &eps), (ratio(1, 2), ratio(1, 2)));
    }

    #[test]
    fn torsion() {
        let k = NumberField::quadratic_from_d(-1).unwrap();
        let (w, z) = compute_roots_of_unity(&k);
        assert_eq!(w, 4);
        assert_eq!(z, k.theta());
        let k = NumberField::quadratic_from_d(-3).unwrap();
        let (w, z) = compute_roots_of_unity(&k);
        assert_eq!(w, 6);
        assert_eq!(ab(&k, &z), (ratio(1, 2), ratio(1, 2)));
        let k = NumberField::quadratic_from_d(-5).unwrap();
        assert_eq!(compute_roots_of_unity(&k).0, 2);
        let k = NumberField::quadratic_from_d(3).unwrap();
        assert_eq!(compute_roots_of_unity(&k), (2, k.from_int(-1)));
    }

    #[test]
    fn normalization() {
        let k = NumberField::quadratic_from_d(-1).unwrap();
        let x = from_ab(&k, &rat(-1), &rat(2)); // i(2 + i)
        assert_eq!(normalize_generator(&k, &x), from_ab(&k, &rat(2), &rat(1)));
        let k = NumberField::quadratic_from_d(2).unwrap();
        let x = from_ab(&k, &rat(3), &rat(1));
        assert_eq!(normalize_generator(&k, &x), from_ab(&k, &rat(1), &rat(-2)));
    }
}
