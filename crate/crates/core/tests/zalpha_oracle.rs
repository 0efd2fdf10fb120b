//! Brute-force coset enumeration of [Λ_k : Z[α^n] ∩ Λ_k] compared with the stabilized index.

use num_traits::ToPrimitive;
use sgen2_core::arith::{int, rat, Int, Rat};
use sgen2_core::field::{ClassOrderRecord, Datasheet};
use sgen2_core::generators::Instance;
use sgen2_core::ideal::{factor_rational_prime, IntegralIdeal, PrimeIdeal};
use sgen2_core::linalg::LatticeIndex;
use sgen2_core::sunits::{choose_alpha, zalpha_index, AlphaOptions, PrimeSet};
use sgen2_core::{FieldElement, NumberField};

mod common;

use common::oracle::brute_index;

fn check(k: &NumberField, primes: Vec<PrimeIdeal>, alpha: Option<FieldElement>) {
    let inst = Instance::new(k.clone(), PrimeSet::new(k, primes).unwrap()).unwrap();
    let alpha = alpha.unwrap_or_else(|| {
        choose_alpha(k, &inst.s, &inst.basis, &inst.subfields, &AlphaOptions::default())
            .unwrap()
            .alpha
    });
    let b = inst.basis.base_product(k);
    let binv = k.inv(&b).unwrap();
    let deg = k.degree();
    for n in 1..=3u32 {
        let st = zalpha_index(k, &inst.basis, &alpha, n, 12).unwrap();
        let an = k.pow(&alpha, n as i64).unwrap();
        for lv in 0..=4u32.min(st.table.len() as u32 - 1) {
            let bk = k.pow(&binv, lv as i64).unwrap();
            let lambda: Vec<FieldElement> =
                (0..deg).map(|i| k.mul(&bk, &k.integral_basis_element(i))).collect();
            let d = deg * (lv as usize + 2);
            let gens: Vec<FieldElement> = (0..=d).map(|j| k.pow(&an, j as i64).unwrap()).collect();
            let want = brute_index(&lambda, &gens);
            assert_eq!(
                st.table[lv as usize],
                LatticeIndex::Finite(Int::from(want)),
                "{:?} n = {n} level {lv}",
                k.poly()
            );
        }
        if st.level <= 4 {
            assert_eq!(st.index.to_u64(), st.table[st.level as usize].finite().and_then(|x| x.to_u64()));
        }
    }
}

fn primes_over(k: &NumberField, p: i64) -> Vec<PrimeIdeal> {
    factor_rational_prime(k, &int(p)).unwrap().into_iter().map(|x| x.0).collect()
}

#[test]
fn rationals_at_two() {
    let q = NumberField::rationals();
    check(&q, primes_over(&q, 2), Some(q.from_rat(Rat::new(int(1), int(2)))));
    check(&q, primes_over(&q, 2), None);
}

#[test]
fn rationals_at_two_and_three() {
    let q = NumberField::rationals();
    let mut ps = primes_over(&q, 2);
    ps.extend(primes_over(&q, 3));
    check(&q, ps, None);
}

#[test]
fn real_quadratic_split() {
    let k = NumberField::quadratic_from_d(2).unwrap();
    let g = FieldElement::new(vec![rat(3), rat(1)]);
    let p = PrimeIdeal::from_prime_ideal(&k, IntegralIdeal::principal(&k, &g).unwrap(), &int(7)).unwrap();
    check(&k, vec![p.clone()], None);
    let one_plus = FieldElement::new(vec![rat(1), rat(1)]);
    let alpha = k.mul(&one_plus, &k.inv(&g).unwrap());
    check(&k, vec![p], Some(alpha));
}

#[test]
fn real_quadratic_inert() {
    let k = NumberField::quadratic_from_d(5).unwrap();
    check(&k, primes_over(&k, 2), None);
}

#[test]
fn gaussian_five() {
    let k = NumberField::quadratic_from_d(-1).unwrap();
    let ps = primes_over(&k, 5);
    check(&k, vec![ps[1].clone(), ps[0].clone()], None);
}

#[test]
fn pure_cubic() {
    let poly: Vec<Int> = [-2, 0, 0, 1].iter().map(|&x| int(x)).collect();
    let id: Vec<Vec<Rat>> = (0..3).map(|i| (0..3).map(|j| rat((i == j) as i64)).collect()).collect();
    let mut ds = Datasheet {
        integral_basis: id,
        fundamental_units: vec![vec![rat(-1), rat(1), rat(0)]],
        ..Default::default()
    };
    let k0 = NumberField::new(poly.clone(), Some(ds.clone())).unwrap();
    let theta = FieldElement::new(vec![rat(0), rat(1), rat(0)]);
    ds.class_orders.push(ClassOrderRecord {
        ideal: IntegralIdeal::principal(&k0, &theta).unwrap().to_record(),
        order: 1,
        generator: theta.coords.clone(),
    });
    let k = NumberField::new(poly, Some(ds)).unwrap();
    check(&k, primes_over(&k, 2), None);
}
