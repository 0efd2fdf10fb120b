use proptest::prelude::*;
use sgen2_core::arith::{int, primes_up_to, Int, Rat};
use sgen2_core::ideal::{factor_rational_prime, valuation};
use sgen2_core::linalg::{IntLattice, LatticeIndex};
use sgen2_core::{FieldElement, NumberField};

const DS: [i64; 6] = [-1, 2, 5, -5, 3, -7];

fn elem(v: &[(i64, i64)]) -> FieldElement {
    FieldElement::new(v.iter().map(|&(a, b)| Rat::new(int(a), int(b))).collect())
}

fn pair() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-30i64..30, 1i64..6), 2)
}

fn square(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..7, n), n)
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    a.iter()
        .map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, row)| int(*x) * &row[j]).sum()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_and_trace(di in 0usize..DS.len(), a in pair(), b in pair()) {
        let k = NumberField::quadratic_from_d(DS[di]).unwrap();
        let (x, y) = (elem(&a), elem(&b));
        prop_assert_eq!(k.norm(&k.mul(&x, &y)), k.norm(&x) * k.norm(&y));
        prop_assert_eq!(k.trace(&x.add(&y)), k.trace(&x) + k.trace(&y));
        if !x.is_zero() {
            prop_assert_eq!(k.mul(&x, &k.inv(&x).unwrap()), k.one());
        }
    }

    #[test]
    fn valuations_add(di in 0usize..DS.len(), a in pair(), b in pair(), p in prop::sample::select(vec![2i64, 3, 5, 7])) {
        let k = NumberField::quadratic_from_d(DS[di]).unwrap();
        let (x, y) = (elem(&a), elem(&b));
        prop_assume!(!x.is_zero() && !y.is_zero());
        for (pr, _) in factor_rational_prime(&k, &int(p)).unwrap() {
            let vx = valuation(&k, &x, &pr).unwrap();
            let vy = valuation(&k, &y, &pr).unwrap();
            prop_assert_eq!(valuation(&k, &k.mul(&x, &y), &pr).unwrap(), vx + vy);
        }
    }

    #[test]
    fn lattice_index_is_multiplicative(n in 1usize..4, a in square(3), b in square(3), c in square(3)) {
        let cut = |m: &[Vec<i64>]| -> Vec<Vec<i64>> { m[..n].iter().map(|r| r[..n].to_vec()).collect() };
        let id: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| int((i == j) as i64)).collect()).collect();
        let r1 = mat_mul(&cut(&a), &id);
        let r2 = mat_mul(&cut(&b), &r1);
        let r3 = mat_mul(&cut(&c), &r2);
        let (l1, l2, l3) = (
            IntLattice::from_generators(&r1, n),
            IntLattice::from_generators(&r2, n),
            IntLattice::from_generators(&r3, n),
        );
        prop_assume!(l3.is_full_rank());
        let (LatticeIndex::Finite(i12), LatticeIndex::Finite(i23), LatticeIndex::Finite(i13)) =
            (l2.index_in(&l1).unwrap(), l3.index_in(&l2).unwrap(), l3.index_in(&l1).unwrap())
        else {
            panic!("finite indices expected");
        };
        prop_assert_eq!(i13, i12 * i23);
    }
}

#[test]
fn nested_triples_fifty() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 50 {
        let n = rng.gen_range(1..=4usize);
        let mut m = || -> Vec<Vec<i64>> { (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect() };
        let (a, b, c) = (m(), m(), m());
        let id: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| int((i == j) as i64)).collect()).collect();
        let r1 = mat_mul(&a, &id);
        let r2 = mat_mul(&b, &r1);
        let r3 = mat_mul(&c, &r2);
        let l1 = IntLattice::from_generators(&r1, n);
        let l2 = IntLattice::from_generators(&r2, n);
        let l3 = IntLattice::from_generators(&r3, n);
        if !l3.is_full_rank() {
            continue;
        }
        let i = |x: &IntLattice, y: &IntLattice| x.index_in(y).unwrap().finite().cloned().unwrap();
        assert_eq!(i(&l3, &l1), i(&l3, &l2) * i(&l2, &l1));
        assert!(l1.contains_lattice(&l2) && l2.contains_lattice(&l3));
        done += 1;
    }
}

#[test]
fn ramification_sums() {
    for d in DS {
        let k = NumberField::quadratic_from_d(d).unwrap();
        for p in primes_up_to(49) {
            let fs = factor_rational_prime(&k, &Int::from(p)).unwrap();
            let total: u32 = fs.iter().map(|(pr, _)| pr.e * pr.f).sum();
            assert_eq!(total, 2, "d = {d}, p = {p}");
        }
    }
}

#[test]
fn signatures() {
    for (d, sig) in [(-1, (0, 1)), (2, (2, 0)), (5, (2, 0)), (-5, (0, 1))] {
        let k = NumberField::quadratic_from_d(d).unwrap();
        assert_eq!(k.signature(), sig);
        assert_eq!(k.unit_rank(), sig.0 + sig.1 - 1);
    }
    assert_eq!(NumberField::rationals().signature(), (1, 0));
}
