//! Brute-force coset enumeration for [Λ : L ∩ Λ], shared by integration tests.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use sgen2_core::arith::{Int, Rat};
use sgen2_core::FieldElement;

/// Row-style echelon form over Z.
fn echelon(rows: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    let mut m: Vec<Vec<Int>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out = Vec::new();
    for c in 0..dim {
        loop {
            let live: Vec<usize> = (0..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if live.len() <= 1 {
                break;
            }
            let piv = *live.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            for &i in &live {
                if i != piv {
                    let q = m[i][c].div_floor(&m[piv][c]);
                    let pr = m[piv].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
        }
        if let Some(i) = (0..m.len()).find(|&i| !m[i][c].is_zero()) {
            let mut r = m.remove(i);
            if r[c].is_negative() {
                r.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(r);
        }
    }
    out
}

fn pivot(r: &[Int]) -> usize {
    r.iter().position(|x| !x.is_zero()).unwrap()
}

fn reduce(ech: &[Vec<Int>], v: &[Int]) -> Vec<Int> {
    let mut v = v.to_vec();
    for r in ech {
        let c = pivot(r);
        let q = v[c].div_floor(&r[c]);
        for (x, y) in v.iter_mut().zip(r) {
            *x -= &q * y;
        }
    }
    v
}

fn scaled(vs: &[Vec<Rat>]) -> Vec<Vec<Int>> {
    let den = vs.iter().flatten().fold(Int::one(), |d, x| d.lcm(x.denom()));
    vs.iter()
        .map(|v| v.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect())
        .collect()
}

/// [Λ : L ∩ Λ] by counting classes of Λ/eΛ modulo L, where eΛ ⊆ L.
pub fn brute_index(lambda: &[FieldElement], gens: &[FieldElement]) -> u64 {
    let n = lambda.len();
    let mut all: Vec<Vec<Rat>> = lambda.iter().map(|x| x.coords.clone()).collect();
    all.extend(gens.iter().map(|x| x.coords.clone()));
    let all = scaled(&all);
    let (lam, l) = all.split_at(n);
    let ech = echelon(l, n);
    assert_eq!(ech.len(), n, "span is not full rank");
    let in_l = |v: &[Int]| reduce(&ech, v).iter().all(|x| x.is_zero());
    let e = (1u64..)
        .find(|&e| lam.iter().all(|b| in_l(&b.iter().map(|x| x * e).collect::<Vec<_>>())))
        .unwrap();
    assert!(e.pow(n as u32) <= 4_000_000, "enumeration too large: e = {e}");
    let mut classes = std::collections::HashSet::new();
    let mut t = vec![0u64; n];
    loop {
        let mut x = vec![Int::zero(); n];
        for (ti, b) in t.iter().zip(lam) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += bi * *ti;
            }
        }
        classes.insert(reduce(&ech, &x));
        let mut i = 0;
        while i < n {
            t[i] += 1;
            if t[i] < e {
                break;
            }
            t[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    classes.len() as u64
}
