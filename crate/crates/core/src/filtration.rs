//! Level filtration O_S = ∪ Λ_k with Λ_k = B^{-k} O_K for an S-unit B ∈ O_K whose
//! support is exactly the finite part of S. Subgroups of O_S are measured level by level:
//! a vector of Λ_k is stored as the integral-basis coordinates of B^k x.

use num_traits::Zero;
use serde::Serialize;

use crate::arith::{Int, Rat};
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::linalg::{self, IntLattice, LatticeIndex};

pub const DEFAULT_LEVEL_BOUND: u32 = 12;

pub struct Filtration<'a> {
    pub field: &'a NumberField,
    pub base: FieldElement,
    powers: std::cell::RefCell<Vec<FieldElement>>,
}

impl<'a> Filtration<'a> {
    pub fn new(field: &'a NumberField, base: FieldElement) -> Self {
        let one = field.one();
        Self {
            field,
            base,
            powers: std::cell::RefCell::new(vec![one]),
        }
    }

    /// B^k.
    pub fn base_power(&self, k: u32) -> FieldElement {
        let mut p = self.powers.borrow_mut();
        while p.len() <= k as usize {
            let next = self.field.mul(p.last().unwrap(), &self.base);
            p.push(next);
        }
        p[k as usize].clone()
    }

    /// Coordinates of x relative to Λ_k (integral iff x ∈ Λ_k).
    pub fn level_coords(&self, k: u32, x: &FieldElement) -> Vec<Rat> {
        self.field
            .to_integral_coords(&self.field.mul(&self.base_power(k), x))
    }

    pub fn element(&self, k: u32, coords: &[Int]) -> FieldElement {
        let y = self.field.from_integral_coords(coords);
        let inv = self.field.inv(&self.base_power(k)).expect("nonzero base");
        self.field.mul(&y, &inv)
    }

    /// (Z-span of gens) ∩ Λ_k in level-k coordinates.
    pub fn lattice_of(&self, k: u32, gens: &[FieldElement]) -> IntLattice {
        let vecs: Vec<Vec<Rat>> = gens.iter().map(|g| self.level_coords(k, g)).collect();
        linalg::integral_part_of_span(&vecs, self.field.degree())
    }

    /// Lattice of Λ_k coordinates of elements of a sublattice given in level-j
    /// coordinates (j ≤ k), i.e. the same subgroup viewed one level up.
    pub fn lift(&self, lat: &IntLattice, j: u32, k: u32) -> IntLattice {
        let gens: Vec<FieldElement> = lat.basis.iter().map(|r| self.element(j, r)).collect();
        self.lattice_of(k, &gens)
    }

    /// Basis of Λ_k as field elements.
    pub fn level_basis(&self, k: u32) -> Vec<FieldElement> {
        let n = self.field.degree();
        (0..n)
            .map(|i| {
                let mut e = vec![Int::zero(); n];
                e[i] = 1.into();
                self.element(k, &e)
            })
            .collect()
    }

    pub fn index(&self, lat: &IntLattice) -> LatticeIndex {
        lat.index_in(&IntLattice::standard(self.field.degree()))
            .expect("sublattice of the level lattice")
    }
}

/// Result of a stabilized level computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilized {
    #[serde(with = "crate::serde_rat::int")]
    pub index: Int,
    pub level: u32,
    /// index_k for k = 0, 1, ... as computed.
    pub table: Vec<LatticeIndex>,
    #[serde(skip)]
    pub lattice: Option<IntLattice>,
}

/// Stabilizes k ↦ [Λ_k : L_k(D_k)] where L_k(D) is produced by `sub(k, D)` and
/// D_k = step·(k+2). Accepts level k when index_k = index_{k+1} = index_{k+2} (finite) and
/// enlarging D_k by `step` leaves index_k unchanged.
pub fn stabilize<F>(filt: &Filtration, step: usize, level_bound: u32, mut sub: F) -> Result<Stabilized>
where
    F: FnMut(u32, usize) -> Result<IntLattice>,
{
    let mut table: Vec<LatticeIndex> = Vec::new();
    let mut lattices: Vec<IntLattice> = Vec::new();
    for k in 0..=level_bound {
        let lat = sub(k, step * (k as usize + 2))?;
        table.push(filt.index(&lat));
        lattices.push(lat);
        if k < 2 {
            continue;
        }
        let k0 = (k - 2) as usize;
        let stable = matches!(&table[k0], LatticeIndex::Finite(_))
            && table[k0] == table[k0 + 1]
            && table[k0] == table[k0 + 2];
        if !stable {
            continue;
        }
        let wider = sub(k - 2, step * (k0 + 3))?;
        if filt.index(&wider) == table[k0] {
            let LatticeIndex::Finite(index) = table[k0].clone() else { unreachable!() };
            return Ok(Stabilized {
                index,
                level: k - 2,
                table,
                lattice: Some(lattices.swap_remove(k0)),
            });
        }
    }
    Err(Error::NotStabilized(level_bound))
}

/// Powers x^0, x^1, ..., x^d.
pub fn powers(field: &NumberField, x: &FieldElement, d: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(d + 1);
    let mut cur = field.one();
    for _ in 0..=d {
        out.push(cur.clone());
        cur = field.mul(&cur, x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};

    #[test]
    fn dyadic_levels() {
        let q = NumberField::rationals();
        let filt = Filtration::new(&q, q.from_int(2));
        let half = q.from_rat(ratio(1, 2));
        let res = stabilize(&filt, 1, DEFAULT_LEVEL_BOUND, |k, d| {
            Ok(filt.lattice_of(k, &powers(&q, &half, d)))
        })
        .unwrap();
        assert_eq!(res.index, int(1));
        // Z[1/4] also equals Z[1/2]
        let quarter = q.from_rat(ratio(1, 4));
        let res = stabilize(&filt, 1, DEFAULT_LEVEL_BOUND, |k, d| {
            Ok(filt.lattice_of(k, &powers(&q, &quarter, d)))
        })
        .unwrap();
        assert_eq!(res.index, int(1));
        // 3 Z[1/2] has index 3
        let res = stabilize(&filt, 1, DEFAULT_LEVEL_BOUND, |k, d| {
            let g: Vec<_> = powers(&q, &half, d).iter().map(|x| x.scale(&crate::arith::rat(3))).collect();
            Ok(filt.lattice_of(k, &g))
        })
        .unwrap();
        assert_eq!(res.index, int(3));
    }

    #[test]
    fn rank_deficient_span_never_stabilizes() {
        let k = NumberField::quadratic_from_d(-1).unwrap();
        let filt = Filtration::new(&k, k.from_int(2));
        let half = k.from_rat(ratio(1, 2));
        let err = stabilize(&filt, 2, 6, |lv, d| Ok(filt.lattice_of(lv, &powers(&k, &half, d)))).unwrap_err();
        assert_eq!(err, Error::NotStabilized(6));
    }
}
