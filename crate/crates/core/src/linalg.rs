//! Exact linear algebra: rational elimination, integer Hermite and Smith normal forms,
//! and integer lattices with index, membership, sums and intersections.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{clear_denominators, common_denominator, rat_from_int, Int, Rat};
use crate::error::{Error, Result};

/// Solves `y * rows = target` over the rationals. Returns any solution.
pub fn solve_left(rows: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let m = rows.len();
    let n = target.len();
    // Work on the transpose: columns are the unknowns y_0..y_{m-1}.
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|j| {
            let mut r: Vec<Rat> = (0..m).map(|i| rows[i][j].clone()).collect();
            r.push(target[j].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m {
        let Some(p) = (row..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=m {
                    let t = &a[row][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    if (row..n).any(|i| !a[i][m].is_zero()) {
        return None;
    }
    let mut y = vec![Rat::zero(); m];
    for (r, &c) in pivots.iter().enumerate() {
        y[c] = a[r][m].clone();
    }
    Some(y)
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a = rows.to_vec();
    let n = a[0].len();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if !a[i][col].is_zero() {
                let f = &a[i][col] / &a[r][col];
                for j in col..n {
                    let t = &a[r][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn determinant(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Rat::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        for i in col + 1..n {
            if !a[i][col].is_zero() {
                let f = &a[i][col] / &a[col][col];
                for j in col..n {
                    let t = &a[col][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
    }
    det
}

pub fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..2 * n {
                    let t = &a[col][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Row vector times matrix.
pub fn vec_mat(v: &[Rat], m: &[Vec<Rat>]) -> Vec<Rat> {
    let n = m.first().map_or(0, |r| r.len());
    let mut out = vec![Rat::zero(); n];
    for (c, row) in v.iter().zip(m) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += c * x;
        }
    }
    out
}

fn row_sub_mul(a: &mut [Int], b: &[Int], q: &Int) {
    if q.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x -= q * y;
    }
}

/// Row-style Hermite normal form with an optional unimodular transform.
///
/// Returns (H, U, rank) with U * A = H, the first `rank` rows of H in echelon form with
/// positive pivots and entries above each pivot reduced into [0, pivot).
pub fn hnf_with_transform(rows: &[Vec<Int>], dim: usize, want_u: bool) -> (Vec<Vec<Int>>, Vec<Vec<Int>>, usize) {
    let m = rows.len();
    let mut a = rows.to_vec();
    let mut u: Vec<Vec<Int>> = if want_u {
        (0..m)
            .map(|i| (0..m).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect()
    } else {
        Vec::new()
    };
    let mut r = 0;
    for col in 0..dim {
        if r == m {
            break;
        }
        loop {
            let piv = (r..m)
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()));
            let Some(piv) = piv else { break };
            a.swap(r, piv);
            if want_u {
                u.swap(r, piv);
            }
            let mut clean = true;
            for i in r + 1..m {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                let (top, rest) = a.split_at_mut(i);
                row_sub_mul(&mut rest[0], &top[r], &q);
                if want_u {
                    let (top, rest) = u.split_at_mut(i);
                    row_sub_mul(&mut rest[0], &top[r], &q);
                }
                if !a[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
            if want_u {
                for x in u[r].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        for i in 0..r {
            let q = a[i][col].div_floor(&a[r][col]);
            let (top, rest) = a.split_at_mut(r);
            row_sub_mul(&mut top[i], &rest[0], &q);
            if want_u {
                let (top, rest) = u.split_at_mut(r);
                row_sub_mul(&mut top[i], &rest[0], &q);
            }
        }
        r += 1;
    }
    (a, u, r)
}

pub fn hnf(rows: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    let (h, _, r) = hnf_with_transform(rows, dim, false);
    h.into_iter().take(r).collect()
}

/// Basis of the left integer kernel {y : y * A = 0}.
pub fn left_kernel(rows: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    let (_, u, r) = hnf_with_transform(rows, dim, true);
    u.into_iter().skip(r).collect()
}

/// Diagonal of the Smith normal form (nonzero invariant factors, each dividing the next).
pub fn smith_diagonal(rows: &[Vec<Int>]) -> Vec<Int> {
    let mut a = rows.to_vec();
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let n = a[0].len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut done = true;
        for i in t + 1..m {
            if !a[i][t].is_zero() {
                let q = a[i][t].div_floor(&a[t][t]);
                let (top, rest) = a.split_at_mut(i);
                row_sub_mul(&mut rest[0], &top[t], &q);
                if !a[i][t].is_zero() {
                    done = false;
                }
            }
        }
        for j in t + 1..n {
            if !a[t][j].is_zero() {
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut() {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
                if !a[t][j].is_zero() {
                    done = false;
                }
            }
        }
        if !done {
            continue;
        }
        // divisibility condition on the trailing block
        let p = a[t][t].clone();
        let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &p).is_zero()));
        if let Some(i) = bad {
            let (top, rest) = a.split_at_mut(i);
            for (x, y) in top[t].iter_mut().zip(rest[0].iter()) {
                *x += y;
            }
            continue;
        }
        diag.push(p.abs());
        t += 1;
    }
    diag
}

/// Serialized as an integer or the string "infinite".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(Int),
    Infinite,
}

impl serde::Serialize for LatticeIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LatticeIndex::Finite(v) => crate::serde_rat::int::serialize(v, s),
            LatticeIndex::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl LatticeIndex {
    pub fn finite(&self) -> Option<&Int> {
        match self {
            LatticeIndex::Finite(v) => Some(v),
            LatticeIndex::Infinite => None,
        }
    }
}

/// A sublattice of Z^dim, stored as its Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntLattice {
    pub dim: usize,
    pub basis: Vec<Vec<Int>>,
}

impl IntLattice {
    pub fn from_generators(gens: &[Vec<Int>], dim: usize) -> Self {
        Self {
            dim,
            basis: hnf(gens, dim),
        }
    }

    pub fn standard(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
        Self { dim, basis }
    }

    pub fn scaled(&self, k: &Int) -> Self {
        let gens: Vec<Vec<Int>> = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| x * k).collect())
            .collect();
        Self::from_generators(&gens, self.dim)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// Covolume for full-rank lattices.
    pub fn determinant(&self) -> Option<Int> {
        if !self.is_full_rank() {
            return None;
        }
        Some(
            self.basis
                .iter()
                .enumerate()
                .fold(Int::one(), |acc, (i, r)| acc * &r[i]),
        )
    }

    /// Integer coordinates of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        let mut v = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let c = row.iter().position(|x| !x.is_zero()).expect("zero HNF row");
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return None;
            }
            row_sub_mul(&mut v, row, &q);
            coords.push(q);
        }
        if v.iter().all(|x| x.is_zero()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.basis.iter().all(|r| self.contains(r))
    }

    /// Canonical representative of v modulo a full-rank lattice.
    pub fn reduce(&self, v: &[Int]) -> Vec<Int> {
        let mut v = v.to_vec();
        for row in &self.basis {
            let c = row.iter().position(|x| !x.is_zero()).expect("zero HNF row");
            let q = v[c].div_floor(&row[c]);
            row_sub_mul(&mut v, row, &q);
        }
        v
    }

    pub fn sum(&self, other: &IntLattice) -> IntLattice {
        let mut g = self.basis.clone();
        g.extend(other.basis.iter().cloned());
        IntLattice::from_generators(&g, self.dim)
    }

    pub fn intersect(&self, other: &IntLattice) -> IntLattice {
        if self.basis.is_empty() || other.basis.is_empty() {
            return IntLattice { dim: self.dim, basis: Vec::new() };
        }
        let mut stacked = self.basis.clone();
        stacked.extend(other.basis.iter().cloned());
        let kernel = left_kernel(&stacked, self.dim);
        let r1 = self.basis.len();
        let gens: Vec<Vec<Int>> = kernel
            .iter()
            .map(|y| {
                let mut v = vec![Int::zero(); self.dim];
                for (c, row) in y[..r1].iter().zip(&self.basis) {
                    row_sub_mul(&mut v, row, &-c);
                }
                v
            })
            .collect();
        IntLattice::from_generators(&gens, self.dim)
    }

    /// Index of `self` in `sup`: product of the Smith invariants of self's basis
    /// written in sup's coordinates, or Infinite on a rank drop.
    pub fn index_in(&self, sup: &IntLattice) -> Result<LatticeIndex> {
        let coords: Option<Vec<Vec<Int>>> = self.basis.iter().map(|r| sup.coordinates(r)).collect();
        let coords = coords.ok_or(Error::NotContained)?;
        if self.rank() < sup.rank() {
            return Ok(LatticeIndex::Infinite);
        }
        let diag = smith_diagonal(&coords);
        Ok(LatticeIndex::Finite(diag.iter().fold(Int::one(), |a, d| a * d)))
    }
}

/// The Z-span of rational vectors intersected with Z^dim.
pub fn integral_part_of_span(gens: &[Vec<Rat>], dim: usize) -> IntLattice {
    let flat: Vec<Rat> = gens.iter().flatten().cloned().collect();
    let den = common_denominator(&flat);
    let scaled: Vec<Vec<Int>> = gens
        .iter()
        .map(|g| {
            g.iter()
                .map(|x| (x * rat_from_int(&den)).to_integer())
                .collect()
        })
        .collect();
    let lat = IntLattice::from_generators(&scaled, dim);
    if den.is_one() {
        return lat;
    }
    let target = IntLattice::standard(dim).scaled(&den);
    let meet = lat.intersect(&target);
    let basis: Vec<Vec<Int>> = meet
        .basis
        .iter()
        .map(|r| r.iter().map(|x| x / &den).collect())
        .collect();
    IntLattice::from_generators(&basis, dim)
}

/// Integer vector of a rational vector known to be integral.
pub fn to_int_vec(v: &[Rat]) -> Option<Vec<Int>> {
    if v.iter().all(|x| x.is_integer()) {
        Some(v.iter().map(|x| x.to_integer()).collect())
    } else {
        None
    }
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_from_int).collect()
}

/// Scales a rational vector to a primitive integer vector (used for canonical forms).
pub fn primitive_int_vec(v: &[Rat]) -> Vec<Int> {
    let (ints, _) = clear_denominators(v);
    let g = ints.iter().fold(Int::zero(), |a, x| a.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Basis of the left kernel {y : y * A = 0} over F_p, entries in [0, p).
pub fn left_kernel_mod_p(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let n = rows[0].len();
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    // augment with the identity and row-reduce the left block
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r: Vec<u64> = r.iter().map(|x| x % p).collect();
            r.extend((0..m).map(|j| u64::from(i == j)));
            r
        })
        .collect();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..m).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = crate::poly::fp::inv_mod(a[r][col], p);
        for x in a[r].iter_mut() {
            *x = mulmod(*x, inv);
        }
        for i in 0..m {
            if i != r && a[i][col] != 0 {
                let f = a[i][col];
                for j in 0..n + m {
                    let t = mulmod(a[r][j], f);
                    a[i][j] = (a[i][j] + p - t) % p;
                }
            }
        }
        r += 1;
    }
    a.into_iter().skip(r).map(|row| row[n..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn iv(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn hnf_is_canonical() {
        let a = IntLattice::from_generators(&[iv(&[2, 4]), iv(&[0, 6]), iv(&[4, 2])], 2);
        let b = IntLattice::from_generators(&[iv(&[2, -2]), iv(&[0, 6])], 2);
        assert_eq!(a, b);
        assert_eq!(a.basis, vec![iv(&[2, 4]), iv(&[0, 6])]);
    }

    #[test]
    fn index_examples() {
        let z2 = IntLattice::standard(2);
        let two = z2.scaled(&int(2));
        assert_eq!(two.index_in(&z2).unwrap(), LatticeIndex::Finite(int(4)));
        let line = IntLattice::from_generators(&[iv(&[1, 0])], 2);
        assert_eq!(line.index_in(&z2).unwrap(), LatticeIndex::Infinite);
        assert!(matches!(z2.index_in(&two), Err(Error::NotContained)));
    }

    #[test]
    fn intersection_of_lattices() {
        let a = IntLattice::from_generators(&[iv(&[2, 0]), iv(&[0, 1])], 2);
        let b = IntLattice::from_generators(&[iv(&[3, 0]), iv(&[0, 2])], 2);
        let c = a.intersect(&b);
        assert_eq!(c, IntLattice::from_generators(&[iv(&[6, 0]), iv(&[0, 2])], 2));
    }

    #[test]
    fn smith_invariants() {
        let d = smith_diagonal(&[iv(&[2, 4, 4]), iv(&[-6, 6, 12]), iv(&[10, -4, -16])]);
        assert_eq!(d, iv(&[2, 6, 12]));
    }

    #[test]
    fn rational_solve() {
        let rows = vec![vec![rat(1), rat(2)], vec![rat(3), rat(4)]];
        let y = solve_left(&rows, &[rat(5), rat(6)]).unwrap();
        assert_eq!(vec_mat(&y, &rows), vec![rat(5), rat(6)]);
        assert_eq!(determinant(&rows), rat(-2));
        let inv = inverse(&rows).unwrap();
        assert_eq!(vec_mat(&[rat(1), rat(0)], &inv), vec![rat(-2), rat(1)]);
    }

    #[test]
    fn span_meets_integers() {
        // span{(1/2, 0), (0, 1/3)} ∩ Z^2 = Z^2
        let g = vec![vec![crate::arith::ratio(1, 2), rat(0)], vec![rat(0), crate::arith::ratio(1, 3)]];
        assert_eq!(integral_part_of_span(&g, 2), IntLattice::standard(2));
        // span{(1/2, 1/2)} ∩ Z^2 = span{(1,1)}
        let g = vec![vec![crate::arith::ratio(1, 2), crate::arith::ratio(1, 2)]];
        assert_eq!(integral_part_of_span(&g, 2).basis, vec![iv(&[1, 1])]);
    }
}
