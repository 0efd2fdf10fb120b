//! Residue fields O_K/P and the subgroup of SL2(F_q) generated by reduced matrices.

use std::collections::{HashSet, VecDeque};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::Int;
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::ideal::PrimeIdeal;

/// Largest residue field handled by the orbit enumeration.
pub const MAX_RESIDUE_SIZE: u64 = 256;

/// O_K/P with elements encoded as 0..q (base-p digits of the reduced integral coordinates
/// at the columns whose HNF pivot is p).
pub struct ResidueField {
    pub p: u64,
    pub q: u64,
    hnf: Vec<Vec<Int>>,
    free: Vec<usize>,
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
    one: u32,
}

impl ResidueField {
    pub fn new(field: &NumberField, prime: &PrimeIdeal) -> Result<Self> {
        let q = prime.residue_size();
        let qu = q.to_u64().filter(|&v| v <= MAX_RESIDUE_SIZE);
        let Some(qu) = qu else {
            return Err(Error::ResidueFieldTooLarge(q.to_u64().unwrap_or(u64::MAX), MAX_RESIDUE_SIZE));
        };
        let p = prime.p.to_u64().expect("small prime");
        let hnf = prime.ideal.hnf.clone();
        let free: Vec<usize> = (0..hnf.len()).filter(|&i| hnf[i][i] != Int::from(1)).collect();
        let n = field.degree();
        let mut rf = Self {
            p,
            q: qu,
            hnf,
            free,
            add: Vec::new(),
            mul: Vec::new(),
            inv: Vec::new(),
            neg: Vec::new(),
            one: 0,
        };
        let reps: Vec<Vec<Int>> = (0..qu).map(|i| rf.lift(i, n)).collect();
        let qs = qu as usize;
        let mut add = vec![0u32; qs * qs];
        let mut mul = vec![0u32; qs * qs];
        for i in 0..qs {
            for j in i..qs {
                let s: Vec<Int> = reps[i].iter().zip(&reps[j]).map(|(a, b)| a + b).collect();
                let a = rf.reduce_integral(&s);
                let m = rf.reduce_integral(&field.mul_integral(&reps[i], &reps[j]));
                add[i * qs + j] = a;
                add[j * qs + i] = a;
                mul[i * qs + j] = m;
                mul[j * qs + i] = m;
            }
        }
        let mut e0 = vec![Int::zero(); n];
        e0[0] = Int::from(1);
        let one = rf.reduce_integral(&e0);
        let mut inv = vec![0u32; qs];
        for i in 1..qs {
            inv[i] = (1..qs).find(|&j| mul[i * qs + j] == one).expect("field") as u32;
        }
        rf.neg = (0..qs).map(|i| (0..qs).find(|&j| add[i * qs + j] == 0).unwrap() as u32).collect();
        rf.one = one;
        rf.add = add;
        rf.mul = mul;
        rf.inv = inv;
        Ok(rf)
    }

    fn lift(&self, mut code: u64, n: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); n];
        for &c in &self.free {
            v[c] = Int::from(code % self.p);
            code /= self.p;
        }
        v
    }

    /// Code of an integral coordinate vector.
    pub fn reduce_integral(&self, c: &[Int]) -> u32 {
        let mut v = c.to_vec();
        for (i, row) in self.hnf.iter().enumerate() {
            let k = v[i].div_floor(&row[i]);
            if !k.is_zero() {
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &k * r;
                }
            }
        }
        self.free
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + v[c].to_u64().unwrap()) as u32
    }

    pub fn one(&self) -> u32 {
        self.one
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    /// Image of x ∈ O_K localized away from P. `unit` is an element of O_K outside P whose
    /// powers clear the denominator of x (an S-unit when P ∉ S).
    pub fn reduce(&self, field: &NumberField, x: &FieldElement, unit: &FieldElement) -> Result<u32> {
        let den = field.denominator(x);
        if !(&den % Int::from(self.p)).is_zero() {
            let y = field.integral_coords(&x.scale(&crate::arith::rat_from_int(&den))).unwrap();
            let mut d = vec![Int::zero(); field.degree()];
            d[0] = den;
            return Ok(self.mul(self.reduce_integral(&y), self.inv(self.reduce_integral(&d))));
        }
        let b = self.reduce_integral(&field.integral_coords(unit).ok_or(Error::PrimeInS)?);
        if b == 0 {
            return Err(Error::PrimeInS);
        }
        let mut y = x.clone();
        for k in 1..=256 {
            y = field.mul(&y, unit);
            if let Some(c) = field.integral_coords(&y) {
                let mut binv = self.one;
                for _ in 0..k {
                    binv = self.mul(binv, self.inv(b));
                }
                return Ok(self.mul(self.reduce_integral(&c), binv));
            }
        }
        Err(Error::InvalidInput("element is not integral away from S".into()))
    }
}

/// A 2×2 matrix over F_q as (a, b, c, d).
pub type Mat = [u32; 4];

fn mat_mul(rf: &ResidueField, x: &Mat, y: &Mat) -> Mat {
    let e = |a: u32, b: u32, c: u32, d: u32| rf.add(rf.mul(a, b), rf.mul(c, d));
    [
        e(x[0], y[0], x[1], y[2]),
        e(x[0], y[1], x[1], y[3]),
        e(x[2], y[0], x[3], y[2]),
        e(x[2], y[1], x[3], y[3]),
    ]
}

/// Inverse of a determinant-one matrix.
pub fn mat_inv(rf: &ResidueField, x: &Mat) -> Mat {
    [x[3], rf.neg(x[1]), rf.neg(x[2]), x[0]]
}

pub fn mat_det(rf: &ResidueField, x: &Mat) -> u32 {
    rf.add(rf.mul(x[0], x[3]), rf.neg(rf.mul(x[1], x[2])))
}

/// Size of the subgroup generated by `gens`, and the BFS radius at which it closed.
pub fn generated_order(rf: &ResidueField, gens: &[Mat]) -> (u64, u32) {
    let q = rf.q;
    let encode = |m: &Mat| m.iter().fold(0u64, |acc, &x| acc * q + x as u64);
    let mut all: Vec<Mat> = gens.to_vec();
    all.extend(gens.iter().map(|g| mat_inv(rf, g)));
    let id: Mat = [rf.one(), 0, 0, rf.one()];
    let use_bits = q <= 128;
    let mut bits: Vec<u64> = if use_bits { vec![0; (q.pow(4) as usize).div_ceil(64)] } else { Vec::new() };
    let mut set: HashSet<u64> = HashSet::new();
    let mut insert = |m: &Mat| -> bool {
        let c = encode(m);
        if use_bits {
            let (w, b) = ((c / 64) as usize, c % 64);
            let fresh = bits[w] & (1 << b) == 0;
            bits[w] |= 1 << b;
            fresh
        } else {
            set.insert(c)
        }
    };
    insert(&id);
    let mut count = 1u64;
    let mut frontier = VecDeque::from([id]);
    let mut radius = 0;
    while !frontier.is_empty() {
        let mut next = VecDeque::new();
        for m in frontier {
            for g in &all {
                let y = mat_mul(rf, &m, g);
                if insert(&y) {
                    count += 1;
                    next.push_back(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        radius += 1;
        frontier = next;
    }
    (count, radius)
}
