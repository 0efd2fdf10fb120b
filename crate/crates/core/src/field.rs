//! Number fields K = Q[x]/(f) with exact element arithmetic.
//!
//! Elements are coordinate vectors in the power basis 1, θ, ..., θ^(n-1). The ring of
//! integers is carried as an explicit Z-basis (rows in power-basis coordinates) together
//! with its multiplication table, so ideals can be handled as integer lattices.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int, rat, rat_from_int, squarefree_decomposition, Int, Rat};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{self, Irreducibility};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement {
    #[serde(with = "crate::serde_rat::vec")]
    pub coords: Vec<Rat>,
}

impl FieldElement {
    pub fn new(coords: Vec<Rat>) -> Self {
        Self { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The element as a rational, if it lies in Q.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self::new(self.coords.iter().map(|c| c * k).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tier {
    Automatic,
    Datasheet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealRecord {
    #[serde(with = "crate::serde_rat::int_mat")]
    pub hnf: Vec<Vec<Int>>,
    #[serde(default = "default_wrt")]
    pub wrt: String,
}

fn default_wrt() -> String {
    "integral_basis".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOrderRecord {
    pub ideal: IdealRecord,
    pub order: u64,
    #[serde(with = "crate::serde_rat::vec")]
    pub generator: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubfieldRecord {
    #[serde(with = "crate::serde_rat::int_vec")]
    pub poly: Vec<Int>,
    #[serde(with = "crate::serde_rat::vec")]
    pub embedding: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datasheet: Option<Box<Datasheet>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionRecord {
    pub order: u64,
    #[serde(with = "crate::serde_rat::vec")]
    pub generator: Vec<Rat>,
}

/// User-supplied arithmetic data for fields of degree > 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Datasheet {
    #[serde(with = "crate::serde_rat::mat")]
    pub integral_basis: Vec<Vec<Rat>>,
    #[serde(default, with = "crate::serde_rat::mat")]
    pub fundamental_units: Vec<Vec<Rat>>,
    #[serde(default)]
    pub subfields: Vec<SubfieldRecord>,
    #[serde(default)]
    pub class_orders: Vec<ClassOrderRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion: Option<TorsionRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingData {
    /// Isolating intervals (a, b) of the real roots, ascending.
    pub real_roots: Vec<(String, String)>,
    pub complex_pairs: usize,
    pub precision_bits: u32,
}

/// Quadratic-field data: K = Q(sqrt(d0)) with d0 squarefree.
#[derive(Clone, Debug)]
pub struct QuadraticData {
    pub d0: Int,
    pub sqrt_d0: FieldElement,
    /// Generator ω of O_K (O_K = Z[ω]).
    pub omega: FieldElement,
    /// Minimal polynomial of ω, lowest degree first.
    pub omega_minpoly: Vec<Int>,
    /// Fundamental unit ε > 1 for real fields.
    pub unit: Option<FieldElement>,
    /// (w, generator of the roots of unity).
    pub torsion: (u64, FieldElement),
}

#[derive(Clone, Debug)]
pub struct NumberField {
    poly: Vec<Int>,
    degree: usize,
    signature: (usize, usize),
    integral_basis: Vec<Vec<Rat>>,
    basis_inverse: Vec<Vec<Rat>>,
    mult_table: Vec<Vec<Vec<Int>>>,
    reductions: Vec<Vec<Rat>>,
    discriminant: Int,
    tier: Tier,
    irreducibility: String,
    embeddings: EmbeddingData,
    approx_roots: Vec<(f64, f64)>,
    quadratic: Option<QuadraticData>,
    datasheet: Option<Datasheet>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && self.integral_basis == other.integral_basis
    }
}

impl NumberField {
    /// Builds K from a monic integer polynomial (lowest degree first).
    pub fn new(poly: Vec<Int>, datasheet: Option<Datasheet>) -> Result<Self> {
        if poly.len() < 2 || !poly.last().unwrap().is_one() {
            return Err(Error::NotMonic);
        }
        let n = poly.len() - 1;
        let irreducibility = match n {
            2 => {
                let disc = &poly[1] * &poly[1] - int(4) * &poly[0];
                if crate::arith::is_square(&disc).is_some() {
                    return Err(Error::Reducible("discriminant is a square".into()));
                }
                "non-square discriminant".to_string()
            }
            _ => match poly::irreducibility_screen(&poly) {
                Irreducibility::Proven(s) => s,
                Irreducibility::Reducible(s) => return Err(Error::Reducible(s)),
                Irreducibility::Undecided if datasheet.is_some() => "asserted-irreducible".into(),
                Irreducibility::Undecided => {
                    return Err(Error::DatasheetRequired("irreducibility undecided".into()))
                }
            },
        };
        let tier = if n <= 2 { Tier::Automatic } else { Tier::Datasheet };
        let rp = poly::int_poly_to_rat(&poly);
        let r1 = poly::count_real_roots(&rp);
        let signature = (r1, (n - r1) / 2);

        let mut field = NumberField {
            poly,
            degree: n,
            signature,
            integral_basis: Vec::new(),
            basis_inverse: Vec::new(),
            mult_table: Vec::new(),
            reductions: Vec::new(),
            discriminant: Int::zero(),
            tier,
            irreducibility,
            embeddings: EmbeddingData {
                real_roots: Vec::new(),
                complex_pairs: signature.1,
                precision_bits: 0,
            },
            approx_roots: Vec::new(),
            quadratic: None,
            datasheet: None,
        };
        field.reductions = field.compute_reductions();

        let basis = match n {
            1 => vec![vec![Rat::one()]],
            2 => {
                let q = field.quadratic_data();
                let b = vec![vec![Rat::one(), Rat::zero()], q.omega.coords.clone()];
                field.quadratic = Some(q);
                b
            }
            _ => match &datasheet {
                Some(ds) => ds.integral_basis.clone(),
                None => return Err(Error::DatasheetRequired("degree > 2".into())),
            },
        };
        field.install_basis(basis)?;
        if n == 2 {
            let torsion = crate::quadratic::compute_roots_of_unity(&field);
            let unit = field
                .signature
                .0
                .eq(&2)
                .then(|| crate::quadratic::compute_fundamental_unit(&field));
            let q = field.quadratic.as_mut().unwrap();
            q.torsion = torsion;
            q.unit = unit;
        }
        if n > 2 {
            field.datasheet = datasheet;
            field.validate_datasheet()?;
        }
        field.compute_embeddings();
        Ok(field)
    }

    /// Q as the degree-1 field defined by x.
    pub fn rationals() -> Self {
        Self::new(vec![int(0), int(1)], None).expect("Q is a valid field")
    }

    pub fn quadratic_from_d(d: i64) -> Result<Self> {
        Self::new(vec![int(-d), int(0), int(1)], None)
    }

    pub fn poly(&self) -> &[Int] {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn integral_basis(&self) -> &[Vec<Rat>] {
        &self.integral_basis
    }

    pub fn discriminant(&self) -> &Int {
        &self.discriminant
    }

    pub fn irreducibility(&self) -> &str {
        &self.irreducibility
    }

    pub fn embeddings(&self) -> &EmbeddingData {
        &self.embeddings
    }

    pub fn quadratic(&self) -> Option<&QuadraticData> {
        self.quadratic.as_ref()
    }

    pub fn datasheet(&self) -> Option<&Datasheet> {
        self.datasheet.as_ref()
    }

    pub fn is_totally_real(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn is_totally_imaginary(&self) -> bool {
        self.signature.0 == 0
    }

    /// rank of O_K^* = r1 + r2 - 1.
    pub fn unit_rank(&self) -> usize {
        self.signature.0 + self.signature.1 - 1
    }

    /// [O_K : Z[θ]].
    pub fn index_of_power_order(&self) -> Int {
        let det = linalg::determinant(&self.integral_basis).abs();
        det.recip().to_integer()
    }

    fn compute_reductions(&self) -> Vec<Vec<Rat>> {
        // θ^k in power coordinates for k < 2n - 1
        let n = self.degree;
        let mut out: Vec<Vec<Rat>> = Vec::with_capacity(2 * n);
        for k in 0..(2 * n).max(2) {
            if k < n {
                let mut v = vec![Rat::zero(); n];
                v[k] = Rat::one();
                out.push(v);
            } else {
                // θ * θ^(k-1)
                let prev = out[k - 1].clone();
                let mut v = vec![Rat::zero(); n];
                for i in 0..n {
                    if prev[i].is_zero() {
                        continue;
                    }
                    if i + 1 < n {
                        v[i + 1] += &prev[i];
                    } else {
                        for (j, c) in self.poly[..n].iter().enumerate() {
                            v[j] -= &prev[i] * rat_from_int(c);
                        }
                    }
                }
                out.push(v);
            }
        }
        out
    }

    fn quadratic_data(&self) -> QuadraticData {
        let b = &self.poly[1];
        let c = &self.poly[0];
        let disc = b * b - int(4) * c;
        let (s, d0) = squarefree_decomposition(&disc);
        // θ = (-b ± s sqrt(d0)) / 2; taking sqrt(d0) = (2θ + b) / s makes sqrt(d0) positive
        // at the larger real root (or the root with positive imaginary part).
        let sqrt_d0 = FieldElement::new(vec![
            Rat::new(b.clone(), s.clone()),
            Rat::new(int(2), s.clone()),
        ]);
        let (omega, omega_minpoly) = if d0.mod_floor(&int(4)) == int(1) {
            let w = FieldElement::new(vec![
                (rat(1) + &sqrt_d0.coords[0]) / rat(2),
                &sqrt_d0.coords[1] / rat(2),
            ]);
            (w, vec![(int(1) - &d0) / int(4), int(-1), int(1)])
        } else {
            (sqrt_d0.clone(), vec![-d0.clone(), int(0), int(1)])
        };
        QuadraticData {
            d0,
            sqrt_d0,
            omega,
            omega_minpoly,
            unit: None,
            torsion: (2, FieldElement::new(vec![rat(-1), rat(0)])),
        }
    }

    fn install_basis(&mut self, basis: Vec<Vec<Rat>>) -> Result<()> {
        let n = self.degree;
        let invalid = |m: &str| Error::DatasheetInvalid(m.to_string());
        if basis.len() != n || basis.iter().any(|r| r.len() != n) {
            return Err(invalid("integral basis must be n x n"));
        }
        let mut one = vec![Rat::zero(); n];
        one[0] = Rat::one();
        if basis[0] != one {
            return Err(invalid("first integral basis element must be 1"));
        }
        let inv = linalg::inverse(&basis).ok_or_else(|| invalid("integral basis is singular"))?;
        self.integral_basis = basis;
        self.basis_inverse = inv;
        // ℤ[θ] must lie in the span
        for k in 0..n {
            let v = linalg::vec_mat(&self.reductions[k], &self.basis_inverse);
            if !v.iter().all(|x| x.is_integer()) {
                return Err(invalid("power basis not contained in the integral basis span"));
            }
        }
        // closure under multiplication
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.mul_power(&self.integral_basis[i], &self.integral_basis[j]);
                let c = linalg::vec_mat(&prod, &self.basis_inverse);
                table[i][j] = linalg::to_int_vec(&c)
                    .ok_or_else(|| invalid("integral basis not closed under multiplication"))?;
            }
        }
        self.mult_table = table;
        // discriminant = det of the trace form
        let gram: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let e = FieldElement::new(self.mul_power(&self.integral_basis[i], &self.integral_basis[j]));
                        self.trace(&e)
                    })
                    .collect()
            })
            .collect();
        if gram.iter().flatten().any(|t| !t.is_integer()) {
            return Err(invalid("trace form is not integral"));
        }
        self.discriminant = linalg::determinant(&gram).to_integer();
        Ok(())
    }

    fn validate_datasheet(&self) -> Result<()> {
        let ds = self.datasheet.as_ref().unwrap();
        let n = self.degree;
        let invalid = |m: String| Error::DatasheetInvalid(m);
        if ds.fundamental_units.len() != self.unit_rank() {
            return Err(invalid(format!(
                "expected {} fundamental units, got {}",
                self.unit_rank(),
                ds.fundamental_units.len()
            )));
        }
        for u in &ds.fundamental_units {
            if u.len() != n {
                return Err(invalid("unit has wrong length".into()));
            }
            let e = FieldElement::new(u.clone());
            if !self.is_integral(&e) || self.norm(&e).abs() != Rat::one() {
                return Err(invalid(format!("{:?} is not a unit", crate::arith::rats_to_strings(u))));
            }
        }
        if let Some(t) = &ds.torsion {
            let z = FieldElement::new(t.generator.clone());
            if t.order == 0 || self.pow(&z, t.order as i64)? != self.one() {
                return Err(invalid("torsion generator has wrong order".into()));
            }
            for (p, _) in crate::arith::factor_integer(&Int::from(t.order)) {
                let e = t.order / p.to_u64().unwrap();
                if self.pow(&z, e as i64)? == self.one() {
                    return Err(invalid("torsion generator has smaller order".into()));
                }
            }
        }
        for sf in &ds.subfields {
            if sf.embedding.len() != n {
                return Err(invalid("subfield embedding has wrong length".into()));
            }
        }
        Ok(())
    }

    fn compute_embeddings(&mut self) {
        let rp = poly::int_poly_to_rat(&self.poly);
        let intervals = poly::isolate_real_roots(&rp);
        let width = Rat::new(Int::one(), Int::one() << 64usize);
        let mut roots = Vec::new();
        let mut real = Vec::new();
        for (a, b) in &intervals {
            real.push((crate::arith::rat_to_string(a), crate::arith::rat_to_string(b)));
            let (a, b) = poly::refine_root(&rp, a.clone(), b.clone(), &width);
            roots.push((crate::arith::rat_to_f64(&((a + b) / rat(2))), 0.0));
        }
        if self.signature.1 > 0 {
            let mut complex: Vec<(f64, f64)> = durand_kerner(&self.poly)
                .into_iter()
                .filter(|z| z.1 > 0.0)
                .collect();
            complex.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            complex.truncate(self.signature.1);
            roots.extend(complex);
        }
        self.embeddings = EmbeddingData {
            real_roots: real,
            complex_pairs: self.signature.1,
            precision_bits: 64,
        };
        self.approx_roots = roots;
    }

    // ---- element construction ----

    pub fn zero(&self) -> FieldElement {
        FieldElement::new(vec![Rat::zero(); self.degree])
    }

    pub fn one(&self) -> FieldElement {
        self.from_rat(Rat::one())
    }

    pub fn from_rat(&self, x: Rat) -> FieldElement {
        let mut v = vec![Rat::zero(); self.degree];
        v[0] = x;
        FieldElement::new(v)
    }

    pub fn from_int(&self, x: i64) -> FieldElement {
        self.from_rat(rat(x))
    }

    pub fn theta(&self) -> FieldElement {
        if self.degree == 1 {
            return self.from_rat(rat_from_int(&-&self.poly[0]));
        }
        let mut v = vec![Rat::zero(); self.degree];
        v[1] = Rat::one();
        FieldElement::new(v)
    }

    pub fn element(&self, coords: Vec<Rat>) -> Result<FieldElement> {
        if coords.len() != self.degree {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, field degree is {}",
                coords.len(),
                self.degree
            )));
        }
        Ok(FieldElement::new(coords))
    }

    /// Element with the given coordinates in the integral basis.
    pub fn from_integral_coords(&self, c: &[Int]) -> FieldElement {
        let v: Vec<Rat> = c.iter().map(rat_from_int).collect();
        FieldElement::new(linalg::vec_mat(&v, &self.integral_basis))
    }

    pub fn integral_basis_element(&self, i: usize) -> FieldElement {
        FieldElement::new(self.integral_basis[i].clone())
    }

    /// Coordinates in the integral basis (rational in general).
    pub fn to_integral_coords(&self, x: &FieldElement) -> Vec<Rat> {
        linalg::vec_mat(&x.coords, &self.basis_inverse)
    }

    pub fn integral_coords(&self, x: &FieldElement) -> Option<Vec<Int>> {
        linalg::to_int_vec(&self.to_integral_coords(x))
    }

    pub fn is_integral(&self, x: &FieldElement) -> bool {
        self.to_integral_coords(x).iter().all(|c| c.is_integer())
    }

    /// Smallest positive integer d with d·x integral.
    pub fn denominator(&self, x: &FieldElement) -> Int {
        crate::arith::common_denominator(&self.to_integral_coords(x))
    }

    // ---- arithmetic ----

    fn mul_power(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let n = self.degree;
        if n == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut prod = vec![Rat::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<Rat> = prod[..n].to_vec();
        for (k, c) in prod.iter().enumerate().skip(n) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.reductions[k]) {
                *o += c * r;
            }
        }
        out
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement::new(self.mul_power(&a.coords, &b.coords))
    }

    /// Product of integral-basis coordinate vectors via the multiplication table.
    pub fn mul_integral(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        let n = self.degree;
        let mut out = vec![Int::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (o, t) in out.iter_mut().zip(&self.mult_table[i][j]) {
                    *o += &xy * t;
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `a` on the power basis (row i = a·θ^i).
    pub fn mult_matrix(&self, a: &FieldElement) -> Vec<Vec<Rat>> {
        (0..self.degree)
            .map(|i| self.mul_power(&a.coords, &self.reductions[i]))
            .collect()
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.degree == 1 {
            return Ok(FieldElement::new(vec![a.coords[0].recip()]));
        }
        let m = self.mult_matrix(a);
        let y = linalg::solve_left(&m, &self.one().coords).ok_or(Error::DivisionByZero)?;
        Ok(FieldElement::new(y))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut result = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(result)
    }

    pub fn norm(&self, a: &FieldElement) -> Rat {
        linalg::determinant(&self.mult_matrix(a))
    }

    pub fn trace(&self, a: &FieldElement) -> Rat {
        let m = self.mult_matrix(a);
        (0..self.degree).fold(Rat::zero(), |acc, i| acc + &m[i][i])
    }

    /// Monic minimal polynomial over Q, lowest degree first.
    pub fn minimal_poly(&self, a: &FieldElement) -> Vec<Rat> {
        let mut powers = vec![self.one()];
        loop {
            let next = self.mul(powers.last().unwrap(), a);
            let rows: Vec<Vec<Rat>> = powers.iter().map(|p| p.coords.clone()).collect();
            if let Some(c) = linalg::solve_left(&rows, &next.coords) {
                let mut out: Vec<Rat> = c.into_iter().map(|x| -x).collect();
                out.push(Rat::one());
                return out;
            }
            powers.push(next);
        }
    }

    /// Evaluates an integer-coefficient polynomial (lowest degree first) at an element.
    pub fn eval_poly(&self, p: &[Rat], x: &FieldElement) -> FieldElement {
        p.iter()
            .rev()
            .fold(self.zero(), |acc, c| self.mul(&acc, x).add(&self.from_rat(c.clone())))
    }

    /// Galois conjugate in a quadratic field (sqrt(d0) -> -sqrt(d0)).
    pub fn conjugate(&self, a: &FieldElement) -> FieldElement {
        match &self.quadratic {
            Some(_) => {
                let t = self.trace(a);
                self.from_rat(t).sub(a)
            }
            None => a.clone(),
        }
    }

    /// Approximate log|σ_v(x)| at each infinite place (reals first, then complex pairs).
    /// Used only to propose exponents that are then verified exactly.
    pub fn approx_log_embedding(&self, x: &FieldElement) -> Vec<f64> {
        self.approx_roots
            .iter()
            .map(|&(re, im)| {
                let mut acc = (0.0f64, 0.0f64);
                for c in x.coords.iter().rev() {
                    let c = crate::arith::rat_to_f64(c);
                    acc = (acc.0 * re - acc.1 * im + c, acc.0 * im + acc.1 * re);
                }
                (acc.0 * acc.0 + acc.1 * acc.1).sqrt().ln()
            })
            .collect()
    }

    /// Approximate images of θ at the infinite places.
    pub fn approx_roots(&self) -> &[(f64, f64)] {
        &self.approx_roots
    }
}

/// All complex roots of a monic integer polynomial by Durand–Kerner iteration.
fn durand_kerner(poly: &[Int]) -> Vec<(f64, f64)> {
    let n = poly.len() - 1;
    let c: Vec<f64> = poly.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let eval = |z: (f64, f64)| {
        let mut acc = (0.0, 0.0);
        for k in (0..=n).rev() {
            acc = (acc.0 * z.0 - acc.1 * z.1 + c[k], acc.0 * z.1 + acc.1 * z.0);
        }
        acc
    };
    let mut roots: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let r = 0.4f64.powi(k as i32);
            let a = 0.9f64 * k as f64;
            (r * a.cos() + 0.4 * (k as f64), r * a.sin() + 0.9)
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let num = eval(zi);
            let mut den = (1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if i != j {
                    let d = (zi.0 - zj.0, zi.1 - zj.1);
                    den = (den.0 * d.0 - den.1 * d.1, den.0 * d.1 + den.1 * d.0);
                }
            }
            let m = den.0 * den.0 + den.1 * den.1;
            let q = ((num.0 * den.0 + num.1 * den.1) / m, (num.1 * den.0 - num.0 * den.1) / m);
            roots[i] = (zi.0 - q.0, zi.1 - q.1);
            delta = delta.max(q.0.abs() + q.1.abs());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn el(v: &[Rat]) -> FieldElement {
        FieldElement::new(v.to_vec())
    }

    #[test]
    fn gaussian_field() {
        let k = NumberField::quadratic_from_d(-1).unwrap();
        assert_eq!(k.signature(), (0, 1));
        assert_eq!(k.discriminant(), &int(-4));
        let a = el(&[rat(1), rat(1)]);
        let b = el(&[rat(1), rat(-1)]);
        assert_eq!(k.mul(&a, &b), k.from_int(2));
        assert_eq!(k.inv(&a).unwrap(), el(&[ratio(1, 2), ratio(-1, 2)]));
        assert!(k.is_integral(&a));
        assert!(!k.is_integral(&k.from_rat(ratio(1, 2))));
        assert_eq!(k.inv(&k.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn rationals_field() {
        let q = NumberField::new(vec![int(-1), int(1)], None).unwrap();
        assert_eq!(q.signature(), (1, 0));
        assert_eq!(q.integral_basis(), &[vec![rat(1)]]);
        assert_eq!(q.discriminant(), &int(1));
    }

    #[test]
    fn golden_field_basis() {
        let k = NumberField::quadratic_from_d(5).unwrap();
        assert_eq!(k.integral_basis()[1], vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(k.discriminant(), &int(5));
        assert_eq!(k.index_of_power_order(), int(2));
        let w = el(&[ratio(1, 2), ratio(1, 2)]);
        assert!(k.is_integral(&w));
    }

    #[test]
    fn signatures() {
        assert_eq!(NumberField::quadratic_from_d(2).unwrap().signature(), (2, 0));
        let c = NumberField::new(
            vec![int(-2), int(0), int(0), int(1)],
            Some(Datasheet {
                integral_basis: vec![
                    vec![rat(1), rat(0), rat(0)],
                    vec![rat(0), rat(1), rat(0)],
                    vec![rat(0), rat(0), rat(1)],
                ],
                fundamental_units: vec![vec![rat(-1), rat(1), rat(0)]],
                ..Default::default()
            }),
        )
        .unwrap();
        assert_eq!(c.signature(), (1, 1));
        assert_eq!(c.discriminant(), &int(-108));
    }

    #[test]
    fn minimal_polynomials() {
        let k = NumberField::quadratic_from_d(2).unwrap();
        let a = el(&[rat(1), rat(1)]);
        assert_eq!(k.minimal_poly(&a), vec![rat(-1), rat(-2), rat(1)]);
        assert_eq!(k.minimal_poly(&k.theta()), vec![rat(-2), rat(0), rat(1)]);
        assert_eq!(k.minimal_poly(&k.from_int(3)), vec![rat(-3), rat(1)]);
    }

    #[test]
    fn creation_errors() {
        assert_eq!(NumberField::new(vec![int(1), int(2)], None).unwrap_err(), Error::NotMonic);
        assert!(matches!(NumberField::new(vec![int(-4), int(0), int(1)], None), Err(Error::Reducible(_))));
        assert!(matches!(
            NumberField::new(vec![int(-2), int(0), int(0), int(1)], None),
            Err(Error::DatasheetRequired(_))
        ));
        // Z[θ] basis scaled by 1/2 is not closed under multiplication
        let bad = Datasheet {
            integral_basis: vec![
                vec![rat(1), rat(0), rat(0)],
                vec![rat(0), ratio(1, 2), rat(0)],
                vec![rat(0), rat(0), rat(1)],
            ],
            fundamental_units: vec![vec![rat(-1), rat(1), rat(0)]],
            ..Default::default()
        };
        assert!(matches!(
            NumberField::new(vec![int(-2), int(0), int(0), int(1)], Some(bad)),
            Err(Error::DatasheetInvalid(_))
        ));
    }
}
