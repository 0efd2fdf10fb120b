//! Ideals of O_K as integer lattices in Hermite normal form (rows are Z-basis vectors in
//! integral-basis coordinates), prime decomposition, valuations and ideal class orders.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int_valuation, is_prime, rat_from_int, Int, Rat};
use crate::error::{Error, Result};
use crate::field::{FieldElement, IdealRecord, NumberField, Tier};
use crate::linalg::{self, IntLattice, LatticeIndex};
use crate::poly::fp;
use crate::quadratic;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegralIdeal {
    #[serde(with = "crate::serde_rat::int_mat")]
    pub hnf: Vec<Vec<Int>>,
    #[serde(with = "crate::serde_rat::int")]
    pub norm: Int,
}

impl IntegralIdeal {
    fn from_lattice(lat: IntLattice) -> Self {
        let norm = lat.determinant().unwrap_or_else(Int::zero);
        Self { hnf: lat.basis, norm }
    }

    /// The ideal whose Z-basis rows (integral-basis coordinates) are given. Checks full
    /// rank and closure under multiplication by O_K.
    pub fn from_rows(field: &NumberField, rows: &[Vec<Int>]) -> Result<Self> {
        let n = field.degree();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("ideal row has wrong length".into()));
        }
        let lat = IntLattice::from_generators(rows, n);
        if !lat.is_full_rank() {
            return Err(Error::InvalidInput("ideal lattice is not of full rank".into()));
        }
        let ideal = Self::from_lattice(lat);
        if !ideal.is_closed(field) {
            return Err(Error::InvalidInput("lattice is not an ideal of O_K".into()));
        }
        Ok(ideal)
    }

    pub fn from_record(field: &NumberField, rec: &IdealRecord) -> Result<Self> {
        if rec.wrt != "integral_basis" {
            return Err(Error::InvalidInput(format!("unsupported ideal basis {:?}", rec.wrt)));
        }
        Self::from_rows(field, &rec.hnf)
    }

    pub fn to_record(&self) -> IdealRecord {
        IdealRecord {
            hnf: self.hnf.clone(),
            wrt: "integral_basis".into(),
        }
    }

    /// Lattice with the given Z-basis of integral elements (assumed to span an ideal).
    pub fn from_z_basis(field: &NumberField, gens: &[FieldElement]) -> Result<Self> {
        let rows = gens
            .iter()
            .map(|g| field.integral_coords(g).ok_or(Error::InvalidInput("element is not integral".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, &rows)
    }

    /// The O_K-ideal generated by integral elements.
    pub fn from_generators(field: &NumberField, gens: &[FieldElement]) -> Result<Self> {
        let n = field.degree();
        let mut rows = Vec::with_capacity(gens.len() * n);
        for g in gens {
            let c = field
                .integral_coords(g)
                .ok_or(Error::InvalidInput("ideal generator is not integral".into()))?;
            for j in 0..n {
                let mut e = vec![Int::zero(); n];
                e[j] = Int::one();
                rows.push(field.mul_integral(&c, &e));
            }
        }
        let lat = IntLattice::from_generators(&rows, n);
        if !lat.is_full_rank() {
            return Err(Error::ZeroElement);
        }
        Ok(Self::from_lattice(lat))
    }

    pub fn principal(field: &NumberField, x: &FieldElement) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        Self::from_generators(field, std::slice::from_ref(x))
    }

    pub fn unit(field: &NumberField) -> Self {
        Self::from_lattice(IntLattice::standard(field.degree()))
    }

    pub fn is_unit(&self) -> bool {
        self.norm.is_one()
    }

    pub fn lattice(&self) -> IntLattice {
        IntLattice {
            dim: self.hnf.len(),
            basis: self.hnf.clone(),
        }
    }

    pub fn contains_coords(&self, c: &[Int]) -> bool {
        self.lattice().contains(c)
    }

    pub fn contains(&self, field: &NumberField, x: &FieldElement) -> bool {
        field.integral_coords(x).is_some_and(|c| self.contains_coords(&c))
    }

    pub fn contains_ideal(&self, other: &IntegralIdeal) -> bool {
        self.lattice().contains_lattice(&other.lattice())
    }

    fn is_closed(&self, field: &NumberField) -> bool {
        let n = field.degree();
        self.hnf.iter().all(|r| {
            (0..n).all(|j| {
                let mut e = vec![Int::zero(); n];
                e[j] = Int::one();
                self.contains_coords(&field.mul_integral(r, &e))
            })
        })
    }

    pub fn basis_elements(&self, field: &NumberField) -> Vec<FieldElement> {
        self.hnf.iter().map(|r| field.from_integral_coords(r)).collect()
    }

    pub fn mul(&self, field: &NumberField, other: &IntegralIdeal) -> IntegralIdeal {
        let n = field.degree();
        let mut rows = Vec::with_capacity(n * n);
        for a in &self.hnf {
            for b in &other.hnf {
                rows.push(field.mul_integral(a, b));
            }
        }
        Self::from_lattice(IntLattice::from_generators(&rows, n))
    }

    pub fn pow(&self, field: &NumberField, e: u64) -> IntegralIdeal {
        let mut result = Self::unit(field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(field, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(field, &base);
            }
        }
        result
    }

    /// Scales by a positive integer.
    pub fn scale(&self, k: &Int) -> IntegralIdeal {
        Self::from_lattice(self.lattice().scaled(k))
    }
}

/// A prime ideal P above p with its two-element presentation (p, π).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub ideal: IntegralIdeal,
    pub p: Int,
    pub e: u32,
    pub f: u32,
    pub pi: FieldElement,
    /// γ ∈ O_K with γP ⊆ pO_K and γ ∉ pO_K, in integral coordinates.
    anti_uniformizer: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    #[serde(with = "crate::serde_rat::int_mat")]
    pub hnf: Vec<Vec<Int>>,
    pub wrt: String,
    #[serde(with = "crate::serde_rat::int")]
    pub p: Int,
    pub e: u32,
    pub f: u32,
    pub two_element: TwoElement,
}

/// Serialized as [p, [rat]].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoElement(
    #[serde(with = "crate::serde_rat::int")] pub Int,
    #[serde(with = "crate::serde_rat::vec")] pub Vec<Rat>,
);

impl PrimeIdeal {
    pub fn to_record(&self) -> PrimeRecord {
        PrimeRecord {
            hnf: self.ideal.hnf.clone(),
            wrt: "integral_basis".into(),
            p: self.p.clone(),
            e: self.e,
            f: self.f,
            two_element: TwoElement(self.p.clone(), self.pi.coords.clone()),
        }
    }

    /// Residue field size p^f.
    pub fn residue_size(&self) -> Int {
        num_traits::pow(self.p.clone(), self.f as usize)
    }

    fn from_ideal(field: &NumberField, ideal: IntegralIdeal, p: Int, e: u32, f: u32, pi: FieldElement) -> Result<Self> {
        let pu = p.to_u64().ok_or_else(|| Error::InvalidInput("prime too large".into()))?;
        let n = field.degree();
        // γ ↦ (γ g_j mod p)_j over the HNF rows g_j
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut e = vec![Int::zero(); n];
                e[i] = Int::one();
                ideal
                    .hnf
                    .iter()
                    .flat_map(|g| field.mul_integral(&e, g))
                    .map(|c| c.mod_floor_u64(pu))
                    .collect()
            })
            .collect();
        let kernel = linalg::left_kernel_mod_p(&rows, pu);
        let anti = kernel
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidInput("not a prime ideal".into()))?
            .into_iter()
            .map(Int::from)
            .collect();
        Ok(Self {
            ideal,
            p,
            e,
            f,
            pi,
            anti_uniformizer: anti,
        })
    }

    /// Builds the prime ideal record for a given ideal of O_K known to be prime over p.
    pub fn from_prime_ideal(field: &NumberField, ideal: IntegralIdeal, p: &Int) -> Result<Self> {
        let factors = factor_rational_prime(field, p)?;
        factors
            .into_iter()
            .map(|(pr, _)| pr)
            .find(|pr| pr.ideal == ideal)
            .ok_or_else(|| Error::InvalidInput("ideal is not a prime above p".into()))
    }
}

trait ModU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModU64 for Int {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer;
        self.mod_floor(&Int::from(p)).to_u64().unwrap()
    }
}

fn centered(c: u64, p: u64) -> Int {
    if c > p / 2 {
        Int::from(c) - Int::from(p)
    } else {
        Int::from(c)
    }
}

/// Decomposition of pO_K into prime ideals with multiplicities, sorted by HNF.
pub fn factor_rational_prime(field: &NumberField, p: &Int) -> Result<Vec<(PrimeIdeal, u32)>> {
    if !p.is_positive() || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not a prime")));
    }
    let pu = p
        .to_u64()
        .filter(|&v| v < 1 << 31)
        .ok_or_else(|| Error::InvalidInput(format!("prime {p} too large")))?;
    let n = field.degree();
    let pk = field.from_rat(rat_from_int(p));
    if n == 1 {
        let ideal = IntegralIdeal::principal(field, &pk)?;
        return Ok(vec![(PrimeIdeal::from_ideal(field, ideal, p.clone(), 1, 1, pk)?, 1)]);
    }
    let (g, gen) = match field.quadratic() {
        Some(q) => (q.omega_minpoly.clone(), q.omega.clone()),
        None => {
            if (field.index_of_power_order() % p).is_zero() {
                return Err(Error::IndexDivisor(p.to_string()));
            }
            (field.poly().to_vec(), field.theta())
        }
    };
    let mut out = Vec::new();
    for (phi, mult) in fp::factor(&fp::from_int(&g, pu), pu) {
        let f = (phi.len() - 1) as u32;
        let pi = if f as usize == n {
            pk.clone()
        } else {
            let coeffs: Vec<Rat> = phi.iter().map(|&c| rat_from_int(&centered(c, pu))).collect();
            let x = field.eval_poly(&coeffs, &gen);
            let first = &field.to_integral_coords(&x)[0];
            if first.is_negative() {
                x.neg()
            } else {
                x
            }
        };
        let ideal = IntegralIdeal::from_generators(field, &[pk.clone(), pi.clone()])?;
        debug_assert_eq!(ideal.norm, num_traits::pow(p.clone(), f as usize));
        out.push((PrimeIdeal::from_ideal(field, ideal, p.clone(), mult, f, pi)?, mult));
    }
    out.sort_by(|a, b| a.0.ideal.hnf.cmp(&b.0.ideal.hnf));
    Ok(out)
}

/// v_P(x) for nonzero x ∈ K.
pub fn valuation(field: &NumberField, x: &FieldElement, prime: &PrimeIdeal) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let den = field.denominator(x);
    let y = x.scale(&rat_from_int(&den));
    let mut c = field.integral_coords(&y).expect("cleared denominator");
    let mut v: i64 = 0;
    loop {
        let t = field.mul_integral(&c, &prime.anti_uniformizer);
        if t.iter().all(|x| (x % &prime.p).is_zero()) {
            c = t.into_iter().map(|x| x / &prime.p).collect();
            v += 1;
        } else {
            break;
        }
    }
    Ok(v - prime.e as i64 * int_valuation(&den, &prime.p) as i64)
}

/// Minimal a with I^a principal, together with a generator β of I^a.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOrderWitness {
    pub ideal: IntegralIdeal,
    pub order: u64,
    pub generator: FieldElement,
    /// Coefficient bound |B| of the exhaustive principality search at each power tried.
    #[serde(with = "crate::serde_rat::int_vec")]
    pub search_bounds: Vec<Int>,
    pub source: String,
}

impl ClassOrderWitness {
    /// Re-multiplies ideal^a and compares with βO_K.
    pub fn verify(&self, field: &NumberField) -> bool {
        IntegralIdeal::principal(field, &self.generator)
            .is_ok_and(|b| b == self.ideal.pow(field, self.order))
    }
}

pub const DEFAULT_ORDER_BOUND: u64 = 10_000;

pub fn class_order(field: &NumberField, ideal: &IntegralIdeal, bound: u64) -> Result<ClassOrderWitness> {
    let trivial = |generator: FieldElement, source: &str| ClassOrderWitness {
        ideal: ideal.clone(),
        order: 1,
        generator,
        search_bounds: Vec::new(),
        source: source.into(),
    };
    if ideal.is_unit() {
        return Ok(trivial(field.one(), "unit ideal"));
    }
    if field.degree() == 1 {
        return Ok(trivial(field.from_rat(rat_from_int(&ideal.hnf[0][0])), "rational ideal"));
    }
    if field.tier() == Tier::Datasheet {
        let ds = field.datasheet().expect("datasheet tier");
        for entry in &ds.class_orders {
            let Ok(rec) = IntegralIdeal::from_record(field, &entry.ideal) else {
                continue;
            };
            if &rec != ideal {
                continue;
            }
            let w = ClassOrderWitness {
                ideal: ideal.clone(),
                order: entry.order,
                generator: field.element(entry.generator.clone())?,
                search_bounds: Vec::new(),
                source: "datasheet".into(),
            };
            if entry.order == 0 || !w.verify(field) {
                return Err(Error::DatasheetInvalid("class order entry does not verify".into()));
            }
            return Ok(w);
        }
        return Err(Error::DatasheetRequired(format!("class order of ideal {:?}", ideal.hnf)));
    }
    let mut j = ideal.clone();
    let mut lambda = field.one();
    let mut bounds = Vec::new();
    for a in 1..=bound {
        let (g, b) = quadratic::principal_generator(field, &j);
        bounds.push(b);
        if let Some(g) = g {
            let beta = quadratic::normalize_generator(field, &field.mul(&lambda, &g));
            let w = ClassOrderWitness {
                ideal: ideal.clone(),
                order: a,
                generator: beta,
                search_bounds: bounds,
                source: "principality search".into(),
            };
            if !w.verify(field) {
                return Err(Error::IdentityFailed("class order generator".into()));
            }
            return Ok(w);
        }
        let (next, mu) = quadratic::reduce_ideal(field, &j.mul(field, ideal))?;
        lambda = field.mul(&lambda, &mu);
        j = next;
    }
    Err(Error::OrderBoundExceeded(bound))
}

/// [L1 : L2] for L2 ⊆ L1.
pub fn lattice_index(l1: &IntLattice, l2: &IntLattice) -> Result<LatticeIndex> {
    l2.index_in(l1)
}
