//! S-unit groups, subfield contraction, CM detection, the search for a good unit α and
//! the index of Z[α^n] in O_S.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{rat, rat_from_int, Int, Rat};
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField, Tier};
use crate::filtration::{self, Filtration, Stabilized, DEFAULT_LEVEL_BOUND};
use crate::ideal::{
    class_order, factor_rational_prime, valuation, ClassOrderWitness, PrimeIdeal, PrimeRecord, DEFAULT_ORDER_BOUND,
};
use crate::linalg;

pub const DEFAULT_SEARCH_BOUND: u32 = 32;

/// S = S_∞ ∪ {finite primes}; the finite primes keep the order in which they were given.
#[derive(Clone, Debug)]
pub struct PrimeSet {
    pub finite: Vec<PrimeIdeal>,
    pub infinite: usize,
}

impl PrimeSet {
    pub fn new(field: &NumberField, finite: Vec<PrimeIdeal>) -> Result<Self> {
        for (i, p) in finite.iter().enumerate() {
            if finite[..i].iter().any(|q| q.ideal == p.ideal) {
                return Err(Error::InvalidInput(format!("prime {:?} listed twice", p.ideal.hnf)));
            }
        }
        let (r1, r2) = field.signature();
        Ok(Self {
            finite,
            infinite: r1 + r2,
        })
    }

    pub fn card(&self) -> usize {
        self.infinite + self.finite.len()
    }

    pub fn contains(&self, p: &PrimeIdeal) -> bool {
        self.finite.iter().any(|q| q.ideal == p.ideal)
    }

    pub fn check_cardinality(&self) -> Result<()> {
        if self.card() < 2 {
            return Err(Error::CardinalityTooSmall(self.card()));
        }
        Ok(())
    }
}

/// Torsion generator and fundamental units of O_K^*.
pub fn unit_group(field: &NumberField) -> Result<(u64, FieldElement, Vec<FieldElement>)> {
    if field.degree() == 1 {
        return Ok((2, field.from_int(-1), Vec::new()));
    }
    if let Some(q) = field.quadratic() {
        return Ok((q.torsion.0, q.torsion.1.clone(), q.unit.iter().cloned().collect()));
    }
    let ds = field
        .datasheet()
        .ok_or_else(|| Error::DatasheetRequired("fundamental units".into()))?;
    let units = ds
        .fundamental_units
        .iter()
        .map(|u| field.element(u.clone()))
        .collect::<Result<Vec<_>>>()?;
    let (w, z) = match &ds.torsion {
        Some(t) => (t.order, field.element(t.generator.clone())?),
        None => (2, field.from_int(-1)),
    };
    Ok((w, z, units))
}

#[derive(Clone, Debug, Serialize)]
pub struct SUnitBasis {
    pub torsion_order: u64,
    pub torsion_gen: FieldElement,
    pub fund_units: Vec<FieldElement>,
    pub s_gens: Vec<FieldElement>,
    pub witnesses: Vec<ClassOrderWitness>,
    /// Rows: fundamental units then s_gens; columns: finite primes of S.
    pub valuation_matrix: Vec<Vec<i64>>,
}

impl SUnitBasis {
    pub fn rank(&self) -> usize {
        self.fund_units.len() + self.s_gens.len()
    }

    /// B = ∏ β_i, the base of the level filtration.
    pub fn base_product(&self, field: &NumberField) -> FieldElement {
        self.s_gens.iter().fold(field.one(), |acc, b| field.mul(&acc, b))
    }

    pub fn orders(&self) -> Vec<u64> {
        self.witnesses.iter().map(|w| w.order).collect()
    }
}

pub fn s_unit_basis(field: &NumberField, s: &PrimeSet) -> Result<SUnitBasis> {
    s.check_cardinality()?;
    let (w, zeta, fund) = unit_group(field)?;
    let mut witnesses = Vec::new();
    for p in &s.finite {
        witnesses.push(class_order(field, &p.ideal, DEFAULT_ORDER_BOUND)?);
    }
    let s_gens: Vec<FieldElement> = witnesses.iter().map(|w| w.generator.clone()).collect();
    let mut valuation_matrix = Vec::new();
    for g in fund.iter().chain(s_gens.iter()) {
        let row = s
            .finite
            .iter()
            .map(|p| valuation(field, g, p))
            .collect::<Result<Vec<_>>>()?;
        valuation_matrix.push(row);
    }
    for (i, w) in witnesses.iter().enumerate() {
        let row = &valuation_matrix[fund.len() + i];
        for (j, &v) in row.iter().enumerate() {
            let expect = if i == j { w.order as i64 } else { 0 };
            if v != expect {
                return Err(Error::IdentityFailed(format!("valuation of s-unit generator {i} at prime {j}")));
            }
        }
    }
    Ok(SUnitBasis {
        torsion_order: w,
        torsion_gen: zeta,
        fund_units: fund,
        s_gens,
        witnesses,
        valuation_matrix,
    })
}

fn product(field: &NumberField, factors: &[(FieldElement, i64)]) -> Result<FieldElement> {
    let mut x = field.one();
    for (f, e) in factors {
        x = field.mul(&x, &field.pow(f, *e)?);
    }
    Ok(x)
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[piv][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Exponents k (rational, to allow a finite-index unit basis) with u = ζ^t ∏ ε_i^{k_i} for
/// the unit u = ∏ f^e. The logarithm estimate is floating point; the answer is verified exactly.
pub fn unit_log(field: &NumberField, basis: &SUnitBasis, factors: &[(FieldElement, i64)]) -> Result<Vec<Rat>> {
    let r = basis.fund_units.len();
    let x = product(field, factors)?;
    let is_torsion = |y: &FieldElement| -> Result<bool> {
        Ok(field.pow(y, basis.torsion_order as i64)? == field.one())
    };
    if r == 0 {
        if is_torsion(&x)? {
            return Ok(Vec::new());
        }
        return Err(Error::UnitLog("element is not a root of unity".into()));
    }
    let mut target = vec![0.0f64; r];
    for (f, e) in factors {
        let l = field.approx_log_embedding(f);
        for v in 0..r {
            target[v] += *e as f64 * l[v];
        }
    }
    let logs: Vec<Vec<f64>> = basis.fund_units.iter().map(|u| field.approx_log_embedding(u)).collect();
    // k·L = target, i.e. L^T k = target
    let a: Vec<Vec<f64>> = (0..r).map(|v| (0..r).map(|i| logs[i][v]).collect()).collect();
    let est = solve_f64(a, target).ok_or_else(|| Error::UnitLog("singular regulator matrix".into()))?;
    let neighbours: Vec<Vec<i64>> = {
        let mut out = vec![vec![]];
        for _ in 0..r {
            out = out
                .into_iter()
                .flat_map(|v| [0i64, -1, 1].into_iter().map(move |d| [v.clone(), vec![d]].concat()))
                .collect();
        }
        out
    };
    for mult in 1..=12i64 {
        let xm = field.pow(&x, mult)?;
        for nb in &neighbours {
            let k: Vec<i64> = (0..r).map(|i| (est[i] * mult as f64).round() as i64 + nb[i]).collect();
            let mut y = xm.clone();
            for (u, &ki) in basis.fund_units.iter().zip(&k) {
                y = field.mul(&y, &field.pow(u, -ki)?);
            }
            if is_torsion(&y)? {
                return Ok(k.into_iter().map(|ki| Rat::new(ki.into(), mult.into())).collect());
            }
        }
    }
    Err(Error::UnitLog("no exponent vector verified".into()))
}

/// Coordinates of the S-unit ∏ f^e in the basis (fund_units, s_gens), torsion dropped.
pub fn s_unit_coordinates(
    field: &NumberField,
    s: &PrimeSet,
    basis: &SUnitBasis,
    factors: &[(FieldElement, i64)],
) -> Result<Vec<Rat>> {
    let orders = basis.orders();
    let mut vals = vec![0i64; s.finite.len()];
    for (f, e) in factors {
        for (i, p) in s.finite.iter().enumerate() {
            vals[i] += e * valuation(field, f, p)?;
        }
    }
    let m = orders.iter().fold(1u64, |acc, &a| acc.lcm(&a)) as i64;
    let mut unit_factors: Vec<(FieldElement, i64)> = factors.iter().map(|(f, e)| (f.clone(), e * m)).collect();
    for (i, b) in basis.s_gens.iter().enumerate() {
        unit_factors.push((b.clone(), -vals[i] * (m / orders[i] as i64)));
    }
    let k = unit_log(field, basis, &unit_factors)?;
    let mut out: Vec<Rat> = k.into_iter().map(|x| x / Rat::from_integer(m.into())).collect();
    out.extend(
        vals.iter()
            .zip(&orders)
            .map(|(&v, &a)| Rat::new(v.into(), (a as i64).into())),
    );
    Ok(out)
}

/// A finite prime q of F together with the primes of K above it.
#[derive(Clone, Debug)]
pub struct ContractedPrime {
    pub prime: PrimeIdeal,
    pub above: Vec<(PrimeIdeal, bool)>,
}

impl ContractedPrime {
    pub fn fully_in_s(&self) -> bool {
        self.above.iter().all(|(_, b)| *b)
    }

    /// Inert or ramified in K: a single prime above q.
    pub fn is_nonsplit(&self) -> bool {
        self.above.len() == 1
    }
}

#[derive(Clone, Debug)]
pub struct SubfieldDescriptor {
    pub field: NumberField,
    pub embedding: FieldElement,
    embedded_powers: Vec<FieldElement>,
    /// S(F), each entry listing the K-primes above it.
    pub contracted: Vec<ContractedPrime>,
}

impl SubfieldDescriptor {
    /// Verifies that `embedding` is a root of F's defining polynomial in K.
    pub fn new(k: &NumberField, f: NumberField, embedding: FieldElement) -> Result<Self> {
        let m = f.degree();
        let label = || format!("{:?}", f.poly());
        if m >= k.degree() || !k.degree().is_multiple_of(m) || embedding.coords.len() != k.degree() {
            return Err(Error::NotASubfield(label()));
        }
        let minpoly = k.minimal_poly(&embedding);
        let expected: Vec<Rat> = f.poly().iter().map(rat_from_int).collect();
        if minpoly != expected {
            return Err(Error::NotASubfield(label()));
        }
        let embedded_powers = filtration::powers(k, &embedding, m - 1);
        Ok(Self {
            field: f,
            embedding,
            embedded_powers,
            contracted: Vec::new(),
        })
    }

    pub fn rationals(k: &NumberField) -> Self {
        Self {
            field: NumberField::rationals(),
            embedding: k.one(),
            embedded_powers: vec![k.one()],
            contracted: Vec::new(),
        }
    }

    pub fn label(&self) -> String {
        let p: Vec<String> = self.field.poly().iter().map(|c| c.to_string()).collect();
        format!("[{}]", p.join(","))
    }

    /// Image in K of an element of F.
    pub fn embed(&self, k: &NumberField, x: &FieldElement) -> FieldElement {
        x.coords
            .iter()
            .zip(&self.embedded_powers)
            .fold(k.zero(), |acc, (c, p)| acc.add(&p.scale(c)))
    }

    fn lies_under(&self, k: &NumberField, q: &PrimeIdeal, big: &PrimeIdeal) -> bool {
        q.ideal
            .basis_elements(&self.field)
            .iter()
            .all(|x| big.ideal.contains(k, &self.embed(k, x)))
    }

    /// Computes S(F) for the finite primes of S.
    pub fn contract(&mut self, k: &NumberField, s: &PrimeSet) -> Result<()> {
        let mut out: Vec<ContractedPrime> = Vec::new();
        for big in &s.finite {
            if out.iter().any(|c| c.above.iter().any(|(p, _)| p.ideal == big.ideal)) {
                continue;
            }
            let q = factor_rational_prime(&self.field, &big.p)?
                .into_iter()
                .map(|(q, _)| q)
                .find(|q| self.lies_under(k, q, big))
                .ok_or_else(|| Error::NotASubfield(self.label()))?;
            let above = factor_rational_prime(k, &big.p)?
                .into_iter()
                .map(|(p, _)| p)
                .filter(|p| self.lies_under(k, &q, p))
                .map(|p| {
                    let ins = s.contains(&p);
                    (p, ins)
                })
                .collect();
            out.push(ContractedPrime { prime: q, above });
        }
        out.sort_by(|a, b| (&a.prime.p, &a.prime.ideal.hnf).cmp(&(&b.prime.p, &b.prime.ideal.hnf)));
        self.contracted = out;
        Ok(())
    }

    /// S(F) as a prime set of F.
    pub fn s_of_f(&self) -> Result<PrimeSet> {
        PrimeSet::new(&self.field, self.contracted.iter().map(|c| c.prime.clone()).collect())
    }
}

/// Proper subfields of K with S(F) computed: Q always, plus the datasheet subfields.
pub fn proper_subfields(k: &NumberField, s: &PrimeSet) -> Result<Vec<SubfieldDescriptor>> {
    let mut out = Vec::new();
    if k.degree() == 1 {
        return Ok(out);
    }
    out.push(SubfieldDescriptor::rationals(k));
    if k.tier() == Tier::Datasheet {
        for rec in &k.datasheet().expect("datasheet tier").subfields {
            if rec.poly.len() == 2 {
                continue;
            }
            let f = NumberField::new(rec.poly.clone(), rec.datasheet.as_deref().cloned())?;
            out.push(SubfieldDescriptor::new(k, f, k.element(rec.embedding.clone())?)?);
        }
    }
    for f in out.iter_mut() {
        f.contract(k, s)?;
    }
    Ok(out)
}

/// rank(O_F^*) + #{q ∈ S(F) : every K-prime above q is in S}.
pub fn rank_of_intersection(f: &SubfieldDescriptor) -> usize {
    f.field.unit_rank() + f.contracted.iter().filter(|c| c.fully_in_s()).count()
}

/// K = F(√-d) with F totally real, d ∈ F totally positive.
#[derive(Clone, Debug)]
pub struct CmData {
    pub subfield: usize,
    pub d: FieldElement,
    pub sqrt_minus_d: FieldElement,
}

pub fn is_cm(k: &NumberField, subfields: &[SubfieldDescriptor]) -> Option<CmData> {
    if k.degree() == 1 || !k.is_totally_imaginary() {
        return None;
    }
    if let Some(q) = k.quadratic() {
        let idx = subfields.iter().position(|f| f.field.degree() == 1)?;
        return Some(CmData {
            subfield: idx,
            d: subfields[idx].field.from_int(-q.d0.to_i64()?),
            sqrt_minus_d: q.sqrt_d0.clone(),
        });
    }
    let theta = k.theta();
    let theta2 = k.mul(&theta, &theta);
    for (idx, f) in subfields.iter().enumerate() {
        let m = f.field.degree();
        if 2 * m != k.degree() || !f.field.is_totally_real() {
            continue;
        }
        // θ² + bθ + c = 0 with b, c ∈ F
        let mut rows: Vec<Vec<Rat>> = f.embedded_powers.iter().map(|p| k.mul(p, &theta).coords).collect();
        rows.extend(f.embedded_powers.iter().map(|p| p.coords.clone()));
        let Some(sol) = linalg::solve_left(&rows, &theta2.neg().coords) else {
            continue;
        };
        let b = FieldElement::new(sol[..m].to_vec());
        let c = FieldElement::new(sol[m..].to_vec());
        let d = c.scale(&rat(4)).sub(&f.field.mul(&b, &b));
        let delta = theta.scale(&rat(2)).add(&f.embed(k, &b));
        if k.mul(&delta, &delta) == f.embed(k, &d).neg() {
            return Some(CmData {
                subfield: idx,
                d,
                sqrt_minus_d: delta,
            });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exponents {
    pub torsion: u64,
    pub units: Vec<i64>,
    /// c_i > 0 with α = ζ^t ∏ ε^f ∏ β_i^{-c_i}.
    pub s_gens: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NegValuation {
    pub prime: PrimeRecord,
    pub valuation: i64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Avoidance {
    FinitePlace { prime: usize, valuation: i64 },
    RealPlace { place: usize, test: String },
    ComplexPlace { place: usize, test: String },
    Subfield { subfield: String, w_rank: usize, rank_with_alpha: usize },
}

/// κ with κ·α = β^{-1} and κ ∈ O_K, so β^{-1} ∈ O_K[α].
#[derive(Clone, Debug, Serialize)]
pub struct RingWitness {
    pub beta: FieldElement,
    pub kappa: FieldElement,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexEntry {
    pub n: u32,
    #[serde(with = "crate::serde_rat::int")]
    pub index: Int,
    pub level: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaCertificate {
    pub alpha: FieldElement,
    pub exponents: Exponents,
    pub max_norm: u32,
    pub neg_valuations: Vec<NegValuation>,
    #[serde(rename = "generates_K")]
    pub generates_k: bool,
    #[serde(with = "crate::serde_rat::vec")]
    pub minimal_poly: Vec<Rat>,
    pub avoidance_log: Vec<Avoidance>,
    pub absorbed_unit: FieldElement,
    pub ring_certificate: Vec<RingWitness>,
    pub index_table: Vec<IndexEntry>,
}

#[derive(Clone, Debug)]
pub struct AlphaOptions {
    pub search_bound: u32,
    pub level_bound: u32,
    pub index_exponents: Vec<u32>,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        Self {
            search_bound: DEFAULT_SEARCH_BOUND,
            level_bound: DEFAULT_LEVEL_BOUND,
            index_exponents: vec![1, 2, 3],
        }
    }
}

/// Calls `f` on every (unit exponents, s exponents) with unit exponents in [-m, m],
/// s exponents in [1, m] and max-norm exactly m, in lexicographic order. Stops when `f`
/// returns Some.
fn search_shell<T>(
    r: usize,
    t: usize,
    m: i64,
    mut f: impl FnMut(&[i64], &[i64]) -> Result<Option<T>>,
) -> Result<Option<T>> {
    let lo: Vec<i64> = (0..r + t).map(|i| if i < r { -m } else { 1 }).collect();
    let mut cur = lo.clone();
    loop {
        if cur.iter().any(|x| x.abs() == m) {
            if let Some(v) = f(&cur[..r], &cur[r..])? {
                return Ok(Some(v));
            }
        }
        let mut i = r + t;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if cur[i] < m {
                cur[i] += 1;
                for j in i + 1..r + t {
                    cur[j] = lo[j];
                }
                break;
            }
        }
    }
}

fn is_reciprocal(p: &[Rat]) -> bool {
    let d = p.len() - 1;
    let c0 = &p[0];
    !c0.is_zero() && (0..=d).all(|j| p[d - j].clone() / c0 == p[j])
}

fn infinite_place_checks(k: &NumberField, alpha: &FieldElement, minpoly: &[Rat]) -> Option<Vec<Avoidance>> {
    let (r1, r2) = k.signature();
    let mut log = Vec::new();
    for place in 0..r1 {
        if *alpha == k.one() || *alpha == k.from_int(-1) {
            return None;
        }
        log.push(Avoidance::RealPlace {
            place,
            test: "alpha != 1 and alpha != -1".into(),
        });
    }
    for i in 0..r2 {
        let test = if k.degree() == 2 {
            if k.norm(alpha) == Rat::one() {
                return None;
            }
            "N(alpha) != 1".to_string()
        } else {
            if is_reciprocal(minpoly) {
                return None;
            }
            "minimal polynomial not reciprocal".to_string()
        };
        log.push(Avoidance::ComplexPlace { place: r1 + i, test });
    }
    Some(log)
}

struct WData {
    label: String,
    coords: Vec<Vec<Rat>>,
    rank: usize,
}

/// Generators of O_{S(F)}^* ∩ O_S^* up to finite index, as coordinate vectors in K's S-unit basis.
fn w_subspace(k: &NumberField, s: &PrimeSet, basis: &SUnitBasis, f: &SubfieldDescriptor) -> Result<WData> {
    let mut gens: Vec<FieldElement> = unit_group(&f.field)?
        .2
        .iter()
        .map(|u| f.embed(k, u))
        .collect();
    for c in f.contracted.iter().filter(|c| c.fully_in_s()) {
        let w = class_order(&f.field, &c.prime.ideal, DEFAULT_ORDER_BOUND)?;
        gens.push(f.embed(k, &w.generator));
    }
    let coords = gens
        .iter()
        .map(|g| s_unit_coordinates(k, s, basis, &[(g.clone(), 1)]))
        .collect::<Result<Vec<_>>>()?;
    let rank = linalg::rank(&coords);
    Ok(WData {
        label: f.label(),
        coords,
        rank,
    })
}

/// Finds α ∈ O_S^* with v_P(α) < 0 at every finite P ∈ S that avoids each proper subfield's
/// S-unit subspace and each place-wise subgroup, and certifies it.
pub fn choose_alpha(
    k: &NumberField,
    s: &PrimeSet,
    basis: &SUnitBasis,
    subfields: &[SubfieldDescriptor],
    opts: &AlphaOptions,
) -> Result<AlphaCertificate> {
    let rank = basis.rank();
    for f in subfields {
        if rank_of_intersection(f) >= rank {
            return Err(Error::HypothesisFails(f.label()));
        }
    }
    let ws = subfields
        .iter()
        .map(|f| w_subspace(k, s, basis, f))
        .collect::<Result<Vec<_>>>()?;
    let r = basis.fund_units.len();
    let t = basis.s_gens.len();
    let inv_s: Vec<FieldElement> = basis.s_gens.iter().map(|b| k.inv(b)).collect::<Result<_>>()?;
    for m in 1..=opts.search_bound as i64 {
        let found = search_shell(r, t, m, |fe, ce| {
            let v: Vec<Rat> = fe.iter().map(|&x| rat(x)).chain(ce.iter().map(|&c| rat(-c))).collect();
            let mut sub_log = Vec::new();
            for w in &ws {
                let mut rows = w.coords.clone();
                rows.push(v.clone());
                let with = linalg::rank(&rows);
                if with == w.rank {
                    return Ok(None);
                }
                sub_log.push(Avoidance::Subfield {
                    subfield: w.label.clone(),
                    w_rank: w.rank,
                    rank_with_alpha: with,
                });
            }
            let mut unit = k.one();
            for (u, &e) in basis.fund_units.iter().zip(fe) {
                unit = k.mul(&unit, &k.pow(u, e)?);
            }
            let mut rest = k.one();
            for (b, &c) in inv_s.iter().zip(ce) {
                rest = k.mul(&rest, &k.pow(b, c)?);
            }
            for c0 in 0..basis.torsion_order {
                let u = k.mul(&k.pow(&basis.torsion_gen, c0 as i64)?, &unit);
                let alpha = k.mul(&u, &rest);
                let minpoly = k.minimal_poly(&alpha);
                if minpoly.len() - 1 != k.degree() {
                    continue;
                }
                let Some(place_log) = infinite_place_checks(k, &alpha, &minpoly) else {
                    continue;
                };
                let exps = Exponents {
                    torsion: c0,
                    units: fe.to_vec(),
                    s_gens: ce.to_vec(),
                };
                let mut log = place_log;
                log.extend(sub_log.iter().cloned());
                return Ok(Some((alpha, u, minpoly, exps, log)));
            }
            Ok(None)
        })?;
        if let Some((alpha, u, minpoly, exps, mut log)) = found {
            let mut neg = Vec::new();
            for (i, p) in s.finite.iter().enumerate() {
                let v = valuation(k, &alpha, p)?;
                if v >= 0 {
                    return Err(Error::IdentityFailed(format!("v_P(alpha) = {v} at prime {i}")));
                }
                log.insert(i, Avoidance::FinitePlace { prime: i, valuation: v });
                neg.push(NegValuation {
                    prime: p.to_record(),
                    valuation: v,
                });
            }
            let ring_certificate = ring_certificate(k, basis, &alpha, &u, &exps.s_gens)?;
            let mut cert = AlphaCertificate {
                alpha,
                exponents: exps,
                max_norm: m as u32,
                neg_valuations: neg,
                generates_k: minpoly.len() - 1 == k.degree(),
                minimal_poly: minpoly,
                avoidance_log: log,
                absorbed_unit: u,
                ring_certificate,
                index_table: Vec::new(),
            };
            for &n in &opts.index_exponents {
                let st = zalpha_index(k, basis, &cert.alpha, n, opts.level_bound)?;
                cert.index_table.push(IndexEntry {
                    n,
                    index: st.index,
                    level: st.level,
                });
            }
            return Ok(cert);
        }
    }
    Err(Error::SearchExhausted(opts.search_bound))
}

/// κ_i = u^{-1} β_i^{c_i - 1} ∏_{j≠i} β_j^{c_j}: integral with κ_i α = β_i^{-1}.
pub fn ring_certificate(
    k: &NumberField,
    basis: &SUnitBasis,
    alpha: &FieldElement,
    unit: &FieldElement,
    c: &[i64],
) -> Result<Vec<RingWitness>> {
    let uinv = k.inv(unit)?;
    let mut out = Vec::new();
    for (i, beta) in basis.s_gens.iter().enumerate() {
        let mut kappa = uinv.clone();
        for (j, b) in basis.s_gens.iter().enumerate() {
            let e = if i == j { c[j] - 1 } else { c[j] };
            kappa = k.mul(&kappa, &k.pow(b, e)?);
        }
        if !k.is_integral(&kappa) || k.mul(&kappa, alpha) != k.inv(beta)? {
            return Err(Error::IdentityFailed(format!("ring certificate for generator {i}")));
        }
        out.push(RingWitness {
            beta: beta.clone(),
            kappa,
        });
    }
    Ok(out)
}

/// [O_S : Z[α^n]] by the level filtration Λ_k = B^{-k} O_K, B = ∏ β_i.
pub fn zalpha_index(
    k: &NumberField,
    basis: &SUnitBasis,
    alpha: &FieldElement,
    n: u32,
    level_bound: u32,
) -> Result<Stabilized> {
    if n == 0 {
        return Err(Error::InvalidInput("exponent must be positive".into()));
    }
    let filt = Filtration::new(k, basis.base_product(k));
    let gen = k.pow(alpha, n as i64)?;
    let mut pw = vec![k.one()];
    filtration::stabilize(&filt, k.degree(), level_bound, |lv, d| {
        while pw.len() <= d {
            let next = k.mul(pw.last().unwrap(), &gen);
            pw.push(next);
        }
        Ok(filt.lattice_of(lv, &pw[..=d]))
    })
}

/// Number of sampled rational primes whose K-primes outside S all give v_Q(x) = 0.
pub fn check_support(k: &NumberField, s: &PrimeSet, x: &FieldElement, samples: usize) -> Result<bool> {
    let mut seen = 0;
    for p in crate::arith::primes_up_to(10_000) {
        if seen >= samples {
            break;
        }
        let pi = Int::from(p);
        let Ok(factors) = factor_rational_prime(k, &pi) else {
            continue;
        };
        for (q, _) in factors {
            if s.contains(&q) {
                continue;
            }
            if seen >= samples {
                break;
            }
            seen += 1;
            if valuation(k, x, &q)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};

    fn gaussian() -> NumberField {
        NumberField::quadratic_from_d(-1).unwrap()
    }

    fn primes_over(k: &NumberField, p: i64) -> Vec<PrimeIdeal> {
        factor_rational_prime(k, &int(p)).unwrap().into_iter().map(|x| x.0).collect()
    }

    #[test]
    fn example_i_ranks() {
        let k = gaussian();
        let s = PrimeSet::new(&k, primes_over(&k, 2)).unwrap();
        assert_eq!(s.card(), 2);
        let b = s_unit_basis(&k, &s).unwrap();
        assert_eq!(b.rank(), 1);
        assert_eq!(b.torsion_order, 4);
        let subs = proper_subfields(&k, &s).unwrap();
        assert_eq!(rank_of_intersection(&subs[0]), 1);
        let cm = is_cm(&k, &subs).unwrap();
        assert_eq!(cm.d, NumberField::rationals().from_int(1));
        assert!(matches!(
            choose_alpha(&k, &s, &b, &subs, &AlphaOptions::default()),
            Err(Error::HypothesisFails(_))
        ));
    }

    #[test]
    fn example_ii_alpha() {
        let k = gaussian();
        let ps = primes_over(&k, 5);
        // 2+i first, then 2-i
        let s = PrimeSet::new(&k, vec![ps[1].clone(), ps[0].clone()]).unwrap();
        let b = s_unit_basis(&k, &s).unwrap();
        assert_eq!(b.s_gens[0], FieldElement::new(vec![rat(2), rat(1)]));
        assert_eq!(b.s_gens[1], FieldElement::new(vec![rat(2), rat(-1)]));
        let subs = proper_subfields(&k, &s).unwrap();
        assert_eq!(rank_of_intersection(&subs[0]), 1);
        assert!(is_cm(&k, &subs).is_some());
        let cert = choose_alpha(&k, &s, &b, &subs, &AlphaOptions::default()).unwrap();
        let expected = k.inv(&k.mul(&b.s_gens[0], &k.pow(&b.s_gens[1], 2).unwrap())).unwrap();
        assert_eq!(cert.alpha, expected);
        assert_eq!(cert.exponents.s_gens, vec![1, 2]);
        assert!(cert.generates_k);
        assert!(cert.index_table.iter().all(|e| e.index > Int::zero()));
        assert!(check_support(&k, &s, &cert.alpha, 20).unwrap());
    }

    #[test]
    fn rationals_at_two() {
        let q = NumberField::rationals();
        let s = PrimeSet::new(&q, primes_over(&q, 2)).unwrap();
        let b = s_unit_basis(&q, &s).unwrap();
        assert_eq!(b.s_gens, vec![q.from_int(2)]);
        let cert = choose_alpha(&q, &s, &b, &[], &AlphaOptions::default()).unwrap();
        assert_eq!(cert.alpha, q.from_rat(ratio(1, 2)));
        assert_eq!(cert.index_table.iter().map(|e| e.index.clone()).collect::<Vec<_>>(), vec![int(1); 3]);
    }

    #[test]
    fn split_prime_in_real_quadratic() {
        let k = NumberField::quadratic_from_d(2).unwrap();
        let p = PrimeIdeal::from_prime_ideal(
            &k,
            crate::ideal::IntegralIdeal::principal(&k, &FieldElement::new(vec![rat(3), rat(1)])).unwrap(),
            &int(7),
        )
        .unwrap();
        let s = PrimeSet::new(&k, vec![p]).unwrap();
        assert_eq!(s.card(), 3);
        let b = s_unit_basis(&k, &s).unwrap();
        assert_eq!(b.rank(), 2);
        let subs = proper_subfields(&k, &s).unwrap();
        assert_eq!(rank_of_intersection(&subs[0]), 0);
        assert!(is_cm(&k, &subs).is_none());
        let cert = choose_alpha(&k, &s, &b, &subs, &AlphaOptions::default()).unwrap();
        assert!(cert.generates_k);
        let coords = s_unit_coordinates(&k, &s, &b, &[(cert.alpha.clone(), 1)]).unwrap();
        assert_eq!(coords, vec![rat(cert.exponents.units[0]), rat(-cert.exponents.s_gens[0])]);
    }

    #[test]
    fn unit_log_recovers_exponents() {
        let k = NumberField::quadratic_from_d(3).unwrap();
        let s = PrimeSet::new(&k, primes_over(&k, 3)).unwrap();
        let b = s_unit_basis(&k, &s).unwrap();
        let eps = &b.fund_units[0];
        let x = k.mul(&k.pow(eps, -7).unwrap(), &k.from_int(-1));
        assert_eq!(unit_log(&k, &b, &[(x, 1)]).unwrap(), vec![rat(-7)]);
    }

    #[test]
    fn search_shell_order() {
        let mut seen = Vec::new();
        let _ = search_shell::<()>(1, 1, 2, |f, c| {
            seen.push((f[0], c[0]));
            Ok(None)
        });
        assert_eq!(seen, vec![(-2, 1), (-2, 2), (-1, 2), (0, 2), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn too_small() {
        let k = gaussian();
        let s = PrimeSet::new(&k, vec![]).unwrap();
        assert_eq!(s_unit_basis(&k, &s).unwrap_err(), Error::CardinalityTooSmall(1));
    }
}
