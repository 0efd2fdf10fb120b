//! Exact replay of the conjugation and Bruhat identities, the ideal ladder, elementary
//! word witnesses and reductions modulo primes outside S.

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{clear_denominators, rat, rat_from_int, Int, Rat};
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::filtration::{self, Filtration, DEFAULT_LEVEL_BOUND};
use crate::generators::{GeneratorTriple, Instance, SL2Element};
use crate::ideal::{factor_rational_prime, valuation, PrimeIdeal, PrimeRecord};
use crate::linalg::{self, IntLattice, LatticeIndex};
use crate::residue::{self, ResidueField};
use crate::sunits::PrimeSet;

pub const DEFAULT_N_SEARCH: u32 = 24;
pub const DEFAULT_WITNESS_DEGREE: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NChoice {
    Fixed(u32),
    Search,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub r_range: (i64, i64),
    pub s_range: (i64, i64),
    pub n: NChoice,
    pub n_search_max: u32,
    pub primes: usize,
    pub q_bound: u64,
    pub witness_samples: usize,
    pub seed: u64,
    pub level_bound: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            r_range: (-5, 5),
            s_range: (-5, 5),
            n: NChoice::Search,
            n_search_max: DEFAULT_N_SEARCH,
            primes: 10,
            q_bound: 10_000,
            witness_samples: 100,
            seed: 0,
            level_bound: DEFAULT_LEVEL_BOUND,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub instances: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

fn expect_eq(lhs: &SL2Element, rhs: &SL2Element, what: impl Fn() -> String) -> Result<()> {
    if lhs != rhs {
        return Err(Error::IdentityFailed(what()));
    }
    Ok(())
}

/// u = [[1, 0], [1/(h√-d), 1]]
pub fn bruhat_u(k: &NumberField, triple: &GeneratorTriple) -> Result<SL2Element> {
    let cm = triple.cm.as_ref().ok_or_else(|| Error::InvalidInput("not a CM triple".into()))?;
    let hs = k.mul(&k.from_int(triple.h as i64), &cm.sqrt_minus_d);
    Ok(SL2Element::e21(k, &k.inv(&hs)?))
}

/// v·φ with v = [[1, 1/h], [0, 1]] and φ = diag(1, 1/√-d).
pub fn bruhat_v_phi(k: &NumberField, triple: &GeneratorTriple) -> Result<SL2Element> {
    let cm = triple.cm.as_ref().ok_or_else(|| Error::InvalidInput("not a CM triple".into()))?;
    let v = SL2Element::e12(k, &k.from_rat(Rat::new(Int::one(), Int::from(triple.h))));
    let phi = SL2Element::new(k.one(), k.zero(), k.zero(), k.inv(&cm.sqrt_minus_d)?);
    Ok(v.mul(k, &phi))
}

/// Checks γ^{-r}ψ1^sγ^r = E21(sα^{2r}h) and γ^rψ2^sγ^{-r} = E12(sα^{2r}h·u) over the given
/// ranges, and in the CM case the two Bruhat identities at the sample points.
pub fn identity_suite(
    k: &NumberField,
    triple: &GeneratorTriple,
    r_range: (i64, i64),
    s_range: (i64, i64),
    samples: &[FieldElement],
) -> Result<IdentityReport> {
    let mut checks = Vec::new();
    for (name, m) in ["gamma", "psi1", "psi2"].iter().zip(triple.matrices()) {
        if m.det(k) != k.one() {
            return Err(Error::IdentityFailed(format!("det {name} = 1")));
        }
    }
    checks.push(IdentityCheck {
        name: "det = 1".into(),
        instances: 3,
    });
    let h = k.from_int(triple.h as i64);
    let up = triple.upper_unit(k);
    let a2 = k.mul(&triple.alpha, &triple.alpha);
    let mut count = 0;
    for r in r_range.0..=r_range.1 {
        let g = triple.gamma.pow(k, r)?;
        let gi = triple.gamma.pow(k, -r)?;
        let a2r = k.pow(&a2, r)?;
        for s in s_range.0..=s_range.1 {
            let x = k.mul(&k.mul(&a2r, &h), &k.from_int(s));
            let lhs = gi.mul(k, &triple.psi1.pow(k, s)?).mul(k, &g);
            expect_eq(&lhs, &SL2Element::e21(k, &x), || format!("lower conjugation r={r} s={s}"))?;
            let lhs = g.mul(k, &triple.psi2.pow(k, s)?).mul(k, &gi);
            expect_eq(&lhs, &SL2Element::e12(k, &k.mul(&x, &up)), || {
                format!("upper conjugation r={r} s={s}")
            })?;
            count += 2;
        }
    }
    checks.push(IdentityCheck {
        name: "gamma conjugation of psi1, psi2".into(),
        instances: count,
    });
    if let Some(cm) = &triple.cm {
        let u = bruhat_u(k, triple)?;
        let vphi = bruhat_v_phi(k, triple)?;
        let h2d = k.mul(&k.mul(&h, &h), &cm.d_in_k);
        for (i, x) in samples.iter().enumerate() {
            let lhs = SL2Element::e21(k, x).conjugate_by(k, &triple.psi2)?;
            let rhs = SL2Element::e12(k, &k.mul(&h2d, x)).conjugate_by(k, &u)?;
            expect_eq(&lhs, &rhs, || format!("bruhat1 sample {i}"))?;
            let lhs = SL2Element::e12(k, &k.mul(x, &cm.sqrt_minus_d)).conjugate_by(k, &triple.psi1)?;
            let rhs = SL2Element::e21(k, &k.mul(&h2d, x)).conjugate_by(k, &vphi)?;
            expect_eq(&lhs, &rhs, || format!("bruhat2 sample {i}"))?;
            let e = SL2Element::e21(k, x);
            expect_eq(&e.conjugate_by(k, &u)?, &e, || format!("u centralizes E21, sample {i}"))?;
        }
        checks.push(IdentityCheck {
            name: "bruhat".into(),
            instances: 3 * samples.len(),
        });
    }
    Ok(IdentityReport { checks, passed: true })
}

/// ^uγ^{-N}·γ^N = E21((α^{2N}-1)√-d/(hd)) and ^{vφ}γ^N·γ^{-N} = E12((1-α^{2N})/h).
pub fn commutator_identities(k: &NumberField, triple: &GeneratorTriple, n: u32) -> Result<()> {
    let cm = triple.cm.as_ref().ok_or_else(|| Error::InvalidInput("not a CM triple".into()))?;
    let h = k.from_int(triple.h as i64);
    let a2n = k.pow(&triple.alpha, 2 * n as i64)?;
    let gn = triple.gamma.pow(k, n as i64)?;
    let gni = triple.gamma.pow(k, -(n as i64))?;
    let u = bruhat_u(k, triple)?;
    let lhs = gni.conjugate_by(k, &u)?.mul(k, &gn);
    let x = k.div(&k.mul(&a2n.sub(&k.one()), &cm.sqrt_minus_d), &k.mul(&h, &cm.d_in_k))?;
    expect_eq(&lhs, &SL2Element::e21(k, &x), || format!("u-commutator N={n}"))?;
    let lhs = gn.conjugate_by(k, &bruhat_v_phi(k, triple)?)?.mul(k, &gni);
    let y = k.div(&k.one().sub(&a2n), &h)?;
    expect_eq(&lhs, &SL2Element::e12(k, &y), || format!("v-commutator N={n}"))
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderStep {
    #[serde(rename = "N")]
    pub n: u32,
    /// M with q = M·O_S, or the failure that stopped this N.
    #[serde(with = "crate::serde_rat::opt_int")]
    pub q_index: Option<Int>,
    pub level: Option<u32>,
    pub table: Vec<LatticeIndex>,
    pub c_in_a: bool,
    pub q_contained: bool,
    pub identities: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealLadder {
    /// a = m·O_S (m·O_{S(F)} in the CM case).
    #[serde(with = "crate::serde_rat::int")]
    pub m: Int,
    pub m_level: u32,
    pub m_table: Vec<LatticeIndex>,
    /// Level shift with a ∩ Λ_k = mΛ_{k+δ} ∩ Λ_k.
    pub delta: u32,
    pub a_contained: bool,
    /// h²d, the factor with b = h²d·a.
    pub b_factor: Option<FieldElement>,
    pub steps: Vec<LadderStep>,
    #[serde(rename = "selected_N")]
    pub selected_n: Option<u32>,
}

impl IdealLadder {
    pub fn ok(&self) -> bool {
        self.a_contained
            && (self.steps.is_empty() || self.steps.iter().any(|s| s.q_index.is_some() && s.c_in_a && s.q_contained && s.identities))
    }
}

fn level_shift(field: &NumberField, s: &PrimeSet, orders: &[u64], m: &Int) -> Result<u32> {
    let mut delta = 0u32;
    let me = field.from_rat(rat_from_int(m));
    for (p, &a) in s.finite.iter().zip(orders) {
        let v = valuation(field, &me, p)? as u64;
        delta = delta.max(v.div_ceil(a) as u32);
    }
    Ok(delta)
}

fn a_level(filt: &Filtration, m: &Int, delta: u32, lv: u32) -> IntLattice {
    let gens: Vec<FieldElement> = filt
        .level_basis(lv + delta)
        .iter()
        .map(|b| b.scale(&rat_from_int(m)))
        .collect();
    filt.lattice_of(lv, &gens)
}

fn scaled_powers(field: &NumberField, scale: &FieldElement, x: &FieldElement, d: usize) -> Vec<FieldElement> {
    filtration::powers(field, x, d)
        .iter()
        .map(|p| field.mul(p, scale))
        .collect()
}

/// The ladder a → b → c → q for the given N values (empty in Case 1).
pub fn ideal_ladder(inst: &Instance, triple: &GeneratorTriple, ns: &[u32], level_bound: u32) -> Result<IdealLadder> {
    let k = &inst.field;
    match &triple.cm {
        None => {
            let filt = Filtration::new(k, inst.basis.base_product(k));
            let h = k.from_int(triple.h as i64);
            let a2 = k.mul(&triple.alpha, &triple.alpha);
            let st = filtration::stabilize(&filt, k.degree(), level_bound, |lv, d| {
                Ok(filt.lattice_of(lv, &scaled_powers(k, &h, &a2, d)))
            })?;
            let delta = level_shift(k, &inst.s, &inst.basis.orders(), &st.index)?;
            let mut a_contained = true;
            for lv in st.level..=st.level + 2 {
                let l = filt.lattice_of(lv, &scaled_powers(k, &h, &a2, k.degree() * (lv as usize + 3)));
                a_contained &= l.contains_lattice(&a_level(&filt, &st.index, delta, lv));
            }
            Ok(IdealLadder {
                m: st.index,
                m_level: st.level,
                m_table: st.table,
                delta,
                a_contained,
                b_factor: None,
                steps: Vec::new(),
                selected_n: None,
            })
        }
        Some(cm) => {
            let f = &cm.sub.field;
            let base_f = cm.basis_f.base_product(f);
            let filt_f = Filtration::new(f, base_f.clone());
            let filt_k = Filtration::new(k, cm.sub.embed(k, &base_f));
            let h = f.from_int(triple.h as i64);
            let a2 = f.mul(&cm.alpha_f, &cm.alpha_f);
            let st = filtration::stabilize(&filt_f, f.degree(), level_bound, |lv, d| {
                Ok(filt_f.lattice_of(lv, &scaled_powers(f, &h, &a2, d)))
            })?;
            let m = st.index.clone();
            let delta = level_shift(f, &cm.s_f, &cm.basis_f.orders(), &m)?;
            let mut a_contained = true;
            for lv in st.level..=st.level + 2 {
                let l = filt_f.lattice_of(lv, &scaled_powers(f, &h, &a2, f.degree() * (lv as usize + 3)));
                a_contained &= l.contains_lattice(&a_level(&filt_f, &m, delta, lv));
            }
            let b_factor = f.mul(&f.mul(&h, &h), &cm.d);
            let mut steps = Vec::new();
            let mut selected = None;
            for &n in ns {
                let step = ladder_step(k, triple, &filt_f, &filt_k, &m, delta, &a2, n, level_bound);
                let good = step.q_index.is_some() && step.c_in_a && step.q_contained && step.identities;
                steps.push(step);
                if good {
                    selected = Some(n);
                    break;
                }
            }
            Ok(IdealLadder {
                m,
                m_level: st.level,
                m_table: st.table,
                delta,
                a_contained,
                b_factor: Some(b_factor),
                steps,
                selected_n: selected,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn ladder_step(
    k: &NumberField,
    triple: &GeneratorTriple,
    filt_f: &Filtration,
    filt_k: &Filtration,
    m: &Int,
    delta: u32,
    a2: &FieldElement,
    n: u32,
    level_bound: u32,
) -> LadderStep {
    let cm = triple.cm.as_ref().unwrap();
    let f = filt_f.field;
    let mut step = LadderStep {
        n,
        q_index: None,
        level: None,
        table: Vec::new(),
        c_in_a: false,
        q_contained: false,
        identities: false,
        error: None,
    };
    if let Err(e) = commutator_identities(k, triple, n) {
        step.error = Some(e.to_string());
        return step;
    }
    step.identities = true;
    let scale = match f.pow(a2, n as i64) {
        Ok(x) => x.sub(&f.one()),
        Err(e) => {
            step.error = Some(e.to_string());
            return step;
        }
    };
    let c_level = |lv: u32, d: usize| -> (IntLattice, IntLattice) {
        let a_lat = a_level(filt_f, m, delta, lv);
        let c = filt_f.lattice_of(lv, &scaled_powers(f, &scale, a2, d)).intersect(&a_lat);
        (c, a_lat)
    };
    let q_lattice = |lv: u32, c: &IntLattice| -> IntLattice {
        let mut gens = Vec::new();
        for row in &c.basis {
            let x = cm.sub.embed(k, &filt_f.element(lv, row));
            gens.push(k.mul(&x, &cm.sqrt_minus_d));
            gens.push(x);
        }
        filt_k.lattice_of(lv, &gens)
    };
    let res = filtration::stabilize(filt_k, k.degree(), level_bound, |lv, d| {
        let (c, _) = c_level(lv, d);
        Ok(q_lattice(lv, &c))
    });
    match res {
        Ok(st) => {
            let lv = st.level;
            let d = k.degree() * (lv as usize + 2);
            let (c, a_lat) = c_level(lv, d);
            step.c_in_a = a_lat.contains_lattice(&c);
            let lat = q_lattice(lv, &c);
            step.q_contained = lat.contains_lattice(&IntLattice::standard(k.degree()).scaled(&st.index));
            step.q_index = Some(st.index);
            step.level = Some(lv);
            step.table = st.table;
        }
        Err(e) => step.error = Some(e.to_string()),
    }
    step
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gen {
    Gamma,
    Psi1,
    Psi2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    pub gen: Gen,
    pub exp: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WitnessWord {
    pub letters: Vec<Letter>,
}

impl WitnessWord {
    pub fn evaluate(&self, k: &NumberField, triple: &GeneratorTriple) -> Result<SL2Element> {
        let mut out = SL2Element::identity(k);
        for l in &self.letters {
            let g = match l.gen {
                Gen::Gamma => &triple.gamma,
                Gen::Psi1 => &triple.psi1,
                Gen::Psi2 => &triple.psi2,
            };
            out = out.mul(k, &g.pow(k, l.exp)?);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Integer s with Σ s_j v_j = w, if any; reduced modulo the relation lattice so that the
/// highest-degree coefficients are small.
fn integer_solution(vs: &[Vec<Rat>], w: &[Rat]) -> Option<Vec<Int>> {
    let dim = w.len();
    let mut flat: Vec<Rat> = vs.iter().flatten().cloned().collect();
    flat.extend(w.iter().cloned());
    let (_, den) = clear_denominators(&flat);
    let scale = rat_from_int(&den);
    let to_int = |v: &[Rat]| -> Vec<Int> { v.iter().map(|x| (x * &scale).to_integer()).collect() };
    let a: Vec<Vec<Int>> = vs.iter().map(|v| to_int(v)).collect();
    let mut b = to_int(w);
    let (hm, u, r) = linalg::hnf_with_transform(&a, dim, true);
    let mut y = vec![Int::zero(); r];
    for i in 0..r {
        let c = hm[i].iter().position(|x| !x.is_zero())?;
        let (q, rem) = num_integer::Integer::div_rem(&b[c], &hm[i][c]);
        if !rem.is_zero() {
            return None;
        }
        for (bx, hx) in b.iter_mut().zip(&hm[i]) {
            *bx -= &q * hx;
        }
        y[i] = q;
    }
    if b.iter().any(|x| !x.is_zero()) {
        return None;
    }
    let m = vs.len();
    let mut s = vec![Int::zero(); m];
    for (yi, row) in y.iter().zip(&u) {
        for (sx, ux) in s.iter_mut().zip(row) {
            *sx += yi * ux;
        }
    }
    let kernel: Vec<Vec<Int>> = u[r..].iter().map(|row| row.iter().rev().cloned().collect()).collect();
    if kernel.is_empty() {
        return Some(s);
    }
    let lat = IntLattice::from_generators(&kernel, m);
    let rev: Vec<Int> = s.iter().rev().cloned().collect();
    let red = lat.reduce(&rev);
    // centre each pivot coordinate
    let mut red = red;
    for row in &lat.basis {
        let c = row.iter().position(|x| !x.is_zero()).unwrap();
        if &red[c] * Int::from(2) > row[c] {
            for (x, rx) in red.iter_mut().zip(row) {
                *x -= rx;
            }
        }
    }
    Some(red.into_iter().rev().collect())
}

/// Word in γ, ψ1, ψ2 evaluating to E12(target) (upper) or E21(target) (lower).
pub fn elementary_witness(
    k: &NumberField,
    triple: &GeneratorTriple,
    target: &FieldElement,
    side: Side,
    max_degree: usize,
) -> Result<WitnessWord> {
    if target.is_zero() {
        return Ok(WitnessWord::default());
    }
    let h = k.from_int(triple.h as i64);
    let unit = match side {
        Side::Upper => k.mul(&h, &triple.upper_unit(k)),
        Side::Lower => h,
    };
    let w = k.div(target, &unit)?;
    let a2 = k.mul(&triple.alpha, &triple.alpha);
    let pw = filtration::powers(k, &a2, max_degree);
    let mut sol = None;
    for d in 0..=max_degree {
        let vs: Vec<Vec<Rat>> = pw[..=d].iter().map(|x| x.coords.clone()).collect();
        if let Some(s) = integer_solution(&vs, &w.coords) {
            sol = Some(s);
            break;
        }
    }
    let s = sol.ok_or(Error::NotInLattice)?;
    let mut letters = Vec::new();
    for (j, sj) in s.iter().enumerate() {
        if sj.is_zero() {
            continue;
        }
        let e = sj.to_i64().ok_or(Error::NotInLattice)?;
        let j = j as i64;
        let (g, conj) = match side {
            Side::Upper => (Gen::Psi2, j),
            Side::Lower => (Gen::Psi1, -j),
        };
        if conj != 0 {
            letters.push(Letter { gen: Gen::Gamma, exp: conj });
        }
        letters.push(Letter { gen: g, exp: e });
        if conj != 0 {
            letters.push(Letter {
                gen: Gen::Gamma,
                exp: -conj,
            });
        }
    }
    let word = WitnessWord { letters };
    let expected = match side {
        Side::Upper => SL2Element::e12(k, target),
        Side::Lower => SL2Element::e21(k, target),
    };
    if word.evaluate(k, triple)? != expected {
        return Err(Error::IdentityFailed("witness word evaluation".into()));
    }
    Ok(word)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSample {
    pub side: Side,
    pub target: FieldElement,
    pub word_length: usize,
    pub ok: bool,
}

/// Pseudorandom targets h·u·Σ s_j α^{2j} with |s_j| ≤ 3, j ≤ 3, alternating sides.
pub fn sample_witnesses(k: &NumberField, triple: &GeneratorTriple, count: usize, seed: u64) -> Result<Vec<WitnessSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a2 = k.mul(&triple.alpha, &triple.alpha);
    let pw = filtration::powers(k, &a2, 3);
    let h = k.from_int(triple.h as i64);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let side = if i % 2 == 0 { Side::Upper } else { Side::Lower };
        let unit = match side {
            Side::Upper => k.mul(&h, &triple.upper_unit(k)),
            Side::Lower => h.clone(),
        };
        let mut t = k.zero();
        for p in &pw {
            t = t.add(&p.scale(&rat(rng.gen_range(-3..=3))));
        }
        let target = k.mul(&t, &unit);
        let (len, ok) = match elementary_witness(k, triple, &target, side, DEFAULT_WITNESS_DEGREE) {
            Ok(w) => (w.len(), true),
            Err(_) => (0, false),
        };
        out.push(WitnessSample {
            side,
            target,
            word_length: len,
            ok,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct BfsStats {
    pub radius: u32,
    pub states: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModPReport {
    pub prime: PrimeRecord,
    pub q: u64,
    pub reached_order: u64,
    pub expected: u64,
    pub pass: bool,
    pub bfs_stats: BfsStats,
}

/// Reduces the triple modulo P ∉ S and compares the generated subgroup with SL2(F_q).
pub fn modp_surjectivity(inst: &Instance, triple: &GeneratorTriple, prime: &PrimeIdeal, q_bound: u64) -> Result<ModPReport> {
    let k = &inst.field;
    if inst.s.contains(prime) {
        return Err(Error::PrimeInS);
    }
    let q = prime.residue_size();
    let bound = q_bound.min(residue::MAX_RESIDUE_SIZE);
    match q.to_u64() {
        Some(v) if v <= bound => {}
        _ => return Err(Error::ResidueFieldTooLarge(q.to_u64().unwrap_or(u64::MAX), bound)),
    }
    let rf = ResidueField::new(k, prime)?;
    let unit = inst.basis.base_product(k);
    let mut gens = Vec::new();
    for m in triple.matrices() {
        let mut e = [0u32; 4];
        for (i, x) in m.entries.iter().flatten().enumerate() {
            e[i] = rf.reduce(k, x, &unit)?;
        }
        if residue::mat_det(&rf, &e) != rf.one() {
            return Err(Error::IdentityFailed("reduced determinant".into()));
        }
        gens.push(e);
    }
    let (reached, radius) = residue::generated_order(&rf, &gens);
    let expected = rf.q * (rf.q * rf.q - 1);
    Ok(ModPReport {
        prime: prime.to_record(),
        q: rf.q,
        reached_order: reached,
        expected,
        pass: reached == expected,
        bfs_stats: BfsStats { radius, states: reached },
    })
}

/// The first `count` primes P ∉ S with N(P) ≤ q_bound, P ∤ h, P ∤ 2d (CM case) and P not
/// dividing any of `exclude`, ordered by rational prime then HNF.
pub fn admissible_primes(
    inst: &Instance,
    triple: &GeneratorTriple,
    count: usize,
    q_bound: u64,
    exclude: &[Int],
) -> Vec<PrimeIdeal> {
    let k = &inst.field;
    let bound = q_bound.min(residue::MAX_RESIDUE_SIZE);
    let mut bad: Vec<FieldElement> = vec![k.from_int(triple.h as i64)];
    if let Some(cm) = &triple.cm {
        bad.push(cm.d_in_k.scale(&rat(2)));
    }
    bad.extend(exclude.iter().filter(|x| !x.is_zero()).map(|x| k.from_rat(rat_from_int(x))));
    let mut out = Vec::new();
    for p in crate::arith::primes_up_to(bound) {
        if out.len() >= count {
            break;
        }
        let Ok(factors) = factor_rational_prime(k, &Int::from(p)) else {
            continue;
        };
        for (pr, _) in factors {
            if out.len() >= count {
                break;
            }
            if inst.s.contains(&pr) || pr.residue_size() > Int::from(bound) {
                continue;
            }
            if bad.iter().any(|x| valuation(k, x, &pr).map(|v| v > 0).unwrap_or(true)) {
                continue;
            }
            out.push(pr);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub identities: IdentityReport,
    pub ladder: IdealLadder,
    pub witnesses: Vec<WitnessSample>,
    pub witnesses_passed: usize,
    pub modp: Vec<ModPReport>,
    pub overall: bool,
}

pub fn verify(inst: &Instance, triple: &GeneratorTriple, opts: &VerifyOptions) -> Result<VerificationReport> {
    let k = &inst.field;
    let ns: Vec<u32> = match opts.n {
        NChoice::Fixed(n) => vec![n],
        NChoice::Search => (1..=opts.n_search_max).collect(),
    };
    let ladder = ideal_ladder(inst, triple, &ns, opts.level_bound)?;
    let samples = ladder_samples(inst, triple, &ladder)?;
    let identities = identity_suite(k, triple, opts.r_range, opts.s_range, &samples)?;
    let witnesses = sample_witnesses(k, triple, opts.witness_samples, opts.seed)?;
    let witnesses_passed = witnesses.iter().filter(|w| w.ok).count();
    let mut exclude = vec![ladder.m.clone()];
    exclude.extend(ladder.steps.iter().filter_map(|s| s.q_index.clone()));
    let primes = admissible_primes(inst, triple, opts.primes, opts.q_bound, &exclude);
    let modp: Vec<ModPReport> = primes
        .par_iter()
        .map(|p| modp_surjectivity(inst, triple, p, opts.q_bound))
        .collect::<Result<Vec<_>>>()?;
    let overall = identities.passed
        && ladder.ok()
        && witnesses_passed == witnesses.len()
        && modp.iter().all(|r| r.pass);
    Ok(VerificationReport {
        identities,
        ladder,
        witnesses,
        witnesses_passed,
        modp,
        overall,
    })
}

/// Elements of a (embedded in K) used as Bruhat sample points.
fn ladder_samples(inst: &Instance, triple: &GeneratorTriple, ladder: &IdealLadder) -> Result<Vec<FieldElement>> {
    let k = &inst.field;
    let Some(cm) = &triple.cm else {
        return Ok(Vec::new());
    };
    let f = &cm.sub.field;
    let mr = rat_from_int(&ladder.m);
    let mut out = Vec::new();
    let binv = f.inv(&cm.basis_f.base_product(f))?;
    for x in [f.one(), cm.alpha_f.clone(), f.inv(&cm.alpha_f)?, binv, f.from_int(-3)] {
        out.push(cm.sub.embed(k, &x.scale(&mr)));
    }
    Ok(out)
}
