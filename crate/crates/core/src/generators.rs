//! Case classification and the generator triple γ = diag(α, α^{-1}), ψ1 = E21(h), ψ2 = E12(h)
//! or E12(h√-d).

use serde::Serialize;

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::field::{FieldElement, NumberField};
use crate::filtration::{self, Filtration, Stabilized};
use crate::sunits::{
    choose_alpha, is_cm, proper_subfields, rank_of_intersection, s_unit_basis, AlphaCertificate, AlphaOptions,
    PrimeSet, SUnitBasis, SubfieldDescriptor,
};

/// A 2×2 matrix over K. Emitted generators have determinant 1; the same type carries the
/// GL2 conjugators of the identity suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SL2Element {
    pub entries: [[FieldElement; 2]; 2],
}

impl SL2Element {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Self {
        Self {
            entries: [[a, b], [c, d]],
        }
    }

    pub fn identity(k: &NumberField) -> Self {
        Self::new(k.one(), k.zero(), k.zero(), k.one())
    }

    pub fn diag(k: &NumberField, a: &FieldElement) -> Result<Self> {
        Ok(Self::new(a.clone(), k.zero(), k.zero(), k.inv(a)?))
    }

    /// [[1, x], [0, 1]]
    pub fn e12(k: &NumberField, x: &FieldElement) -> Self {
        Self::new(k.one(), x.clone(), k.zero(), k.one())
    }

    /// [[1, 0], [x, 1]]
    pub fn e21(k: &NumberField, x: &FieldElement) -> Self {
        Self::new(k.one(), k.zero(), x.clone(), k.one())
    }

    pub fn mul(&self, k: &NumberField, o: &Self) -> Self {
        let a = &self.entries;
        let b = &o.entries;
        let e = |i: usize, j: usize| k.mul(&a[i][0], &b[0][j]).add(&k.mul(&a[i][1], &b[1][j]));
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self, k: &NumberField) -> FieldElement {
        let a = &self.entries;
        k.mul(&a[0][0], &a[1][1]).sub(&k.mul(&a[0][1], &a[1][0]))
    }

    pub fn inv(&self, k: &NumberField) -> Result<Self> {
        let di = k.inv(&self.det(k))?;
        let a = &self.entries;
        Ok(Self::new(
            k.mul(&a[1][1], &di),
            k.mul(&a[0][1], &di).neg(),
            k.mul(&a[1][0], &di).neg(),
            k.mul(&a[0][0], &di),
        ))
    }

    pub fn pow(&self, k: &NumberField, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv(k)? } else { self.clone() };
        let mut out = Self::identity(k);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(k, &base);
        }
        Ok(out)
    }

    /// g·self·g^{-1}
    pub fn conjugate_by(&self, k: &NumberField, g: &Self) -> Result<Self> {
        Ok(g.mul(k, self).mul(k, &g.inv(k)?))
    }

    pub fn is_identity(&self, k: &NumberField) -> bool {
        *self == Self::identity(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    #[serde(rename = "1")]
    Case1,
    #[serde(rename = "2")]
    Case2,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankRow {
    pub subfield: String,
    pub rank_of_intersection: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseClassification {
    pub case: Case,
    /// Index into the instance's subfield list.
    pub witness_subfield: Option<usize>,
    pub rank_table: Vec<RankRow>,
    pub split_check: Option<bool>,
}

/// K, S with the S-unit basis and the proper subfields (with S(F)) computed once.
#[derive(Clone, Debug)]
pub struct Instance {
    pub field: NumberField,
    pub s: PrimeSet,
    pub basis: SUnitBasis,
    pub subfields: Vec<SubfieldDescriptor>,
}

impl Instance {
    pub fn new(field: NumberField, s: PrimeSet) -> Result<Self> {
        s.check_cardinality()?;
        let basis = s_unit_basis(&field, &s)?;
        let subfields = proper_subfields(&field, &s)?;
        Ok(Self {
            field,
            s,
            basis,
            subfields,
        })
    }
}

/// True iff no prime of S(F) splits in K (each has a single prime above it).
pub fn split_prime_check(f: &SubfieldDescriptor) -> bool {
    f.contracted.iter().all(|c| c.is_nonsplit())
}

pub fn classify_case(inst: &Instance) -> Result<CaseClassification> {
    let rank = inst.basis.rank();
    let rank_table: Vec<RankRow> = inst
        .subfields
        .iter()
        .map(|f| RankRow {
            subfield: f.label(),
            rank_of_intersection: rank_of_intersection(f),
            rank,
        })
        .collect();
    let Some(w) = rank_table.iter().position(|r| r.rank_of_intersection >= rank) else {
        return Ok(CaseClassification {
            case: Case::Case1,
            witness_subfield: None,
            rank_table,
            split_check: None,
        });
    };
    let label = inst.subfields[w].label();
    match is_cm(&inst.field, &inst.subfields) {
        Some(cm) if cm.subfield == w => {}
        _ => return Err(Error::InconsistentCM(label)),
    }
    let split = split_prime_check(&inst.subfields[w]);
    if !split {
        return Err(Error::InconsistentCM(format!("{label}: a prime of S(F) splits in K")));
    }
    Ok(CaseClassification {
        case: Case::Case2,
        witness_subfield: Some(w),
        rank_table,
        split_check: Some(split),
    })
}

/// Data of the CM case: F, S(F), its S-unit basis and d with K = F(√-d).
#[derive(Clone, Debug)]
pub struct CmContext {
    pub sub: SubfieldDescriptor,
    pub s_f: PrimeSet,
    pub basis_f: SUnitBasis,
    /// d ∈ F.
    pub d: FieldElement,
    pub d_in_k: FieldElement,
    pub sqrt_minus_d: FieldElement,
    /// α^h as an element of F.
    pub alpha_f: FieldElement,
}

#[derive(Clone, Debug)]
pub struct GeneratorTriple {
    pub case: CaseClassification,
    /// α^h (the α of the matrices).
    pub alpha: FieldElement,
    /// The certified α before raising to the h-th power (in F for Case 2).
    pub certificate: AlphaCertificate,
    pub h: u64,
    pub gamma: SL2Element,
    pub psi1: SL2Element,
    pub psi2: SL2Element,
    pub cm: Option<CmContext>,
}

#[derive(Serialize)]
pub struct CmRecord {
    pub subfield: String,
    pub d: FieldElement,
    pub sqrt_minus_d: FieldElement,
}

#[derive(Serialize)]
pub struct TripleRecord {
    pub case: Case,
    pub alpha: FieldElement,
    pub h: u64,
    pub gamma: SL2Element,
    pub psi1: SL2Element,
    pub psi2: SL2Element,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cm: Option<CmRecord>,
}

impl GeneratorTriple {
    pub fn to_record(&self) -> TripleRecord {
        TripleRecord {
            case: self.case.case,
            alpha: self.alpha.clone(),
            h: self.h,
            gamma: self.gamma.clone(),
            psi1: self.psi1.clone(),
            psi2: self.psi2.clone(),
            cm: self.cm.as_ref().map(|c| CmRecord {
                subfield: c.sub.label(),
                d: c.d.clone(),
                sqrt_minus_d: c.sqrt_minus_d.clone(),
            }),
        }
    }

    /// The upper entry of ψ2 divided by h: 1 or √-d.
    pub fn upper_unit(&self, k: &NumberField) -> FieldElement {
        match &self.cm {
            Some(c) => c.sqrt_minus_d.clone(),
            None => k.one(),
        }
    }

    pub fn matrices(&self) -> [&SL2Element; 3] {
        [&self.gamma, &self.psi1, &self.psi2]
    }
}

pub fn build_generators(inst: &Instance, h: u64, opts: &AlphaOptions) -> Result<GeneratorTriple> {
    if h == 0 {
        return Err(Error::InvalidInput("h must be positive".into()));
    }
    let k = &inst.field;
    let case = classify_case(inst)?;
    let hk = k.from_int(h as i64);
    let (certificate, alpha, cm) = match case.case {
        Case::Case1 => {
            let cert = choose_alpha(k, &inst.s, &inst.basis, &inst.subfields, opts)?;
            let alpha = k.pow(&cert.alpha, h as i64)?;
            (cert, alpha, None)
        }
        Case::Case2 => {
            let w = case.witness_subfield.expect("case 2 witness");
            let sub = inst.subfields[w].clone();
            let cm = is_cm(k, &inst.subfields).expect("checked by classify_case");
            if !sub.contracted.iter().all(|c| c.fully_in_s()) {
                return Err(Error::InconsistentCM("S(F)-units are not all S-units".into()));
            }
            let f = &sub.field;
            let s_f = sub.s_of_f()?;
            let basis_f = s_unit_basis(f, &s_f)?;
            let subs_f = proper_subfields(f, &s_f)?;
            let cert = choose_alpha(f, &s_f, &basis_f, &subs_f, opts)?;
            let alpha_f = f.pow(&cert.alpha, h as i64)?;
            let alpha = sub.embed(k, &alpha_f);
            let d_in_k = sub.embed(k, &cm.d);
            if k.mul(&cm.sqrt_minus_d, &cm.sqrt_minus_d) != d_in_k.neg() {
                return Err(Error::IdentityFailed("(sqrt(-d))^2 = -d".into()));
            }
            let ctx = CmContext {
                sub,
                s_f,
                basis_f,
                d: cm.d,
                d_in_k,
                sqrt_minus_d: cm.sqrt_minus_d,
                alpha_f,
            };
            (cert, alpha, Some(ctx))
        }
    };
    let upper = match &cm {
        Some(c) => k.mul(&hk, &c.sqrt_minus_d),
        None => hk.clone(),
    };
    let triple = GeneratorTriple {
        gamma: SL2Element::diag(k, &alpha)?,
        psi1: SL2Element::e21(k, &hk),
        psi2: SL2Element::e12(k, &upper),
        case,
        alpha,
        certificate,
        h,
        cm,
    };
    for m in triple.matrices() {
        if m.det(k) != k.one() {
            return Err(Error::IdentityFailed("determinant 1".into()));
        }
    }
    Ok(triple)
}

/// [O_S : Z[α^n][√-d]] in Case 2, over the level filtration of K with base B_F.
pub fn cm_ring_index(inst: &Instance, triple: &GeneratorTriple, n: u32, level_bound: u32) -> Result<Stabilized> {
    let k = &inst.field;
    let cm = triple
        .cm
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("not a CM triple".into()))?;
    let base = cm.sub.embed(k, &cm.basis_f.base_product(&cm.sub.field));
    let filt = Filtration::new(k, base);
    let gen = k.pow(&cm.sub.embed(k, &triple.certificate.alpha), n as i64)?;
    filtration::stabilize(&filt, k.degree(), level_bound, |lv, d| {
        let pw = filtration::powers(k, &gen, d);
        let mut gens = pw.clone();
        gens.extend(pw.iter().map(|x| k.mul(x, &cm.sqrt_minus_d)));
        Ok(filt.lattice_of(lv, &gens))
    })
}

/// Rational h as a field element of K.
pub fn h_element(k: &NumberField, h: u64) -> FieldElement {
    k.from_rat(Rat::from_integer((h as i64).into()))
}
