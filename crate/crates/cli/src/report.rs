use serde::Serialize;

use sgen2_core::field::Tier;
use sgen2_core::generators::{Case, CaseClassification, Instance, TripleRecord};
use sgen2_core::ideal::PrimeRecord;
use sgen2_core::sunits::{is_cm, AlphaCertificate};
use sgen2_core::verify::VerificationReport;
use sgen2_core::FieldElement;

use crate::InstanceConfig;

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<Analysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<AlphaCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub examples: Option<Vec<ExampleResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl Report {
    pub fn empty(command: &str) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            instance: None,
            analysis: None,
            certificate: None,
            triple: None,
            verification: None,
            examples: None,
            timings: None,
        }
    }

    pub fn new(command: &str, instance: Option<InstanceConfig>, analysis: Analysis) -> Self {
        Self {
            instance,
            analysis: Some(analysis),
            ..Self::empty(command)
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Serialize)]
pub struct SUnitSummary {
    pub torsion_order: u64,
    pub torsion_gen: FieldElement,
    pub fund_units: Vec<FieldElement>,
    pub s_gens: Vec<FieldElement>,
    pub valuation_matrix: Vec<Vec<i64>>,
}

#[derive(Serialize)]
pub struct CmSummary {
    pub subfield: String,
    pub d: FieldElement,
    pub sqrt_minus_d: FieldElement,
}

#[derive(Serialize)]
pub struct Analysis {
    pub degree: usize,
    pub signature: (usize, usize),
    pub tier: Tier,
    pub card_s: usize,
    pub unit_rank: usize,
    pub rank: usize,
    pub primes: Vec<PrimeRecord>,
    pub s_units: SUnitSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cm: Option<CmSummary>,
    pub classification: CaseClassification,
}

impl Analysis {
    pub fn new(inst: &Instance, classification: &CaseClassification) -> Self {
        let k = &inst.field;
        let b = &inst.basis;
        let cm = is_cm(k, &inst.subfields).map(|c| CmSummary {
            subfield: inst.subfields[c.subfield].label(),
            d: c.d,
            sqrt_minus_d: c.sqrt_minus_d,
        });
        Self {
            degree: k.degree(),
            signature: k.signature(),
            tier: k.tier(),
            card_s: inst.s.card(),
            unit_rank: k.unit_rank(),
            rank: b.rank(),
            primes: inst.s.finite.iter().map(|p| p.to_record()).collect(),
            s_units: SUnitSummary {
                torsion_order: b.torsion_order,
                torsion_gen: b.torsion_gen.clone(),
                fund_units: b.fund_units.clone(),
                s_gens: b.s_gens.clone(),
                valuation_matrix: b.valuation_matrix.clone(),
            },
            cm,
            classification: classification.clone(),
        }
    }

    /// Rank of the S(Q)-units, i.e. the intersection rank at Q.
    pub fn rational_rank(&self) -> usize {
        self.classification
            .rank_table
            .iter()
            .find(|r| r.subfield == "[0,1]")
            .map(|r| r.rank_of_intersection)
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Golden {
    pub card_s: usize,
    pub rank: usize,
    pub rational_rank: usize,
    pub case: Case,
}

impl Golden {
    pub fn observe(a: &Analysis) -> Self {
        Self {
            card_s: a.card_s,
            rank: a.rank,
            rational_rank: a.rational_rank(),
            case: a.classification.case,
        }
    }
}

#[derive(Serialize)]
pub struct ExampleResult {
    pub name: String,
    pub pass: bool,
    pub expected: Golden,
    pub observed: Golden,
    pub instance: InstanceConfig,
    pub analysis: Analysis,
    pub triple: TripleRecord,
}
