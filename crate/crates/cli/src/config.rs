//! Instance configuration files.

use serde::{Deserialize, Serialize};

use sgen2_core::arith::{Int, Rat};
use sgen2_core::field::Datasheet;
use sgen2_core::ideal::{factor_rational_prime, valuation, PrimeIdeal};
use sgen2_core::sunits::PrimeSet;
use sgen2_core::verify::{NChoice, VerifyOptions};
use sgen2_core::{FieldElement, NumberField};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub field: FieldConfig,
    #[serde(rename = "S")]
    pub s: Vec<PrimeSpec>,
    #[serde(default = "one")]
    pub h: u64,
    #[serde(rename = "N", default)]
    pub n: NSetting,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(with = "sgen2_core::serde_rat::int_vec")]
    pub poly: Vec<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datasheet: Option<Datasheet>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeSpec {
    #[serde(with = "sgen2_core::serde_rat::int")]
    pub p: Int,
    #[serde(default)]
    pub select: Select,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Select {
    #[default]
    All,
    Index(usize),
    Generator(#[serde(with = "sgen2_core::serde_rat::vec")] Vec<Rat>),
}

/// "search" or a fixed positive N.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NSetting {
    #[default]
    Search,
    Fixed(u32),
}

impl Serialize for NSetting {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NSetting::Search => s.serialize_str("search"),
            NSetting::Fixed(n) => s.serialize_u32(*n),
        }
    }
}

impl<'de> Deserialize<'de> for NSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(0) => Err(serde::de::Error::custom("N must be positive")),
            Raw::N(n) => Ok(NSetting::Fixed(n)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl std::str::FromStr for NSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "search" {
            return Ok(NSetting::Search);
        }
        match s.parse::<u32>() {
            Ok(n) if n > 0 => Ok(NSetting::Fixed(n)),
            _ => Err(format!("expected a positive integer or \"search\", got {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub primes: usize,
    pub q_bound: u64,
    pub r_range: (i64, i64),
    pub s_range: (i64, i64),
    pub witness_samples: usize,
    pub n_search_max: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let d = VerifyOptions::default();
        Self {
            primes: d.primes,
            q_bound: d.q_bound,
            r_range: d.r_range,
            s_range: d.s_range,
            witness_samples: d.witness_samples,
            n_search_max: d.n_search_max,
        }
    }
}

impl InstanceConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.h == 0 {
            return Err(CliError::Config("h must be positive".into()));
        }
        let v = &self.verify;
        if v.r_range.0 > v.r_range.1 || v.s_range.0 > v.s_range.1 {
            return Err(CliError::Config("empty r or s range".into()));
        }
        if v.n_search_max == 0 {
            return Err(CliError::Config("n_search_max must be positive".into()));
        }
        Ok(())
    }

    pub fn build_field(&self) -> Result<NumberField, CliError> {
        Ok(NumberField::new(self.field.poly.clone(), self.field.datasheet.clone())?)
    }

    /// Resolves the S entries against the factorizations of each p (factors in HNF order).
    pub fn resolve_s(&self, k: &NumberField) -> Result<PrimeSet, CliError> {
        let mut out: Vec<PrimeIdeal> = Vec::new();
        for spec in &self.s {
            let factors: Vec<PrimeIdeal> = factor_rational_prime(k, &spec.p)?.into_iter().map(|f| f.0).collect();
            match &spec.select {
                Select::All => out.extend(factors),
                Select::Index(i) => {
                    let p = factors.get(*i).ok_or_else(|| {
                        CliError::Config(format!("p = {} has {} prime factors, index {i}", spec.p, factors.len()))
                    })?;
                    out.push(p.clone());
                }
                Select::Generator(g) => {
                    if g.len() != k.degree() {
                        return Err(CliError::Config("generator has the wrong length".into()));
                    }
                    let x = FieldElement::new(g.clone());
                    if x.is_zero() {
                        return Err(CliError::Config("zero generator".into()));
                    }
                    let mut hits = Vec::new();
                    for p in factors {
                        if valuation(k, &x, &p)? > 0 {
                            hits.push(p);
                        }
                    }
                    if hits.len() != 1 {
                        return Err(CliError::Config(format!(
                            "generator lies in {} primes above {}",
                            hits.len(),
                            spec.p
                        )));
                    }
                    out.extend(hits);
                }
            }
        }
        Ok(PrimeSet::new(k, out)?)
    }

    pub fn verify_options(&self) -> VerifyOptions {
        let v = &self.verify;
        VerifyOptions {
            r_range: v.r_range,
            s_range: v.s_range,
            n: match self.n {
                NSetting::Search => NChoice::Search,
                NSetting::Fixed(n) => NChoice::Fixed(n),
            },
            n_search_max: v.n_search_max,
            primes: v.primes,
            q_bound: v.q_bound,
            witness_samples: v.witness_samples,
            seed: self.seed,
            ..VerifyOptions::default()
        }
    }
}
