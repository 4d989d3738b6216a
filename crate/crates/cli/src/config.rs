//! Experiment configuration: parsing, validation, and derived instance lists.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use dirmax_core::{Dyadic, FieldGenSpec, TestFnSpec};

/// A full sweep description. Deltas, lambdas and exponents are dyadic or
/// rational strings so thresholds stay exact end to end.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub fields: Vec<FieldGenSpec>,
    /// Extra iid seeds appended to `fields`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    pub ns: Vec<u32>,
    pub deltas: Vec<String>,
    #[serde(default = "default_qs")]
    pub qs: Vec<u32>,
    #[serde(default = "default_ps")]
    pub ps: Vec<String>,
    #[serde(default = "default_offset_denom")]
    pub offset_denom: u32,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<String>,
    #[serde(default = "default_test_functions")]
    pub test_functions: Vec<TestFnSpec>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub render: bool,
    #[serde(default = "default_family_cap")]
    pub family_cap: usize,
    /// Run the pointwise claim verification on every instance.
    #[serde(default = "default_true")]
    pub claims: bool,
}

fn default_qs() -> Vec<u32> {
    vec![2, 3]
}

fn default_ps() -> Vec<String> {
    vec!["3/2".into(), "2".into()]
}

fn default_offset_denom() -> u32 {
    2
}

fn default_lambdas() -> Vec<String> {
    (1..=6).map(|k| format!("1/{}", 1u64 << k)).collect()
}

fn default_test_functions() -> Vec<TestFnSpec> {
    vec![TestFnSpec::Square { level: 3, ix: 2, iy: 3 }]
}

fn default_family_cap() -> usize {
    2_000_000
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field validation with messages that name the offending config field.
    pub fn validate(&self) -> Result<()> {
        if self.fields.is_empty() && self.seeds.is_empty() {
            bail!("config field `fields`: must list at least one field generator");
        }
        if self.ns.is_empty() {
            bail!("config field `ns`: must list at least one resolution");
        }
        if let Some(bad) = self.ns.iter().find(|&&n| n == 0 || n > 12) {
            bail!("config field `ns`: resolution {bad} outside 1..=12");
        }
        if self.deltas.is_empty() {
            bail!("config field `deltas`: must list at least one threshold");
        }
        for d in &self.deltas {
            let v = Dyadic::parse(d)
                .with_context(|| format!("config field `deltas`: cannot parse {d:?}"))?;
            if v <= Dyadic::ZERO || v > Dyadic::ONE {
                bail!("config field `deltas`: {d} outside (0, 1]");
            }
        }
        if self.qs.is_empty() || self.qs.iter().any(|&q| !(2..=4).contains(&q)) {
            bail!("config field `qs`: exponents must be in 2..=4 and nonempty");
        }
        for p in &self.ps {
            let v = parse_p(p)?;
            if v <= 1.0 {
                bail!("config field `ps`: exponent {p} must exceed 1");
            }
        }
        if self.offset_denom == 0 || !self.offset_denom.is_power_of_two() {
            bail!("config field `offset_denom`: must be a positive power of two");
        }
        for l in &self.lambdas {
            let v = Dyadic::parse(l)
                .with_context(|| format!("config field `lambdas`: cannot parse {l:?}"))?;
            if v <= Dyadic::ZERO {
                bail!("config field `lambdas`: {l} must be positive");
            }
        }
        Ok(())
    }

    /// The resolved generator list (explicit fields plus seeded iid entries).
    pub fn all_fields(&self) -> Vec<FieldGenSpec> {
        let mut out = self.fields.clone();
        out.extend(self.seeds.iter().map(|&seed| FieldGenSpec::IidUniform { seed }));
        out
    }

    pub fn deltas_parsed(&self) -> Vec<Dyadic> {
        self.deltas.iter().map(|d| Dyadic::parse(d).unwrap()).collect()
    }

    pub fn lambdas_parsed(&self) -> Vec<Dyadic> {
        self.lambdas.iter().map(|d| Dyadic::parse(d).unwrap()).collect()
    }

    pub fn ps_parsed(&self) -> Vec<f64> {
        self.ps.iter().map(|p| parse_p(p).unwrap()).collect()
    }

    /// Output directory, overridable through `DIRMAX_OUT_DIR`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os("DIRMAX_OUT_DIR") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }
}

/// Exponents like `2` or `3/2`, as exact ratios evaluated to f64.
pub fn parse_p(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().context("parsing exponent numerator")?;
        let d: f64 = den.trim().parse().context("parsing exponent denominator")?;
        if d == 0.0 {
            bail!("exponent denominator is zero");
        }
        Ok(n / d)
    } else {
        Ok(s.parse::<f64>().context("parsing exponent")?)
    }
}
