//! Experiment configuration shared by the command runners.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain::ChainFamily;
use crate::construct::{sample_dyadic41, sample_factorial53, DensitySeeding};
use crate::error::{Error, Result};

/// RNG stream for generator sampling.
pub const STREAM_GENERATORS: u64 = 1;
/// RNG stream for measure perturbations.
pub const STREAM_NOISE: u64 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Dyadic41,
    Factorial53,
    Custom(PathBuf),
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dyadic41" => Construction::Dyadic41,
            "factorial53" => Construction::Factorial53,
            "" => return Err(Error::Precondition("empty construction".into())),
            path => Construction::Custom(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::Dyadic41 => f.write_str("dyadic41"),
            Construction::Factorial53 => f.write_str("factorial53"),
            Construction::Custom(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub construction: Construction,
    pub generator_count: usize,
    pub depth: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub k_max: usize,
    pub p_max: usize,
    pub seed: u64,
    pub max_exceptional: usize,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            construction: Construction::Dyadic41,
            generator_count: 256,
            depth: 20,
            horizon: 10,
            epsilon: 0.1,
            delta: 0.5,
            k_max: 8,
            p_max: 6,
            seed: 1,
            max_exceptional: 16,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon > self.depth {
            return Err(Error::Precondition(format!(
                "horizon {} exceeds depth {}",
                self.horizon, self.depth
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Precondition(format!("epsilon {} must be ≥ 0", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Precondition(format!("delta {} must be > 0", self.delta)));
        }
        if self.generator_count == 0 && !matches!(self.construction, Construction::Custom(_)) {
            return Err(Error::Precondition("generator count must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form, with the
    /// output directory left out.
    pub fn hash(&self) -> String {
        let identity = ExperimentConfig {
            out_dir: PathBuf::new(),
            ..self.clone()
        };
        let text = serde_json::to_string(&identity).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Independent deterministic stream `stream` of the seeded generator.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Samples or loads the generator family.
    pub fn build_family(&self) -> Result<ChainFamily> {
        self.validate()?;
        match &self.construction {
            Construction::Dyadic41 => sample_dyadic41(&mut self.rng(STREAM_GENERATORS), self.generator_count, self.depth),
            Construction::Factorial53 => sample_factorial53(
                &mut self.rng(STREAM_GENERATORS),
                self.generator_count,
                self.depth,
                &DensitySeeding::default().fitting(self.generator_count, self.depth),
            ),
            Construction::Custom(path) => ChainFamily::from_json(&std::fs::read_to_string(path)?),
        }
    }

    pub fn csv_header(&self) -> String {
        format!("# cdelab-csv v1 config={}", self.hash())
    }
}
