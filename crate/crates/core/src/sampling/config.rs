use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SamplingError;
use crate::kg::NodeId;

/// How the prompt context is arranged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecKind {
    /// Path-ordered context, no distractor.
    Vanilla,
    /// Node contexts in random order, no distractor.
    Shuffle,
    /// Random order plus the context of one distractor node.
    ShuffleDistractor,
}

impl SpecKind {
    pub const ALL: [SpecKind; 3] = [SpecKind::Vanilla, SpecKind::Shuffle, SpecKind::ShuffleDistractor];

    pub fn as_str(self) -> &'static str {
        match self {
            SpecKind::Vanilla => "vanilla",
            SpecKind::Shuffle => "shuffle",
            SpecKind::ShuffleDistractor => "shuffle-distractor",
        }
    }

    pub fn uses_distractor(self) -> bool {
        self == SpecKind::ShuffleDistractor
    }
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpecKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpecKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind `{s}` (expected vanilla, shuffle or shuffle-distractor)"))
    }
}

/// Weighting of distractor candidates by the path position they attach to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistractorMode {
    /// Weight grows linearly toward the tail.
    #[default]
    #[serde(rename = "tail")]
    TailWeighted,
    /// Weight grows linearly toward the head.
    #[serde(rename = "head")]
    HeadWeighted,
    #[serde(rename = "uniform")]
    Uniform,
}

impl DistractorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DistractorMode::TailWeighted => "tail",
            DistractorMode::HeadWeighted => "head",
            DistractorMode::Uniform => "uniform",
        }
    }
}

impl FromStr for DistractorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tail" => Ok(DistractorMode::TailWeighted),
            "head" => Ok(DistractorMode::HeadWeighted),
            "uniform" => Ok(DistractorMode::Uniform),
            _ => Err(format!("unknown distractor mode `{s}` (expected tail, head or uniform)")),
        }
    }
}

pub const DEFAULT_MAX_HOPS: usize = 4;
pub const DEFAULT_N_SAMPLES: usize = 250;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;
pub const DEFAULT_FEW_SHOT: usize = 2;
pub const DEFAULT_MIN_OPTIONS: usize = 5;
pub const DEFAULT_TOKEN_BUDGET: usize = 8192;
pub const MAX_FEW_SHOT: usize = 5;

/// Full description of one prompt distribution and how many samples to
/// certify it with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub pivot: NodeId,
    pub kind: SpecKind,
    #[serde(default = "default_max_hops")]
    pub max_hops: usize,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_few_shot")]
    pub few_shot_count: usize,
    #[serde(default)]
    pub distractor_mode: DistractorMode,
    #[serde(default = "default_min_options")]
    pub min_num_options: usize,
    #[serde(default = "default_token_budget")]
    pub token_budget: usize,
}

fn default_max_hops() -> usize {
    DEFAULT_MAX_HOPS
}
fn default_n_samples() -> usize {
    DEFAULT_N_SAMPLES
}
fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}
fn default_few_shot() -> usize {
    DEFAULT_FEW_SHOT
}
fn default_min_options() -> usize {
    DEFAULT_MIN_OPTIONS
}
fn default_token_budget() -> usize {
    DEFAULT_TOKEN_BUDGET
}

impl SpecConfig {
    pub fn new(pivot: NodeId, kind: SpecKind) -> Self {
        Self {
            pivot,
            kind,
            max_hops: DEFAULT_MAX_HOPS,
            n_samples: DEFAULT_N_SAMPLES,
            confidence: DEFAULT_CONFIDENCE,
            seed: 0,
            few_shot_count: DEFAULT_FEW_SHOT,
            distractor_mode: DistractorMode::default(),
            min_num_options: DEFAULT_MIN_OPTIONS,
            token_budget: DEFAULT_TOKEN_BUDGET,
        }
    }

    /// `delta = 1 - confidence`.
    pub fn delta(&self) -> f64 {
        1.0 - self.confidence
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        let bad = |m: &str| Err(SamplingError::InvalidConfig(m.to_owned()));
        if self.max_hops < 1 {
            return bad("max_hops must be at least 1");
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return bad("confidence must lie strictly between 0 and 1");
        }
        if self.n_samples < 1 {
            return bad("n_samples must be at least 1");
        }
        if self.min_num_options < 2 {
            return bad("min_num_options must be at least 2");
        }
        if self.few_shot_count > MAX_FEW_SHOT {
            return bad("few_shot_count must be between 0 and 5");
        }
        if self.token_budget == 0 {
            return bad("token_budget must be positive");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec config always serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, SamplingError> {
        let cfg: SpecConfig = toml::from_str(text).map_err(|e| SamplingError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_defaults() {
        let mut cfg = SpecConfig::new("Q1".into(), SpecKind::ShuffleDistractor);
        cfg.seed = 42;
        cfg.distractor_mode = DistractorMode::HeadWeighted;
        let text = cfg.to_toml();
        assert!(text.contains("kind = \"shuffle-distractor\""));
        assert!(text.contains("distractor_mode = \"head\""));
        assert_eq!(SpecConfig::from_toml(&text).unwrap(), cfg);

        let minimal = SpecConfig::from_toml("pivot = \"Q9\"\nkind = \"vanilla\"\n").unwrap();
        assert_eq!(minimal.max_hops, 4);
        assert_eq!(minimal.n_samples, 250);
        assert_eq!(minimal.confidence, 0.95);
        assert_eq!(minimal.few_shot_count, 2);
        assert_eq!(minimal.min_num_options, 5);
    }

    #[test]
    fn invalid_configs() {
        let base = SpecConfig::new("Q1".into(), SpecKind::Vanilla);
        for tweak in [
            |c: &mut SpecConfig| c.max_hops = 0,
            |c: &mut SpecConfig| c.confidence = 1.0,
            |c: &mut SpecConfig| c.n_samples = 0,
            |c: &mut SpecConfig| c.min_num_options = 1,
            |c: &mut SpecConfig| c.few_shot_count = 6,
        ] {
            let mut c = base.clone();
            tweak(&mut c);
            assert!(c.validate().is_err());
        }
        assert!(SpecConfig::from_toml("pivot = \"Q\"\nkind = \"vanilla\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn kind_names() {
        for k in SpecKind::ALL {
            assert_eq!(k.as_str().parse::<SpecKind>().unwrap(), k);
        }
        assert!("tail".parse::<DistractorMode>().is_ok());
        assert!("sideways".parse::<DistractorMode>().is_err());
    }
}
