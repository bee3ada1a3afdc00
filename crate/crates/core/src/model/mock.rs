use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use sha2::{Digest, Sha256};

use super::{CompletionRequest, Model, ModelDescriptor, ModelError, PromptMetadata};
use crate::sampling::SpecConfig;
use crate::seed::{derive_rng, SampleRng};

/// Keeps mock draws independent of the sampler streams for the same seed.
const MOCK_STREAM: u64 = 0x6d6f_636b;

#[derive(Clone, Debug, PartialEq)]
pub enum MockMode {
    FixedAccuracy(f64),
    /// Accuracy by hop count; hop counts not listed are always answered wrong.
    PerHopAccuracy(BTreeMap<usize, f64>),
    AlwaysCorrect,
    AlwaysDistracted,
}

impl MockMode {
    fn validate(&self) -> Result<(), ModelError> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        let valid = match self {
            MockMode::FixedAccuracy(p) => ok(*p),
            MockMode::PerHopAccuracy(m) => m.values().all(|&p| ok(p)),
            _ => true,
        };
        if valid {
            Ok(())
        } else {
            Err(ModelError::InvalidConfig("mock accuracies must lie in [0, 1]".into()))
        }
    }
}

impl fmt::Display for MockMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MockMode::FixedAccuracy(p) => write!(f, "fixed={p}"),
            MockMode::PerHopAccuracy(m) => {
                let parts: Vec<String> = m.iter().map(|(h, p)| format!("{h}:{p}")).collect();
                write!(f, "per-hop={}", parts.join(","))
            }
            MockMode::AlwaysCorrect => f.write_str("always-correct"),
            MockMode::AlwaysDistracted => f.write_str("always-distracted"),
        }
    }
}

impl FromStr for MockMode {
    type Err = ModelError;

    /// `always-correct`, `always-distracted`, `fixed=<p>` or
    /// `per-hop=<h>:<p>,<h>:<p>...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| ModelError::InvalidConfig(m);
        let prob = |v: &str| v.trim().parse::<f64>().map_err(|_| bad(format!("bad probability `{v}`")));
        let mode = match s.split_once('=') {
            None if s == "always-correct" => MockMode::AlwaysCorrect,
            None if s == "always-distracted" => MockMode::AlwaysDistracted,
            Some(("fixed", p)) => MockMode::FixedAccuracy(prob(p)?),
            Some(("per-hop", spec)) => {
                let mut map = BTreeMap::new();
                for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
                    let (h, p) = part.split_once(':').ok_or_else(|| bad(format!("expected hops:p, got `{part}`")))?;
                    let h = h.trim().parse::<usize>().map_err(|_| bad(format!("bad hop count `{h}`")))?;
                    map.insert(h, prob(p)?);
                }
                MockMode::PerHopAccuracy(map)
            }
            _ => return Err(bad(format!("unknown mock mode `{s}`"))),
        };
        mode.validate()?;
        Ok(mode)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MockOracleConfig {
    pub mode: MockMode,
    pub seed: u64,
}

fn answer(i: usize) -> String {
    format!("correct answer: {i}. option {i}, because mock oracle")
}

/// Picks a wrong option: the distractor when there is one, otherwise a
/// uniformly drawn other option.
fn wrong<R: Rng + ?Sized>(meta: &PromptMetadata, rng: &mut R) -> usize {
    match meta.distractor_index {
        Some(d) if d != meta.correct_index => d,
        _ if meta.num_options < 2 => meta.correct_index % meta.num_options.max(1) + 1,
        _ => {
            let k = rng.gen_range(1..meta.num_options);
            if k >= meta.correct_index {
                k + 1
            } else {
                k
            }
        }
    }
}

/// Answers correctly with the mode's probability, otherwise picks a wrong
/// option. Output is always in the checker's format.
pub fn mock_complete<R: Rng + ?Sized>(config: &MockOracleConfig, meta: &PromptMetadata, rng: &mut R) -> String {
    let p = match &config.mode {
        MockMode::FixedAccuracy(p) => *p,
        MockMode::PerHopAccuracy(m) => m.get(&meta.hops).copied().unwrap_or(0.0),
        MockMode::AlwaysCorrect => 1.0,
        MockMode::AlwaysDistracted => 0.0,
    };
    // Always draw so the stream layout does not depend on the mode.
    let u: f64 = rng.gen();
    if u < p {
        answer(meta.correct_index)
    } else {
        answer(wrong(meta, rng))
    }
}

/// Oracle seed for one spec, so certificates sharing a root seed still get
/// independent mock answers.
pub fn mock_seed_for(spec: &SpecConfig) -> u64 {
    let mut h = Sha256::new();
    h.update(b"kgcert-mock");
    h.update(spec.seed.to_le_bytes());
    h.update(spec.pivot.as_str().as_bytes());
    h.update([0]);
    h.update(spec.kind.as_str().as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// [`mock_complete`] behind the [`Model`] interface, with the per-call RNG
/// derived from the oracle seed and the sample index.
#[derive(Clone, Debug)]
pub struct MockModel {
    pub config: MockOracleConfig,
}

impl MockModel {
    pub fn new(mode: MockMode, seed: u64) -> Result<Self, ModelError> {
        mode.validate()?;
        Ok(Self { config: MockOracleConfig { mode, seed } })
    }

    fn rng(&self, meta: &PromptMetadata) -> SampleRng {
        derive_rng(self.config.seed, &[MOCK_STREAM, meta.sample_index])
    }
}

impl Model for MockModel {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ModelError> {
        Ok(mock_complete(&self.config, &request.metadata, &mut self.rng(&request.metadata)))
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor { name: "mock".into(), endpoint: None, mock: Some(self.config.mode.to_string()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::check_response;

    fn meta(i: u64) -> PromptMetadata {
        PromptMetadata {
            correct_index: (i % 5 + 1) as usize,
            distractor_index: if i.is_multiple_of(3) { Some(((i + 1) % 5 + 1) as usize) } else { None },
            hops: (i % 4 + 1) as usize,
            num_options: 5,
            sample_index: i,
        }
    }

    fn accuracy(mode: MockMode, n: u64) -> f64 {
        let m = MockModel::new(mode, 11).unwrap();
        let hits = (0..n)
            .filter(|&i| {
                let md = meta(i);
                let out = m.complete(&CompletionRequest { prompt: "x", metadata: md.clone() }).unwrap();
                check_response(&out, md.correct_index).correct
            })
            .count();
        hits as f64 / n as f64
    }

    #[test]
    fn degenerate_modes() {
        assert_eq!(accuracy(MockMode::AlwaysCorrect, 500), 1.0);
        assert_eq!(accuracy(MockMode::FixedAccuracy(0.0), 500), 0.0);
        assert_eq!(accuracy(MockMode::AlwaysDistracted, 500), 0.0);
    }

    #[test]
    fn fixed_accuracy_band() {
        // 3 sigma at n = 1e4, p = .52 is ~0.015
        let acc = accuracy(MockMode::FixedAccuracy(0.52), 10_000);
        assert!((acc - 0.52).abs() <= 0.015, "{acc}");
    }

    #[test]
    fn distracted_picks_the_distractor() {
        let md =
            PromptMetadata { correct_index: 2, distractor_index: Some(4), hops: 1, num_options: 5, sample_index: 0 };
        let cfg = MockOracleConfig { mode: MockMode::AlwaysDistracted, seed: 0 };
        let out = mock_complete(&cfg, &md, &mut derive_rng(0, &[]));
        assert_eq!(check_response(&out, 4).chosen_option, Some(4));
    }

    #[test]
    fn outputs_are_well_formed_and_deterministic() {
        let m = MockModel::new(MockMode::FixedAccuracy(0.3), 5).unwrap();
        for i in 0..200 {
            let md = meta(i);
            let req = CompletionRequest { prompt: "p", metadata: md.clone() };
            let a = m.complete(&req).unwrap();
            assert_eq!(a, m.complete(&req).unwrap());
            let chosen = check_response(&a, 1).chosen_option.unwrap();
            assert!((1..=md.num_options).contains(&chosen));
        }
    }

    #[test]
    fn mode_strings() {
        for s in ["always-correct", "always-distracted", "fixed=0.52", "per-hop=1:0.9,4:0.3"] {
            assert_eq!(s.parse::<MockMode>().unwrap().to_string(), s);
        }
        assert!("fixed=1.5".parse::<MockMode>().is_err());
        assert!("sometimes".parse::<MockMode>().is_err());
        let MockMode::PerHopAccuracy(m) = "per-hop=1:0.9,2:0.7".parse().unwrap() else { panic!() };
        assert_eq!(m[&2], 0.7);
    }
}
