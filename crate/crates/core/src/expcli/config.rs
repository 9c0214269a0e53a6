use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fedsim::FederationConfig;
use crate::unlearn::UnlearnConfig;

use super::ExpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Origin,
    Retrain,
    Finetune,
    GradAscent,
    Mcu,
    IffFcu,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Origin,
        Method::Retrain,
        Method::Finetune,
        Method::GradAscent,
        Method::Mcu,
        Method::IffFcu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Origin => "origin",
            Method::Retrain => "retrain",
            Method::Finetune => "finetune",
            Method::GradAscent => "grad_ascent",
            Method::Mcu => "mcu",
            Method::IffFcu => "iff_fcu",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    Blobs,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetConfig {
    pub source: DatasetSource,
    pub n: usize,
    pub d: usize,
    pub c: usize,
    pub separation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            source: DatasetSource::Blobs,
            n: 5000,
            d: 20,
            c: 4,
            separation: 4.0,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// Hidden layer widths; the last one is the feature dimension.
    pub hidden: Vec<usize>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 32],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuntimeClock {
    /// Monotonic wall-clock seconds.
    Wall,
    /// Report 0; keeps result files byte-reproducible.
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoldenConfig {
    pub seeds: Vec<u64>,
    /// Golden file, relative to the working directory.
    pub path: PathBuf,
    /// Assert the qualitative method orderings in check mode.
    pub orderings: bool,
    /// Seeds on which every ordering must hold.
    pub min_passing: usize,
    /// Absolute tolerance of the numeric regression.
    pub tolerance: f64,
}

impl Default for GoldenConfig {
    fn default() -> Self {
        Self {
            seeds: vec![1, 2, 3, 4, 5],
            path: PathBuf::from("golden.json"),
            orderings: true,
            min_passing: 4,
            tolerance: 1e-9,
        }
    }
}

/// Full experiment description. Unknown keys anywhere are an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub target_client_id: usize,
    pub methods: Vec<Method>,
    pub output_dir: PathBuf,
    pub runtime_clock: RuntimeClock,
    pub dataset: DatasetConfig,
    pub model: ModelConfig,
    pub federation: FederationConfig,
    pub unlearn: UnlearnConfig,
    pub golden: GoldenConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            target_client_id: 0,
            methods: Method::ALL.to_vec(),
            output_dir: PathBuf::from("results"),
            runtime_clock: RuntimeClock::Wall,
            dataset: DatasetConfig::default(),
            model: ModelConfig::default(),
            federation: FederationConfig::default(),
            unlearn: UnlearnConfig::default(),
            golden: GoldenConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates TOML text.
    pub fn from_toml(text: &str) -> Result<Self, ExpError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExpError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExpError::Missing(format!("config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            ExpError::Config(m) => ExpError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Canonical TOML rendering (every field, fixed order).
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ExpError> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        if self.methods.is_empty() {
            return bad("methods: must name at least one method".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return bad(format!("methods[{i}]: duplicate method {m}"));
            }
        }
        self.federation
            .validate()
            .map_err(|e| ExpError::Config(strip(e)))?;
        self.unlearn
            .validate()
            .map_err(|e| ExpError::Config(strip(e)))?;
        if self.target_client_id >= self.federation.num_clients {
            return bad(format!(
                "target_client_id: {} outside [0, {})",
                self.target_client_id, self.federation.num_clients
            ));
        }
        if self.model.hidden.is_empty() || self.model.hidden.contains(&0) {
            return bad(format!(
                "model.hidden: need at least one layer of width >= 1, got {:?}",
                self.model.hidden
            ));
        }
        let d = &self.dataset;
        match d.source {
            DatasetSource::Blobs => {
                if d.c < 2 || d.n < d.c || d.d < 2 || !(d.separation > 0.0) {
                    return bad(format!(
                        "dataset: blobs need n >= c >= 2, d >= 2, separation > 0 (n={}, d={}, c={}, separation={})",
                        d.n, d.d, d.c, d.separation
                    ));
                }
            }
            DatasetSource::Csv => {
                if d.path.is_none() {
                    return bad("dataset.path: required when source = \"csv\"".into());
                }
            }
        }
        let g = &self.golden;
        if g.seeds.is_empty() {
            return bad("golden.seeds: must not be empty".into());
        }
        if g.min_passing > g.seeds.len() {
            return bad(format!(
                "golden.min_passing: {} exceeds {} seeds",
                g.min_passing,
                g.seeds.len()
            ));
        }
        if !(g.tolerance >= 0.0) {
            return bad(format!(
                "golden.tolerance: must be >= 0, got {}",
                g.tolerance
            ));
        }
        Ok(())
    }
}

fn strip(e: crate::Error) -> String {
    match e {
        crate::Error::Config(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(
            ExperimentConfig::from_toml("").unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        for text in [
            "sed = 3",
            "[unlearn]\ntua = 0.5",
            "[federation]\nnum_client = 5",
            "[dataset]\nsep = 1.0",
        ] {
            let err = ExperimentConfig::from_toml(text).unwrap_err();
            assert!(matches!(err, ExpError::Config(_)), "{text}");
        }
    }

    #[test]
    fn validation_paths() {
        let cases = [
            ("target_client_id = 5", "target_client_id"),
            ("methods = []", "methods"),
            ("methods = [\"mcu\", \"mcu\"]", "methods[1]"),
            ("[unlearn]\ntau = -1.0", "unlearn.tau"),
            ("[federation]\nbatch_size = 0", "federation.batch_size"),
            ("[dataset]\nsource = \"csv\"", "dataset.path"),
            ("[model]\nhidden = []", "model.hidden"),
        ];
        for (text, path) in cases {
            let err = ExperimentConfig::from_toml(text).unwrap_err().to_string();
            assert!(err.contains(path), "{text}: {err}");
        }
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let text = "seed = 9\nmethods = [\"iff_fcu\", \"retrain\"]\n[unlearn]\np_mixup = 0.75\n";
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let canon = cfg.to_toml();
        let again = ExperimentConfig::from_toml(&canon).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), canon);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.name()), Some(m));
        }
        assert_eq!(Method::parse("fedavg"), None);
    }
}
