//! Bundled models, timing presets and configurations, and lookup of models
//! and configs by bundled name or file path.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::frontend::{self, NetSpec, ParseError};
use crate::petri::{elaborate, Config, ConfigError, ElaborateError, ElaboratedNet};

pub struct ModelBundle {
    pub name: &'static str,
    pub source: &'static str,
    /// Bundled configs, named without the model prefix.
    pub configs: &'static [(&'static str, &'static str)],
    pub default_config: &'static str,
    pub presets: &'static [&'static str],
}

impl ModelBundle {
    pub fn spec(&self) -> NetSpec {
        frontend::parse(self.source).expect("bundled models parse")
    }

    pub fn config(&self, name: &str) -> Option<Config> {
        let (_, text) = self.configs.iter().find(|(n, _)| *n == name)?;
        resolve_config_text(text, None).ok()
    }

    pub fn elaborate(&self, config: &str) -> Result<ElaboratedNet, LoadError> {
        let cfg = self.config(config).ok_or_else(|| LoadError::UnknownConfig(config.into()))?;
        Ok(elaborate(&self.spec(), &cfg)?)
    }
}

static BUNDLES: &[ModelBundle] = &[
    ModelBundle {
        name: "ddr4",
        source: include_str!("models/ddr4.dramml"),
        configs: &[
            ("16bank", include_str!("configs/ddr4-16bank.cfg")),
            ("8bank", include_str!("configs/ddr4-8bank.cfg")),
        ],
        default_config: "16bank",
        presets: &["ddr4-3200-example"],
    },
    ModelBundle {
        name: "ddr5-delta",
        source: include_str!("models/ddr5-delta.dramml"),
        configs: &[
            ("16bank", include_str!("configs/ddr5-16bank.cfg")),
            ("8bank", include_str!("configs/ddr5-8bank.cfg")),
        ],
        default_config: "16bank",
        presets: &["ddr5-example"],
    },
];

static PRESETS: &[(&str, &str)] = &[
    ("ddr4-3200-example", include_str!("presets/ddr4-3200-example.cfg")),
    ("ddr5-example", include_str!("presets/ddr5-example.cfg")),
];

pub fn bundles() -> &'static [ModelBundle] {
    BUNDLES
}

pub fn bundle(name: &str) -> Option<&'static ModelBundle> {
    BUNDLES.iter().find(|b| b.name == name)
}

/// Named timing values with a note on where each value comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingPreset {
    pub name: String,
    pub standard: String,
    pub values: BTreeMap<String, u32>,
    pub provenance: BTreeMap<String, String>,
}

const DEFAULT_PROVENANCE: &str = "example value for testing";

impl TimingPreset {
    /// Parse a preset file. A trailing `# note` on a value line records its
    /// provenance; values without one are marked as example values.
    pub fn parse(name: &str, text: &str) -> Result<Self, ConfigError> {
        let (cfg, _) = Config::parse(text)?;
        let mut provenance = BTreeMap::new();
        for raw in text.lines() {
            let (body, note) = match raw.split_once('#') {
                Some((b, n)) => (b.trim(), Some(n.trim())),
                None => (raw.trim(), None),
            };
            if let Some((key, _)) = body.split_once('=') {
                let key = key.trim();
                if cfg.params.contains_key(key) {
                    let note = note.filter(|n| !n.is_empty()).unwrap_or(DEFAULT_PROVENANCE);
                    provenance.insert(key.to_string(), note.to_string());
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            standard: cfg.standard,
            values: cfg.params,
            provenance,
        })
    }

    pub fn config(&self) -> Config {
        Config {
            standard: self.standard.clone(),
            params: self.values.clone(),
        }
    }
}

pub fn preset(name: &str) -> Option<TimingPreset> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name)?;
    Some(TimingPreset::parse(name, text).expect("bundled presets parse"))
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}:{error}")]
    Parse { path: PathBuf, error: ParseError },
    #[error("{path}: {error}")]
    Config { path: PathBuf, error: ConfigError },
    #[error("no bundled model or file named `{0}`")]
    UnknownModel(String),
    #[error("no bundled config or file named `{0}`")]
    UnknownConfig(String),
    #[error("no bundled preset or file named `{0}`")]
    UnknownPreset(String),
    #[error("config is for standard `{config}` but the model describes `{model}`")]
    StandardMismatch { model: String, config: String },
    #[error(transparent)]
    Elaborate(#[from] ElaborateError),
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// A model by bundled name (`ddr4`) or path to a `.dramml` file. Returns the
/// display name and the parsed spec.
pub fn load_model(name_or_path: &str) -> Result<(String, NetSpec), LoadError> {
    if let Some(b) = bundle(name_or_path) {
        return Ok((b.name.to_string(), b.spec()));
    }
    let path = Path::new(name_or_path);
    if !path.is_file() {
        return Err(LoadError::UnknownModel(name_or_path.to_string()));
    }
    let text = read(path)?;
    let spec = frontend::parse(&text).map_err(|error| LoadError::Parse {
        path: path.to_path_buf(),
        error,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name_or_path.to_string());
    Ok((name, spec))
}

fn resolve_config_text(text: &str, dir: Option<&Path>) -> Result<Config, LoadError> {
    let (cfg, preset_ref) = Config::parse(text).map_err(|error| LoadError::Config {
        path: PathBuf::from("<config>"),
        error,
    })?;
    let Some(preset_ref) = preset_ref else {
        return Ok(cfg);
    };
    let base = match preset(&preset_ref) {
        Some(p) => p.config(),
        None => {
            let path = dir.map_or_else(|| PathBuf::from(&preset_ref), |d| d.join(&preset_ref));
            if !path.is_file() {
                return Err(LoadError::UnknownPreset(preset_ref));
            }
            let text = read(&path)?;
            TimingPreset::parse(&preset_ref, &text)
                .map_err(|error| LoadError::Config { path, error })?
                .config()
        }
    };
    Ok(base.overlay(&cfg))
}

/// A config by path, by bundled name for `model` (`16bank`), or by a bundled
/// preset name. A `preset=` line pulls in a preset underneath the file's
/// own entries.
pub fn load_config(name_or_path: &str, model: Option<&str>) -> Result<Config, LoadError> {
    let path = Path::new(name_or_path);
    if path.is_file() {
        let text = read(path)?;
        return resolve_config_text(&text, path.parent()).map_err(|e| match e {
            LoadError::Config { error, .. } => LoadError::Config {
                path: path.to_path_buf(),
                error,
            },
            other => other,
        });
    }
    let candidates = model.and_then(bundle).into_iter().chain(BUNDLES.iter());
    for b in candidates {
        if let Some(cfg) = b.config(name_or_path) {
            return Ok(cfg);
        }
    }
    if let Some(p) = preset(name_or_path) {
        return Ok(p.config());
    }
    Err(LoadError::UnknownConfig(name_or_path.to_string()))
}

/// Load, bind and elaborate a model in one go.
pub fn load(model: &str, config: &str) -> Result<(String, ElaboratedNet), LoadError> {
    let (name, spec) = load_model(model)?;
    let cfg = load_config(config, Some(&name))?;
    if !cfg.standard.is_empty() && cfg.standard != spec.standard_name {
        return Err(LoadError::StandardMismatch {
            model: spec.standard_name,
            config: cfg.standard,
        });
    }
    Ok((name, elaborate(&spec, &cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{ArcKind, ScopeQualifier};

    #[test]
    fn bundles_elaborate() {
        for b in bundles() {
            for (c, _) in b.configs {
                let net = b.elaborate(c).unwrap();
                assert_eq!(net.spec.standard_name, b.config(c).unwrap().standard);
            }
        }
    }

    #[test]
    fn presets_cover_their_models() {
        for b in bundles() {
            let spec = b.spec();
            for p in b.presets {
                let preset = preset(p).unwrap();
                for t in &spec.timing_params {
                    assert!(preset.values.contains_key(&t.name), "{p} lacks {}", t.name);
                    assert_eq!(preset.provenance[&t.name], DEFAULT_PROVENANCE);
                }
            }
        }
    }

    #[test]
    fn ddr4_structure() {
        let spec = bundle("ddr4").unwrap().spec();
        let owner = |p: &str| spec.place(p).unwrap().owner.join("/");
        assert_eq!(owner("ACTIVE"), "rank/bankgroup/bank");
        assert_eq!(owner("PDN"), "rank");
        assert_eq!(owner("SREF"), "rank");
        assert_eq!(owner("FAW"), "rank");
        assert_eq!(spec.places.len(), 4, "no idle place");
        let mut names: Vec<&str> = spec.transitions.iter().map(|t| t.name.as_str()).collect();
        names.sort();
        assert_eq!(
            names,
            ["ACT", "PDNE", "PDNX", "PRE", "PREA", "RD", "RDA", "REFA", "SREFE", "SREFX", "WR", "WRA"]
        );
        let has = |kind, from: &str, to: &str| {
            spec.arcs
                .iter()
                .any(|a| a.kind == kind && a.from == from && a.to == to)
        };
        let prea = spec
            .arcs
            .iter()
            .find(|a| a.kind == ArcKind::Reset && a.to == "PREA")
            .unwrap();
        assert_eq!(prea.from, "ACTIVE");
        assert_eq!(prea.scope.qualifier, ScopeQualifier::AllInstances);
        for p in ["ACTIVE", "PDN", "SREF"] {
            assert!(has(ArcKind::Inhibitor, p, "REFA"));
        }
    }

    #[test]
    fn prea_resets_every_bank_of_its_rank() {
        let net = bundle("ddr4").unwrap().elaborate("16bank").unwrap();
        let prea = net.transition_instance(net.topology.transition_index("PREA").unwrap(), &[0]);
        let resets = net.by_transition[prea].effects.iter().filter(|e| e.reset).count();
        assert_eq!(resets, 16);
    }

    #[test]
    fn config_lookup() {
        let cfg = load_config("8bank", Some("ddr4")).unwrap();
        assert_eq!(cfg.get("bankgroups"), Some(2));
        assert_eq!(cfg.get("tRCD"), Some(22));
        assert!(matches!(
            load_config("nope", None),
            Err(LoadError::UnknownConfig(_))
        ));
        assert!(matches!(load("ddr4", "ddr5-example"), Err(LoadError::StandardMismatch { .. })));
    }
}
