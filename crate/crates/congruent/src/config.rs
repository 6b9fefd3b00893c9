//! Run configuration: a flat, strictly parsed JSON object.

use std::fmt;
use std::path::Path;

use congruent_core::{max_delta, EllipsoidSpec};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A number, or `"auto"` to let the harness choose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Auto,
    Value(f64),
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Param::Auto => s.serialize_str("auto"),
            Param::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ParamVisitor;

        impl Visitor<'_> for ParamVisitor {
            type Value = Param;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"auto\" or a number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Param, E> {
                if v == "auto" {
                    Ok(Param::Auto)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Param, E> {
                Ok(Param::Value(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Param, E> {
                Ok(Param::Value(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Param, E> {
                Ok(Param::Value(v as f64))
            }
        }

        d.deserialize_any(ParamVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "sections-O")]
    SectionsO,
    #[serde(rename = "projections-O")]
    ProjectionsO,
    #[serde(rename = "sections-SO")]
    SectionsSO,
    #[serde(rename = "lemmas")]
    Lemmas,
    #[serde(rename = "distinctness")]
    Distinctness,
    #[serde(rename = "convexity")]
    Convexity,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::SectionsO,
        Suite::ProjectionsO,
        Suite::SectionsSO,
        Suite::Lemmas,
        Suite::Distinctness,
        Suite::Convexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SectionsO => "sections-O",
            Suite::ProjectionsO => "projections-O",
            Suite::SectionsSO => "sections-SO",
            Suite::Lemmas => "lemmas",
            Suite::Distinctness => "distinctness",
            Suite::Convexity => "convexity",
        }
    }

    /// Suites that certify one map per sampled direction.
    pub fn is_directional(self) -> bool {
        matches!(
            self,
            Suite::SectionsO | Suite::ProjectionsO | Suite::SectionsSO
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub semi_axes: Vec<f64>,
    pub delta: Param,
    pub epsilon: Param,
    pub directions: usize,
    pub subsphere_samples: usize,
    pub seed: u64,
    pub suites: Vec<Suite>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    /// Standard axes `(n, n−1, …, 1)`, automatic parameters, all suites.
    pub fn standard(n: usize) -> Self {
        Self {
            n,
            semi_axes: (1..=n).rev().map(|a| a as f64).collect(),
            delta: Param::Auto,
            epsilon: Param::Auto,
            directions: 1000,
            subsphere_samples: 10_000,
            seed: 7,
            suites: Suite::ALL.to_vec(),
        }
    }

    pub fn ellipsoid(&self) -> Result<EllipsoidSpec, ConfigError> {
        EllipsoidSpec::new(&self.semi_axes).map_err(|e| match e {
            congruent_core::Error::InvalidInput(msg) => {
                ConfigError::Invalid(msg.replace("semi-axes", "semi_axes"))
            }
            other => ConfigError::Invalid(format!("semi_axes: {other}")),
        })
    }

    /// Checks everything that does not need a run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.semi_axes.len() != self.n {
            return invalid(format!(
                "semi_axes has {} entries but n = {}",
                self.semi_axes.len(),
                self.n
            ));
        }
        let e = self.ellipsoid()?;
        if let Param::Value(d) = self.delta {
            let md = max_delta(&e);
            if !(d > 0.0) {
                return invalid(format!("delta must be positive, got {d}"));
            }
            if d >= md {
                return invalid(format!("delta exceeds max_delta {md}"));
            }
        }
        if let Param::Value(eps) = self.epsilon {
            if !(eps >= 0.0 && eps.is_finite()) {
                return invalid(format!(
                    "epsilon must be finite and non-negative, got {eps}"
                ));
            }
        }
        if self.directions == 0 {
            return invalid("directions must be at least 1".into());
        }
        if self.subsphere_samples == 0 {
            return invalid("subsphere_samples must be at least 1".into());
        }
        if self.suites.is_empty() {
            return invalid("suites must not be empty".into());
        }
        Ok(())
    }
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig =
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}
