//! Line-oriented `key = value` run configuration with `[section]` headers.
//!
//! Sections: `mesh`, `model`, `source`, `initial`, `output`. Unknown
//! sections and keys are rejected, as are duplicate keys. Defaults are
//! documented in the README next to the format reference.

use decsim_core::{Injection, MeshFormat, SourceSignal};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key '{key}' in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: duplicate key '{key}' in section [{section}]")]
    DuplicateKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: key '{key}' expects {expected}, got '{got}'")]
    TypeMismatch {
        line: usize,
        key: String,
        expected: &'static str,
        got: String,
    },
    #[error("missing required key '{key}' in section [{section}]")]
    MissingKey { section: String, key: String },
    #[error("line {line}: {message}")]
    InvalidValue { line: usize, message: String },
    #[error("line {line}: model '{name}' is unsupported (supported: wave, heat, laplace, poisson)")]
    UnsupportedModel { line: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Wave,
    Heat,
    Laplace,
    Poisson,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelKind::Wave => "wave",
            ModelKind::Heat => "heat",
            ModelKind::Laplace => "laplace",
            ModelKind::Poisson => "poisson",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    /// 0.9 times the model's stability bound.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    File {
        path: PathBuf,
        format: Option<MeshFormat>,
    },
    Tetrahedron {
        edge_length: f64,
    },
    Icosphere {
        radius: f64,
        subdivisions: u32,
    },
    FlatGrid {
        nx: usize,
        ny: usize,
        spacing: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// `amplitude * exp(-d^2 / (2 width^2))` with `d` the straight-line
    /// distance from the center vertex.
    GaussianBump {
        vertex: usize,
        amplitude: f64,
        width: f64,
    },
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Vtk,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Vtk => "vtk",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub mesh: MeshSpec,
    pub model: ModelKind,
    /// Wave speed or diffusivity.
    pub c: f64,
    pub dt: DtPolicy,
    pub steps: u64,
    pub snapshot_every: u64,
    pub source: SourceSignal,
    pub initial: InitialCondition,
    pub constraints: Vec<(usize, f64)>,
    pub output_dir: PathBuf,
    pub output_format: OutputFormat,
    /// Non-fatal findings collected while parsing (e.g. ignored keys for
    /// the chosen model).
    pub warnings: Vec<String>,
}

pub fn parse_config(path: &Path) -> Result<SimulationConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

const SECTIONS: [&str; 5] = ["mesh", "model", "source", "initial", "output"];

const MESH_KEYS: [&str; 9] = [
    "path",
    "format",
    "generator",
    "radius",
    "subdivisions",
    "edge_length",
    "nx",
    "ny",
    "spacing",
];
const MODEL_KEYS: [&str; 6] = ["kind", "c", "dt", "steps", "snapshot_every", "constraints"];
const SOURCE_KEYS: [&str; 7] = [
    "kind",
    "vertex",
    "amplitude",
    "t0",
    "sigma",
    "frequency",
    "injection",
];
const INITIAL_KEYS: [&str; 5] = ["kind", "vertex", "amplitude", "width", "value"];
const OUTPUT_KEYS: [&str; 2] = ["dir", "format"];

/// Raw parsed keys: (section, key) -> (line, value).
type RawKeys = BTreeMap<(String, String), (usize, String)>;

pub fn parse_config_str(text: &str) -> Result<SimulationConfig, ConfigError> {
    let raw = tokenize(text)?;
    build(raw)
}

fn tokenize(text: &str) -> Result<RawKeys, ConfigError> {
    let mut section: Option<String> = None;
    let mut raw: RawKeys = BTreeMap::new();
    for (idx, line_raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = line_raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ConfigError::Syntax {
                    line,
                    message: "unterminated section header".into(),
                });
            };
            let name = name.trim().to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::UnknownSection { line, name });
            }
            section = Some(name);
            continue;
        }
        let Some(section) = section.as_deref() else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("'{trimmed}' appears before any [section] header"),
            });
        };
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("expected 'key = value', got '{trimmed}'"),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        let allowed: &[&str] = match section {
            "mesh" => &MESH_KEYS,
            "model" => &MODEL_KEYS,
            "source" => &SOURCE_KEYS,
            "initial" => &INITIAL_KEYS,
            "output" => &OUTPUT_KEYS,
            _ => unreachable!("section names are validated above"),
        };
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                line,
                section: section.to_string(),
                key,
            });
        }
        if raw
            .insert((section.to_string(), key.clone()), (line, value))
            .is_some()
        {
            return Err(ConfigError::DuplicateKey {
                line,
                section: section.to_string(),
                key,
            });
        }
    }
    Ok(raw)
}

struct Keys {
    raw: RawKeys,
    used: Vec<(String, String)>,
}

impl Keys {
    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.used.push((section.to_string(), key.to_string()));
        self.raw.get(&(section.to_string(), key.to_string())).cloned()
    }

    fn leftover(&self) -> Option<((String, String), usize)> {
        self.raw
            .iter()
            .find(|(k, _)| !self.used.contains(k))
            .map(|(k, &(line, _))| (k.clone(), line))
    }
}

fn parse_typed<T: std::str::FromStr>(
    entry: &(usize, String),
    key: &str,
    expected: &'static str,
) -> Result<T, ConfigError> {
    entry.1.parse().map_err(|_| ConfigError::TypeMismatch {
        line: entry.0,
        key: key.to_string(),
        expected,
        got: entry.1.clone(),
    })
}

fn positive(value: f64, key: &str, line: usize) -> Result<f64, ConfigError> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(ConfigError::InvalidValue {
            line,
            message: format!("'{key}' must be positive, got {value}"),
        });
    }
    Ok(value)
}

fn build(raw: RawKeys) -> Result<SimulationConfig, ConfigError> {
    let mut keys = Keys {
        raw,
        used: Vec::new(),
    };
    let mut warnings = Vec::new();

    let mesh = build_mesh_spec(&mut keys)?;
    let (model, model_line) = match keys.take("model", "kind") {
        Some(entry) => {
            let name = entry.1.to_ascii_lowercase();
            let kind = match name.as_str() {
                "wave" => ModelKind::Wave,
                "heat" => ModelKind::Heat,
                "laplace" => ModelKind::Laplace,
                "poisson" => ModelKind::Poisson,
                "nonlinear" | "nonlinear_wave" | "dispersive" | "dispersive_wave" => {
                    return Err(ConfigError::UnsupportedModel { line: entry.0, name })
                }
                _ => {
                    return Err(ConfigError::TypeMismatch {
                        line: entry.0,
                        key: "kind".into(),
                        expected: "one of wave, heat, laplace, poisson",
                        got: entry.1,
                    })
                }
            };
            (kind, entry.0)
        }
        None => {
            return Err(ConfigError::MissingKey {
                section: "model".into(),
                key: "kind".into(),
            })
        }
    };

    let c = match keys.take("model", "c") {
        Some(entry) => positive(parse_typed(&entry, "c", "a number")?, "c", entry.0)?,
        None => 1.0,
    };
    let dt = match keys.take("model", "dt") {
        Some(entry) => {
            if entry.1.eq_ignore_ascii_case("auto") {
                DtPolicy::Auto
            } else {
                let v: f64 = parse_typed(&entry, "dt", "a number or 'auto'")?;
                DtPolicy::Fixed(positive(v, "dt", entry.0)?)
            }
        }
        None => DtPolicy::Auto,
    };
    let steps = match keys.take("model", "steps") {
        Some(entry) => {
            let v: u64 = parse_typed(&entry, "steps", "a positive integer")?;
            if v == 0 {
                return Err(ConfigError::InvalidValue {
                    line: entry.0,
                    message: "'steps' must be at least 1".into(),
                });
            }
            v
        }
        None => 1000,
    };
    let snapshot_every = match keys.take("model", "snapshot_every") {
        Some(entry) => {
            let v: u64 = parse_typed(&entry, "snapshot_every", "a positive integer")?;
            if v == 0 {
                return Err(ConfigError::InvalidValue {
                    line: entry.0,
                    message: "'snapshot_every' must be at least 1".into(),
                });
            }
            v
        }
        None => 10,
    };
    let constraints = match keys.take("model", "constraints") {
        Some(entry) => parse_constraints(&entry)?,
        None => Vec::new(),
    };
    if !constraints.is_empty() && matches!(model, ModelKind::Wave | ModelKind::Heat) {
        warnings.push(format!(
            "constraints are ignored for model {model} (line {model_line})"
        ));
    }

    let source = build_source(&mut keys)?;
    if !source.is_none() && matches!(model, ModelKind::Laplace | ModelKind::Poisson) {
        warnings.push(format!("source is ignored for model {model}"));
    }
    let initial = build_initial(&mut keys)?;

    let output_dir = match keys.take("output", "dir") {
        Some(entry) => PathBuf::from(entry.1),
        None => PathBuf::from("out"),
    };
    let output_format = match keys.take("output", "format") {
        Some(entry) => match entry.1.to_ascii_lowercase().as_str() {
            "vtk" => OutputFormat::Vtk,
            "csv" => OutputFormat::Csv,
            _ => {
                return Err(ConfigError::TypeMismatch {
                    line: entry.0,
                    key: "format".into(),
                    expected: "vtk or csv",
                    got: entry.1,
                })
            }
        },
        None => OutputFormat::Vtk,
    };

    if let Some(((section, key), line)) = keys.leftover() {
        // Keys valid for the section but meaningless for the chosen
        // generator/kind, e.g. [mesh] radius with generator=tetrahedron.
        return Err(ConfigError::InvalidValue {
            line,
            message: format!("key '{key}' in [{section}] does not apply to this configuration"),
        });
    }

    Ok(SimulationConfig {
        mesh,
        model,
        c,
        dt,
        steps,
        snapshot_every,
        source,
        initial,
        constraints,
        output_dir,
        output_format,
        warnings,
    })
}

fn build_mesh_spec(keys: &mut Keys) -> Result<MeshSpec, ConfigError> {
    let path = keys.take("mesh", "path");
    let generator = keys.take("mesh", "generator");
    match (path, generator) {
        (Some(_), Some(g)) => Err(ConfigError::InvalidValue {
            line: g.0,
            message: "give either 'path' or 'generator' in [mesh], not both".into(),
        }),
        (Some(path_entry), None) => {
            let format = match keys.take("mesh", "format") {
                Some(entry) => Some(match entry.1.to_ascii_lowercase().as_str() {
                    "off" => MeshFormat::Off,
                    "obj" => MeshFormat::Obj,
                    _ => {
                        return Err(ConfigError::TypeMismatch {
                            line: entry.0,
                            key: "format".into(),
                            expected: "off or obj",
                            got: entry.1,
                        })
                    }
                }),
                None => None,
            };
            Ok(MeshSpec::File {
                path: PathBuf::from(path_entry.1),
                format,
            })
        }
        (None, Some(gen_entry)) => match gen_entry.1.to_ascii_lowercase().as_str() {
            "tetrahedron" => {
                let edge_length = match keys.take("mesh", "edge_length") {
                    Some(entry) => {
                        positive(parse_typed(&entry, "edge_length", "a number")?, "edge_length", entry.0)?
                    }
                    None => 1.0,
                };
                Ok(MeshSpec::Tetrahedron { edge_length })
            }
            "icosphere" => {
                let radius = match keys.take("mesh", "radius") {
                    Some(entry) => positive(parse_typed(&entry, "radius", "a number")?, "radius", entry.0)?,
                    None => 1.0,
                };
                let subdivisions = match keys.take("mesh", "subdivisions") {
                    Some(entry) => {
                        let v: u32 = parse_typed(&entry, "subdivisions", "an integer in 0..=7")?;
                        if v > 7 {
                            return Err(ConfigError::InvalidValue {
                                line: entry.0,
                                message: format!("'subdivisions' must be at most 7, got {v}"),
                            });
                        }
                        v
                    }
                    None => 3,
                };
                Ok(MeshSpec::Icosphere {
                    radius,
                    subdivisions,
                })
            }
            "flat_grid" => {
                let parse_dim = |entry: Option<(usize, String)>, key: &str| -> Result<usize, ConfigError> {
                    match entry {
                        Some(e) => {
                            let v: usize = parse_typed(&e, key, "an integer >= 2")?;
                            if v < 2 {
                                return Err(ConfigError::InvalidValue {
                                    line: e.0,
                                    message: format!("'{key}' must be at least 2, got {v}"),
                                });
                            }
                            Ok(v)
                        }
                        None => Ok(17),
                    }
                };
                let nx = parse_dim(keys.take("mesh", "nx"), "nx")?;
                let ny = parse_dim(keys.take("mesh", "ny"), "ny")?;
                let spacing = match keys.take("mesh", "spacing") {
                    Some(entry) => positive(parse_typed(&entry, "spacing", "a number")?, "spacing", entry.0)?,
                    None => 1.0,
                };
                Ok(MeshSpec::FlatGrid { nx, ny, spacing })
            }
            _ => Err(ConfigError::TypeMismatch {
                line: gen_entry.0,
                key: "generator".into(),
                expected: "one of tetrahedron, icosphere, flat_grid",
                got: gen_entry.1,
            }),
        },
        (None, None) => Err(ConfigError::MissingKey {
            section: "mesh".into(),
            key: "path or generator".into(),
        }),
    }
}

fn build_source(keys: &mut Keys) -> Result<SourceSignal, ConfigError> {
    let kind = match keys.take("source", "kind") {
        Some(entry) => entry,
        None => return Ok(SourceSignal::None),
    };
    let name = kind.1.to_ascii_lowercase();
    if name == "none" {
        return Ok(SourceSignal::None);
    }
    let vertex = match keys.take("source", "vertex") {
        Some(entry) => parse_typed(&entry, "vertex", "a vertex index")?,
        None => 0,
    };
    let amplitude = match keys.take("source", "amplitude") {
        Some(entry) => parse_typed(&entry, "amplitude", "a number")?,
        None => 1.0,
    };
    let injection = match keys.take("source", "injection") {
        Some(entry) => match entry.1.to_ascii_lowercase().as_str() {
            "hard" => Injection::Hard,
            "additive" => Injection::Additive,
            _ => {
                return Err(ConfigError::TypeMismatch {
                    line: entry.0,
                    key: "injection".into(),
                    expected: "hard or additive",
                    got: entry.1,
                })
            }
        },
        None => Injection::Hard,
    };
    match name.as_str() {
        "gaussian_pulse" => {
            let sigma = match keys.take("source", "sigma") {
                Some(entry) => positive(parse_typed(&entry, "sigma", "a number")?, "sigma", entry.0)?,
                None => {
                    return Err(ConfigError::MissingKey {
                        section: "source".into(),
                        key: "sigma".into(),
                    })
                }
            };
            let center_time = match keys.take("source", "t0") {
                Some(entry) => parse_typed(&entry, "t0", "a number")?,
                // Ramp in from effectively zero.
                None => 4.0 * sigma,
            };
            Ok(SourceSignal::GaussianPulse {
                vertex,
                amplitude,
                center_time,
                width: sigma,
                injection,
            })
        }
        "sine" => {
            let frequency = match keys.take("source", "frequency") {
                Some(entry) => {
                    positive(parse_typed(&entry, "frequency", "a number")?, "frequency", entry.0)?
                }
                None => {
                    return Err(ConfigError::MissingKey {
                        section: "source".into(),
                        key: "frequency".into(),
                    })
                }
            };
            Ok(SourceSignal::Sine {
                vertex,
                amplitude,
                frequency,
                injection,
            })
        }
        _ => Err(ConfigError::TypeMismatch {
            line: kind.0,
            key: "kind".into(),
            expected: "one of none, gaussian_pulse, sine",
            got: kind.1,
        }),
    }
}

fn build_initial(keys: &mut Keys) -> Result<InitialCondition, ConfigError> {
    let kind = match keys.take("initial", "kind") {
        Some(entry) => entry,
        None => return Ok(InitialCondition::Zero),
    };
    match kind.1.to_ascii_lowercase().as_str() {
        "zero" => Ok(InitialCondition::Zero),
        "gaussian_bump" => {
            let vertex = match keys.take("initial", "vertex") {
                Some(entry) => parse_typed(&entry, "vertex", "a vertex index")?,
                None => 0,
            };
            let amplitude = match keys.take("initial", "amplitude") {
                Some(entry) => parse_typed(&entry, "amplitude", "a number")?,
                None => 1.0,
            };
            let width = match keys.take("initial", "width") {
                Some(entry) => positive(parse_typed(&entry, "width", "a number")?, "width", entry.0)?,
                None => {
                    return Err(ConfigError::MissingKey {
                        section: "initial".into(),
                        key: "width".into(),
                    })
                }
            };
            Ok(InitialCondition::GaussianBump {
                vertex,
                amplitude,
                width,
            })
        }
        "constant" => {
            let value = match keys.take("initial", "value") {
                Some(entry) => parse_typed(&entry, "value", "a number")?,
                None => {
                    return Err(ConfigError::MissingKey {
                        section: "initial".into(),
                        key: "value".into(),
                    })
                }
            };
            Ok(InitialCondition::Constant(value))
        }
        _ => Err(ConfigError::TypeMismatch {
            line: kind.0,
            key: "kind".into(),
            expected: "one of zero, gaussian_bump, constant",
            got: kind.1,
        }),
    }
}

fn parse_constraints(entry: &(usize, String)) -> Result<Vec<(usize, f64)>, ConfigError> {
    let mut out = Vec::new();
    for part in entry.1.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((v, value)) = part.split_once(':') else {
            return Err(ConfigError::TypeMismatch {
                line: entry.0,
                key: "constraints".into(),
                expected: "a list like '0:5.0, 3:1.25'",
                got: part.to_string(),
            });
        };
        let vertex: usize = v.trim().parse().map_err(|_| ConfigError::TypeMismatch {
            line: entry.0,
            key: "constraints".into(),
            expected: "a vertex index before ':'",
            got: v.trim().to_string(),
        })?;
        let value: f64 = value.trim().parse().map_err(|_| ConfigError::TypeMismatch {
            line: entry.0,
            key: "constraints".into(),
            expected: "a number after ':'",
            got: value.trim().to_string(),
        })?;
        out.push((vertex, value));
    }
    Ok(out)
}
