//! JSON experiment files.
//!
//! ```json
//! {
//!   "system": { "kind": "potential",
//!               "potential": { "kind": "square-well", "depth": 1.0, "half_width": 1.0 },
//!               "decay": 3.0 },
//!   "sectors": ["full", "even", "odd"],
//!   "numerics": { "points_per_decade": 60 },
//!   "outputs": { "report": "out/report.json", "csv": "out/s.csv" }
//! }
//! ```
//!
//! Point interactions use `{ "kind": "delta", "alpha": -1 }` or
//! `{ "kind": "delta-prime", "beta": "inf" }`. Tabulated potentials give either
//! inline `x`/`v` arrays or a `file` of two whitespace- or comma-separated
//! columns; relative paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::paths::Sector;
use crate::point::PointInteraction;
use crate::potential::{Gaussian, Potential, ScatteringOptions, Shape};
use crate::report::{ExperimentSpec, Outputs, System};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero,
    SquareWell {
        depth: f64,
        half_width: f64,
        #[serde(default)]
        center: f64,
    },
    GaussianSum {
        wells: Vec<Gaussian>,
    },
    Tabulated {
        #[serde(default)]
        x: Option<Vec<f64>>,
        #[serde(default)]
        v: Option<Vec<f64>>,
        #[serde(default)]
        file: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemConfig {
    Delta {
        alpha: Extended,
    },
    DeltaPrime {
        beta: Extended,
    },
    Potential {
        potential: PotentialConfig,
        #[serde(default)]
        decay: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemConfig,
    #[serde(default = "default_sectors")]
    pub sectors: Vec<Sector>,
    #[serde(default)]
    pub numerics: ScatteringOptions,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_sectors() -> Vec<Sector> {
    vec![Sector::Full]
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<ExperimentSpec> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)?.into_spec(path.parent().unwrap_or(Path::new(".")))
    }

    /// Resolves files relative to `base` and checks the result.
    pub fn into_spec(self, base: &Path) -> Result<ExperimentSpec> {
        let system = match self.system {
            SystemConfig::Delta { alpha } => System::Point {
                interaction: PointInteraction::delta(alpha),
            },
            SystemConfig::DeltaPrime { beta } => System::Point {
                interaction: PointInteraction::delta_prime(beta),
            },
            SystemConfig::Potential { potential, decay } => {
                let shape = potential.into_shape(base)?;
                System::Potential {
                    potential: Potential { shape, decay },
                }
            }
        };
        let resolve = |p: Option<PathBuf>| p.map(|p| if p.is_relative() { base.join(p) } else { p });
        let spec = ExperimentSpec {
            system,
            sectors: self.sectors,
            options: self.numerics,
            outputs: Outputs {
                report: resolve(self.outputs.report),
                csv: resolve(self.outputs.csv),
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl PotentialConfig {
    fn into_shape(self, base: &Path) -> Result<Shape> {
        Ok(match self {
            PotentialConfig::Zero => Shape::Zero,
            PotentialConfig::SquareWell {
                depth,
                half_width,
                center,
            } => Shape::SquareWell {
                depth,
                half_width,
                center,
            },
            PotentialConfig::GaussianSum { wells } => Shape::GaussianSum { wells },
            PotentialConfig::Tabulated { x, v, file } => match (x, v, file) {
                (Some(x), Some(v), None) => Shape::Tabulated { x, v },
                (None, None, Some(f)) => {
                    let path = if f.is_relative() { base.join(f) } else { f };
                    let (x, v) = read_samples(&path)?;
                    Shape::Tabulated { x, v }
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "tabulated potential needs either inline x and v or a file".into(),
                    ))
                }
            },
        })
    }
}

/// Two numeric columns per line; blank lines and `#` comments are skipped.
pub fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let (mut xs, mut vs) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("{}:{}: bad number '{s}'", path.display(), i + 1)))
        };
        match cols.as_slice() {
            [x, v] => {
                xs.push(parse(x)?);
                vs.push(parse(v)?);
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok((xs, vs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_well_defaults() {
        let c = ConfigFile::parse(
            r#"{"system": {"kind": "potential", "potential": {"kind": "square-well", "depth": 1, "half_width": 1}}}"#,
        )
        .unwrap();
        let spec = c.into_spec(Path::new(".")).unwrap();
        assert_eq!(spec.sectors, vec![Sector::Full]);
        assert_eq!(spec.options, ScatteringOptions::default());
        assert_eq!(
            spec.system,
            System::Potential {
                potential: Potential::square_well(1.0, 1.0)
            }
        );
    }

    #[test]
    fn point_with_infinite_parameter() {
        let c = ConfigFile::parse(r#"{"system": {"kind": "delta-prime", "beta": "inf"}, "sectors": ["odd"]}"#).unwrap();
        let spec = c.into_spec(Path::new(".")).unwrap();
        assert_eq!(
            spec.system,
            System::Point {
                interaction: PointInteraction::delta_prime(Extended::PosInf)
            }
        );
    }

    #[test]
    fn partial_numerics_override() {
        let c = ConfigFile::parse(r#"{"system": {"kind": "delta", "alpha": 1}, "numerics": {"points_per_decade": 7}}"#)
            .unwrap();
        assert_eq!(c.numerics.points_per_decade, 7);
        assert_eq!(c.numerics.kappa_max, ScatteringOptions::default().kappa_max);
    }

    #[test]
    fn schema_errors() {
        for bad in [
            r#"{"system": {"kind": "delta", "beta": 1}}"#,
            r#"{"system": {"kind": "magnet"}}"#,
            r#"{"system": {"kind": "delta", "alpha": 1}, "extra": 0}"#,
            r#"{"sectors": ["full"]}"#,
            r#"{"system": {"kind": "delta", "alpha": 1}, "sectors": ["diagonal"]}"#,
        ] {
            assert!(ConfigFile::parse(bad).is_err(), "{bad}");
        }
        let empty = ConfigFile::parse(r#"{"system": {"kind": "delta", "alpha": 1}, "sectors": []}"#).unwrap();
        assert!(empty.into_spec(Path::new(".")).is_err());
    }

    #[test]
    fn tabulated_needs_ascending_abscissae() {
        let c = ConfigFile::parse(
            r#"{"system": {"kind": "potential", "potential": {"kind": "tabulated", "x": [0, 1, 1], "v": [0, -1, 0]}}}"#,
        )
        .unwrap();
        assert!(c.into_spec(Path::new(".")).is_err());
        let both = ConfigFile::parse(
            r#"{"system": {"kind": "potential", "potential": {"kind": "tabulated", "x": [0, 1], "v": [0, 0], "file": "a"}}}"#,
        )
        .unwrap();
        assert!(both.into_spec(Path::new(".")).is_err());
    }

    #[test]
    fn tabulated_from_file() {
        let dir = std::env::temp_dir().join(format!("levinson-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("v.dat"), "# x v\n-1, 0\n0 -2\n\n1 0\n").unwrap();
        let c = ConfigFile::parse(
            r#"{"system": {"kind": "potential", "potential": {"kind": "tabulated", "file": "v.dat"}}}"#,
        )
        .unwrap();
        let spec = c.into_spec(&dir).unwrap();
        let System::Potential { potential } = spec.system else {
            panic!()
        };
        assert_eq!(
            potential.shape,
            Shape::Tabulated {
                x: vec![-1.0, 0.0, 1.0],
                v: vec![0.0, -2.0, 0.0]
            }
        );
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
