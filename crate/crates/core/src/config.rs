//! Toolkit-wide JSON configuration: strict parsing (unknown keys rejected),
//! documented defaults per section, and the demo wall preset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::CellFamilyConfig;
use crate::regression::{AlertMode, AlertPolicy};
use crate::similarity::MeasureKind;
use crate::vision::{Rect, SamplingSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {0} not found")]
    NotFound(PathBuf),
    #[error("config parse: {0}")]
    Parse(String),
    #[error("config invalid: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToolkitConfig {
    pub geometry: GeometryConfig,
    pub wall: WallConfig,
    pub piping: PipingConfig,
    pub detection: DetectionConfig,
    pub io: IoConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    /// Shared height of the canonical cell family.
    pub height: f64,
    /// Strictly increasing widths for classes A, B, C.
    pub widths: [f64; 3],
    /// Twist for free parametric generation, degrees.
    pub angle: f64,
    /// Top/bottom side ratio for free parametric generation.
    pub ratio: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            height: 1.0,
            widths: [1.0, 1.5, 2.0],
            angle: 0.0,
            ratio: 1.0,
        }
    }
}

impl GeometryConfig {
    pub fn family(&self) -> CellFamilyConfig {
        CellFamilyConfig {
            height: self.height,
            widths: self.widths,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WallConfig {
    /// Row width target, model units.
    pub target_width: f64,
    pub rows: usize,
    pub tolerance: f64,
    /// Physical units (feet) per model unit.
    pub unit_scale: f64,
    pub stacking: crate::assembly::StackingMode,
    pub row_offset: f64,
    pub magnets: Option<crate::assembly::MagnetSpec>,
}

impl Default for WallConfig {
    fn default() -> Self {
        WallConfig {
            target_width: 6.0,
            rows: 4,
            tolerance: 1e-6,
            unit_scale: 1.0,
            stacking: crate::assembly::StackingMode::Vertical,
            row_offset: 0.0,
            magnets: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipingConfig {
    /// Pipe type names assigned per instance, cycled when shorter than the
    /// instance count.
    pub pipes: Vec<String>,
    pub pump_instance: usize,
    pub pump_face: String,
    pub coupling_horizontal: bool,
    pub coupling_vertical: bool,
    /// Maximum rotation assignments to emit.
    pub solutions_limit: usize,
}

impl Default for PipingConfig {
    fn default() -> Self {
        PipingConfig {
            pipes: vec!["cross".into()],
            pump_instance: 0,
            pump_face: "left".into(),
            coupling_horizontal: true,
            coupling_vertical: true,
            solutions_limit: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionConfig {
    pub sampling: SamplingSpec,
    pub test_region: Rect,
    pub control_region: Rect,
    /// One of the ten lowercase measure names.
    pub measure: String,
    pub minkowski_p: f64,
    pub hamming_quantization: u32,
    pub kulczynski_epsilon: f64,
    pub alert: AlertPolicy,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        let regions = crate::vision::synthetic_regions();
        DetectionConfig {
            sampling: SamplingSpec::default(),
            test_region: regions.test,
            control_region: regions.control,
            measure: "euclidean".into(),
            minkowski_p: crate::similarity::DEFAULT_MINKOWSKI_P,
            hamming_quantization: crate::similarity::DEFAULT_HAMMING_QUANTIZATION,
            kulczynski_epsilon: crate::similarity::DEFAULT_KULCZYNSKI_EPSILON,
            alert: AlertPolicy {
                threshold: 100.0,
                mode: AlertMode::ByDifference,
            },
        }
    }
}

impl DetectionConfig {
    /// Resolve the configured measure name and parameters.
    pub fn measure_kind(&self) -> Result<MeasureKind, ConfigError> {
        let kind = match self.measure.as_str() {
            "hamming" => MeasureKind::Hamming {
                quantization: self.hamming_quantization,
            },
            "minkowski" => MeasureKind::Minkowski { p: self.minkowski_p },
            "kulczynski" => MeasureKind::Kulczynski {
                epsilon: self.kulczynski_epsilon,
            },
            name => MeasureKind::from_name(name).ok_or_else(|| {
                ConfigError::Invalid(format!("unknown measure {name:?}"))
            })?,
        };
        Ok(kind)
    }

    pub fn regions(&self) -> crate::vision::FrameRegions {
        crate::vision::FrameRegions {
            test: self.test_region,
            control: self.control_region,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoConfig {
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for IoConfig {
    fn default() -> Self {
        IoConfig {
            output_dir: PathBuf::from("pbrkit-out"),
            seed: 0,
        }
    }
}

impl ToolkitConfig {
    pub fn from_json(text: &str) -> Result<ToolkitConfig, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Load from an explicit path (must exist), else from `./pbrkit.json`
    /// when present, else built-in defaults.
    pub fn load(explicit: Option<&Path>) -> Result<ToolkitConfig, ConfigError> {
        let path = match explicit {
            Some(p) => {
                if !p.exists() {
                    return Err(ConfigError::NotFound(p.to_path_buf()));
                }
                p.to_path_buf()
            }
            None => {
                let default = Path::new("pbrkit.json");
                if !default.exists() {
                    return Ok(ToolkitConfig::default());
                }
                default.to_path_buf()
            }
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The demonstrator wall: four rows of seven bricks at three derived
    /// widths, scaled to a 5 ft x 3 ft footprint.
    ///
    /// With widths (20 -/+ 3)/21 and 20/21 model units and a 20/3 target,
    /// a composition sums to the target only when it uses exactly 7 cells
    /// with equally many A and C, so every row has 7 bricks and 4 rows give
    /// 28. At 0.75 ft per model unit the wall measures exactly 5 ft wide
    /// (20/3 * 3/4) by 3 ft tall (4 rows * 3/4 ft).
    pub fn paper_demo() -> ToolkitConfig {
        ToolkitConfig {
            geometry: GeometryConfig {
                height: 1.0,
                widths: [17.0 / 21.0, 20.0 / 21.0, 23.0 / 21.0],
                angle: 0.0,
                ratio: 1.0,
            },
            wall: WallConfig {
                target_width: 20.0 / 3.0,
                rows: 4,
                tolerance: 1e-9,
                unit_scale: 0.75,
                stacking: crate::assembly::StackingMode::Vertical,
                row_offset: 0.0,
                magnets: None,
            },
            ..ToolkitConfig::default()
        }
    }
}
