use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gesture::{GestureSpaceConfig, Regions, TypingParams, VariationAggregate};
use crate::viewmodel::{Thresholds, TsneParams};

/// Analysis and display settings, stored as one JSON file.
///
/// Missing keys take their defaults, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub variation_threshold: f64,
    pub change_threshold: f64,
    pub grid_resolution: usize,
    pub tsne_seed: u64,
    pub tsne_perplexity: f64,
    pub tsne_iterations: usize,
    pub typing_alpha: f64,
    pub typing_beta: f64,
    pub regions: Regions,
    pub glyph_samples: usize,
    pub variation_aggregate: VariationAggregate,
    /// Number of gesture clusters; capped at the segment count.
    pub cluster_count: usize,
    /// Frame rate for pose files without timestamps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fps: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            variation_threshold: 0.4,
            change_threshold: 0.5,
            grid_resolution: 64,
            tsne_seed: 42,
            tsne_perplexity: 10.0,
            tsne_iterations: 1000,
            typing_alpha: 0.8,
            typing_beta: 1.6,
            regions: Regions::default(),
            glyph_samples: 24,
            variation_aggregate: VariationAggregate::Mean,
            cluster_count: 4,
            fps: None,
        }
    }
}

impl AnalysisConfig {
    pub fn from_json(source: &[u8]) -> Result<Self> {
        let config: AnalysisConfig = serde_json::from_slice(source)
            .map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&bytes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("variation_threshold", self.variation_threshold),
            ("change_threshold", self.change_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.grid_resolution == 0 {
            return Err(Error::Config("grid_resolution must be positive".into()));
        }
        if !(self.tsne_perplexity.is_finite() && self.tsne_perplexity > 0.0) {
            return Err(Error::Config("tsne_perplexity must be positive".into()));
        }
        if !(self.typing_alpha > 0.0 && self.typing_beta >= self.typing_alpha) {
            return Err(Error::Config(
                "typing thresholds need 0 < typing_alpha <= typing_beta".into(),
            ));
        }
        if self.glyph_samples == 0 {
            return Err(Error::Config("glyph_samples must be positive".into()));
        }
        if self.cluster_count == 0 {
            return Err(Error::Config("cluster_count must be at least 1".into()));
        }
        if let Some(fps) = self.fps {
            if !(fps.is_finite() && fps > 0.0) {
                return Err(Error::Config("fps must be positive".into()));
            }
        }
        self.regions.validate()
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            variation: self.variation_threshold,
            change: self.change_threshold,
        }
    }

    pub fn gesture_space(&self) -> GestureSpaceConfig {
        GestureSpaceConfig {
            regions: self.regions,
            grid_resolution: self.grid_resolution,
        }
    }

    pub fn typing(&self) -> TypingParams {
        TypingParams {
            alpha: self.typing_alpha,
            beta: self.typing_beta,
        }
    }

    pub fn tsne(&self) -> TsneParams {
        TsneParams {
            perplexity: self.tsne_perplexity,
            iterations: self.tsne_iterations,
            seed: self.tsne_seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_defaults() {
        let c = AnalysisConfig::from_json(b"{}").unwrap();
        assert_eq!(c, AnalysisConfig::default());
        assert_eq!(c.variation_threshold, 0.4);
        assert_eq!(c.change_threshold, 0.5);
    }

    #[test]
    fn round_trip() {
        let c = AnalysisConfig { tsne_seed: 7, fps: Some(25.0), ..Default::default() };
        assert_eq!(AnalysisConfig::from_json(c.to_json().as_bytes()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(AnalysisConfig::from_json(br#"{"variation_threshold": 1.5}"#).is_err());
        assert!(AnalysisConfig::from_json(br#"{"grid_resolution": 0}"#).is_err());
        assert!(AnalysisConfig::from_json(br#"{"typing_alpha": 2.0}"#).is_err());
        assert!(AnalysisConfig::from_json(br#"{"no_such_key": 1}"#).is_err());
        let bad_regions = r#"{"regions": {
            "center_center": {"x_min": -0.5, "x_max": 0.5, "y_min": -0.5, "y_max": 0.5},
            "center": {"x_min": -0.4, "x_max": 0.4, "y_min": -0.45, "y_max": 0.22},
            "periphery": {"x_min": -0.75, "x_max": 0.75, "y_min": -0.8, "y_max": 0.45}}}"#;
        assert!(matches!(
            AnalysisConfig::from_json(bad_regions.as_bytes()),
            Err(Error::Config(_))
        ));
    }
}
