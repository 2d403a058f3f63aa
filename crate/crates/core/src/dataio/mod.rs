//! Ingestion, windowing, normalization and synthesis of multichannel
//! activity-sensing time series.
//!
//! A [`Dataset`] is an ordered collection of fixed-shape [`SensorWindow`]s
//! sharing channel names and sample rate. Windows store samples in `f64`
//! channel-major `(channels, time)` layout; the neural modules convert to
//! `f32` at their boundary.

mod csv_io;
mod split;
mod synth;

pub use csv_io::{load_csv, CsvLoadReport, CsvSchema};
pub use split::kfold_split;
pub use synth::{synthesize, synthesize_walk, ActivitySpec, AttributeEffect, SyntheticSpec, WalkSpec};

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One fixed-length window of multichannel sensor samples with annotations.
///
/// `attribute_labels` are evaluation-only metadata: no training operation in
/// the feature-extraction or generative modules reads them.
#[derive(Debug, Clone)]
pub struct SensorWindow {
    /// Channel-major samples, shape `(n_channels, window_len)`.
    pub samples: Array2<f64>,
    pub activity_label: String,
    pub attribute_labels: BTreeMap<String, String>,
    pub subject_id: String,
    pub sample_rate_hz: f64,
}

/// Per-channel mean and standard deviation used for z-scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Csv,
    Synthetic,
    Reconstructed,
}

/// An ordered collection of windows with shared geometry.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub windows: Vec<SensorWindow>,
    pub channel_names: Vec<String>,
    /// Set once the dataset has been z-scored (or had external stats applied).
    pub normalization_stats: Option<NormalizationStats>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(windows: Vec<SensorWindow>, channel_names: Vec<String>, provenance: Provenance) -> Self {
        Dataset { windows, channel_names, normalization_stats: None, provenance }
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// `(n_channels, window_len)` of the first window.
    pub fn window_shape(&self) -> (usize, usize) {
        self.windows.first().map(|w| w.samples.dim()).unwrap_or((self.channel_names.len(), 0))
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.windows.first().map(|w| w.sample_rate_hz).unwrap_or(0.0)
    }

    /// Distinct activity labels in sorted order.
    pub fn activity_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self.windows.iter().map(|w| w.activity_label.clone()).collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Distinct values of the named attribute in sorted order.
    pub fn attribute_values(&self, attribute: &str) -> Vec<String> {
        let mut values: Vec<String> = self
            .windows
            .iter()
            .filter_map(|w| w.attribute_labels.get(attribute).cloned())
            .collect();
        values.sort();
        values.dedup();
        values
    }

    /// Compute per-channel stats over the given window indices.
    pub fn stats_over(&self, indices: &[usize]) -> NormalizationStats {
        let (c, t) = self.window_shape();
        let mut means = vec![0.0f64; c];
        let mut stds = vec![0.0f64; c];
        let n = (indices.len() * t).max(1) as f64;
        for &i in indices {
            for ch in 0..c {
                for j in 0..t {
                    means[ch] += self.windows[i].samples[[ch, j]];
                }
            }
        }
        for m in &mut means {
            *m /= n;
        }
        for &i in indices {
            for ch in 0..c {
                for j in 0..t {
                    let d = self.windows[i].samples[[ch, j]] - means[ch];
                    stds[ch] += d * d;
                }
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if *s < 1e-12 {
                *s = 1.0; // constant channel: leave values centered only
            }
        }
        NormalizationStats { means, stds }
    }

    /// Z-score every channel using stats computed over all windows.
    /// Returns the stats that were applied.
    pub fn normalize(&mut self) -> NormalizationStats {
        let all: Vec<usize> = (0..self.len()).collect();
        let stats = self.stats_over(&all);
        self.apply_normalization(&stats);
        stats
    }

    /// Apply externally computed stats (e.g. from training folds) unchanged.
    pub fn apply_normalization(&mut self, stats: &NormalizationStats) {
        for w in &mut self.windows {
            for (ch, mut row) in w.samples.rows_mut().into_iter().enumerate() {
                let (m, s) = (stats.means[ch], stats.stds[ch]);
                row.mapv_inplace(|v| (v - m) / s);
            }
        }
        self.normalization_stats = Some(stats.clone());
    }

    /// Invert [`Self::apply_normalization`].
    pub fn denormalize(&mut self) {
        if let Some(stats) = self.normalization_stats.take() {
            for w in &mut self.windows {
                for (ch, mut row) in w.samples.rows_mut().into_iter().enumerate() {
                    let (m, s) = (stats.means[ch], stats.stds[ch]);
                    row.mapv_inplace(|v| v * s + m);
                }
            }
        }
    }

    /// True when every channel of the given windows is approximately z-scored.
    pub fn is_normalized(&self) -> bool {
        self.normalization_stats.is_some()
    }

    /// New dataset holding clones of the selected windows.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            windows: indices.iter().map(|&i| self.windows[i].clone()).collect(),
            channel_names: self.channel_names.clone(),
            normalization_stats: self.normalization_stats.clone(),
            provenance: self.provenance,
        }
    }

    /// New dataset restricted to the named channels (for modality ablations).
    pub fn select_channels(&self, names: &[String]) -> Result<Dataset> {
        let mut picks = Vec::with_capacity(names.len());
        for n in names {
            let i = self
                .channel_names
                .iter()
                .position(|c| c == n)
                .ok_or_else(|| Error::MissingColumn(n.clone()))?;
            picks.push(i);
        }
        let windows = self
            .windows
            .iter()
            .map(|w| {
                let (_, t) = w.samples.dim();
                let mut samples = Array2::zeros((picks.len(), t));
                for (row, &src) in picks.iter().enumerate() {
                    samples.row_mut(row).assign(&w.samples.row(src));
                }
                SensorWindow { samples, ..w.clone() }
            })
            .collect();
        let stats = self.normalization_stats.as_ref().map(|s| NormalizationStats {
            means: picks.iter().map(|&i| s.means[i]).collect(),
            stds: picks.iter().map(|&i| s.stds[i]).collect(),
        });
        Ok(Dataset {
            windows,
            channel_names: names.to_vec(),
            normalization_stats: stats,
            provenance: self.provenance,
        })
    }

    // -- persistence ---------------------------------------------------------

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = DatasetFile::from(self);
        let json = serde_json::to_string(&file)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Dataset> {
        let text = std::fs::read_to_string(path)?;
        let file: DatasetFile = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        file.into_dataset(path)
    }
}

const DATASET_FORMAT_VERSION: u32 = 1;

/// On-disk container. `samples` is the flattened channel-major matrix.
#[derive(Serialize, Deserialize)]
struct WindowRecord {
    samples: Vec<f64>,
    activity: String,
    attributes: BTreeMap<String, String>,
    subject: String,
}

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    format_version: u32,
    kind: String,
    provenance: Provenance,
    channel_names: Vec<String>,
    n_channels: usize,
    window_len: usize,
    sample_rate_hz: f64,
    normalization: Option<NormalizationStats>,
    windows: Vec<WindowRecord>,
}

impl From<&Dataset> for DatasetFile {
    fn from(ds: &Dataset) -> Self {
        let (c, t) = ds.window_shape();
        DatasetFile {
            format_version: DATASET_FORMAT_VERSION,
            kind: "dataset".to_string(),
            provenance: ds.provenance,
            channel_names: ds.channel_names.clone(),
            n_channels: c,
            window_len: t,
            sample_rate_hz: ds.sample_rate_hz(),
            normalization: ds.normalization_stats.clone(),
            windows: ds
                .windows
                .iter()
                .map(|w| WindowRecord {
                    samples: w.samples.iter().copied().collect(),
                    activity: w.activity_label.clone(),
                    attributes: w.attribute_labels.clone(),
                    subject: w.subject_id.clone(),
                })
                .collect(),
        }
    }
}

impl DatasetFile {
    fn into_dataset(self, path: &Path) -> Result<Dataset> {
        if self.format_version != DATASET_FORMAT_VERSION || self.kind != "dataset" {
            return Err(Error::Format {
                path: path.display().to_string(),
                msg: format!("expected dataset v{DATASET_FORMAT_VERSION}, got {} v{}", self.kind, self.format_version),
            });
        }
        let (c, t) = (self.n_channels, self.window_len);
        let mut windows = Vec::with_capacity(self.windows.len());
        for (i, rec) in self.windows.into_iter().enumerate() {
            if rec.samples.len() != c * t {
                return Err(Error::Format {
                    path: path.display().to_string(),
                    msg: format!("window {i}: expected {} samples, got {}", c * t, rec.samples.len()),
                });
            }
            windows.push(SensorWindow {
                samples: Array2::from_shape_vec((c, t), rec.samples).expect("shape checked"),
                activity_label: rec.activity,
                attribute_labels: rec.attributes,
                subject_id: rec.subject,
                sample_rate_hz: self.sample_rate_hz,
            });
        }
        Ok(Dataset {
            windows,
            channel_names: self.channel_names,
            normalization_stats: self.normalization,
            provenance: self.provenance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::synth::test_spec;

    #[test]
    fn normalization_centers_training_channels() {
        let mut ds = synthesize(&test_spec(5)).unwrap();
        ds.normalize();
        let (c, t) = ds.window_shape();
        let n = (ds.len() * t) as f64;
        for ch in 0..c {
            let mean: f64 = ds.windows.iter().map(|w| w.samples.row(ch).sum()).sum::<f64>() / n;
            let var: f64 = ds
                .windows
                .iter()
                .map(|w| w.samples.row(ch).mapv(|v| (v - mean) * (v - mean)).sum())
                .sum::<f64>()
                / n;
            assert!(mean.abs() < 0.05, "channel {ch} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 0.05, "channel {ch} std {}", var.sqrt());
        }
    }

    #[test]
    fn normalize_then_denormalize_is_identity() {
        let orig = synthesize(&test_spec(6)).unwrap();
        let mut ds = orig.clone();
        ds.normalize();
        ds.denormalize();
        for (a, b) in orig.windows.iter().zip(&ds.windows) {
            for (x, y) in a.samples.iter().zip(b.samples.iter()) {
                let rel = (x - y).abs() / x.abs().max(1.0);
                assert!(rel < 1e-9, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn training_fold_stats_apply_to_test_folds_unchanged() {
        let mut ds = synthesize(&test_spec(7)).unwrap();
        let train: Vec<usize> = (0..ds.len() / 2).collect();
        let stats = ds.stats_over(&train);
        ds.apply_normalization(&stats);
        assert_eq!(ds.normalization_stats.as_ref().unwrap(), &stats);
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.json");
        let mut ds = synthesize(&test_spec(8)).unwrap();
        ds.normalize();
        ds.save(&path).unwrap();
        let back = Dataset::load(&path).unwrap();
        assert_eq!(back.len(), ds.len());
        assert_eq!(back.channel_names, ds.channel_names);
        assert_eq!(back.windows[0].samples, ds.windows[0].samples);
        assert_eq!(back.windows[0].attribute_labels, ds.windows[0].attribute_labels);
    }

    #[test]
    fn channel_selection_keeps_geometry() {
        let ds = synthesize(&test_spec(9)).unwrap();
        let picked = ds.select_channels(&["acc_x".into(), "gyro_y".into()]).unwrap();
        assert_eq!(picked.window_shape().0, 2);
        assert_eq!(picked.len(), ds.len());
        assert!(ds.select_channels(&["bogus".into()]).is_err());
    }
}
