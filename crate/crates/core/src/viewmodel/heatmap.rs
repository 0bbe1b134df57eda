use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::gesture::{GestureSpaceConfig, NormalizedSkeleton, LEFT_WRIST, RIGHT_WRIST};

/// Wrist observation counts over an R×R grid covering `[-1, 1]²`.
///
/// Row 0 is the top of the gesture space (y = 1), column 0 its left edge
/// (x = -1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub resolution: usize,
    pub cells: Vec<Vec<u64>>,
    pub total_samples: u64,
}

fn bin(v: f64, resolution: usize) -> usize {
    let scaled = ((v + 1.0) / 2.0 * resolution as f64).floor();
    (scaled.max(0.0) as usize).min(resolution - 1)
}

impl HeatmapGrid {
    pub fn new(resolution: usize) -> Self {
        let resolution = resolution.max(1);
        HeatmapGrid {
            resolution,
            cells: vec![vec![0; resolution]; resolution],
            total_samples: 0,
        }
    }

    /// Grid cell `(row, column)` holding the point.
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        (bin(-y, self.resolution), bin(x, self.resolution))
    }

    pub fn add(&mut self, x: f64, y: f64) {
        let (row, col) = self.cell_of(x, y);
        self.cells[row][col] += 1;
        self.total_samples += 1;
    }

    pub fn max_count(&self) -> u64 {
        self.cells.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Plain (P2) PGM rendering, scaled so the busiest cell is white.
    pub fn to_pgm(&self) -> String {
        let max = self.max_count().max(1);
        let mut out = format!("P2\n{0} {0}\n255\n", self.resolution);
        for row in &self.cells {
            let line: Vec<String> = row.iter().map(|&c| (c * 255 / max).to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Bin every detected wrist (keypoints 4 and 7) into the grid.
pub fn build_heatmap<'a>(
    skeletons: impl IntoIterator<Item = &'a NormalizedSkeleton>,
    config: &GestureSpaceConfig,
) -> HeatmapGrid {
    let mut grid = HeatmapGrid::new(config.grid_resolution);
    for s in skeletons {
        for wrist in [RIGHT_WRIST, LEFT_WRIST] {
            if let Some((x, y)) = s.point(wrist) {
                grid.add(x, y);
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gesture::UPPER_BODY;
    use crate::ingest::Keypoint;

    fn hands(r: Option<(f64, f64)>, l: Option<(f64, f64)>) -> NormalizedSkeleton {
        let mut k = [Keypoint::UNDETECTED; UPPER_BODY];
        k[0] = Keypoint::new(0.0, 0.0, 1.0);
        if let Some((x, y)) = r {
            k[RIGHT_WRIST] = Keypoint::new(x, y, 0.9);
        }
        if let Some((x, y)) = l {
            k[LEFT_WRIST] = Keypoint::new(x, y, 0.9);
        }
        NormalizedSkeleton::new(k)
    }

    #[test]
    fn both_wrists_counted() {
        let grid = build_heatmap(&[hands(Some((0.1, 0.1)), Some((-0.5, -0.5)))], &GestureSpaceConfig::default());
        assert_eq!(grid.total_samples, 2);
        assert_eq!(grid.cells.iter().flatten().sum::<u64>(), 2);
    }

    #[test]
    fn origin_lands_in_center_cell() {
        let grid = build_heatmap(&[hands(Some((0.0, 0.0)), None)], &GestureSpaceConfig::default());
        assert_eq!(grid.cells[32][32], 1);
        assert_eq!(grid.total_samples, 1);
    }

    #[test]
    fn corners_stay_in_grid() {
        let cfg = GestureSpaceConfig { grid_resolution: 4, ..Default::default() };
        let grid = build_heatmap(&[hands(Some((1.0, 1.0)), Some((-1.0, -1.0)))], &cfg);
        assert_eq!(grid.cells[0][3], 1);
        assert_eq!(grid.cells[3][0], 1);
    }

    #[test]
    fn pgm_header() {
        let grid = build_heatmap(&[hands(Some((0.0, 0.0)), None)], &GestureSpaceConfig { grid_resolution: 2, ..Default::default() });
        assert_eq!(grid.to_pgm(), "P2\n2 2\n255\n0 0\n0 255\n");
    }
}
