//! Gesture similarity: the confidence-weighted frame distance, dynamic time
//! warping over variable-length segments, pairwise matrices and average
//! linkage clustering.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gesture::{GestureSegment, NormalizedSkeleton};

/// Directed frame distance, weighted by the confidences of `f`:
///
/// `D(F, G) = Σ_k c_k(F) · ‖F_k − G_k‖ / Σ_k c_k(F)`
///
/// Keypoints with zero confidence in `f` contribute nothing.
pub fn frame_distance(f: &NormalizedSkeleton, g: &NormalizedSkeleton) -> Result<f64> {
    let mut weight = 0.0;
    let mut total = 0.0;
    for (a, b) in f.keypoints.iter().zip(&g.keypoints) {
        if a.confidence > 0.0 {
            weight += a.confidence;
            total += a.confidence * (a.x - b.x).hypot(a.y - b.y);
        }
    }
    if weight > 0.0 {
        Ok(total / weight)
    } else {
        Err(Error::DegenerateFrame)
    }
}

/// Mean of the defined directed distances `D(F, G)` and `D(G, F)`.
pub fn frame_distance_sym(f: &NormalizedSkeleton, g: &NormalizedSkeleton) -> Result<f64> {
    match (frame_distance(f, g), frame_distance(g, f)) {
        (Ok(a), Ok(b)) => Ok((a + b) / 2.0),
        (Ok(a), Err(_)) | (Err(_), Ok(a)) => Ok(a),
        (Err(e), Err(_)) => Err(e),
    }
}

#[derive(Clone, Copy)]
struct Cell {
    cost: f64,
    len: usize,
}

impl Cell {
    const UNREACHABLE: Cell = Cell {
        cost: f64::INFINITY,
        len: 0,
    };

    /// Lower cost wins; equal cost prefers the longer path.
    fn better(self, other: Cell) -> Cell {
        if other.cost < self.cost || (other.cost == self.cost && other.len > self.len) {
            other
        } else {
            self
        }
    }
}

/// DTW distance with steps {(1,0), (0,1), (1,1)} and symmetric frame cost.
///
/// The optimal path minimizes total cost (ties go to the longer path); the
/// result is that total divided by the path length.
pub fn dtw_distance(a: &[NormalizedSkeleton], b: &[NormalizedSkeleton]) -> Result<f64> {
    dtw_with(a, b, frame_distance_sym)
}

/// DTW over arbitrary items with a caller-supplied cost.
pub fn dtw_with<T, F>(a: &[T], b: &[T], mut cost: F) -> Result<f64>
where
    F: FnMut(&T, &T) -> Result<f64>,
{
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySegment("DTW needs two non-empty sequences".into()));
    }
    let m = b.len();
    let mut prev = vec![Cell::UNREACHABLE; m];
    let mut row = vec![Cell::UNREACHABLE; m];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let best = if i == 0 && j == 0 {
                Cell { cost: 0.0, len: 0 }
            } else {
                let mut best = Cell::UNREACHABLE;
                if i > 0 {
                    best = best.better(prev[j]);
                }
                if j > 0 {
                    best = best.better(row[j - 1]);
                }
                if i > 0 && j > 0 {
                    best = best.better(prev[j - 1]);
                }
                best
            };
            let c = cost(x, y)?;
            row[j] = if i == 0 && j == 0 {
                Cell { cost: c, len: 1 }
            } else {
                Cell {
                    cost: best.cost + c,
                    len: best.len + 1,
                }
            };
        }
        std::mem::swap(&mut prev, &mut row);
    }
    let end = prev[m - 1];
    Ok(end.cost / end.len as f64)
}

/// Symmetric matrix of pairwise segment distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    /// Segment id of each row/column.
    pub ids: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn from_values(ids: Vec<usize>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::Schema("distance matrix must be square".into()));
        }
        for i in 0..n {
            if values[i][i] != 0.0 {
                return Err(Error::Schema("distance matrix diagonal must be zero".into()));
            }
            for j in 0..i {
                if values[i][j] != values[j][i] || !(values[i][j] >= 0.0) {
                    return Err(Error::Schema(
                        "distance matrix must be symmetric and non-negative".into(),
                    ));
                }
            }
        }
        Ok(DistanceMatrix { ids, values })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Write as CSV: a `segment_id` header row of column ids, then one row
    /// per segment.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        let mut header = vec!["segment_id".to_string()];
        header.extend(self.ids.iter().map(usize::to_string));
        w.write_record(&header).map_err(csv_err)?;
        for (id, row) in self.ids.iter().zip(&self.values) {
            let mut record = vec![id.to_string()];
            record.extend(row.iter().map(f64::to_string));
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A distance matrix plus the segments that could not take part in it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOutcome {
    pub matrix: DistanceMatrix,
    pub excluded: Vec<usize>,
}

/// Pairwise DTW distances between segments, computed in parallel.
///
/// Segments with no skeletons, or with a frame whose confidences are all
/// zero, are left out and reported in `excluded`.
pub fn distance_matrix(segments: &[GestureSegment]) -> MatrixOutcome {
    let (valid, excluded): (Vec<&GestureSegment>, Vec<&GestureSegment>) =
        segments.iter().partition(|s| {
            !s.skeletons.is_empty() && s.skeletons.iter().all(|k| k.total_confidence() > 0.0)
        });
    let n = valid.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let cells: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            dtw_distance(&valid[i].skeletons, &valid[j].skeletons)
                .expect("validated segments have defined distances")
        })
        .collect();
    let mut values = vec![vec![0.0; n]; n];
    for (&(i, j), d) in pairs.iter().zip(cells) {
        values[i][j] = d;
        values[j][i] = d;
    }
    MatrixOutcome {
        matrix: DistanceMatrix {
            ids: valid.iter().map(|s| s.id).collect(),
            values,
        },
        excluded: excluded.iter().map(|s| s.id).collect(),
    }
}

/// Where to stop merging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cut {
    /// Stop when this many clusters remain.
    Count(usize),
    /// Merge while the closest pair is at most this far apart.
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    Average,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    /// Segment id of each labelled item, in matrix order.
    pub ids: Vec<usize>,
    /// Cluster id per item, contiguous from 0 in order of first appearance.
    pub labels: Vec<usize>,
    pub linkage: Linkage,
    pub cut: Cut,
}

impl Clustering {
    pub fn cluster_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

/// Agglomerative average-linkage clustering on a precomputed matrix.
///
/// Ties between equally close pairs are broken by the smallest pair of
/// cluster indices, where a cluster's index is its smallest member.
pub fn cluster(matrix: &DistanceMatrix, cut: Cut) -> Result<Clustering> {
    let n = matrix.len();
    match cut {
        Cut::Count(k) if k == 0 || k > n => {
            return Err(Error::Config(format!(
                "cluster count {k} must be between 1 and {n}"
            )))
        }
        Cut::Threshold(t) if !(t >= 0.0) => {
            return Err(Error::Config(format!("threshold {t} must be non-negative")))
        }
        _ => {}
    }

    let mut dist = matrix.values.clone();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut remaining = n;

    loop {
        if let Cut::Count(k) = cut {
            if remaining <= k {
                break;
            }
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in ((i + 1)..n).filter(|&j| active[j]) {
                if best.is_none_or(|(d, _, _)| dist[i][j] < d) {
                    best = Some((dist[i][j], i, j));
                }
            }
        }
        let Some((d, a, b)) = best else { break };
        if let Cut::Threshold(t) = cut {
            if d > t {
                break;
            }
        }
        // Merge b into a (a < b), updating average-linkage distances.
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        for k in (0..n).filter(|&k| active[k] && k != a && k != b) {
            let merged = (sa * dist[a][k] + sb * dist[b][k]) / (sa + sb);
            dist[a][k] = merged;
            dist[k][a] = merged;
        }
        size[a] += size[b];
        active[b] = false;
        for o in owner.iter_mut().filter(|o| **o == b) {
            *o = a;
        }
        remaining -= 1;
    }

    let mut label_of = vec![usize::MAX; n];
    let mut next = 0;
    let labels = owner
        .iter()
        .map(|&slot| {
            if label_of[slot] == usize::MAX {
                label_of[slot] = next;
                next += 1;
            }
            label_of[slot]
        })
        .collect();
    Ok(Clustering {
        ids: matrix.ids.clone(),
        labels,
        linkage: Linkage::Average,
        cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Keypoint;
    use crate::gesture::UPPER_BODY;
    use approx::assert_abs_diff_eq;

    fn uniform(x: f64, y: f64, c: f64) -> NormalizedSkeleton {
        NormalizedSkeleton::new([Keypoint::new(x, y, c); UPPER_BODY])
    }

    #[test]
    fn frame_distance_examples() {
        let f = uniform(0.1, 0.2, 1.0);
        assert_eq!(frame_distance(&f, &f).unwrap(), 0.0);
        let g = uniform(0.4, 0.6, 1.0);
        assert_abs_diff_eq!(frame_distance(&f, &g).unwrap(), 0.5, epsilon = 1e-12);
        let blind = uniform(0.1, 0.2, 0.0);
        assert!(matches!(frame_distance(&blind, &g), Err(Error::DegenerateFrame)));
    }

    #[test]
    fn frame_distance_ignores_zero_confidence_coordinates() {
        let mut f = uniform(0.0, 0.0, 1.0);
        f.keypoints[3] = Keypoint::new(f64::NAN, f64::NAN, 0.0);
        let g = uniform(0.0, 0.0, 1.0);
        assert_eq!(frame_distance(&f, &g).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_distance_examples() {
        let f = uniform(0.1, 0.2, 1.0);
        let g = uniform(0.4, 0.6, 1.0);
        assert_eq!(frame_distance_sym(&f, &g).unwrap(), frame_distance(&f, &g).unwrap());
        let blind = uniform(0.4, 0.6, 0.0);
        assert_eq!(frame_distance_sym(&f, &blind).unwrap(), frame_distance(&f, &blind).unwrap());
        assert!(matches!(
            frame_distance_sym(&blind, &blind),
            Err(Error::DegenerateFrame)
        ));
    }

    #[test]
    fn dtw_identity_and_repetition() {
        let a: Vec<_> = (0..5).map(|i| uniform(i as f64 * 0.1, 0.0, 1.0)).collect();
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        let doubled: Vec<_> = a.iter().flat_map(|s| [*s, *s]).collect();
        assert_eq!(dtw_distance(&a, &doubled).unwrap(), 0.0);
        assert_eq!(dtw_distance(&doubled, &a).unwrap(), 0.0);
        assert!(matches!(dtw_distance(&a, &[]), Err(Error::EmptySegment(_))));
    }

    #[test]
    fn dtw_scalar_hand_example() {
        // a = [0, 2], b = [0, 1, 2] with |x - y| cost: the path
        // (0,0) (1,1) (1,2) costs 0 + 1 + 0 over 3 cells, while
        // (0,0) (0,1) (1,2) costs 0 + 1 + 0 too; both give 1/3.
        let d = dtw_with(&[0.0f64, 2.0], &[0.0, 1.0, 2.0], |x, y| Ok((x - y).abs())).unwrap();
        assert_abs_diff_eq!(d, 1.0 / 3.0, epsilon = 1e-15);
    }

    fn matrix(values: Vec<Vec<f64>>) -> DistanceMatrix {
        DistanceMatrix::from_values((0..values.len()).collect(), values).unwrap()
    }

    #[test]
    fn cluster_single_group() {
        let m = matrix(vec![vec![0.0; 4]; 4]);
        let c = cluster(&m, Cut::Count(1)).unwrap();
        assert_eq!(c.labels, vec![0, 0, 0, 0]);
    }

    #[test]
    fn cluster_two_groups() {
        let m = matrix(vec![
            vec![0.0, 0.1, 5.0, 5.1],
            vec![0.1, 0.0, 5.2, 5.0],
            vec![5.0, 5.2, 0.0, 0.2],
            vec![5.1, 5.0, 0.2, 0.0],
        ]);
        let c = cluster(&m, Cut::Count(2)).unwrap();
        assert_eq!(c.labels, vec![0, 0, 1, 1]);
        assert_eq!(c.cluster_count(), 2);
    }

    #[test]
    fn cluster_threshold_zero_gives_singletons() {
        let m = matrix(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 3.0],
            vec![2.0, 3.0, 0.0],
        ]);
        let c = cluster(&m, Cut::Threshold(0.0)).unwrap();
        assert_eq!(c.labels, vec![0, 1, 2]);
        let c = cluster(&m, Cut::Threshold(1.5)).unwrap();
        assert_eq!(c.labels, vec![0, 0, 1]);
    }

    #[test]
    fn cluster_ties_break_on_smallest_pair() {
        let m = matrix(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        let c = cluster(&m, Cut::Count(2)).unwrap();
        assert_eq!(c.labels, vec![0, 0, 1]);
    }

    #[test]
    fn cluster_config_errors() {
        let m = matrix(vec![vec![0.0; 2]; 2]);
        assert!(matches!(cluster(&m, Cut::Count(3)), Err(Error::Config(_))));
        assert!(matches!(cluster(&m, Cut::Count(0)), Err(Error::Config(_))));
        assert!(matches!(cluster(&m, Cut::Threshold(-1.0)), Err(Error::Config(_))));
    }

    #[test]
    fn matrix_validation_and_csv() {
        assert!(DistanceMatrix::from_values(vec![0, 1], vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        let m = DistanceMatrix::from_values(vec![3, 7], vec![vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let mut out = Vec::new();
        m.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "segment_id,3,7\n3,0,0.5\n7,0.5,0\n");
    }
}
