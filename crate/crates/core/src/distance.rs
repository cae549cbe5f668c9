//! Day-aligned distance between every segment of the year and every
//! candidate period.
//!
//! `d[i, j]` is the smallest distance between segment `i` and any one of
//! the `s/u` day blocks inside subsequence `j`. Offsets are only taken on
//! stride boundaries, so an afternoon is never compared with a night.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{SliceGeometry, DEFAULT_STRIDE};
use crate::par::{self, Execution};
use crate::series::AnnualSeries;

/// Norm applied to the difference of two flattened day blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayNorm {
    #[default]
    Euclidean,
}

impl DayNorm {
    fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            DayNorm::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Euclidean distance between two equally shaped day blocks.
pub fn day_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "day blocks have {} and {} entries",
            a.len(),
            b.len()
        )));
    }
    Ok(DayNorm::Euclidean.eval(a, b))
}

/// Dense `n × m` matrix, segments by rows and candidate periods by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    data: Vec<f64>,
    geometry: SliceGeometry,
    norm: DayNorm,
}

impl DistanceMatrix {
    /// Wraps an arbitrary non-negative matrix.
    ///
    /// The geometry is inferred from the shape with a 24 h stride, so
    /// `m` must not exceed `n`. Used for solver tests and external matrices.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::ShapeMismatch("distance matrix is empty".into()));
        }
        if m > n {
            return Err(Error::ShapeMismatch(format!(
                "{m} columns exceed {n} rows; no geometry produces that shape"
            )));
        }
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::ShapeMismatch("ragged distance matrix".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::ShapeMismatch(
                "distance entries must be finite and non-negative".into(),
            ));
        }
        let geometry = SliceGeometry::new(
            n * DEFAULT_STRIDE,
            (n - m + 1) * DEFAULT_STRIDE,
            DEFAULT_STRIDE,
        )?;
        Ok(Self {
            data,
            geometry,
            norm: DayNorm::Euclidean,
        })
    }

    pub fn n(&self) -> usize {
        self.geometry.segments()
    }

    pub fn m(&self) -> usize {
        self.geometry.subsequences()
    }

    pub fn geometry(&self) -> &SliceGeometry {
        &self.geometry
    }

    pub fn norm(&self) -> DayNorm {
        self.norm
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m() + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.m();
        &self.data[i * m..(i + 1) * m]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Smallest entry of row `i`.
    pub fn row_min(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Entry-wise multiple, `c · D`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }
}

/// Builds the matrix with the default execution mode.
pub fn build_matrix(series: &AnnualSeries, geometry: &SliceGeometry) -> Result<DistanceMatrix> {
    build_matrix_with(series, geometry, Execution::default())
}

/// Builds the matrix row by row, sequentially or over the rayon pool.
///
/// Every entry is computed independently, so the result is bit-identical
/// in both modes.
pub fn build_matrix_with(
    series: &AnnualSeries,
    geometry: &SliceGeometry,
    exec: Execution,
) -> Result<DistanceMatrix> {
    series.check_geometry(geometry)?;
    let n = geometry.segments();
    let m = geometry.subsequences();
    let span = geometry.days_per_period();
    let norm = DayNorm::Euclidean;
    let day = |i: usize| series.rows(i * geometry.stride..(i + 1) * geometry.stride);

    // Pairwise segment distances; every subsequence day is a segment.
    let mut pair = vec![0.0; n * n];
    par::fill_chunks(&mut pair, n, exec, |i, row| {
        let a = day(i);
        for (k, out) in row.iter_mut().enumerate() {
            *out = norm.eval(a, day(k));
        }
    });

    let mut data = vec![0.0; n * m];
    par::fill_chunks(&mut data, m, exec, |i, row| {
        let p = &pair[i * n..(i + 1) * n];
        for (j, out) in row.iter_mut().enumerate() {
            *out = p[j..j + span].iter().copied().fold(f64::INFINITY, f64::min);
        }
    });

    Ok(DistanceMatrix {
        data,
        geometry: *geometry,
        norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_series(hours: usize, f: usize, seed: u64) -> AnnualSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..hours * f)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let names = (0..f).map(|c| format!("f{c}")).collect();
        AnnualSeries::new(values, names).unwrap()
    }

    #[test]
    fn day_distance_cases() {
        let a = vec![0.0; 24];
        assert_eq!(day_distance(&a, &a).unwrap(), 0.0);
        let b = vec![1.0; 24];
        assert!((day_distance(&a, &b).unwrap() - 4.898979485566356).abs() < 1e-12);
        assert!(day_distance(&a, &b[..23]).is_err());
    }

    #[test]
    fn day_distance_matches_sum_of_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a: Vec<f64> = (0..48).map(|_| rng.random_range(-5.0..5.0)).collect();
            let b: Vec<f64> = (0..48).map(|_| rng.random_range(-5.0..5.0)).collect();
            let mut ss = 0.0;
            for h in 0..24 {
                for c in 0..2 {
                    let diff = a[h * 2 + c] - b[h * 2 + c];
                    ss += diff * diff;
                }
            }
            assert!((day_distance(&a, &b).unwrap() - ss.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_day_matrix_is_symmetric_with_zero_diagonal() {
        let s = random_series(240, 2, 1);
        let g = SliceGeometry::days(240, 1).unwrap();
        let d = build_matrix(&s, &g).unwrap();
        for i in 0..d.n() {
            assert_eq!(d.get(i, i), 0.0);
            for j in 0..d.m() {
                assert_eq!(d.get(i, j), d.get(j, i));
            }
        }
    }

    #[test]
    fn covered_segments_are_zero() {
        let s = random_series(240, 3, 2);
        let g = SliceGeometry::days(240, 3).unwrap();
        let d = build_matrix(&s, &g).unwrap();
        assert_eq!(d.get(5, 5), 0.0);
        assert_eq!(d.get(6, 5), 0.0);
        assert_eq!(d.get(7, 5), 0.0);
        assert!(d.get(8, 5) > 0.0);
    }

    #[test]
    fn sequential_and_parallel_are_bit_identical() {
        let s = random_series(24 * 60, 3, 9);
        let g = SliceGeometry::days(24 * 60, 4).unwrap();
        let a = build_matrix_with(&s, &g, Execution::Sequential).unwrap();
        let b = build_matrix_with(&s, &g, Execution::Parallel).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn from_rows_validation() {
        assert!(DistanceMatrix::from_rows(vec![]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0], vec![-1.0]]).is_err());
        assert!(DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        let d = DistanceMatrix::from_rows(vec![vec![0.0; 18]; 20]).unwrap();
        assert_eq!((d.n(), d.m(), d.geometry().days_per_period()), (20, 18, 3));
    }

    #[test]
    fn geometry_mismatch() {
        let s = random_series(240, 1, 4);
        let g = SliceGeometry::days(480, 1).unwrap();
        assert!(build_matrix(&s, &g).is_err());
    }
}
