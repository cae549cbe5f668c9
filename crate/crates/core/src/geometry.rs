use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a year of `hours` steps is cut into segments and candidate periods.
///
/// Segments are the non-overlapping `stride`-hour blocks of the year,
/// subsequences are the `length`-hour windows that start on every segment
/// boundary. With the default stride of 24 a segment is a day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceGeometry {
    pub hours: usize,
    pub length: usize,
    pub stride: usize,
}

pub const DEFAULT_STRIDE: usize = 24;

impl SliceGeometry {
    pub fn new(hours: usize, length: usize, stride: usize) -> Result<Self> {
        if stride == 0 || length == 0 || hours == 0 {
            return Err(Error::Geometry(format!(
                "hours ({hours}), length ({length}) and stride ({stride}) must be positive"
            )));
        }
        if !hours.is_multiple_of(stride) {
            return Err(Error::Geometry(format!(
                "stride {stride} does not divide t = {hours}"
            )));
        }
        if !length.is_multiple_of(stride) {
            return Err(Error::Geometry(format!(
                "stride {stride} does not divide period length {length}"
            )));
        }
        if length > hours {
            return Err(Error::Geometry(format!(
                "period length {length} exceeds t = {hours}"
            )));
        }
        Ok(Self {
            hours,
            length,
            stride,
        })
    }

    /// Day-aligned geometry: `days` per period over a 24 h stride.
    pub fn days(hours: usize, days: usize) -> Result<Self> {
        Self::new(hours, days * DEFAULT_STRIDE, DEFAULT_STRIDE)
    }

    /// Segment count `n = t / u`.
    pub fn segments(&self) -> usize {
        self.hours / self.stride
    }

    /// Candidate count `m = (t - s) / u + 1`.
    pub fn subsequences(&self) -> usize {
        (self.hours - self.length) / self.stride + 1
    }

    /// Segments per period, `s / u`.
    pub fn days_per_period(&self) -> usize {
        self.length / self.stride
    }

    pub fn segment_range(&self, i: usize) -> Result<std::ops::Range<usize>> {
        let n = self.segments();
        if i >= n {
            return Err(Error::IndexOutOfRange {
                kind: "segment",
                index: i,
                count: n,
            });
        }
        Ok(i * self.stride..(i + 1) * self.stride)
    }

    pub fn subsequence_range(&self, j: usize) -> Result<std::ops::Range<usize>> {
        let m = self.subsequences();
        if j >= m {
            return Err(Error::IndexOutOfRange {
                kind: "subsequence",
                index: j,
                count: m,
            });
        }
        Ok(j * self.stride..j * self.stride + self.length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_year_three_day_counts() {
        let g = SliceGeometry::days(8760, 3).unwrap();
        assert_eq!(g.segments(), 365);
        assert_eq!(g.subsequences(), 363);
        assert_eq!(g.days_per_period(), 3);
    }

    #[test]
    fn rejects_non_dividing_stride() {
        assert!(SliceGeometry::new(8760, 36, 24).is_err());
        assert!(SliceGeometry::new(100, 24, 24).is_err());
        assert!(SliceGeometry::new(48, 72, 24).is_err());
        assert!(SliceGeometry::new(48, 24, 0).is_err());
    }

    #[test]
    fn ranges() {
        let g = SliceGeometry::days(8760, 1).unwrap();
        assert_eq!(g.segment_range(0).unwrap(), 0..24);
        assert_eq!(g.segment_range(364).unwrap(), 8736..8760);
        assert!(matches!(
            g.segment_range(365),
            Err(Error::IndexOutOfRange { index: 365, .. })
        ));
        let g = SliceGeometry::days(8760, 3).unwrap();
        assert!(g.subsequence_range(362).is_ok());
        assert!(g.subsequence_range(363).is_err());
    }

    #[test]
    fn count_identity_holds_for_supported_geometries() {
        for days in 1..=5 {
            for t in [24 * 7, 8760, 8784] {
                let g = SliceGeometry::days(t, days).unwrap();
                assert_eq!(g.subsequences(), g.segments() - g.days_per_period() + 1);
            }
        }
        for stride in [1, 2, 3, 4, 6, 8, 12, 24] {
            let g = SliceGeometry::new(8760, 4 * stride, stride).unwrap();
            assert_eq!(g.subsequences(), g.segments() - g.days_per_period() + 1);
        }
    }
}
