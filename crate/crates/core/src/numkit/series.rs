use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values sampled on an equispaced grid `index * spacing`, where element `i`
/// of `values` sits at logical index `offset + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    offset: i64,
    spacing: f64,
    values: Vec<T>,
}

pub type ComplexSeries = Series<Complex64>;
pub type RealSeries = Series<f64>;

impl<T: Copy> Series<T> {
    pub fn new(offset: i64, spacing: f64, values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("series must be non-empty".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "series spacing must be finite and positive, got {spacing}"
            )));
        }
        Ok(Series {
            offset,
            spacing,
            values,
        })
    }

    /// Builds a series over `first..=last` by evaluating `f` at each logical index.
    pub fn from_fn(first: i64, last: i64, spacing: f64, f: impl FnMut(i64) -> T) -> Result<Self> {
        Self::new(first, spacing, (first..=last).map(f).collect())
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_index(&self) -> i64 {
        self.offset
    }

    pub fn last_index(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    pub fn contains(&self, index: i64) -> bool {
        index >= self.first_index() && index <= self.last_index()
    }

    /// Value at a logical index, if covered.
    pub fn get(&self, index: i64) -> Option<T> {
        if self.contains(index) {
            Some(self.values[(index - self.offset) as usize])
        } else {
            None
        }
    }

    /// Value at a logical index. Panics when the index is not covered.
    pub fn at(&self, index: i64) -> T {
        self.get(index).unwrap_or_else(|| {
            panic!(
                "index {index} outside series range {}..={}",
                self.first_index(),
                self.last_index()
            )
        })
    }

    /// Checks that `lo..=hi` is covered, reporting the uncovered part otherwise.
    pub fn require(&self, lo: i64, hi: i64) -> Result<()> {
        if lo < self.first_index() {
            return Err(Error::InsufficientCoverage {
                missing_lo: lo,
                missing_hi: (self.first_index() - 1).min(hi),
            });
        }
        if hi > self.last_index() {
            return Err(Error::InsufficientCoverage {
                missing_lo: (self.last_index() + 1).max(lo),
                missing_hi: hi,
            });
        }
        Ok(())
    }

    /// Sub-series over `lo..=hi`.
    pub fn slice(&self, lo: i64, hi: i64) -> Result<Self> {
        self.require(lo, hi)?;
        let start = (lo - self.offset) as usize;
        let end = (hi - self.offset) as usize;
        Self::new(lo, self.spacing, self.values[start..=end].to_vec())
    }

    /// Iterator of `(logical index, value)` pairs.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.offset + i as i64, v))
    }

    /// Grid coordinate of a logical index.
    pub fn coordinate(&self, index: i64) -> f64 {
        index as f64 * self.spacing
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Series<U> {
        Series {
            offset: self.offset,
            spacing: self.spacing,
            values: self.values.iter().copied().map(f).collect(),
        }
    }
}

impl ComplexSeries {
    pub fn real_parts(&self) -> RealSeries {
        self.map(|z| z.re)
    }

    pub fn imag_parts(&self) -> RealSeries {
        self.map(|z| z.im)
    }
}

impl RealSeries {
    pub fn to_complex(&self) -> ComplexSeries {
        self.map(|x| Complex64::new(x, 0.0))
    }
}
