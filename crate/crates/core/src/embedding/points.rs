use crate::error::{invalid, Result};

/// A finite set of points in ℝ^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return invalid("point dimension must be at least 1");
        }
        if !data.len().is_multiple_of(dim) {
            return invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                data.len()
            ));
        }
        Ok(Self { dim, data })
    }

    /// Builds a 1-D point set from scalars.
    pub fn scalars(values: &[f64]) -> Self {
        Self { dim: 1, data: values.to_vec() }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return invalid("no points");
        };
        let dim = first.len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return invalid(format!("point {i} has dimension {}, expected {dim}", row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Zips equal-length coordinate columns into points.
    pub fn from_columns(columns: &[&[f64]]) -> Result<Self> {
        let Some(first) = columns.first() else {
            return invalid("no columns");
        };
        let n = first.len();
        if columns.iter().any(|c| c.len() != n) {
            return invalid("columns have different lengths");
        }
        let dim = columns.len();
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Appends the points of `other`, which must share the dimension.
    pub fn concat(&self, other: &PointSet) -> Result<Self> {
        if other.dim != self.dim {
            return invalid("cannot concatenate point sets of different dimension");
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self { dim: self.dim, data })
    }
}
