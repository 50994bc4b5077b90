//! Matrices over F_p in sparse (column lists) or dense (row-major) form.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::FieldSpec;

#[derive(Debug, Clone)]
enum Repr {
    /// One sorted list of `(row, value)` per column; values are nonzero.
    Sparse(Vec<Vec<(u32, u32)>>),
    /// Row-major residues.
    Dense(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct FpMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    repr: Repr,
}

impl PartialEq for FpMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.rows == other.rows
            && self.cols == other.cols
            && self.entries() == other.entries()
    }
}

impl Eq for FpMatrix {}

impl FpMatrix {
    /// Sparse matrix from column lists. Entries are reduced mod p, zeros dropped
    /// and rows sorted.
    pub fn from_columns(field: FieldSpec, rows: usize, mut columns: Vec<Vec<(u32, u32)>>) -> Self {
        for col in columns.iter_mut() {
            for (r, v) in col.iter_mut() {
                assert!((*r as usize) < rows, "row index out of range");
                *v %= field.p();
            }
            col.retain(|&(_, v)| v != 0);
            col.sort_unstable_by_key(|&(r, _)| r);
        }
        FpMatrix {
            field,
            rows,
            cols: columns.len(),
            repr: Repr::Sparse(columns),
        }
    }

    /// Sparse matrix from row lists of `(col, value)`.
    pub fn from_rows(field: FieldSpec, cols: usize, rows: Vec<Vec<(u32, u32)>>) -> Self {
        let nrows = rows.len();
        let mut columns = vec![Vec::new(); cols];
        for (i, row) in rows.into_iter().enumerate() {
            for (c, v) in row {
                columns[c as usize].push((i as u32, v));
            }
        }
        Self::from_columns(field, nrows, columns)
    }

    /// Dense matrix from row-major data.
    pub fn from_dense(field: FieldSpec, rows: usize, cols: usize, mut data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        for v in data.iter_mut() {
            *v %= field.p();
        }
        FpMatrix {
            field,
            rows,
            cols,
            repr: Repr::Dense(data),
        }
    }

    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Self::from_columns(field, rows, vec![Vec::new(); cols])
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let cols = (0..n).map(|j| vec![(j as u32, 1)]).collect();
        Self::from_columns(field, n, cols)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.repr, Repr::Sparse(_))
    }

    /// Nonzeros of column `j` as sorted `(row, value)` pairs.
    pub fn column(&self, j: usize) -> Vec<(u32, u32)> {
        match &self.repr {
            Repr::Sparse(cols) => cols[j].clone(),
            Repr::Dense(data) => (0..self.rows)
                .filter_map(|i| {
                    let v = data[i * self.cols + j];
                    (v != 0).then_some((i as u32, v))
                })
                .collect(),
        }
    }

    pub fn nnz(&self) -> usize {
        match &self.repr {
            Repr::Sparse(cols) => cols.iter().map(Vec::len).sum(),
            Repr::Dense(data) => data.iter().filter(|&&v| v != 0).count(),
        }
    }

    /// All nonzeros as `(row, col, value)`, sorted by `(row, col)`.
    pub fn entries(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        match &self.repr {
            Repr::Sparse(cols) => {
                for (j, col) in cols.iter().enumerate() {
                    out.extend(col.iter().map(|&(r, v)| (r, j as u32, v)));
                }
                out.sort_unstable();
            }
            Repr::Dense(data) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        let v = data[i * self.cols + j];
                        if v != 0 {
                            out.push((i as u32, j as u32, v));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_sparse(&self) -> FpMatrix {
        match &self.repr {
            Repr::Sparse(_) => self.clone(),
            Repr::Dense(_) => {
                let cols = (0..self.cols).map(|j| self.column(j)).collect();
                Self::from_columns(self.field, self.rows, cols)
            }
        }
    }

    pub fn to_dense(&self) -> FpMatrix {
        match &self.repr {
            Repr::Dense(_) => self.clone(),
            Repr::Sparse(cols) => {
                let mut data = vec![0u32; self.rows * self.cols];
                for (j, col) in cols.iter().enumerate() {
                    for &(r, v) in col {
                        data[r as usize * self.cols + j] = v;
                    }
                }
                Self::from_dense(self.field, self.rows, self.cols, data)
            }
        }
    }

    /// Row-major dense copy of the entries.
    pub(crate) fn dense_rows(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32; self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r as usize][c as usize] = v;
        }
        out
    }

    /// Sparse row lists `(col, value)`, each sorted by column.
    pub(crate) fn sparse_rows(&self) -> Vec<Vec<(u32, u32)>> {
        let mut out = vec![Vec::new(); self.rows];
        // entries() is sorted by (row, col)
        for (r, c, v) in self.entries() {
            out[r as usize].push((c, v));
        }
        out
    }

    /// Matrix product `self * other`, returned in sparse form.
    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.field != other.field || self.cols != other.rows {
            return Err(Error::InvalidArgument(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let field = self.field;
        let left: Vec<Vec<(u32, u32)>> = (0..self.cols).map(|k| self.column(k)).collect();
        let mut cols = Vec::with_capacity(other.cols);
        let mut acc = vec![0u32; self.rows];
        let mut touched = Vec::new();
        for j in 0..other.cols {
            for (k, b) in other.column(j) {
                for &(i, a) in &left[k as usize] {
                    let slot = &mut acc[i as usize];
                    if *slot == 0 {
                        touched.push(i);
                    }
                    *slot = field.add(*slot, field.mul(a, b));
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let col: Vec<(u32, u32)> = touched
                .iter()
                .filter_map(|&i| {
                    let v = std::mem::take(&mut acc[i as usize]);
                    (v != 0).then_some((i, v))
                })
                .collect();
            touched.clear();
            cols.push(col);
        }
        Ok(FpMatrix::from_columns(field, self.rows, cols))
    }

    /// Text dump: header `rows cols p`, then one `r c v` line per nonzero
    /// sorted by `(r, c)`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.rows, self.cols, self.field.p()).unwrap();
        for (r, c, v) in self.entries() {
            writeln!(s, "{r} {c} {v}").unwrap();
        }
        s
    }
}
