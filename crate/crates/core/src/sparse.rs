//! Compressed-row storage for symmetric sparse matrices.
//!
//! Both triangles are stored so that products parallelise over rows without
//! scatter; each off-diagonal value is written once into a triplet and
//! mirrored, so `A[i][j]` and `A[j][i]` are bitwise identical.

use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::eigensolve::SymmetricOperator;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("entry ({row}, {col}) outside a {dim}x{dim} matrix")]
    OutOfBounds { row: usize, col: usize, dim: usize },
    #[error("malformed coordinate file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from upper-triangle triplets `(row <= col)`; repeated entries
    /// are summed. Entries below the diagonal are folded to the upper side.
    pub fn from_upper_triplets(
        dim: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SparseError> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * triplets.len());
        for &(r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(SparseError::OutOfBounds { row: r, col: c, dim });
            }
            let (r, c) = if r <= c { (r, c) } else { (c, r) };
            entries.push((r, c, v));
            if r != c {
                entries.push((c, r, v));
            }
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0usize; dim + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_indices.push(c);
            values.push(v);
            row_offsets[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..dim {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(Self {
            dim,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles directly from sorted rows; the caller guarantees symmetry.
    pub(crate) fn from_sorted_rows(
        dim: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_offsets.len(), dim + 1);
        debug_assert_eq!(col_indices.len(), values.len());
        Self {
            dim,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored entries, both triangles.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Upper-triangle entries `(row <= col)` in row-major order.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            self.row(i)
                .filter(move |&(j, _)| j >= i)
                .map(move |(j, v)| (i, j, v))
        })
    }

    /// Largest `|A_ij - A_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        (0..self.dim)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim {
            let mut d = 0.0;
            let mut r = 0.0;
            for (j, v) in self.row(i) {
                if j == i {
                    d = v;
                } else {
                    r += v.abs();
                }
            }
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        if self.dim == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    /// Writes the coordinate format: a `dim nnz` header, then one
    /// `row col value` line per stored entry (0-based, 17 significant digits).
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {}", self.dim, self.nnz())?;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                writeln!(out, "{} {} {:.16e}", i, j, v)?;
            }
        }
        Ok(())
    }

    pub fn read_coordinate<R: BufRead>(input: R) -> Result<Self, SparseError> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| SparseError::Format("missing header".into()))??;
        let mut parts = header.split_whitespace();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize, SparseError> {
            s.ok_or_else(|| SparseError::Format(format!("missing {what}")))?
                .parse()
                .map_err(|e| SparseError::Format(format!("bad {what}: {e}")))
        };
        let dim = parse_usize(parts.next(), "dim")?;
        let nnz = parse_usize(parts.next(), "nnz")?;
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut p = line.split_whitespace();
            let r = parse_usize(p.next(), "row")?;
            let c = parse_usize(p.next(), "col")?;
            let v: f64 = p
                .next()
                .ok_or_else(|| SparseError::Format("missing value".into()))?
                .parse()
                .map_err(|e| SparseError::Format(format!("bad value: {e}")))?;
            if r <= c {
                triplets.push((r, c, v));
            }
        }
        let m = Self::from_upper_triplets(dim, &triplets)?;
        if m.nnz() != nnz {
            return Err(SparseError::Format(format!(
                "header announces {nnz} entries, file holds {}",
                m.nnz()
            )));
        }
        Ok(m)
    }
}

impl SymmetricOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(4096).enumerate().for_each(|(c, chunk)| {
            let base = c * 4096;
            for (k, yi) in chunk.iter_mut().enumerate() {
                let i = base + k;
                let mut acc = 0.0;
                for idx in self.row_offsets[i]..self.row_offsets[i + 1] {
                    acc += self.values[idx] * x[self.col_indices[idx]];
                }
                *yi = acc;
            }
        });
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SparseSymMatrix {
        SparseSymMatrix::from_upper_triplets(
            3,
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 1, 2.0), (2, 1, -1.0), (2, 2, 2.0)],
        )
        .unwrap()
    }

    #[test]
    fn mirrored_storage() {
        let a = small();
        assert_eq!(a.nnz(), 7);
        assert_eq!(a.get(1, 2), -1.0);
        assert_eq!(a.get(2, 1), -1.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.asymmetry(), 0.0);
        assert_eq!(a.diagonal(), vec![2.0, 2.0, 2.0]);
        assert_eq!(a.upper_triplets().count(), 5);
    }

    #[test]
    fn duplicates_are_summed() {
        let a = SparseSymMatrix::from_upper_triplets(2, &[(0, 1, 1.0), (1, 0, 0.5), (0, 0, 1.0)])
            .unwrap();
        assert_eq!(a.get(0, 1), 1.5);
        assert_eq!(a.get(1, 0), 1.5);
        assert!(SparseSymMatrix::from_upper_triplets(2, &[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn product_and_bounds() {
        let a = small();
        let mut y = vec![0.0; 3];
        a.apply(&[1.0, 2.0, 3.0], &mut y);
        assert_eq!(y, vec![0.0, 0.0, 4.0]);
        assert_eq!(a.gershgorin(), (0.0, 4.0));
    }

    #[test]
    fn coordinate_dump_round_trip() {
        let a = SparseSymMatrix::from_upper_triplets(
            3,
            &[(0, 0, 1.0 / 3.0), (0, 2, -std::f64::consts::PI), (1, 1, 1e-300)],
        )
        .unwrap();
        let mut buf = Vec::new();
        a.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 4\n"));
        assert!(text.contains("0 2 -3.1415926535897931e0"));
        let b = SparseSymMatrix::read_coordinate(&buf[..]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coordinate_reader_rejects_bad_count() {
        let text = "2 3\n0 0 1.0\n1 1 1.0\n";
        assert!(SparseSymMatrix::read_coordinate(text.as_bytes()).is_err());
    }
}
