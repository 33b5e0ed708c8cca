//! Sparse binary projection matrices in compressed row form, with a
//! versioned binary snapshot format.

use alloc::vec::Vec;

use crate::error::CoreError;

/// How the 1-entries of a projection matrix were sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Each entry independently 1 with probability p.
    Binomial,
    /// Every row has exactly round(p*d) ones at uniform positions.
    HypergeoRows,
    /// Every column has exactly round(p*D) ones at uniform positions.
    HypergeoCols,
}

impl Distribution {
    pub fn name(self) -> &'static str {
        match self {
            Distribution::Binomial => "binomial",
            Distribution::HypergeoRows => "hypergeo_rows",
            Distribution::HypergeoCols => "hypergeo_cols",
        }
    }
}

/// Sampling provenance carried alongside a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub distribution: Distribution,
    pub density: f64,
    pub seed: u64,
}

/// A D x d binary matrix stored as per-row sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseProjectionMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<u32>,
    provenance: Option<Provenance>,
}

impl SparseProjectionMatrix {
    /// Validates CSR structure: offsets nondecreasing, indices strictly
    /// increasing within each row and below `cols`.
    pub fn new(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<u32>,
        provenance: Option<Provenance>,
    ) -> Result<Self, CoreError> {
        if row_offsets.len() != rows + 1 || row_offsets[0] != 0 {
            return Err(CoreError::BadSnapshot {
                reason: "row_offsets length or first entry",
            });
        }
        if row_offsets[rows] != col_indices.len() {
            return Err(CoreError::BadSnapshot {
                reason: "row_offsets end does not match nnz",
            });
        }
        for r in 0..rows {
            let (lo, hi) = (row_offsets[r], row_offsets[r + 1]);
            if lo > hi {
                return Err(CoreError::BadSnapshot {
                    reason: "row_offsets decreasing",
                });
            }
            let row = &col_indices[lo..hi];
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(CoreError::BadSnapshot {
                        reason: "col_indices not strictly increasing in row",
                    });
                }
            }
            if let Some(&last) = row.last() {
                if last as usize >= cols {
                    return Err(CoreError::BadSnapshot {
                        reason: "col index out of range",
                    });
                }
            }
        }
        Ok(SparseProjectionMatrix {
            rows,
            cols,
            row_offsets,
            col_indices,
            provenance,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.col_indices[self.row_offsets[r]..self.row_offsets[r + 1]]
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Keeps the first `rows` rows. Sampling is row-major, so the prefix
    /// of a matrix equals a smaller matrix drawn with the same seed for
    /// the row-wise distributions.
    pub fn row_prefix(&self, rows: usize) -> Result<Self, CoreError> {
        if rows > self.rows {
            return Err(CoreError::DimensionMismatch {
                expected: self.rows,
                got: rows,
            });
        }
        let nnz = self.row_offsets[rows];
        SparseProjectionMatrix::new(
            rows,
            self.cols,
            self.row_offsets[..=rows].to_vec(),
            self.col_indices[..nnz].to_vec(),
            self.provenance,
        )
    }

    /// Per-column 1-counts.
    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = alloc::vec![0usize; self.cols];
        for &c in &self.col_indices {
            w[c as usize] += 1;
        }
        w
    }

    /// Snapshot layout: magic "SPBM", version u16 LE, D u64 LE, d u64 LE,
    /// nnz u64 LE, then D+1 row offsets as u64 LE and nnz column indices
    /// as u32 LE. Provenance is not part of the snapshot.
    pub fn to_snapshot_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 2 + 24 + 8 * (self.rows + 1) + 4 * self.nnz());
        out.extend_from_slice(b"SPBM");
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols as u64).to_le_bytes());
        out.extend_from_slice(&(self.nnz() as u64).to_le_bytes());
        for &off in &self.row_offsets {
            out.extend_from_slice(&(off as u64).to_le_bytes());
        }
        for &c in &self.col_indices {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_snapshot_bytes(bytes: &[u8]) -> Result<Self, CoreError> {
        let mut cursor = Reader { bytes, pos: 0 };
        if cursor.take(4)? != b"SPBM" {
            return Err(CoreError::BadSnapshot {
                reason: "bad magic",
            });
        }
        let version = u16::from_le_bytes(cursor.take(2)?.try_into().unwrap());
        if version != 1 {
            return Err(CoreError::BadSnapshot {
                reason: "unsupported version",
            });
        }
        let rows = cursor.u64()? as usize;
        let cols = cursor.u64()? as usize;
        let nnz = cursor.u64()? as usize;
        let mut row_offsets = Vec::with_capacity(rows + 1);
        for _ in 0..=rows {
            row_offsets.push(cursor.u64()? as usize);
        }
        let mut col_indices = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            col_indices.push(u32::from_le_bytes(cursor.take(4)?.try_into().unwrap()));
        }
        if cursor.pos != bytes.len() {
            return Err(CoreError::BadSnapshot {
                reason: "trailing bytes",
            });
        }
        SparseProjectionMatrix::new(rows, cols, row_offsets, col_indices, None)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CoreError> {
        if self.pos + n > self.bytes.len() {
            return Err(CoreError::BadSnapshot {
                reason: "truncated snapshot",
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, CoreError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Fraction of 1-entries: nnz / (D*d).
pub fn matrix_density(m: &SparseProjectionMatrix) -> f64 {
    m.nnz() as f64 / (m.rows() * m.cols()) as f64
}
