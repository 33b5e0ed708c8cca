//! Readers for the dataset file families and working-subset selection.
//!
//! Supported containers:
//!   - fvecs: per vector, a little-endian i32 dimension then that many
//!     little-endian f32 values (SIFT distribution format);
//!   - IDX images: big-endian magic 0x00000803, then count/rows/cols u32
//!     and raw u8 pixels, each image flattened row-major (MNIST);
//!   - GloVe text: one line per vector, a token then space-separated
//!     decimals; tokens are discarded and ids are line numbers;
//!   - dense CSV: header-free comma-separated rows, one vector per row.

use std::fs::File;
use std::io::{BufRead, BufReader, ErrorKind, Read};
use std::path::{Path, PathBuf};

use byteorder::{BigEndian, LittleEndian, ReadBytesExt};
use flyhash_core::rng::RngStream;
use flyhash_core::DenseDataset;
use serde::Deserialize;

use crate::error::BenchError;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    Fvecs,
    IdxImages,
    GloveText,
    CsvDense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetRule {
    FirstN,
    SeededSample,
}

/// Where a dataset comes from and which N-vector subset to keep.
#[derive(Debug, Clone, Deserialize)]
pub struct SourceSpec {
    pub format: SourceFormat,
    pub path: PathBuf,
    #[serde(default = "default_subset_size")]
    pub subset_size: usize,
    #[serde(default = "default_subset_rule")]
    pub subset_rule: SubsetRule,
    #[serde(default)]
    pub subset_seed: u64,
}

fn default_subset_size() -> usize {
    10_000
}

fn default_subset_rule() -> SubsetRule {
    SubsetRule::FirstN
}

impl SourceSpec {
    pub fn load(&self) -> Result<DenseDataset, BenchError> {
        let full = match self.format {
            SourceFormat::Fvecs => read_fvecs(&self.path)?,
            SourceFormat::IdxImages => read_idx_images(&self.path)?,
            SourceFormat::GloveText => read_glove_text(&self.path)?,
            SourceFormat::CsvDense => read_csv_dense(&self.path)?,
        };
        take_subset(&full, self.subset_size, self.subset_rule, self.subset_seed)
    }
}

pub fn read_fvecs(path: &Path) -> Result<DenseDataset, BenchError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut dims: Option<usize> = None;
    let mut offset: u64 = 0;
    loop {
        let d = match reader.read_i32::<LittleEndian>() {
            Ok(d) => d as usize,
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        };
        if let Some(expected) = dims {
            if d != expected {
                return Err(BenchError::InconsistentDim {
                    expected,
                    got: d,
                    record: columns.len(),
                });
            }
        } else {
            dims = Some(d);
        }
        let mut col = vec![0.0f32; d];
        reader
            .read_f32_into::<LittleEndian>(&mut col)
            .map_err(|_| BenchError::TruncatedRecord { offset })?;
        columns.push(col.into_iter().map(f64::from).collect());
        offset += 4 + 4 * d as u64;
    }
    Ok(DenseDataset::from_columns(
        &columns,
        &format!("fvecs:{}", path.display()),
    )?)
}

pub fn read_idx_images(path: &Path) -> Result<DenseDataset, BenchError> {
    let mut reader = BufReader::new(File::open(path)?);
    let magic = reader.read_u32::<BigEndian>().map_err(|_| {
        BenchError::TruncatedFile {
            context: "IDX header",
        }
    })?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(BenchError::BadMagic {
            expected: IDX_IMAGES_MAGIC,
            got: magic,
        });
    }
    let count = reader.read_u32::<BigEndian>()? as usize;
    let rows = reader.read_u32::<BigEndian>()? as usize;
    let cols = reader.read_u32::<BigEndian>()? as usize;
    let dims = rows * cols;
    let mut pixels = vec![0u8; count * dims];
    reader
        .read_exact(&mut pixels)
        .map_err(|_| BenchError::TruncatedFile {
            context: "IDX pixel data",
        })?;
    let values: Vec<f64> = pixels.into_iter().map(f64::from).collect();
    Ok(DenseDataset::new(
        dims,
        count,
        values,
        &format!("idx:{}", path.display()),
    )?)
}

pub fn read_glove_text(path: &Path) -> Result<DenseDataset, BenchError> {
    let reader = BufReader::new(File::open(path)?);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut dims: Option<usize> = None;
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let _token = parts.next();
        let col: Vec<f64> = parts
            .map(|t| {
                t.parse::<f64>().map_err(|e| BenchError::Parse {
                    line: line_no + 1,
                    message: format!("{t:?}: {e}"),
                })
            })
            .collect::<Result<_, _>>()?;
        if let Some(expected) = dims {
            if col.len() != expected {
                return Err(BenchError::InconsistentDim {
                    expected,
                    got: col.len(),
                    record: line_no,
                });
            }
        } else {
            dims = Some(col.len());
        }
        columns.push(col);
    }
    Ok(DenseDataset::from_columns(
        &columns,
        &format!("glove:{}", path.display()),
    )?)
}

pub fn read_csv_dense(path: &Path) -> Result<DenseDataset, BenchError> {
    let reader = BufReader::new(File::open(path)?);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut dims: Option<usize> = None;
    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let col: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|e| BenchError::Parse {
                    line: line_no + 1,
                    message: format!("{t:?}: {e}"),
                })
            })
            .collect::<Result<_, _>>()?;
        if let Some(expected) = dims {
            if col.len() != expected {
                return Err(BenchError::InconsistentDim {
                    expected,
                    got: col.len(),
                    record: line_no,
                });
            }
        } else {
            dims = Some(col.len());
        }
        columns.push(col);
    }
    Ok(DenseDataset::from_columns(
        &columns,
        &format!("csv:{}", path.display()),
    )?)
}

/// Keeps N vectors: the first N, or a seeded uniform sample without
/// replacement with the original column order preserved.
pub fn take_subset(
    x: &DenseDataset,
    n: usize,
    rule: SubsetRule,
    seed: u64,
) -> Result<DenseDataset, BenchError> {
    if n > x.count() {
        return Err(BenchError::SubsetTooLarge {
            requested: n,
            available: x.count(),
        });
    }
    let ids: Vec<usize> = match rule {
        SubsetRule::FirstN => (0..n).collect(),
        SubsetRule::SeededSample => {
            let mut rng = RngStream::new(seed, "subset");
            let mut ids = rng.sample_without_replacement(x.count(), n);
            ids.sort_unstable();
            ids
        }
    };
    Ok(x.select_columns(&ids, x.source_tag())?)
}

/// Writes a dataset in fvecs layout (used by tests and `formats` docs).
pub fn write_fvecs(path: &Path, x: &DenseDataset) -> Result<(), BenchError> {
    use byteorder::WriteBytesExt;
    use std::io::BufWriter;
    let mut w = BufWriter::new(File::create(path)?);
    for j in 0..x.count() {
        w.write_i32::<LittleEndian>(x.dims() as i32)?;
        for &v in x.column(j) {
            w.write_f32::<LittleEndian>(v as f32)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn fvecs_single_vector_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.fvecs");
        let bytes: Vec<u8> = [
            2i32.to_le_bytes().as_slice(),
            1.0f32.to_le_bytes().as_slice(),
            2.0f32.to_le_bytes().as_slice(),
        ]
        .concat();
        std::fs::write(&path, bytes).unwrap();
        let ds = read_fvecs(&path).unwrap();
        assert_eq!(ds.dims(), 2);
        assert_eq!(ds.count(), 1);
        assert_eq!(ds.column(0), &[1.0, 2.0]);
    }

    #[test]
    fn fvecs_empty_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.fvecs");
        std::fs::write(&path, []).unwrap();
        assert!(matches!(
            read_fvecs(&path),
            Err(BenchError::Core(flyhash_core::CoreError::EmptyMatrix))
        ));
    }

    #[test]
    fn fvecs_mixed_dims_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mixed.fvecs");
        let mut bytes = Vec::new();
        bytes.extend(1i32.to_le_bytes());
        bytes.extend(1.0f32.to_le_bytes());
        bytes.extend(2i32.to_le_bytes());
        bytes.extend(1.0f32.to_le_bytes());
        bytes.extend(2.0f32.to_le_bytes());
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            read_fvecs(&path),
            Err(BenchError::InconsistentDim { .. })
        ));
    }

    #[test]
    fn fvecs_write_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.fvecs");
        let cols = vec![vec![1.5, -2.25, 3.0], vec![0.0, 4.5, -1.75]];
        let ds = DenseDataset::from_columns(&cols, "t").unwrap();
        write_fvecs(&path, &ds).unwrap();
        let back = read_fvecs(&path).unwrap();
        assert_eq!(back.values(), ds.values());
    }

    fn write_idx(path: &Path, magic: u32, count: u32, rows: u32, cols: u32, pixels: &[u8]) {
        let mut f = File::create(path).unwrap();
        f.write_all(&magic.to_be_bytes()).unwrap();
        f.write_all(&count.to_be_bytes()).unwrap();
        f.write_all(&rows.to_be_bytes()).unwrap();
        f.write_all(&cols.to_be_bytes()).unwrap();
        f.write_all(pixels).unwrap();
    }

    #[test]
    fn idx_small_image() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.idx");
        write_idx(&path, IDX_IMAGES_MAGIC, 1, 2, 2, &[0, 128, 255, 7]);
        let ds = read_idx_images(&path).unwrap();
        assert_eq!(ds.dims(), 4);
        assert_eq!(ds.column(0), &[0.0, 128.0, 255.0, 7.0]);
    }

    #[test]
    fn idx_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lbl.idx");
        write_idx(&path, 0x0000_0801, 1, 1, 1, &[3]);
        assert!(matches!(
            read_idx_images(&path),
            Err(BenchError::BadMagic { got: 0x0000_0801, .. })
        ));
    }

    #[test]
    fn idx_truncated_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.idx");
        write_idx(&path, IDX_IMAGES_MAGIC, 2, 2, 2, &[1, 2, 3]);
        assert!(matches!(
            read_idx_images(&path),
            Err(BenchError::TruncatedFile { .. })
        ));
    }

    #[test]
    fn glove_signs_preserved() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, "the 0.1 -0.2\nof -1.5 2.5\n").unwrap();
        let ds = read_glove_text(&path).unwrap();
        assert_eq!(ds.dims(), 2);
        assert_eq!(ds.column(0), &[0.1, -0.2]);
        assert_eq!(ds.column(1), &[-1.5, 2.5]);
    }

    #[test]
    fn glove_short_line_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, "the 0.1 -0.2\nof -1.5\n").unwrap();
        assert!(matches!(
            read_glove_text(&path),
            Err(BenchError::InconsistentDim { .. })
        ));
    }

    #[test]
    fn csv_dense_rows_become_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "1,2,3\n4,5,6\n").unwrap();
        let ds = read_csv_dense(&path).unwrap();
        assert_eq!(ds.dims(), 3);
        assert_eq!(ds.count(), 2);
        assert_eq!(ds.column(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn subset_rules() {
        let cols: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let ds = DenseDataset::from_columns(&cols, "t").unwrap();
        let first = take_subset(&ds, 2, SubsetRule::FirstN, 0).unwrap();
        assert_eq!(first.column(0), &[0.0]);
        assert_eq!(first.column(1), &[1.0]);
        let all = take_subset(&ds, 5, SubsetRule::FirstN, 0).unwrap();
        assert_eq!(all.values(), ds.values());
        let a = take_subset(&ds, 3, SubsetRule::SeededSample, 42).unwrap();
        let b = take_subset(&ds, 3, SubsetRule::SeededSample, 42).unwrap();
        assert_eq!(a.values(), b.values());
        // original order preserved
        let vals: Vec<f64> = a.values().to_vec();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            take_subset(&ds, 6, SubsetRule::FirstN, 0),
            Err(BenchError::SubsetTooLarge { .. })
        ));
    }
}
