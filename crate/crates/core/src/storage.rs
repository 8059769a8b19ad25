//! File model and MDS-coded storage `Y = X·G`.
//!
//! The `m` files are stacked in one `αm × k` matrix: file `l` owns the
//! `α` consecutive rows `l·α .. (l+1)·α`, each row a stripe of `k` symbols.
//! Server `j` stores column `j` of `Y`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::LinearCode;
use crate::field::{Field, FieldError, FieldMatrix, ThickIndex};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StorageError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("storage code has dimension {code_k} but stripes hold {k} symbols")]
    DimensionMismatch { code_k: usize, k: usize },
    #[error("server index {index} out of range for {n} servers")]
    OutOfRange { index: usize, n: usize },
    #[error("columns {0:?} do not determine the files")]
    NotRecoverable(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSet {
    m: usize,
    alpha: usize,
    data: FieldMatrix,
}

impl FileSet {
    pub fn new(m: usize, alpha: usize, data: FieldMatrix) -> Result<Self, StorageError> {
        if data.rows() != m * alpha {
            return Err(FieldError::ShapeMismatch(format!(
                "{} rows for {m} files of {alpha} stripes",
                data.rows()
            ))
            .into());
        }
        Ok(FileSet { m, alpha, data })
    }

    pub fn zeros(field: Field, m: usize, alpha: usize, k: usize) -> Self {
        FileSet {
            m,
            alpha,
            data: FieldMatrix::zeros(field, m * alpha, k),
        }
    }

    /// I.i.d. uniform files, a deterministic function of `seed`.
    pub fn random(seed: u64, m: usize, alpha: usize, k: usize, field: Field) -> Self {
        let mut rng = rng::stream(seed, Stream::Files);
        FileSet {
            m,
            alpha,
            data: rng::matrix(&mut rng, field, m * alpha, k),
        }
    }

    pub fn files(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Symbols per stripe.
    pub fn k(&self) -> usize {
        self.data.cols()
    }

    /// Symbols per file, `L = αk`.
    pub fn file_size(&self) -> usize {
        self.alpha * self.k()
    }

    pub fn data(&self) -> &FieldMatrix {
        &self.data
    }

    pub fn row_layout(&self) -> ThickIndex {
        ThickIndex::uniform(self.m, self.alpha)
    }

    /// The `α × k` block of file `index` (0-based).
    pub fn file(&self, index: usize) -> FieldMatrix {
        let rows: Vec<usize> = self.row_layout().block(index).collect();
        self.data.select_rows(&rows)
    }

    pub fn to_json(&self) -> FileSetJson {
        FileSetJson {
            p: self.data.field().modulus(),
            m: self.m,
            alpha: self.alpha,
            k: self.k(),
            data: self.data.to_rows(),
        }
    }

    pub fn from_json(json: &FileSetJson) -> Result<Self, StorageError> {
        let f = Field::new(json.p)?;
        let data = FieldMatrix::from_rows_with_cols(f, &json.data, json.k)?;
        FileSet::new(json.m, json.alpha, data)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileSetJson {
    pub p: u64,
    pub m: usize,
    pub alpha: usize,
    pub k: usize,
    pub data: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageState {
    code: LinearCode,
    encoded: FieldMatrix,
}

pub fn encode(files: &FileSet, code: &LinearCode) -> Result<StorageState, StorageError> {
    if code.dimension() != files.k() {
        return Err(StorageError::DimensionMismatch {
            code_k: code.dimension(),
            k: files.k(),
        });
    }
    Ok(StorageState {
        code: code.clone(),
        encoded: files.data().mul(code.generator())?,
    })
}

impl StorageState {
    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn encoded(&self) -> &FieldMatrix {
        &self.encoded
    }

    pub fn servers(&self) -> usize {
        self.encoded.cols()
    }

    /// Column `server` (0-based) of `Y`.
    pub fn shard(&self, server: usize) -> Result<Vec<u64>, StorageError> {
        if server >= self.servers() {
            return Err(StorageError::OutOfRange {
                index: server,
                n: self.servers(),
            });
        }
        Ok(self.encoded.column(server))
    }

    /// Solves `X·G[:,W] = Y[:,W]` for the stored files.
    pub fn recover(&self, columns: &[usize]) -> Result<FieldMatrix, StorageError> {
        let g_w = self.code.generator().select_cols(columns);
        if g_w.rank() < g_w.rows() {
            return Err(StorageError::NotRecoverable(columns.to_vec()));
        }
        let y_w = self.encoded.select_cols(columns);
        // X·G_W = Y_W  <=>  G_W^T · X^T = Y_W^T, solved row by row
        let gt = g_w.transpose();
        let rows: Vec<Vec<u64>> = (0..y_w.rows())
            .map(|r| gt.solve(y_w.row(r)))
            .collect::<Result<_, _>>()?;
        Ok(FieldMatrix::from_rows_with_cols(
            self.encoded.field(),
            &rows,
            self.code.dimension(),
        )?)
    }
}
