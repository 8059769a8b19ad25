use serde::{Deserialize, Serialize};

use super::{QueryArtifact, SchemeError, StarProductScheme, Variant};
use crate::codes::{grs_decode, CodeError};
use crate::field::FieldMatrix;

/// What the user ended up with after decoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum DecodeOutcome {
    Decoded { file: Vec<Vec<u64>> },
    Failed { reason: String },
}

impl StarProductScheme {
    /// Decodes the desired file (`α × k`) from the answers; `None` marks a
    /// server that did not respond. Each present answer holds `β` symbols.
    pub fn decode(
        &self,
        artifact: &QueryArtifact,
        answers: &[Option<Vec<u64>>],
    ) -> Result<FieldMatrix, SchemeError> {
        let p = &self.params;
        if answers.len() != p.n {
            return Err(SchemeError::DecodeFailure(format!(
                "{} answer slots for {} servers",
                answers.len(),
                p.n
            )));
        }
        if let Some(j) = answers
            .iter()
            .position(|a| a.as_ref().is_some_and(|v| v.len() != p.beta))
        {
            return Err(SchemeError::DecodeFailure(format!(
                "server {j} returned the wrong number of symbols"
            )));
        }
        match p.variant {
            Variant::MultiIter => {
                let full: Vec<Vec<u64>> = answers
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        a.clone().ok_or_else(|| {
                            SchemeError::DecodeFailure(format!(
                                "server {j} did not respond; the multi-iteration scheme has no erasure budget"
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                self.decode_multi_iter(artifact, &full)
            }
            Variant::OneShot => self.decode_one_shot(answers),
        }
    }

    /// Syndrome decoding per iteration followed by MDS decoding per stripe.
    pub fn decode_multi_iter(
        &self,
        artifact: &QueryArtifact,
        answers: &[Vec<u64>],
    ) -> Result<FieldMatrix, SchemeError> {
        let p = &self.params;
        let f = self.field;
        let h = &self.parity;
        // coded[a][j]: stripe a of the desired file as stored on server j
        let mut coded: Vec<Vec<Option<u64>>> = vec![vec![None; p.n]; p.alpha];
        for (s, window) in artifact.windows.iter().enumerate() {
            let a_s: Vec<u64> = answers.iter().map(|a| a[s]).collect();
            let syndrome = h.mul_vec(&a_s)?;
            let cols: Vec<usize> = window.iter().map(|c| c.server).collect();
            let minor = h.select_cols(&cols);
            if minor.rows() != minor.cols() || minor.rank() < cols.len() {
                return Err(SchemeError::DecodeFailure(format!(
                    "parity-check columns {cols:?} are singular in iteration {s}"
                )));
            }
            let values = minor.solve(&syndrome).map_err(|_| {
                SchemeError::DecodeFailure(format!("inconsistent syndrome in iteration {s}"))
            })?;
            for (cell, v) in window.iter().zip(values) {
                coded[cell.stripe][cell.server] = Some(v);
            }
        }
        let g = self.storage_code.generator();
        let mut rows = Vec::with_capacity(p.alpha);
        for (a, stripe) in coded.iter().enumerate() {
            let servers: Vec<usize> = (0..p.n).filter(|&j| stripe[j].is_some()).collect();
            if servers.len() < p.k {
                return Err(SchemeError::DecodeFailure(format!(
                    "stripe {a} has only {} coded symbols",
                    servers.len()
                )));
            }
            let servers = &servers[..p.k];
            let values: Vec<u64> = servers.iter().map(|&j| stripe[j].unwrap()).collect();
            let gt = g.select_cols(servers).transpose();
            rows.push(gt.solve(&values).map_err(|_| {
                SchemeError::DecodeFailure(format!("stripe {a}: storage columns {servers:?} singular"))
            })?);
        }
        Ok(FieldMatrix::from_rows_with_cols(f, &rows, p.k)?)
    }

    /// Error-and-erasure interpolation decoding in the GRS code of dimension
    /// `2k+t−1`; the file is the coefficient band `k+t−1 ..= 2k+t−2`.
    pub fn decode_one_shot(&self, answers: &[Option<Vec<u64>>]) -> Result<FieldMatrix, SchemeError> {
        let p = &self.params;
        if !self.standard_query_code {
            return Err(SchemeError::DecodeFailure(
                "one-shot decoding needs the standard GRS query code".into(),
            ));
        }
        let received: Vec<Option<u64>> = answers.iter().map(|a| a.as_ref().map(|v| v[0])).collect();
        let dim = 2 * p.k + p.t - 1;
        let unit = vec![1; p.n];
        let poly = grs_decode(self.field, &self.eval_points, &unit, dim, &received).map_err(|e| match e {
            CodeError::DecodeFailure(msg) => SchemeError::DecodeFailure(msg),
            other => other.into(),
        })?;
        let low = p.k + p.t - 1;
        let row: Vec<u64> = (low..low + p.k).map(|d| poly.coeff(d)).collect();
        Ok(FieldMatrix::row_vector(self.field, &row))
    }
}
