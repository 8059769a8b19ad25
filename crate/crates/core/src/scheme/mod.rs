//! Star-product PIR over GRS-coded storage.
//!
//! Storage code `C = GRS_k`, query code `D_Q = GRS_t`, both on the points
//! `0, 1, …, n−1` with unit multipliers. A query is `Q = D + E` where the
//! rows of `D` are independent uniform codewords of `D_Q` and `E` selects
//! the desired file. Honest server `j` answers `Y[:,j]^T · Q[:,ψ_β(j)] + S_j`.
//!
//! Two variants are provided:
//!
//! * [`Variant::MultiIter`] : `b = r = 0`, `n > k+t−1`. Each of the `β`
//!   iterations retrieves `n−k−t+1` coded symbols of the desired file
//!   through the syndrome of `C★D_Q`; after `β` iterations every stripe has
//!   `k` coded symbols and is MDS-decoded. Rate `1 − (k+t−1)/n`.
//! * [`Variant::OneShot`] : `n = 2k+t+2b+r−1`, `α = β = 1`. `E` carries the
//!   row `(x_j^(k+t−1))_j`, so the answers form a codeword of the GRS code
//!   of dimension `2k+t−1` whose top `k` coefficients are the file; `b`
//!   errors and `r` erasures are corrected. Rate `k/n`.

mod decode;
mod mask;
mod params;
mod query;
mod support_rank;

pub use decode::DecodeOutcome;
pub use mask::{MaskState, MaskingCode};
pub use params::{SchemeParams, Variant};
pub use query::{QueryArtifact, RetrievalCell};
pub use support_rank::{
    check_full_support_rank, check_full_support_rank_with_layout, support_rank_violations,
    SupportRankReport, SupportRankViolation,
};

use thiserror::Error;

use crate::codes::{extended_rs, CodeError, GrsSpec, LinearCode};
use crate::field::{Field, FieldError, FieldMatrix, ThickIndex};
use crate::storage::StorageError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error("file index {index} out of range for {m} files")]
    FileOutOfRange { index: usize, m: usize },
    #[error("decode failure: {0}")]
    DecodeFailure(String),
}

/// One instantiated scheme: parameters plus every code it uses.
#[derive(Debug, Clone)]
pub struct StarProductScheme {
    params: SchemeParams,
    field: Field,
    eval_points: Vec<u64>,
    storage_code: LinearCode,
    query_code: LinearCode,
    /// `ℰ`: the `[n,1]` code spanned by `(x_j^(k+t−1))_j`.
    retrieval_code: LinearCode,
    star_code: LinearCode,
    parity: FieldMatrix,
    masking: MaskingCode,
    standard_query_code: bool,
}

/// Reed–Solomon code on the points `0..n`, or the doubly-extended code when
/// `n = p+1`.
fn rs_code(field: Field, n: usize, dimension: usize, offset: usize) -> Result<LinearCode, CodeError> {
    if n as u64 == field.modulus() + 1 {
        extended_rs(field, dimension, offset)
    } else {
        GrsSpec::standard(n, dimension).with_offset(offset).build(field)
    }
}

impl StarProductScheme {
    pub fn new(params: SchemeParams) -> Result<Self, SchemeError> {
        params.validate()?;
        let field = params.field()?;
        let query_code = rs_code(field, params.n, params.t, 0)?;
        Self::assemble(params, query_code, true)
    }

    /// Same scheme with a caller-chosen query code, for audit experiments on
    /// deliberately weakened instances. Decoding is only guaranteed for the
    /// standard construction.
    pub fn with_query_code(params: SchemeParams, query_code: LinearCode) -> Result<Self, SchemeError> {
        params.validate()?;
        if query_code.length() != params.n || query_code.field() != params.field()? {
            return Err(SchemeError::InfeasibleParams(
                "query code must have length n over GF(p)".into(),
            ));
        }
        Self::assemble(params, query_code, false)
    }

    fn assemble(
        params: SchemeParams,
        query_code: LinearCode,
        standard_query_code: bool,
    ) -> Result<Self, SchemeError> {
        let field = params.field()?;
        let n = params.n;
        let storage_code = rs_code(field, n, params.k, 0)?;
        let retrieval_code = rs_code(field, n, 1, params.k + params.t - 1)?;
        let star_code = storage_code.star_product(&query_code)?;
        let parity = star_code.parity_check();
        Ok(StarProductScheme {
            params,
            field,
            eval_points: (0..n.min(field.modulus() as usize) as u64).collect(),
            storage_code,
            query_code,
            retrieval_code,
            star_code,
            parity,
            masking: MaskingCode::StarProduct,
            standard_query_code,
        })
    }

    /// Chooses which code the symmetric mask is drawn from.
    pub fn with_masking(mut self, masking: MaskingCode) -> Self {
        self.masking = masking;
        self
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn eval_points(&self) -> &[u64] {
        &self.eval_points
    }

    pub fn storage_code(&self) -> &LinearCode {
        &self.storage_code
    }

    pub fn query_code(&self) -> &LinearCode {
        &self.query_code
    }

    pub fn retrieval_code(&self) -> &LinearCode {
        &self.retrieval_code
    }

    /// `C★D_Q`.
    pub fn star_code(&self) -> &LinearCode {
        &self.star_code
    }

    /// Parity-check matrix of `C★D_Q`.
    pub fn parity_check(&self) -> &FieldMatrix {
        &self.parity
    }

    pub fn masking(&self) -> MaskingCode {
        self.masking
    }

    pub fn mask_code(&self) -> &LinearCode {
        match self.masking {
            MaskingCode::StarProduct => &self.star_code,
            MaskingCode::Storage => &self.storage_code,
        }
    }

    /// Thick-row layout of the query (one block of `α` rows per file).
    pub fn row_layout(&self) -> ThickIndex {
        ThickIndex::uniform(self.params.m, self.params.alpha)
    }

    /// Thick-column layout of the query (one block of `β` columns per server).
    pub fn column_layout(&self) -> ThickIndex {
        ThickIndex::uniform(self.params.n, self.params.beta)
    }

    /// Answers of server `server` per the linear response rule.
    pub fn respond(
        &self,
        shard: &[u64],
        artifact: &QueryArtifact,
        server: usize,
        mask: Option<&MaskState>,
    ) -> Result<Vec<u64>, SchemeError> {
        let block = artifact.server_block(server, self.params.beta);
        let zero = vec![0; self.params.beta];
        let share = mask.map(|m| m.share(server)).unwrap_or(zero);
        respond(shard, &block, &share)
    }
}

/// Linear response `Y_j^T · Q_j + S_j` of one server.
///
/// `shard` is the server's column of `Y` (length `αm`), `query_block` its
/// `αm × β` thick column of the query and `mask` its `β` shared-randomness
/// symbols.
pub fn respond(shard: &[u64], query_block: &FieldMatrix, mask: &[u64]) -> Result<Vec<u64>, SchemeError> {
    if mask.len() != query_block.cols() {
        return Err(FieldError::ShapeMismatch(format!(
            "mask of length {} for a {}-column query block",
            mask.len(),
            query_block.cols()
        ))
        .into());
    }
    let f = query_block.field();
    let mut a = query_block.vec_mul(shard)?;
    for (x, &s) in a.iter_mut().zip(mask) {
        *x = f.add(*x, s);
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn respond_examples() {
        let f = Field::new(5).unwrap();
        let shard = [3, 1, 4, 2];
        let zero_q = FieldMatrix::zeros(f, 4, 2);
        assert_eq!(respond(&shard, &zero_q, &[2, 3]).unwrap(), vec![2, 3]);
        let mut unit = FieldMatrix::zeros(f, 4, 1);
        unit.set(2, 0, 1);
        assert_eq!(respond(&shard, &unit, &[0]).unwrap(), vec![4]);
        assert!(respond(&shard, &unit, &[0, 0]).is_err());
    }

    #[test]
    fn codes_of_the_standard_instance() {
        let s = StarProductScheme::new(SchemeParams::multi_iter(5, 2, 2, 2, 5).unwrap()).unwrap();
        assert_eq!(s.star_code().dimension(), 3);
        assert_eq!(s.parity_check().shape(), (2, 5));
        assert_eq!(s.query_code().dual().min_distance().unwrap(), 3);
        let sum = s.star_code().sum(&s.storage_code().star_product(s.retrieval_code()).unwrap()).unwrap();
        assert_eq!(sum.dimension(), 5);
    }
}
