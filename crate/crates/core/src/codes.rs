//! Linear codes given by generator matrices, generalized Reed–Solomon
//! constructions, star-product codes and a Gao-style error-and-erasure
//! decoder for GRS codes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError, FieldMatrix};
use crate::poly::Poly;

/// Default cap on `p^k` for exhaustive minimum-distance computation.
pub const DEFAULT_DISTANCE_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("generator matrix has rank {rank} but {rows} rows")]
    NotFullRank { rank: usize, rows: usize },
    #[error("code length {n} exceeds field size {p}")]
    FieldTooSmall { n: usize, p: u64 },
    #[error("degenerate GRS spec: {0}")]
    DegenerateSpec(String),
    #[error("exhaustive enumeration of {states} codewords exceeds cap {cap}")]
    TooLarge { states: u128, cap: u64 },
    #[error("decoding failed: {0}")]
    DecodeFailure(String),
}

/// A linear code of length `n` and dimension `k`, represented by a
/// full-row-rank `k × n` generator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    generator: FieldMatrix,
}

impl LinearCode {
    pub fn new(generator: FieldMatrix) -> Result<Self, CodeError> {
        let rank = generator.rank();
        if rank != generator.rows() {
            return Err(CodeError::NotFullRank {
                rank,
                rows: generator.rows(),
            });
        }
        Ok(LinearCode { generator })
    }

    /// Code spanned by the rows of `spanning`, which need not be independent.
    pub fn from_spanning(spanning: &FieldMatrix) -> Self {
        LinearCode {
            generator: spanning.row_basis(),
        }
    }

    /// The whole space `F^n`.
    pub fn full(field: Field, n: usize) -> Self {
        LinearCode {
            generator: FieldMatrix::identity(field, n),
        }
    }

    /// Length-`n` repetition code spanned by the all-ones word.
    pub fn repetition(field: Field, n: usize) -> Self {
        LinearCode {
            generator: FieldMatrix::ones_row(field, n),
        }
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.generator
    }

    pub fn field(&self) -> Field {
        self.generator.field()
    }

    pub fn length(&self) -> usize {
        self.generator.cols()
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    pub fn encode(&self, message: &[u64]) -> Result<Vec<u64>, CodeError> {
        Ok(self.generator.vec_mul(message)?)
    }

    pub fn contains(&self, word: &[u64]) -> bool {
        if word.len() != self.length() {
            return false;
        }
        self.generator.transpose().solve(word).is_ok()
    }

    /// Parity-check matrix `H` (`(n−k) × n`, full rank) with `H·c^T = 0` on the code.
    pub fn parity_check(&self) -> FieldMatrix {
        self.generator.kernel().transpose()
    }

    pub fn dual(&self) -> LinearCode {
        LinearCode {
            generator: self.parity_check(),
        }
    }

    /// Code spanned by all pairwise star products of generator rows.
    pub fn star_product(&self, other: &LinearCode) -> Result<LinearCode, CodeError> {
        self.check_compatible(other)?;
        let f = self.field();
        let n = self.length();
        let mut rows = Vec::with_capacity(self.dimension() * other.dimension());
        for a in 0..self.dimension() {
            for b in 0..other.dimension() {
                let ra = self.generator.row(a);
                let rb = other.generator.row(b);
                rows.push(ra.iter().zip(rb).map(|(&x, &y)| f.mul(x, y)).collect::<Vec<_>>());
            }
        }
        let span = FieldMatrix::from_rows_with_cols(f, &rows, n)?;
        Ok(LinearCode::from_spanning(&span))
    }

    /// Sum `C + D` of two codes of equal length.
    pub fn sum(&self, other: &LinearCode) -> Result<LinearCode, CodeError> {
        self.check_compatible(other)?;
        let stacked = self.generator.vstack(&other.generator)?;
        Ok(LinearCode::from_spanning(&stacked))
    }

    /// Same row space, regardless of the chosen generator.
    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.field() == other.field()
            && self.length() == other.length()
            && self.generator.row_basis() == other.generator.row_basis()
    }

    fn check_compatible(&self, other: &LinearCode) -> Result<(), CodeError> {
        if self.field() != other.field() {
            return Err(FieldError::FieldMismatch(
                self.field().modulus(),
                other.field().modulus(),
            )
            .into());
        }
        if self.length() != other.length() {
            return Err(FieldError::ShapeMismatch(format!(
                "code lengths {} and {}",
                self.length(),
                other.length()
            ))
            .into());
        }
        Ok(())
    }

    /// Minimum Hamming weight over all nonzero codewords, found by
    /// enumerating every message. The zero code reports `n + 1`.
    pub fn min_distance(&self) -> Result<usize, CodeError> {
        self.min_distance_capped(DEFAULT_DISTANCE_CAP)
    }

    pub fn min_distance_capped(&self, cap: u64) -> Result<usize, CodeError> {
        let k = self.dimension();
        let n = self.length();
        if k == 0 {
            return Ok(n + 1);
        }
        let p = self.field().modulus();
        let states = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if states > cap as u128 {
            return Err(CodeError::TooLarge { states, cap });
        }
        let f = self.field();
        let mut digits = vec![0u64; k];
        let mut word = vec![0u64; n];
        let mut best = n;
        // Odometer over messages: bumping digit i (with or without wrap) adds row i.
        loop {
            let mut i = 0;
            loop {
                if i == k {
                    return Ok(best);
                }
                for (w, &g) in word.iter_mut().zip(self.generator.row(i)) {
                    *w = f.add(*w, g);
                }
                digits[i] += 1;
                if digits[i] == p {
                    digits[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
            let weight = word.iter().filter(|&&w| w != 0).count();
            if weight > 0 && weight < best {
                best = weight;
            }
        }
    }

    /// Singleton-bound equality `d = n − k + 1`, by exhaustive distance.
    pub fn is_mds(&self) -> Result<bool, CodeError> {
        if self.dimension() == 0 {
            return Ok(true);
        }
        Ok(self.min_distance()? == self.length() - self.dimension() + 1)
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            p: self.field().modulus(),
            n: self.length(),
            k: self.dimension(),
            generator: self.generator.to_rows(),
        }
    }

    pub fn from_json(json: &CodeJson) -> Result<Self, CodeError> {
        let f = Field::new(json.p)?;
        let g = FieldMatrix::from_rows_with_cols(f, &json.generator, json.n)?;
        if g.rows() != json.k {
            return Err(FieldError::ShapeMismatch(format!(
                "declared k = {} but generator has {} rows",
                json.k,
                g.rows()
            ))
            .into());
        }
        LinearCode::new(g)
    }
}

/// Wire form of a code: `{p, n, k, generator}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub p: u64,
    pub n: usize,
    pub k: usize,
    pub generator: Vec<Vec<u64>>,
}

/// Parameters of a generalized Reed–Solomon code: row `i` of the generator
/// is `(v_j · x_j^(offset + i))_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrsSpec {
    pub eval_points: Vec<u64>,
    pub multipliers: Vec<u64>,
    pub dimension: usize,
    pub offset: usize,
}

impl GrsSpec {
    /// Points `0, 1, …, n−1` with unit multipliers.
    pub fn standard(n: usize, dimension: usize) -> Self {
        GrsSpec {
            eval_points: (0..n as u64).collect(),
            multipliers: vec![1; n],
            dimension,
            offset: 0,
        }
    }

    pub fn with_offset(mut self, offset: usize) -> Self {
        self.offset = offset;
        self
    }

    pub fn length(&self) -> usize {
        self.eval_points.len()
    }

    pub fn build(&self, field: Field) -> Result<LinearCode, CodeError> {
        grs(field, self)
    }
}

pub fn grs(field: Field, spec: &GrsSpec) -> Result<LinearCode, CodeError> {
    let n = spec.eval_points.len();
    if spec.multipliers.len() != n {
        return Err(CodeError::DegenerateSpec(format!(
            "{} multipliers for {n} points",
            spec.multipliers.len()
        )));
    }
    if n as u64 > field.modulus() {
        return Err(CodeError::FieldTooSmall {
            n,
            p: field.modulus(),
        });
    }
    let points: Vec<u64> = spec.eval_points.iter().map(|&x| field.reduce(x)).collect();
    let mut seen = points.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != n {
        return Err(CodeError::DegenerateSpec("repeated evaluation points".into()));
    }
    if spec.multipliers.iter().any(|&v| field.reduce(v) == 0) {
        return Err(CodeError::DegenerateSpec("zero column multiplier".into()));
    }
    if spec.dimension + spec.offset > n {
        return Err(CodeError::DegenerateSpec(format!(
            "dimension {} + offset {} exceeds length {n}",
            spec.dimension, spec.offset
        )));
    }
    let g = FieldMatrix::from_fn(field, spec.dimension, n, |i, j| {
        field.mul(
            spec.multipliers[j],
            field.pow(points[j], (spec.offset + i) as u64),
        )
    });
    // Vandermonde rows with distinct points (and 0^0 = 1) are independent.
    LinearCode::new(g)
}

/// Doubly-extended Reed–Solomon code of length `p+1` spanned by
/// `x^offset, …, x^(offset+dimension−1)`: evaluations at every field element
/// followed by a coordinate at infinity holding the coefficient of the top
/// monomial. With `offset = 0` it is MDS, and the star product of the
/// dimension-`a` and dimension-`b` codes is the dimension-`(a+b−1)` code.
pub fn extended_rs(field: Field, dimension: usize, offset: usize) -> Result<LinearCode, CodeError> {
    let p = field.modulus() as usize;
    if dimension == 0 || dimension + offset > p + 1 {
        return Err(CodeError::DegenerateSpec(format!(
            "dimension {dimension} + offset {offset} exceeds length {}",
            p + 1
        )));
    }
    let g = FieldMatrix::from_fn(field, dimension, p + 1, |i, j| {
        if j == p {
            u64::from(i == dimension - 1)
        } else {
            field.pow(j as u64, (offset + i) as u64)
        }
    });
    LinearCode::new(g)
}

/// Error-and-erasure decoder for the GRS code with the given points and
/// multipliers, dimension `dimension` and degree offset 0.
///
/// `received[j] = None` marks an erasure. Returns the message polynomial
/// (degree `< dimension`) whose evaluation disagrees with the received word
/// in at most `⌊(n' − dimension)/2⌋` of the `n'` unerased positions.
pub fn grs_decode(
    field: Field,
    eval_points: &[u64],
    multipliers: &[u64],
    dimension: usize,
    received: &[Option<u64>],
) -> Result<Poly, CodeError> {
    let f = field;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (j, r) in received.iter().enumerate() {
        if let Some(y) = r {
            xs.push(eval_points[j]);
            ys.push(f.div(*y, multipliers[j])?);
        }
    }
    let n_eff = xs.len();
    if n_eff < dimension {
        return Err(CodeError::DecodeFailure(format!(
            "{n_eff} unerased symbols cannot determine a dimension-{dimension} codeword"
        )));
    }
    if dimension == 0 {
        return if ys.iter().all(|&y| y == 0) {
            Ok(Poly::zero())
        } else {
            Err(CodeError::DecodeFailure("nonzero word for the zero code".into()))
        };
    }
    // Gao: partial extended Euclid on (g0, g1) until deg r < (n' + k)/2.
    let g0 = Poly::from_roots(f, &xs);
    let g1 = Poly::interpolate(f, &xs, &ys)?;
    let stop = (n_eff + dimension).div_ceil(2);
    let (mut r_prev, mut r_cur) = (g0, g1);
    let (mut v_prev, mut v_cur) = (Poly::zero(), Poly::constant(1));
    while r_cur.degree().is_some_and(|d| d >= stop) {
        let (q, r_next) = r_prev.div_rem(f, &r_cur)?;
        let v_next = v_prev.sub(f, &q.mul(f, &v_cur));
        r_prev = std::mem::replace(&mut r_cur, r_next);
        v_prev = std::mem::replace(&mut v_cur, v_next);
    }
    let (msg, rem) = r_cur.div_rem(f, &v_cur)?;
    if !rem.is_zero() || msg.degree().is_some_and(|d| d >= dimension) {
        return Err(CodeError::DecodeFailure(
            "received word is not within the unique-decoding radius".into(),
        ));
    }
    Ok(msg)
}

/// Brute-force counterpart of [`grs_decode`]: tries every error-position set
/// of size at most `max_errors`, interpolating through the remaining
/// positions. Returns every distinct message found, so callers can detect
/// ambiguity. Exponential; meant for cross-checks on short codes.
pub fn grs_decode_brute_force(
    field: Field,
    eval_points: &[u64],
    multipliers: &[u64],
    dimension: usize,
    received: &[Option<u64>],
    max_errors: usize,
) -> Result<Vec<Poly>, CodeError> {
    let f = field;
    let live: Vec<usize> = (0..received.len()).filter(|&j| received[j].is_some()).collect();
    let mut found: Vec<Poly> = Vec::new();
    for e in 0..=max_errors.min(live.len()) {
        for errors in combinations(&live, e) {
            let keep: Vec<usize> = live.iter().copied().filter(|j| !errors.contains(j)).collect();
            if keep.len() < dimension {
                continue;
            }
            let xs: Vec<u64> = keep[..dimension].iter().map(|&j| eval_points[j]).collect();
            let ys: Vec<u64> = keep[..dimension]
                .iter()
                .map(|&j| f.div(received[j].unwrap(), multipliers[j]))
                .collect::<Result<_, _>>()?;
            let cand = Poly::interpolate(f, &xs, &ys)?;
            let agrees = keep.iter().all(|&j| {
                f.mul(cand.eval(f, eval_points[j]), multipliers[j]) == received[j].unwrap()
            });
            if agrees && !found.contains(&cand) {
                found.push(cand);
            }
        }
    }
    Ok(found)
}

/// All `size`-element subsets of `items`, in lexicographic order.
pub fn combinations<T: Copy>(items: &[T], size: usize) -> Vec<Vec<T>> {
    fn rec<T: Copy>(items: &[T], size: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, size, 0, &mut Vec::with_capacity(size), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    /// Independent distance oracle: enumerate every vector of F^n, keep codewords.
    fn distance_by_space_enumeration(code: &LinearCode) -> usize {
        let f = code.field();
        let p = f.modulus();
        let n = code.length();
        let mut best = n + 1;
        for idx in 1..p.pow(n as u32) {
            let word: Vec<u64> = (0..n).map(|j| (idx / p.pow(j as u32)) % p).collect();
            if code.contains(&word) {
                best = best.min(word.iter().filter(|&&w| w != 0).count());
            }
        }
        best
    }

    #[test]
    fn extended_rs_is_mds_and_closed_under_star() {
        let f = gf(3);
        let c = extended_rs(f, 2, 0).unwrap();
        assert_eq!(c.length(), 4);
        assert_eq!(c.min_distance().unwrap(), 3);
        let d = extended_rs(f, 2, 0).unwrap();
        let star = c.star_product(&d).unwrap();
        assert_eq!(star.dimension(), 3);
        assert_eq!(star.min_distance().unwrap(), 2);
        let ext3 = extended_rs(f, 3, 0).unwrap();
        for r in 0..3 {
            assert!(star.contains(ext3.generator().row(r)));
        }
        assert!(extended_rs(f, 5, 0).is_err());
    }

    #[test]
    fn grs_4_2_over_gf5_is_mds() {
        let c = GrsSpec::standard(4, 2).build(gf(5)).unwrap();
        assert_eq!(distance_by_space_enumeration(&c), 3);
        assert_eq!(c.min_distance().unwrap(), 3);
        assert!(c.is_mds().unwrap());
    }

    #[test]
    fn grs_rejects_bad_specs() {
        assert!(matches!(
            GrsSpec::standard(4, 2).build(gf(3)),
            Err(CodeError::FieldTooSmall { n: 4, p: 3 })
        ));
        let mut repeated = GrsSpec::standard(3, 2);
        repeated.eval_points = vec![1, 1, 2];
        assert!(matches!(repeated.build(gf(5)), Err(CodeError::DegenerateSpec(_))));
        let mut zero_mult = GrsSpec::standard(3, 2);
        zero_mult.multipliers = vec![1, 0, 1];
        assert!(matches!(zero_mult.build(gf(5)), Err(CodeError::DegenerateSpec(_))));
        assert!(GrsSpec::standard(3, 2).with_offset(2).build(gf(5)).is_err());
    }

    #[test]
    fn whole_space_and_repetition() {
        let full = GrsSpec::standard(4, 4).build(gf(5)).unwrap();
        assert_eq!(full.min_distance().unwrap(), 1);
        assert_eq!(full.dual().dimension(), 0);
        assert_eq!(full.parity_check().shape(), (0, 4));
        assert_eq!(LinearCode::repetition(gf(5), 4).min_distance().unwrap(), 4);
    }

    #[test]
    fn gf3_storage_code_is_mds() {
        let g = FieldMatrix::from_rows(gf(3), &[[1, 0, 1, 1], [0, 1, 1, 2]]).unwrap();
        let c = LinearCode::new(g.clone()).unwrap();
        assert!(c.is_mds().unwrap());
        let h = c.parity_check();
        assert!(g.mul(&h.transpose()).unwrap().is_zero());
        assert_eq!(h.rank(), 2);
    }

    #[test]
    fn duals() {
        let c = GrsSpec::standard(4, 2).build(gf(5)).unwrap();
        let d = c.dual();
        assert_eq!(d.dimension(), 2);
        assert_eq!(distance_by_space_enumeration(&d), 3);
        assert!(c.generator().mul(&d.generator().transpose()).unwrap().is_zero());
        assert!(d.dual().same_code(&c));
    }

    #[test]
    fn parity_check_minors_of_mds_code() {
        let c = GrsSpec::standard(5, 2).build(gf(5)).unwrap();
        let h = c.parity_check();
        assert_eq!(h.shape(), (3, 5));
        for cols in combinations(&[0, 1, 2, 3, 4], 3) {
            assert_eq!(h.select_cols(&cols).rank(), 3, "columns {cols:?}");
        }
    }

    #[test]
    fn star_products() {
        let f = gf(5);
        let c = GrsSpec::standard(4, 2).build(f).unwrap();
        assert!(c.star_product(&LinearCode::repetition(f, 4)).unwrap().same_code(&c));
        let rs = GrsSpec::standard(5, 2).build(f).unwrap();
        // span of the 4 pairwise row products: degrees 0, 1, 1, 2
        assert_eq!(rs.star_product(&rs).unwrap().dimension(), 3);
        // no zero coordinate in C means C ★ F^n = F^n
        let ones_code = GrsSpec {
            eval_points: vec![1, 2, 3, 4],
            multipliers: vec![1; 4],
            dimension: 2,
            offset: 0,
        }
        .build(f)
        .unwrap();
        assert_eq!(
            ones_code.star_product(&LinearCode::full(f, 4)).unwrap().dimension(),
            4
        );
    }

    #[test]
    fn min_distance_cap() {
        let c = GrsSpec::standard(7, 5).build(gf(7)).unwrap();
        assert!(matches!(
            c.min_distance_capped(100),
            Err(CodeError::TooLarge { .. })
        ));
    }

    #[test]
    fn json_roundtrip() {
        let c = GrsSpec::standard(4, 2).build(gf(5)).unwrap();
        let text = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(text, r#"{"p":5,"n":4,"k":2,"generator":[[1,1,1,1],[0,1,2,3]]}"#);
        let back: CodeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(LinearCode::from_json(&back).unwrap(), c);
    }

    #[test]
    fn gao_decodes_errors_and_erasures() {
        let f = gf(11);
        let points: Vec<u64> = (0..8).collect();
        let mult = vec![1; 8];
        let msg = Poly::new(vec![3, 1, 4, 1, 5]);
        let word: Vec<Option<u64>> = points.iter().map(|&x| Some(msg.eval(f, x))).collect();
        assert_eq!(grs_decode(f, &points, &mult, 5, &word).unwrap(), msg);
        // n=8, k=5: one error, one erasure
        let mut bad = word.clone();
        bad[2] = Some(f.add(bad[2].unwrap(), 7));
        bad[6] = None;
        assert_eq!(grs_decode(f, &points, &mult, 5, &bad).unwrap(), msg);
        let candidates = grs_decode_brute_force(f, &points, &mult, 5, &bad, 1).unwrap();
        assert_eq!(candidates, vec![msg.clone()]);
        bad[7] = None;
        bad[0] = None;
        bad[1] = None;
        assert!(grs_decode(f, &points, &mult, 5, &bad).is_err());
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(&[1, 2, 3, 4, 5], 2).len(), 10);
        assert_eq!(combinations(&[1, 2, 3], 0), vec![Vec::<i32>::new()]);
        assert!(combinations(&[1, 2], 3).is_empty());
    }
}
