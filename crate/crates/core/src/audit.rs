//! Privacy audits, exhaustive oracles for the support-rank identities, and exact
//! rate/secrecy measurement.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::capacity::Rational;
use crate::codes::{combinations, GrsSpec, LinearCode};
use crate::field::{Field, FieldError, FieldMatrix, ThickIndex};
use crate::netsim::{self, NetError, ServerBehavior, Transcript};
use crate::rng::{self, Stream};
use crate::scheme::{
    check_full_support_rank_with_layout, support_rank_violations, SchemeError, SchemeParams,
    StarProductScheme,
};
use crate::storage::FileSet;

/// Default limit on enumerated states for exhaustive checks.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 22;
/// Significance level of the two-sample tests.
pub const P_VALUE_THRESHOLD: f64 = 0.01;
/// Views with at most this many possible values are histogrammed exactly;
/// larger ones are hashed.
const EXACT_VIEW_SPACE: u128 = 4096;
const HASH_BUCKETS: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("{states} states exceed the enumeration cap {cap}")]
    TooLarge { states: u128, cap: u128 },
    #[error("decode failed; no rate to measure")]
    DecodeFailed,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Net(#[from] NetError),
}

type Result<T> = std::result::Result<T, AuditError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub check: String,
    pub verdict: Verdict,
    pub statistic: f64,
    pub threshold: f64,
    pub samples: u64,
    pub seed: Option<u64>,
    /// Present on failure: the offending subset, file or sample.
    pub witness: Option<Value>,
    pub notes: Vec<String>,
}

impl AuditReport {
    fn new(check: &str, verdict: Verdict, statistic: f64, threshold: f64, samples: u64, seed: Option<u64>) -> Self {
        AuditReport {
            check: check.to_string(),
            verdict,
            statistic,
            threshold,
            samples,
            seed,
            witness: None,
            notes: Vec::new(),
        }
    }

    fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn pow_u128(base: u64, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Calls `visit` with every vector of `F_p^len` in lexicographic order.
fn for_each_vector(p: u64, len: usize, mut visit: impl FnMut(&[u64])) {
    let mut v = vec![0u64; len];
    loop {
        visit(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            v[i] += 1;
            if v[i] < p {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// two-sample chi-square

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Two-sample chi-square homogeneity test on histograms over the same bins.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquareResult {
    assert_eq!(a.len(), b.len(), "histograms over different bins");
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return ChiSquareResult {
            statistic: 0.0,
            dof: 0,
            p_value: 1.0,
        };
    }
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut stat = 0.0;
    let mut bins = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        bins += 1;
        let d = ka * x as f64 - kb * y as f64;
        stat += d * d / (x + y) as f64;
    }
    if bins < 2 {
        return ChiSquareResult {
            statistic: stat,
            dof: 0,
            p_value: 1.0,
        };
    }
    let dof = bins - 1;
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(stat);
    ChiSquareResult {
        statistic: stat,
        dof,
        p_value,
    }
}

// ---------------------------------------------------------------------------
// user privacy

/// Every `t` columns of the query code's generator are independent, i.e. its
/// dual has minimum distance at least `t+1`. Returns a dependent set if not.
pub fn dual_distance_certificate(query_code: &LinearCode, t: usize) -> std::result::Result<(), Vec<usize>> {
    let g = query_code.generator();
    let cols: Vec<usize> = (0..query_code.length()).collect();
    for size in 1..=t.min(cols.len()) {
        for set in combinations(&cols, size) {
            if g.select_cols(&set).rank() < size {
                return Err(set);
            }
        }
    }
    Ok(())
}

/// Bucket of a canonical view: its index in `F_p^len` when small, a hash otherwise.
fn view_bucket(view: &[u64], p: u64) -> u64 {
    if pow_u128(p, view.len()) <= EXACT_VIEW_SPACE {
        view.iter().rev().fold(0, |acc, &v| acc * p + v)
    } else {
        let mut h = Sha256::new();
        for v in view {
            h.update(v.to_le_bytes());
        }
        let d = h.finalize();
        u64::from_le_bytes(d[..8].try_into().expect("8 bytes")) % HASH_BUCKETS
    }
}

fn bucket_count(p: u64, len: usize) -> usize {
    let space = pow_u128(p, len);
    if space <= EXACT_VIEW_SPACE {
        space as usize
    } else {
        HASH_BUCKETS as usize
    }
}

/// `Q[:, ψ_β(T)]` flattened row by row in sorted server order.
fn restricted_view(q: &FieldMatrix, cols: &[usize]) -> Vec<u64> {
    q.select_cols(cols).data().to_vec()
}

fn sample_queries(scheme: &StarProductScheme, file: usize, samples: u64, seed: u64) -> Result<Vec<FieldMatrix>> {
    let mut r = rng::stream(rng::derive_seed(seed, file as u64), Stream::Audit);
    (0..samples)
        .map(|_| Ok(scheme.generate_query(file, &mut r)?.query))
        .collect()
}

fn privacy_for_set(
    scheme: &StarProductScheme,
    servers: &[usize],
    first: &[FieldMatrix],
    second: &[FieldMatrix],
) -> ChiSquareResult {
    let p = scheme.field().modulus();
    let cols = scheme.column_layout().psi(servers);
    let len = scheme.params().alpha * scheme.params().m * cols.len();
    let bins = bucket_count(p, len);
    let hist = |qs: &[FieldMatrix]| {
        let mut h = vec![0u64; bins];
        for q in qs {
            h[view_bucket(&restricted_view(q, &cols), p) as usize] += 1;
        }
        h
    };
    chi_square_two_sample(&hist(first), &hist(second))
}

fn structural_report(scheme: &StarProductScheme, seed: u64, samples: u64) -> Option<AuditReport> {
    let t = scheme.params().t;
    dual_distance_certificate(scheme.query_code(), t).err().map(|set| {
        AuditReport::new("user-privacy", Verdict::Fail, set.len() as f64, (t + 1) as f64, samples, Some(seed))
            .witness(json!({ "dependent_query_columns": one_based(&set) }))
            .note(format!(
                "structural: dual of the query code has distance {} < t+1 = {}",
                set.len(),
                t + 1
            ))
    })
}

/// User-privacy audit for one colluding set `servers` (0-based): the
/// structural dual-distance certificate plus a two-sample chi-square test of
/// the colluders' query views for files 1 and 2.
pub fn audit_user_privacy(scheme: &StarProductScheme, servers: &[usize], samples: u64, seed: u64) -> Result<AuditReport> {
    let p = scheme.params();
    let mut set = servers.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() > p.t {
        return Err(AuditError::InvalidInput(format!("{} servers exceed t = {}", set.len(), p.t)));
    }
    if let Some(&j) = set.iter().find(|&&j| j >= p.n) {
        return Err(AuditError::InvalidInput(format!("server {} out of range", j + 1)));
    }
    if let Some(report) = structural_report(scheme, seed, samples) {
        return Ok(report);
    }
    if set.is_empty() || p.m < 2 {
        return Ok(AuditReport::new("user-privacy", Verdict::Pass, 1.0, P_VALUE_THRESHOLD, samples, Some(seed))
            .note("empty colluding set or single file: nothing to distinguish"));
    }
    let first = sample_queries(scheme, 0, samples, seed)?;
    let second = sample_queries(scheme, 1, samples, seed)?;
    let res = privacy_for_set(scheme, &set, &first, &second);
    Ok(empirical_report(vec![(set, res)], samples, seed))
}

/// [`audit_user_privacy`] over every `t`-subset of servers, sharing the samples.
pub fn audit_user_privacy_all(scheme: &StarProductScheme, samples: u64, seed: u64) -> Result<AuditReport> {
    let p = scheme.params();
    if let Some(report) = structural_report(scheme, seed, samples) {
        return Ok(report);
    }
    if p.m < 2 {
        return Ok(AuditReport::new("user-privacy", Verdict::Pass, 1.0, P_VALUE_THRESHOLD, samples, Some(seed))
            .note("single file: nothing to distinguish"));
    }
    let first = sample_queries(scheme, 0, samples, seed)?;
    let second = sample_queries(scheme, 1, samples, seed)?;
    let servers: Vec<usize> = (0..p.n).collect();
    let results = combinations(&servers, p.t.min(p.n))
        .into_iter()
        .map(|set| {
            let r = privacy_for_set(scheme, &set, &first, &second);
            (set, r)
        })
        .collect();
    Ok(empirical_report(results, samples, seed))
}

fn empirical_report(results: Vec<(Vec<usize>, ChiSquareResult)>, samples: u64, seed: u64) -> AuditReport {
    let (worst_set, worst) = results
        .iter()
        .min_by(|a, b| a.1.p_value.total_cmp(&b.1.p_value))
        .cloned()
        .expect("at least one set");
    let verdict = if worst.p_value > P_VALUE_THRESHOLD {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let per_set: Vec<Value> = results
        .iter()
        .map(|(s, r)| json!({ "servers": one_based(s), "chi2": r.statistic, "dof": r.dof, "p_value": r.p_value }))
        .collect();
    let mut report = AuditReport::new("user-privacy", verdict, worst.p_value, P_VALUE_THRESHOLD, samples, Some(seed))
        .note("structural: every t query-code columns independent (dual distance >= t+1)")
        .note(format!("empirical: min p-value {:.4} over {} server sets", worst.p_value, results.len()));
    report.witness = Some(if verdict == Verdict::Fail {
        json!({ "servers": one_based(&worst_set), "p_value": worst.p_value, "sets": per_set })
    } else {
        json!({ "sets": per_set })
    });
    report
}

// ---------------------------------------------------------------------------
// server privacy

/// Answer vector (all servers, `βn` symbols) as an affine function of the
/// undesired-file symbols and the mask message.
struct AnswerMap {
    base: Vec<u64>,
    undesired: Vec<Vec<u64>>,
    mask: Vec<Vec<u64>>,
}

fn answer_map(scheme: &StarProductScheme, desired: &FileSet, file: usize, seed: u64) -> Result<AnswerMap> {
    let p = scheme.params();
    let f = scheme.field();
    let artifact = scheme.generate_query_seeded(file, seed)?;
    let g = scheme.storage_code().generator();
    let q = &artifact.query;
    // answers of a single data row `row` holding `x` in column `c`
    let unit = |row: usize, c: usize| -> Vec<u64> {
        let mut a = vec![0u64; p.beta * p.n];
        for j in 0..p.n {
            let y = g.get(c, j);
            for s in 0..p.beta {
                a[j * p.beta + s] = f.mul(y, q.get(row, j * p.beta + s));
            }
        }
        a
    };
    let mut base = vec![0u64; p.beta * p.n];
    let own = desired.data();
    for l in file * p.alpha..(file + 1) * p.alpha {
        for c in 0..p.k {
            let x = own.get(l, c);
            for (b, u) in base.iter_mut().zip(unit(l, c)) {
                *b = f.add(*b, f.mul(x, u));
            }
        }
    }
    let mut undesired = Vec::new();
    for l in 0..p.alpha * p.m {
        if l / p.alpha == file {
            continue;
        }
        for c in 0..p.k {
            undesired.push(unit(l, c));
        }
    }
    let mut mask = Vec::new();
    if p.symmetric {
        let mg = scheme.mask_code().generator();
        for s in 0..p.beta {
            for r in 0..mg.rows() {
                let mut a = vec![0u64; p.beta * p.n];
                for j in 0..p.n {
                    a[j * p.beta + s] = mg.get(r, j);
                }
                mask.push(a);
            }
        }
    }
    Ok(AnswerMap { base, undesired, mask })
}

fn combine(f: Field, base: &[u64], dirs: &[Vec<u64>], coeffs: &[u64]) -> Vec<u64> {
    let mut out = base.to_vec();
    for (d, &c) in dirs.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(d) {
            *o = f.add(*o, f.mul(c, v));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ServerPrivacyMode {
    Exhaustive,
    Sampling,
}

/// Server-privacy audit. The desired file (file 1) and the query are fixed
/// from `seed`; the answer distribution over the mask must not depend on the
/// undesired files.
///
/// Exhaustive mode enumerates every undesired-file realization and every
/// mask and compares the multisets of answer vectors. Sampling mode draws
/// `samples` pairs of undesired realizations and checks that their answer
/// difference lies in the mask space, which makes the two answer
/// distributions (uniform on cosets of that space) identical.
pub fn audit_server_privacy(
    scheme: &StarProductScheme,
    mode: ServerPrivacyMode,
    samples: u64,
    seed: u64,
    cap: u128,
) -> Result<AuditReport> {
    let p = scheme.params();
    let f = scheme.field();
    let q = f.modulus();
    let file = 0;
    let desired = FileSet::random(seed, p.m, p.alpha, p.k, f);
    let map = answer_map(scheme, &desired, file, seed)?;
    let check = "server-privacy";
    if map.undesired.is_empty() {
        return Ok(AuditReport::new(check, Verdict::Pass, 0.0, 0.0, 0, Some(seed)).note("no undesired files"));
    }
    match mode {
        ServerPrivacyMode::Exhaustive => {
            let states = pow_u128(q, map.undesired.len()).saturating_mul(pow_u128(q, map.mask.len()));
            if states > cap {
                return Err(AuditError::TooLarge { states, cap });
            }
            let multiset = |u: &[u64]| -> Vec<Vec<u64>> {
                let shifted = combine(f, &map.base, &map.undesired, u);
                let mut all = Vec::new();
                for_each_vector(q, map.mask.len(), |s| all.push(combine(f, &shifted, &map.mask, s)));
                all.sort_unstable();
                all
            };
            let reference = multiset(&vec![0; map.undesired.len()]);
            let mut realizations = 0u64;
            let mut witness = None;
            for_each_vector(q, map.undesired.len(), |u| {
                realizations += 1;
                if witness.is_none() && multiset(u) != reference {
                    witness = Some(u.to_vec());
                }
            });
            let verdict = if witness.is_none() { Verdict::Pass } else { Verdict::Fail };
            let mut report = AuditReport::new(check, verdict, if witness.is_none() { 0.0 } else { 1.0 }, 0.0, states as u64, Some(seed))
                .note(format!(
                    "exhaustive: {realizations} undesired realizations x {} masks",
                    pow_u128(q, map.mask.len())
                ));
            if let Some(u) = witness {
                report = report.witness(json!({
                    "undesired_symbols_a": vec![0; u.len()],
                    "undesired_symbols_b": u,
                    "symmetric": p.symmetric,
                }));
            }
            Ok(report)
        }
        ServerPrivacyMode::Sampling => {
            if samples == 0 {
                return Ok(AuditReport::new(check, Verdict::Inconclusive, 0.0, 0.0, 0, Some(seed)).note("no samples"));
            }
            let span = if map.mask.is_empty() {
                None
            } else {
                Some(FieldMatrix::from_rows(f, &map.mask)?)
            };
            let rank = span.as_ref().map_or(0, |s| s.rank());
            let mut r = rng::stream(seed, Stream::Audit);
            let mut bad = None;
            for i in 0..samples {
                let u1 = rng::vector(&mut r, f, map.undesired.len());
                let u2 = rng::vector(&mut r, f, map.undesired.len());
                let a = combine(f, &vec![0; map.base.len()], &map.undesired, &u1);
                let b = combine(f, &vec![0; map.base.len()], &map.undesired, &u2);
                let diff: Vec<u64> = a.iter().zip(&b).map(|(&x, &y)| f.sub(x, y)).collect();
                let inside = match &span {
                    None => diff.iter().all(|&d| d == 0),
                    Some(s) => s.vstack(&FieldMatrix::row_vector(f, &diff))?.rank() == rank,
                };
                if !inside {
                    bad = Some((i, u1, u2));
                    break;
                }
            }
            let verdict = if bad.is_none() { Verdict::Pass } else { Verdict::Fail };
            let mut report = AuditReport::new(check, verdict, if bad.is_none() { 0.0 } else { 1.0 }, 0.0, samples, Some(seed))
                .note(format!("sampling: answer differences checked against a mask space of dimension {rank}"));
            if let Some((i, u1, u2)) = bad {
                report = report.witness(json!({ "sample": i, "undesired_symbols_a": u1, "undesired_symbols_b": u2 }));
            }
            Ok(report)
        }
    }
}

// ---------------------------------------------------------------------------
// rank identity for (G ⊗ 1_β) ⊙ q

/// `(rank((G⊗1_β)⊙q), |colsupp(q)|)`.
pub fn khatri_rank_identity(g: &FieldMatrix, q: &FieldMatrix, beta: usize) -> Result<(usize, usize)> {
    let ones = FieldMatrix::ones_row(g.field(), beta);
    let lifted = g.kronecker(&ones).map_err(SchemeError::from)?;
    let kr = lifted.khatri_rao_col(q).map_err(SchemeError::from)?;
    Ok((kr.rank(), q.colsupp().len()))
}

/// Sparse random matrix: each entry nonzero with probability `density`.
fn sparse_matrix<R: Rng>(r: &mut R, f: Field, rows: usize, cols: usize, density: f64) -> FieldMatrix {
    FieldMatrix::from_fn(f, rows, cols, |_, _| {
        if r.gen_bool(density) {
            rng::nonzero_element(r, f)
        } else {
            0
        }
    })
}

fn nonempty_subsets(m: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << m))
        .map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Rejection-samples `q` whose restrictions to every nonempty file set (or
/// every single file) and every set of at most `t` servers are of full
/// support-rank. Returns the matrix and the number of rejections.
pub fn sample_full_support_rank<R: Rng>(
    r: &mut R,
    f: Field,
    rows: &ThickIndex,
    cols: &ThickIndex,
    t: usize,
    all_file_sets: bool,
    density: f64,
    max_attempts: u64,
) -> Option<(FieldMatrix, u64)> {
    let file_sets: Vec<Vec<usize>> = if all_file_sets {
        nonempty_subsets(rows.blocks())
    } else {
        (0..rows.blocks()).map(|j| vec![j]).collect()
    };
    let servers: Vec<usize> = (0..cols.blocks()).collect();
    let server_sets: Vec<Vec<usize>> = (1..=t.min(cols.blocks()))
        .flat_map(|s| combinations(&servers, s))
        .collect();
    for attempt in 0..max_attempts {
        let q = sparse_matrix(r, f, rows.total(), cols.total(), density);
        if support_rank_violations(&q, rows, cols, &file_sets, &server_sets).holds {
            return Some((q, attempt));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KhatriConfig {
    pub primes: Vec<u64>,
    pub max_k: usize,
    pub max_t: usize,
    pub max_alpha: usize,
    pub max_beta: usize,
    pub density: f64,
    pub max_attempts: u64,
}

impl Default for KhatriConfig {
    fn default() -> Self {
        KhatriConfig {
            primes: vec![3, 5, 7],
            max_k: 3,
            max_t: 3,
            max_alpha: 3,
            max_beta: 2,
            density: 0.35,
            max_attempts: 10_000,
        }
    }
}

/// Rank identity `rank((G⊗1_β)⊙q) = |colsupp(q)|` for `[k+t−1, k]` GRS `G`
/// on `trials` rejection-sampled `q` satisfying the hypothesis.
pub fn oracle_khatri_rank(trials: u64, seed: u64, cfg: &KhatriConfig) -> Result<AuditReport> {
    let check = "khatri-rank";
    if trials == 0 {
        return Ok(AuditReport::new(check, Verdict::Inconclusive, 0.0, 0.0, 0, Some(seed)).note("no trials"));
    }
    let mut holds = 0u64;
    let mut rejections = 0u64;
    let mut witness = None;
    for trial in 0..trials {
        let mut r = rng::stream(rng::derive_seed(seed, trial), Stream::Audit);
        let p = *cfg.primes.choose(&mut r).ok_or_else(|| AuditError::InvalidInput("no primes".into()))?;
        let f = Field::new(p).map_err(SchemeError::from)?;
        let (k, t) = loop {
            let k = r.gen_range(1..=cfg.max_k);
            let t = r.gen_range(1..=cfg.max_t);
            if (k + t - 1) as u64 <= p {
                break (k, t);
            }
        };
        let alpha = r.gen_range(1..=cfg.max_alpha);
        let beta = r.gen_range(1..=cfg.max_beta);
        let len = k + t - 1;
        let g = GrsSpec::standard(len, k).build(f).map_err(SchemeError::from)?;
        let rows = ThickIndex::uniform(1, alpha);
        let cols = ThickIndex::uniform(len, beta);
        let Some((q, rej)) = sample_full_support_rank(&mut r, f, &rows, &cols, t, false, cfg.density, cfg.max_attempts)
        else {
            return Ok(AuditReport::new(check, Verdict::Inconclusive, holds as f64, trials as f64, trial, Some(seed))
                .note(format!("trial {trial}: no valid q within {} attempts", cfg.max_attempts)));
        };
        rejections += rej;
        let (rank, support) = khatri_rank_identity(g.generator(), &q, beta)?;
        if rank == support {
            holds += 1;
        } else if witness.is_none() {
            witness = Some(json!({
                "trial": trial, "p": p, "k": k, "t": t, "alpha": alpha, "beta": beta,
                "q": q.to_rows(), "rank": rank, "colsupp": support,
            }));
        }
    }
    let verdict = if holds == trials { Verdict::Pass } else { Verdict::Fail };
    let mut report = AuditReport::new(check, verdict, holds as f64, trials as f64, trials, Some(seed))
        .note(format!("{holds}/{trials} valid instances satisfy the identity; {rejections} candidates rejected"));
    report.witness = witness;
    Ok(report)
}

// ---------------------------------------------------------------------------
// answer entropy

/// One instance for [`oracle_answer_entropy`].
#[derive(Debug, Clone)]
pub struct EntropyInstance {
    /// `[n, k]` MDS generator.
    pub generator: FieldMatrix,
    pub query: FieldMatrix,
    pub rows: ThickIndex,
    pub cols: ThickIndex,
    pub files: Vec<usize>,
    pub servers: Vec<usize>,
}

/// Enumerates every realization of the data rows in `files` and checks that
/// the restricted answer sum is uniform on exactly `p^|colsupp|` values.
pub fn oracle_answer_entropy(inst: &EntropyInstance, cap: u128) -> Result<AuditReport> {
    let g = &inst.generator;
    let f = g.field();
    let p = f.modulus();
    let k = g.rows();
    let data_rows = inst.rows.psi(&inst.files);
    let cols = inst.cols.psi(&inst.servers);
    let states = pow_u128(p, data_rows.len() * k);
    if states > cap {
        return Err(AuditError::TooLarge { states, cap });
    }
    let sub = inst.query.submatrix(&data_rows, &cols);
    let support = sub.colsupp().len();
    let owners: Vec<usize> = cols.iter().map(|&c| inst.cols.owner(c)).collect();
    let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
    for_each_vector(p, data_rows.len() * k, |x| {
        // x holds the rows of X in `files`, row-major
        let mut a = vec![0u64; cols.len()];
        for (ri, _) in data_rows.iter().enumerate() {
            let xr = &x[ri * k..(ri + 1) * k];
            for (ci, &server) in owners.iter().enumerate() {
                let qv = sub.get(ri, ci);
                if qv == 0 {
                    continue;
                }
                let y = (0..k).fold(0, |acc, c| f.add(acc, f.mul(xr[c], g.get(c, server))));
                a[ci] = f.add(a[ci], f.mul(y, qv));
            }
        }
        *counts.entry(a).or_default() += 1;
    });
    let expected = pow_u128(p, support);
    let distinct = counts.len() as u128;
    let uniform = {
        let mut it = counts.values();
        let first = *it.next().expect("at least one state");
        it.all(|&c| c == first)
    };
    let verdict = if distinct == expected && uniform { Verdict::Pass } else { Verdict::Fail };
    let mut report = AuditReport::new("answer-entropy", verdict, distinct as f64, expected as f64, states as u64, None)
        .note(format!("{distinct} distinct answers, p^colsupp = {expected}, uniform = {uniform}"));
    if verdict == Verdict::Fail {
        report = report.witness(json!({
            "files": one_based(&inst.files),
            "servers": one_based(&inst.servers),
            "q": inst.query.to_rows(),
            "distinct": distinct as u64,
            "colsupp": support,
        }));
    }
    Ok(report)
}

/// Random instances whose query satisfies the hypothesis for every nonempty
/// file set; every instance within `cap` must pass.
pub fn oracle_answer_entropy_sweep(trials: u64, seed: u64, cap: u128) -> Result<AuditReport> {
    let check = "answer-entropy";
    let mut checked = 0u64;
    let mut skipped = 0u64;
    let mut witness = None;
    for trial in 0..trials {
        let mut r = rng::stream(rng::derive_seed(seed, trial), Stream::Audit);
        let p = *[2u64, 3, 5].choose(&mut r).expect("nonempty");
        let f = Field::new(p).map_err(SchemeError::from)?;
        let k = r.gen_range(1..=2usize);
        let t = r.gen_range(1..=2usize);
        let len = k + t - 1;
        // [n,k] MDS: GRS needs n <= p; over GF(2) use the parity-check code
        let (n, code) = if p == 2 {
            if len > k + 1 {
                skipped += 1;
                continue;
            }
            let n = k + 1;
            let g = FieldMatrix::from_fn(f, k, n, |i, j| u64::from(j == i || j == k));
            (n, g)
        } else {
            let n = r.gen_range(len..=(len + 1).min(p as usize));
            (n, GrsSpec::standard(n, k).build(f).map_err(SchemeError::from)?.generator().clone())
        };
        if n < len {
            skipped += 1;
            continue;
        }
        let m = r.gen_range(1..=2usize);
        let alpha = r.gen_range(1..=2usize);
        let beta = r.gen_range(1..=2usize);
        let rows = ThickIndex::uniform(m, alpha);
        let cols = ThickIndex::uniform(n, beta);
        let Some((q, _)) = sample_full_support_rank(&mut r, f, &rows, &cols, t, true, 0.4, 10_000) else {
            skipped += 1;
            continue;
        };
        let all: Vec<usize> = (0..n).collect();
        let servers = combinations(&all, len).choose(&mut r).expect("n >= k+t-1").clone();
        let fsets = nonempty_subsets(m);
        let files = fsets.choose(&mut r).expect("m >= 1").clone();
        let inst = EntropyInstance {
            generator: code,
            query: q,
            rows,
            cols,
            files,
            servers,
        };
        match oracle_answer_entropy(&inst, cap) {
            Ok(rep) => {
                checked += 1;
                if !rep.passed() && witness.is_none() {
                    witness = rep.witness;
                }
            }
            Err(AuditError::TooLarge { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let verdict = if witness.is_some() {
        Verdict::Fail
    } else if checked == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let mut report = AuditReport::new(check, verdict, checked as f64, checked as f64, trials, Some(seed))
        .note(format!("{checked} instances enumerated, {skipped} skipped (over cap or no valid query)"));
    report.witness = witness;
    Ok(report)
}

// ---------------------------------------------------------------------------
// expected support size

/// Compares the mean of `|colsupp(Q[ψ_α(F), :])|` for files 1 and 2 over
/// `samples` draws each from `sampler(file, rng)`; passes if the means are
/// within 3 pooled standard errors.
pub fn oracle_support_expectation<S>(
    mut sampler: S,
    rows: &ThickIndex,
    files: &[usize],
    samples: u64,
    seed: u64,
) -> Result<AuditReport>
where
    S: FnMut(usize, &mut rand_chacha::ChaCha20Rng) -> Result<FieldMatrix>,
{
    let check = "support-expectation";
    if samples == 0 {
        return Ok(AuditReport::new(check, Verdict::Inconclusive, 0.0, 3.0, 0, Some(seed)).note("no samples"));
    }
    if rows.blocks() < 2 {
        return Err(AuditError::InvalidInput("need at least two files".into()));
    }
    let rsel = rows.psi(files);
    let mut stats = Vec::new();
    for file in 0..2 {
        let mut r = rng::stream(rng::derive_seed(seed, file as u64), Stream::Audit);
        let (mut sum, mut sq) = (0f64, 0f64);
        for _ in 0..samples {
            let q = sampler(file, &mut r)?;
            let s = q.select_rows(&rsel).colsupp().len() as f64;
            sum += s;
            sq += s * s;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 { (sq - n * mean * mean).max(0.0) / (n - 1.0) } else { 0.0 };
        stats.push((mean, var));
    }
    let n = samples as f64;
    let se = (stats[0].1 / n + stats[1].1 / n).sqrt();
    let diff = (stats[0].0 - stats[1].0).abs();
    let z = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let verdict = if z < 3.0 { Verdict::Pass } else { Verdict::Fail };
    let mut report = AuditReport::new(check, verdict, if z.is_finite() { z } else { f64::MAX }, 3.0, samples, Some(seed))
        .note(format!("means {:.4} vs {:.4}, pooled SE {:.4}", stats[0].0, stats[1].0, se));
    if verdict == Verdict::Fail {
        report = report.witness(json!({ "files": one_based(files), "means": [stats[0].0, stats[1].0] }));
    }
    Ok(report)
}

/// [`oracle_support_expectation`] on queries generated by `scheme`.
pub fn oracle_support_expectation_scheme(
    scheme: &StarProductScheme,
    files: &[usize],
    samples: u64,
    seed: u64,
) -> Result<AuditReport> {
    oracle_support_expectation(
        |file, r| Ok(scheme.generate_query(file, r)?.query),
        &scheme.row_layout(),
        files,
        samples,
        seed,
    )
}

// ---------------------------------------------------------------------------
// correctness sweep

/// Runs `samples` retrievals, each with a random file, `b` random Byzantine
/// and `r` nonresponsive servers; passes iff every decode is exact.
pub fn audit_correctness(params: &SchemeParams, samples: u64, seed: u64) -> Result<AuditReport> {
    let scheme = StarProductScheme::new(params.clone())?;
    let mut r = rng::stream(seed, Stream::Audit);
    let mut failures = 0u64;
    let mut witness = None;
    let servers: Vec<usize> = (0..params.n).collect();
    for i in 0..samples {
        let trial_seed = rng::derive_seed(seed, i);
        let file = r.gen_range(0..params.m);
        let mut behaviors = netsim::all_honest(params.n);
        let chosen: Vec<usize> = servers.choose_multiple(&mut r, params.b + params.r).copied().collect();
        for (idx, &j) in chosen.iter().enumerate() {
            behaviors[j] = if idx < params.b {
                ServerBehavior::byzantine_random(rng::derive_seed(trial_seed, j as u64))
            } else {
                ServerBehavior::Nonresponsive
            };
        }
        let files = FileSet::random(trial_seed, params.m, params.alpha, params.k, scheme.field());
        let t = netsim::simulate(&scheme, &files, &behaviors, file, trial_seed)?;
        if !t.correct {
            failures += 1;
            if witness.is_none() {
                witness = Some(json!({ "trial": i, "seed": trial_seed, "file": file + 1, "outcome": t.outcome }));
            }
        }
    }
    let verdict = if samples == 0 {
        Verdict::Inconclusive
    } else if failures == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut report = AuditReport::new("correctness", verdict, failures as f64, 0.0, samples, Some(seed))
        .note(format!("{failures} of {samples} retrievals did not return the stored file"));
    report.witness = witness;
    Ok(report)
}

// ---------------------------------------------------------------------------
// rate and secrecy

/// `αk / download_symbols` of a successful retrieval.
pub fn measure_rate(t: &Transcript) -> Result<Rational> {
    if t.decoded().is_none() || !t.correct {
        return Err(AuditError::DecodeFailed);
    }
    let l = (t.params.alpha * t.params.k) as i64;
    Ok(Rational::new(l.into(), (t.download_symbols as i64).into()))
}

/// Shared randomness per file symbol: `β·dim(mask code) / (αk)`, zero if the
/// scheme is not symmetric.
pub fn measure_secrecy(scheme: &StarProductScheme) -> Rational {
    let p = scheme.params();
    let l = (p.alpha * p.k) as i64;
    if !p.symmetric {
        return Rational::new(0.into(), 1.into());
    }
    let symbols = (p.beta * scheme.mask_code().dimension()) as i64;
    Rational::new(symbols.into(), l.into())
}

/// Per-bucket histogram helper exposed for tests of the view canonicalization.
pub fn view_histogram(views: &[Vec<u64>], p: u64) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for v in views {
        *h.entry(view_bucket(v, p)).or_default() += 1;
    }
    h
}

/// Whether `q` satisfies the support-rank hypothesis for single files.
pub fn is_full_support_rank(q: &FieldMatrix, rows: &ThickIndex, cols: &ThickIndex, t: usize) -> bool {
    check_full_support_rank_with_layout(q, rows, cols, t).holds
}
