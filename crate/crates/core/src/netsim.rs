//! In-process simulation of one retrieval against `n` servers, some of which
//! collude, lie or stay silent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Field;
use crate::rng::{self, Stream, GENERATOR};
use crate::scheme::{DecodeOutcome, MaskState, SchemeError, SchemeParams, StarProductScheme};
use crate::storage::{encode, FileSet, StorageError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("adversary budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("colluding group of {size} servers exceeds t = {t}")]
    GroupTooLarge { size: usize, t: usize },
    #[error("expected {expected} server behaviors, got {got}")]
    BehaviorCount { expected: usize, got: usize },
    #[error("server {server} out of range for n = {n}")]
    ServerOutOfRange { server: usize, n: usize },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// How a Byzantine server corrupts its `β` answer symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ByzantineAttack {
    /// Uniform symbols from the byzantine stream of `seed`.
    Random { seed: u64 },
    /// Send exactly these symbols.
    Replace { values: Vec<u64> },
    /// Add these symbols to the honest answer.
    Offset { values: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "role")]
pub enum ServerBehavior {
    Honest,
    /// Honest, but shares its view with the rest of `group`.
    Colluding { group: u32 },
    Byzantine { attack: ByzantineAttack },
    Nonresponsive,
}

impl ServerBehavior {
    pub fn byzantine_random(seed: u64) -> Self {
        ServerBehavior::Byzantine {
            attack: ByzantineAttack::Random { seed },
        }
    }

    pub fn byzantine_offset(values: Vec<u64>) -> Self {
        ServerBehavior::Byzantine {
            attack: ByzantineAttack::Offset { values },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryEvent {
    pub server: usize,
    pub honest: Vec<u64>,
    /// What was delivered instead; `None` for a silent server.
    pub sent: Option<Vec<u64>>,
}

/// Complete record of one retrieval. Field elements are decimal integers,
/// server and file indices 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub params: SchemeParams,
    pub file: usize,
    pub seed: u64,
    pub generator: String,
    pub behaviors: Vec<ServerBehavior>,
    /// `queries[j]` is the `αm × β` block sent to server `j`, row by row.
    pub queries: Vec<Vec<Vec<u64>>>,
    /// Column `j` of the coded storage `Y`.
    pub shards: Vec<Vec<u64>>,
    pub answers: Vec<Option<Vec<u64>>>,
    pub adversary_log: Vec<AdversaryEvent>,
    pub mask: Option<MaskState>,
    pub outcome: DecodeOutcome,
    /// Whether the decoded file equals the stored one.
    pub correct: bool,
    pub download_symbols: usize,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    pub fn decoded(&self) -> Option<&Vec<Vec<u64>>> {
        match &self.outcome {
            DecodeOutcome::Decoded { file } => Some(file),
            DecodeOutcome::Failed { .. } => None,
        }
    }
}

/// Exactly what a colluding group observes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColluderView {
    pub servers: Vec<usize>,
    pub queries: Vec<Vec<Vec<u64>>>,
    pub answers: Vec<Option<Vec<u64>>>,
    pub shards: Vec<Vec<u64>>,
    pub mask_shares: Vec<Vec<u64>>,
}

/// Checks the behavior list against the `t`, `b` and `r` budgets.
pub fn check_budget(params: &SchemeParams, behaviors: &[ServerBehavior]) -> Result<(), NetError> {
    if behaviors.len() != params.n {
        return Err(NetError::BehaviorCount {
            expected: params.n,
            got: behaviors.len(),
        });
    }
    let byz = behaviors
        .iter()
        .filter(|b| matches!(b, ServerBehavior::Byzantine { .. }))
        .count();
    let silent = behaviors
        .iter()
        .filter(|b| matches!(b, ServerBehavior::Nonresponsive))
        .count();
    if byz > params.b {
        return Err(NetError::BudgetExceeded(format!("{byz} Byzantine servers, b = {}", params.b)));
    }
    if silent > params.r {
        return Err(NetError::BudgetExceeded(format!(
            "{silent} nonresponsive servers, r = {}",
            params.r
        )));
    }
    let mut groups = std::collections::BTreeMap::<u32, usize>::new();
    for b in behaviors {
        if let ServerBehavior::Colluding { group } = b {
            *groups.entry(*group).or_default() += 1;
        }
    }
    if let Some((g, size)) = groups.into_iter().find(|&(_, s)| s > params.t) {
        return Err(NetError::BudgetExceeded(format!(
            "colluding group {g} has {size} servers, t = {}",
            params.t
        )));
    }
    Ok(())
}

pub fn all_honest(n: usize) -> Vec<ServerBehavior> {
    vec![ServerBehavior::Honest; n]
}

/// Runs one retrieval with files drawn from `seed`, enforcing budgets.
pub fn run_retrieval(
    params: &SchemeParams,
    behaviors: &[ServerBehavior],
    file: usize,
    seed: u64,
) -> Result<Transcript, NetError> {
    check_budget(params, behaviors)?;
    run_retrieval_unchecked(params, behaviors, file, seed)
}

/// Like [`run_retrieval`] but without budget checks, so over-budget
/// adversaries show up as decode failures in the transcript.
pub fn run_retrieval_unchecked(
    params: &SchemeParams,
    behaviors: &[ServerBehavior],
    file: usize,
    seed: u64,
) -> Result<Transcript, NetError> {
    let scheme = StarProductScheme::new(params.clone())?;
    let files = FileSet::random(seed, params.m, params.alpha, params.k, scheme.field());
    simulate_unchecked(&scheme, &files, behaviors, file, seed)
}

/// Retrieval against given files with a prebuilt scheme, enforcing budgets.
pub fn simulate(
    scheme: &StarProductScheme,
    files: &FileSet,
    behaviors: &[ServerBehavior],
    file: usize,
    seed: u64,
) -> Result<Transcript, NetError> {
    check_budget(scheme.params(), behaviors)?;
    simulate_unchecked(scheme, files, behaviors, file, seed)
}

pub fn simulate_unchecked(
    scheme: &StarProductScheme,
    files: &FileSet,
    behaviors: &[ServerBehavior],
    file: usize,
    seed: u64,
) -> Result<Transcript, NetError> {
    let p = scheme.params();
    if behaviors.len() != p.n {
        return Err(NetError::BehaviorCount {
            expected: p.n,
            got: behaviors.len(),
        });
    }
    let f: Field = scheme.field();
    let storage = encode(files, scheme.storage_code())?;
    let artifact = scheme.generate_query_seeded(file, seed)?;
    let mask = p.symmetric.then(|| scheme.apply_symmetric_mask(seed));

    let mut shards = Vec::with_capacity(p.n);
    let mut queries = Vec::with_capacity(p.n);
    let mut answers = Vec::with_capacity(p.n);
    let mut adversary_log = Vec::new();
    for (j, behavior) in behaviors.iter().enumerate() {
        let shard = storage.shard(j)?;
        let honest = scheme.respond(&shard, &artifact, j, mask.as_ref())?;
        queries.push(artifact.server_block(j, p.beta).to_rows());
        shards.push(shard);
        let sent = match behavior {
            ServerBehavior::Honest | ServerBehavior::Colluding { .. } => Some(honest.clone()),
            ServerBehavior::Nonresponsive => None,
            ServerBehavior::Byzantine { attack } => Some(match attack {
                ByzantineAttack::Random { seed } => {
                    let mut r = rng::stream(rng::derive_seed(*seed, j as u64), Stream::Byzantine);
                    rng::vector(&mut r, f, p.beta)
                }
                ByzantineAttack::Replace { values } => {
                    (0..p.beta).map(|s| f.reduce(values.get(s).copied().unwrap_or(0))).collect()
                }
                ByzantineAttack::Offset { values } => honest
                    .iter()
                    .enumerate()
                    .map(|(s, &h)| f.add(h, f.reduce(values.get(s).copied().unwrap_or(0))))
                    .collect(),
            }),
        };
        if !matches!(behavior, ServerBehavior::Honest | ServerBehavior::Colluding { .. }) {
            adversary_log.push(AdversaryEvent {
                server: j,
                honest,
                sent: sent.clone(),
            });
        }
        answers.push(sent);
    }

    let responders = answers.iter().filter(|a| a.is_some()).count();
    let download_symbols = p.beta * if p.count_nonresponsive_download { p.n } else { responders };
    let stored = files.file(file);
    let (outcome, correct) = match scheme.decode(&artifact, &answers) {
        Ok(x) => {
            let correct = x == stored;
            (DecodeOutcome::Decoded { file: x.to_rows() }, correct)
        }
        Err(e) => (DecodeOutcome::Failed { reason: e.to_string() }, false),
    };
    Ok(Transcript {
        params: p.clone(),
        file,
        seed,
        generator: GENERATOR.to_string(),
        behaviors: behaviors.to_vec(),
        queries,
        shards,
        answers,
        adversary_log,
        mask,
        outcome,
        correct,
        download_symbols,
    })
}

/// The view of a colluding group (sorted, deduplicated server order).
pub fn colluder_view(transcript: &Transcript, group: &[usize]) -> Result<ColluderView, NetError> {
    let p = &transcript.params;
    let mut servers = group.to_vec();
    servers.sort_unstable();
    servers.dedup();
    if servers.len() > p.t {
        return Err(NetError::GroupTooLarge {
            size: servers.len(),
            t: p.t,
        });
    }
    if let Some(&j) = servers.iter().find(|&&j| j >= p.n) {
        return Err(NetError::ServerOutOfRange { server: j, n: p.n });
    }
    Ok(ColluderView {
        queries: servers.iter().map(|&j| transcript.queries[j].clone()).collect(),
        answers: servers.iter().map(|&j| transcript.answers[j].clone()).collect(),
        shards: servers.iter().map(|&j| transcript.shards[j].clone()).collect(),
        mask_shares: servers
            .iter()
            .map(|&j| transcript.mask.as_ref().map(|m| m.share(j)).unwrap_or_default())
            .collect(),
        servers,
    })
}
