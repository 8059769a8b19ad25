use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{SchemeError, StarProductScheme, Variant};
use crate::field::FieldMatrix;
use crate::rng::{self, Stream};

/// One coded symbol of the desired file targeted in some iteration:
/// stripe `stripe` (0-based within the file) as stored on server `server`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RetrievalCell {
    pub stripe: usize,
    pub server: usize,
}

/// A realized query `Q = D + E` and its decomposition.
///
/// Column `j·β + s` of every matrix is what server `j` receives in iteration `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryArtifact {
    pub file: usize,
    pub query: FieldMatrix,
    pub random_part: FieldMatrix,
    pub retrieval_part: FieldMatrix,
    /// Cells retrieved in each iteration (multi-iteration variant only).
    pub windows: Vec<Vec<RetrievalCell>>,
}

impl QueryArtifact {
    /// `Q[:, ψ_β(server)]`.
    pub fn server_block(&self, server: usize, beta: usize) -> FieldMatrix {
        let cols: Vec<usize> = (server * beta..(server + 1) * beta).collect();
        self.query.select_cols(&cols)
    }
}

impl StarProductScheme {
    /// Retrieval schedule of the multi-iteration variant.
    ///
    /// Cell `c = 0, 1, …, αk−1` is `(stripe c / k, server c mod n)`; iteration
    /// `s` takes cells `s·d .. (s+1)·d` with `d = n−k−t+1`. Any `d ≤ n`
    /// consecutive cells sit on distinct servers, and stripe `a` gets the `k`
    /// distinct servers `a·k, …, a·k+k−1 (mod n)`.
    pub fn retrieval_windows(&self) -> Vec<Vec<RetrievalCell>> {
        let p = &self.params;
        if p.variant != Variant::MultiIter {
            return Vec::new();
        }
        let d = p.retrieved_per_iteration();
        (0..p.beta)
            .map(|s| {
                (s * d..(s + 1) * d)
                    .map(|c| RetrievalCell {
                        stripe: c / p.k,
                        server: c % p.n,
                    })
                    .collect()
            })
            .collect()
    }

    pub fn generate_query<R: Rng + ?Sized>(
        &self,
        file: usize,
        rng: &mut R,
    ) -> Result<QueryArtifact, SchemeError> {
        let p = &self.params;
        if file >= p.m {
            return Err(SchemeError::FileOutOfRange { index: file, m: p.m });
        }
        let f = self.field;
        let (rows, beta) = (p.alpha * p.m, p.beta);
        let dq = self.query_code.generator();
        let mut random_part = FieldMatrix::zeros(f, rows, beta * p.n);
        for s in 0..beta {
            for l in 0..rows {
                let msg = rng::vector(rng, f, dq.rows());
                let word = dq.vec_mul(&msg)?;
                for (j, &w) in word.iter().enumerate() {
                    random_part.set(l, j * beta + s, w);
                }
            }
        }
        let mut retrieval_part = FieldMatrix::zeros(f, rows, beta * p.n);
        let windows = self.retrieval_windows();
        match p.variant {
            Variant::MultiIter => {
                for (s, window) in windows.iter().enumerate() {
                    for cell in window {
                        retrieval_part.set(file * p.alpha + cell.stripe, cell.server * beta + s, 1);
                    }
                }
            }
            Variant::OneShot => {
                let e = self.retrieval_code.generator().row(0);
                for (j, &v) in e.iter().enumerate() {
                    retrieval_part.set(file, j, v);
                }
            }
        }
        let query = random_part.add(&retrieval_part)?;
        Ok(QueryArtifact {
            file,
            query,
            random_part,
            retrieval_part,
            windows,
        })
    }

    /// Query drawn from the `Query` stream of `seed`.
    pub fn generate_query_seeded(&self, file: usize, seed: u64) -> Result<QueryArtifact, SchemeError> {
        self.generate_query(file, &mut rng::stream(seed, Stream::Query))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::SchemeParams;
    use std::collections::{BTreeSet, HashMap};

    #[test]
    fn shapes_at_5_2_2() {
        let s = StarProductScheme::new(SchemeParams::multi_iter(5, 2, 2, 2, 5).unwrap().lifted(2).unwrap()).unwrap();
        let q = s.generate_query_seeded(0, 1).unwrap();
        assert_eq!(q.query.shape(), (4, 10));
        assert_eq!(q.query, q.random_part.add(&q.retrieval_part).unwrap());
        assert_eq!(q.windows.len(), 2);
        assert_eq!(s.generate_query_seeded(0, 1).unwrap(), q);
        assert!(matches!(
            s.generate_query_seeded(2, 1),
            Err(SchemeError::FileOutOfRange { .. })
        ));
    }

    #[test]
    fn random_part_rows_are_query_codewords() {
        let s = StarProductScheme::new(SchemeParams::multi_iter(7, 2, 3, 3, 7).unwrap()).unwrap();
        let p = s.params().clone();
        let q = s.generate_query_seeded(1, 9).unwrap();
        for it in 0..p.beta {
            let cols: Vec<usize> = (0..p.n).map(|j| j * p.beta + it).collect();
            let d = q.random_part.select_cols(&cols);
            for l in 0..d.rows() {
                assert!(s.query_code().contains(d.row(l)));
            }
        }
        // E lives only in the desired file's rows
        for l in 0..q.retrieval_part.rows() {
            let in_file = (p.alpha..2 * p.alpha).contains(&l);
            assert!(in_file || q.retrieval_part.row(l).iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn windows_cover_every_stripe_k_times() {
        for (n, k, t) in [(5, 2, 2), (7, 2, 2), (6, 3, 1), (9, 4, 2), (5, 1, 1)] {
            let p = SchemeParams::multi_iter(n, k, t, 2, 11).unwrap();
            let s = StarProductScheme::new(p.clone()).unwrap();
            let windows = s.retrieval_windows();
            let mut per_stripe: HashMap<usize, BTreeSet<usize>> = HashMap::new();
            let mut seen = BTreeSet::new();
            for w in &windows {
                let servers: BTreeSet<usize> = w.iter().map(|c| c.server).collect();
                assert_eq!(servers.len(), w.len(), "servers repeat in a window");
                for c in w {
                    assert!(seen.insert(*c), "cell reused");
                    per_stripe.entry(c.stripe).or_default().insert(c.server);
                }
            }
            assert_eq!(per_stripe.len(), p.alpha);
            assert!(per_stripe.values().all(|v| v.len() == k));
        }
    }

    #[test]
    fn single_server_query_marginal_is_uniform() {
        // t = 1, p = 3: D_Q is the repetition code, so each query entry is a
        // uniform symbol; enumerate the 3 codewords as the oracle.
        let s = StarProductScheme::new(SchemeParams::multi_iter(3, 1, 1, 2, 3).unwrap()).unwrap();
        let oracle: Vec<Vec<u64>> = (0..3).map(|c| vec![c; 3]).collect();
        for w in &oracle {
            assert!(s.query_code().contains(w));
        }
        let mut counts = [[0usize; 3]; 2];
        let trials = 6000;
        let mut rng = rng::stream(5, Stream::Audit);
        for file in 0..2 {
            for _ in 0..trials {
                let q = s.generate_query(file, &mut rng).unwrap();
                counts[file][q.query.get(0, 0) as usize] += 1;
            }
        }
        let sigma = (trials as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for file in 0..2 {
            for v in 0..3 {
                let dev = (counts[file][v] as f64 - trials as f64 / 3.0).abs();
                assert!(dev < 4.0 * sigma, "file {file} value {v}: {:?}", counts[file]);
            }
        }
    }
}
