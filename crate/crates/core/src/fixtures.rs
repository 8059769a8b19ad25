//! Worked query realizations that violate the full support-rank property.

use crate::field::{Field, FieldMatrix, ThickIndex};
use crate::rng::{self, Stream};
use crate::scheme::{check_full_support_rank_with_layout, SupportRankReport};

/// A query realization with its thick row/column layout.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub query: FieldMatrix,
    pub rows: ThickIndex,
    pub cols: ThickIndex,
    pub t: usize,
    /// Expected witness, 0-based: (file, servers).
    pub witness: (usize, Vec<usize>),
}

impl Fixture {
    pub fn check(&self) -> SupportRankReport {
        check_full_support_rank_with_layout(&self.query, &self.rows, &self.cols, self.t)
    }
}

/// The 4×7 lifted-scheme query over GF(3): two files with α = 2, four
/// servers receiving 2, 2, 2 and 1 columns, t = 2.
pub fn lifted_counterexample() -> Fixture {
    let f = Field::new(3).expect("3 is prime");
    let query = FieldMatrix::from_rows(
        f,
        &[
            [1, 0, 2, 0, 0, 0, 0],
            [0, 0, 0, 0, 1, 0, 2],
            [0, 1, 0, 2, 0, 0, 2],
            [0, 0, 0, 0, 0, 0, 0],
        ],
    )
    .expect("rectangular");
    Fixture {
        name: "lifted-4x7-gf3",
        query,
        rows: ThickIndex::uniform(2, 2),
        cols: ThickIndex::from_widths(vec![2, 2, 2, 1]),
        t: 2,
        witness: (1, vec![0, 1]),
    }
}

fn full_rank_square<R: rand::Rng>(rng: &mut R, f: Field, size: usize) -> FieldMatrix {
    loop {
        let m = rng::matrix(rng, f, size, size);
        if m.rank() == size {
            return m;
        }
    }
}

/// Servers 1 and 2 of the rate-3/5 scheme for `n = 4, k = t = 2, m = 2`
/// over GF(101): a 12×10 realization (α = 6, β = 5) built from random
/// full-rank `V` and `U` and random nonzero combination coefficients.
pub fn rate_three_fifths_counterexample(seed: u64) -> Fixture {
    let f = Field::new(101).expect("101 is prime");
    let mut r = rng::stream(seed, Stream::Audit);
    let v = full_rank_square(&mut r, f, 6);
    let u_base = full_rank_square(&mut r, f, 6);
    let mut u: Vec<Vec<u64>> = u_base.to_rows();
    let comb = |a: &[u64], b: &[u64], s: u64| -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(s, y))).collect()
    };
    u.push(comb(&u[1], &u[2], 1)); // U6
    u.push(comb(&u[1], &u[2], 2)); // U7
    u.push(comb(&u[3], &u[4], 1)); // U8
    u.push(comb(&u[3], &u[4], 2)); // U9
    let vrow = |i: usize| v.row(i - 1).to_vec();

    // (V-triple, U-triple) per server; L_{j1}, L_{j2}, L_{j3} share coefficients
    let parts = [
        ([vrow(1), vrow(2), vrow(3)], [u[0].clone(), u[6].clone(), u[8].clone()]),
        ([vrow(1), vrow(4), vrow(5)], [u[0].clone(), u[7].clone(), u[9].clone()]),
    ];
    let mut query = FieldMatrix::zeros(f, 12, 10);
    for (server, (vs, us)) in parts.iter().enumerate() {
        let coeffs: Vec<[u64; 3]> = (0..3)
            .map(|_| std::array::from_fn(|_| rng::nonzero_element(&mut r, f)))
            .collect();
        let lin = |c: &[u64; 3], vecs: &[Vec<u64>; 3]| -> Vec<u64> {
            (0..6)
                .map(|e| (0..3).fold(0, |acc, i| f.add(acc, f.mul(c[i], vecs[i][e]))))
                .collect()
        };
        let base = server * 5;
        // columns: L1(V), L2(V), L1(U), L2(U), L3(V)+L3(U)
        let placements: [(usize, usize, bool); 6] = [
            (0, 0, false),
            (1, 1, false),
            (2, 0, true),
            (3, 1, true),
            (4, 2, false),
            (4, 2, true),
        ];
        for (col, which, is_u) in placements {
            let values = if is_u { lin(&coeffs[which], us) } else { lin(&coeffs[which], vs) };
            let offset = if is_u { 6 } else { 0 };
            for (e, val) in values.into_iter().enumerate() {
                query.set(offset + e, base + col, val);
            }
        }
    }
    Fixture {
        name: "rate-3/5-12x10-gf101",
        query,
        rows: ThickIndex::uniform(2, 6),
        cols: ThickIndex::uniform(2, 5),
        t: 2,
        witness: (0, vec![0, 1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifted_witness() {
        let fx = lifted_counterexample();
        let report = fx.check();
        assert!(!report.holds);
        let v = report.find(&[1], &[0, 1]).expect("printed witness");
        assert_eq!((v.rank, v.colsupp), (1, 2));
        let cols = fx.cols.psi(&[0, 1]);
        let block = fx.query.submatrix(&fx.rows.psi(&[1]), &cols);
        assert_eq!(block.colsupp().into_iter().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn rate_three_fifths_witness() {
        for seed in 0..5 {
            let fx = rate_three_fifths_counterexample(seed);
            let report = fx.check();
            let v = report.find(&[0], &[0, 1]).expect("file 1, servers 1-2");
            assert_eq!(v.colsupp, 6);
            assert!(v.rank <= 5);
        }
    }
}
