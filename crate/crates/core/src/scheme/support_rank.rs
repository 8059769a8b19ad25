//! Executable check of the full support-rank property: for every set `T` of
//! at most `t` servers and every file `j`, the restriction
//! `q[ψ_α(j), ψ_β(T)]` has rank equal to its number of nonzero columns.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::codes::combinations;
use crate::field::{FieldMatrix, ThickIndex};

/// A restriction whose supported columns are linearly dependent. Indices
/// are 0-based; `Display` and JSON output are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportRankViolation {
    pub files: Vec<usize>,
    pub servers: Vec<usize>,
    pub rank: usize,
    pub colsupp: usize,
}

impl fmt::Display for SupportRankViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "files {{{}}}, servers {{{}}}: rank {} < colsupp {}",
            one(&self.files),
            one(&self.servers),
            self.rank,
            self.colsupp
        )
    }
}

impl Serialize for SupportRankViolation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let one = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
        let mut st = s.serialize_struct("SupportRankViolation", 4)?;
        st.serialize_field("files", &one(&self.files))?;
        st.serialize_field("servers", &one(&self.servers))?;
        st.serialize_field("rank", &self.rank)?;
        st.serialize_field("colsupp", &self.colsupp)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportRankReport {
    pub holds: bool,
    pub checked: usize,
    /// Every violation, files outer and server sets inner (by size, then lexicographic).
    pub violations: Vec<SupportRankViolation>,
}

impl SupportRankReport {
    pub fn first_violation(&self) -> Option<&SupportRankViolation> {
        self.violations.first()
    }

    pub fn find(&self, files: &[usize], servers: &[usize]) -> Option<&SupportRankViolation> {
        self.violations
            .iter()
            .find(|v| v.files == files && v.servers == servers)
    }
}

/// Checks `rank = |colsupp|` on `q[ψ(F), ψ(T)]` for every given file set `F`
/// and server set `T`.
pub fn support_rank_violations(
    q: &FieldMatrix,
    rows: &ThickIndex,
    cols: &ThickIndex,
    file_sets: &[Vec<usize>],
    server_sets: &[Vec<usize>],
) -> SupportRankReport {
    let mut violations = Vec::new();
    let mut checked = 0;
    for fs in file_sets {
        let r = rows.psi(fs);
        for ts in server_sets {
            let c = cols.psi(ts);
            let sub = q.submatrix(&r, &c);
            let support = sub.colsupp().len();
            checked += 1;
            if support == 0 {
                continue;
            }
            let rank = sub.rank();
            if rank != support {
                violations.push(SupportRankViolation {
                    files: fs.clone(),
                    servers: ts.clone(),
                    rank,
                    colsupp: support,
                });
            }
        }
    }
    SupportRankReport {
        holds: violations.is_empty(),
        checked,
        violations,
    }
}

/// All nonempty server sets of size at most `t`, by size then lexicographic.
pub(crate) fn server_sets_up_to(n: usize, t: usize) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..n).collect();
    (1..=t.min(n)).flat_map(|s| combinations(&all, s)).collect()
}

pub fn check_full_support_rank_with_layout(
    q: &FieldMatrix,
    rows: &ThickIndex,
    cols: &ThickIndex,
    t: usize,
) -> SupportRankReport {
    let files: Vec<Vec<usize>> = (0..rows.blocks()).map(|j| vec![j]).collect();
    support_rank_violations(q, rows, cols, &files, &server_sets_up_to(cols.blocks(), t))
}

/// Full support-rank check for an `αm × βn` query with uniform blocks.
pub fn check_full_support_rank(q: &FieldMatrix, alpha: usize, beta: usize, t: usize) -> SupportRankReport {
    let rows = ThickIndex::uniform(q.rows() / alpha, alpha);
    let cols = ThickIndex::uniform(q.cols() / beta, beta);
    check_full_support_rank_with_layout(q, &rows, &cols, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn distinct_unit_columns_pass() {
        let f = Field::new(5).unwrap();
        // each file block: supported columns are distinct unit vectors
        let q = FieldMatrix::from_rows(
            f,
            &[
                [1, 0, 0, 0, 0, 0],
                [0, 0, 1, 0, 0, 0],
                [0, 1, 0, 0, 0, 0],
                [0, 0, 0, 0, 0, 1],
            ],
        )
        .unwrap();
        let report = check_full_support_rank(&q, 2, 2, 3);
        assert!(report.holds);
        assert_eq!(report.checked, 2 * 7);
    }

    #[test]
    fn dependent_columns_fail() {
        let f = Field::new(3).unwrap();
        let q = FieldMatrix::from_rows(f, &[[1, 2, 0]]).unwrap();
        let report = check_full_support_rank(&q, 1, 1, 2);
        assert!(!report.holds);
        let v = report.first_violation().unwrap();
        assert_eq!((v.files.clone(), v.servers.clone(), v.rank, v.colsupp), (vec![0], vec![0, 1], 1, 2));
        assert_eq!(v.to_string(), "files {1}, servers {1,2}: rank 1 < colsupp 2");
        assert_eq!(
            serde_json::to_string(v).unwrap(),
            r#"{"files":[1],"servers":[1,2],"rank":1,"colsupp":2}"#
        );
        // t = 1 only looks at single servers
        assert!(check_full_support_rank(&q, 1, 1, 1).holds);
    }
}
