use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::SchemeError;
use crate::field::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Multi-iteration TPIR, `b = r = 0`.
    MultiIter,
    /// One-shot TB(S)PIR, `n = 2k+t+2b+r−1`, `α = β = 1`.
    OneShot,
}

/// Scheme parameters. `alpha` and `beta` are derived by the constructors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub variant: Variant,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub b: usize,
    pub r: usize,
    pub m: usize,
    pub alpha: usize,
    pub beta: usize,
    pub p: u64,
    pub symmetric: bool,
    pub count_nonresponsive_download: bool,
}

impl SchemeParams {
    pub fn new(
        variant: Variant,
        n: usize,
        k: usize,
        t: usize,
        b: usize,
        r: usize,
        m: usize,
        p: u64,
    ) -> Result<Self, SchemeError> {
        let (alpha, beta) = match variant {
            Variant::MultiIter => {
                let kt1 = (k + t).saturating_sub(1);
                if n <= kt1 {
                    return Err(SchemeError::InfeasibleParams(format!(
                        "multi-iteration scheme needs n > k+t-1 (n = {n}, k+t-1 = {kt1})"
                    )));
                }
                let d = n - kt1;
                let g = k.gcd(&d).max(1);
                (d / g, k / g)
            }
            Variant::OneShot => (1, 1),
        };
        let params = SchemeParams {
            variant,
            n,
            k,
            t,
            b,
            r,
            m,
            alpha,
            beta,
            p,
            symmetric: false,
            count_nonresponsive_download: true,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn multi_iter(n: usize, k: usize, t: usize, m: usize, p: u64) -> Result<Self, SchemeError> {
        Self::new(Variant::MultiIter, n, k, t, 0, 0, m, p)
    }

    pub fn one_shot(
        n: usize,
        k: usize,
        t: usize,
        b: usize,
        r: usize,
        m: usize,
        p: u64,
    ) -> Result<Self, SchemeError> {
        Self::new(Variant::OneShot, n, k, t, b, r, m, p)
    }

    /// Scales `α` and `β` by `factor` (multi-iteration only). The constructors
    /// pick the smallest feasible pair; any common multiple is also valid.
    pub fn lifted(mut self, factor: usize) -> Result<Self, SchemeError> {
        if factor == 0 || (self.variant == Variant::OneShot && factor != 1) {
            return Err(SchemeError::InfeasibleParams(format!(
                "lift factor {factor} not allowed for this variant"
            )));
        }
        self.alpha *= factor;
        self.beta *= factor;
        self.validate()?;
        Ok(self)
    }

    pub fn symmetric(mut self, on: bool) -> Self {
        self.symmetric = on;
        self
    }

    pub fn count_nonresponsive_download(mut self, on: bool) -> Self {
        self.count_nonresponsive_download = on;
        self
    }

    pub fn field(&self) -> Result<Field, SchemeError> {
        Ok(Field::new(self.p)?)
    }

    /// Symbols per file, `L = αk`.
    pub fn file_size(&self) -> usize {
        self.alpha * self.k
    }

    /// Dimension of `C★D_Q`.
    pub fn star_dimension(&self) -> usize {
        (self.k + self.t - 1).min(self.n)
    }

    /// Coded symbols retrieved per iteration in the multi-iteration variant.
    pub fn retrieved_per_iteration(&self) -> usize {
        self.n - self.star_dimension()
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        let bad = |msg: String| Err(SchemeError::InfeasibleParams(msg));
        Field::new(self.p)?;
        if self.k == 0 || self.t == 0 || self.m == 0 {
            return bad("k, t and m must be at least 1".into());
        }
        // multi-iteration may use the doubly-extended code of length p+1
        let max_n = match self.variant {
            Variant::MultiIter => self.p as u128 + 1,
            Variant::OneShot => self.p as u128,
        };
        if self.n as u128 > max_n {
            return bad(format!("field size {} is too small for n = {}", self.p, self.n));
        }
        match self.variant {
            Variant::MultiIter => {
                if self.b != 0 || self.r != 0 {
                    return bad("the multi-iteration scheme requires b = r = 0".into());
                }
                if self.n <= self.k + self.t - 1 {
                    return bad(format!(
                        "multi-iteration scheme needs n > k+t-1 (n = {}, k+t-1 = {})",
                        self.n,
                        self.k + self.t - 1
                    ));
                }
                let d = self.n - (self.k + self.t - 1);
                let g = self.k.gcd(&d);
                let lift = self.alpha / (d / g);
                if lift == 0 || self.alpha != lift * (d / g) || self.beta != lift * (self.k / g) {
                    return bad(format!(
                        "alpha/beta must be a common multiple of {}/{} for these parameters",
                        d / g,
                        self.k / g
                    ));
                }
            }
            Variant::OneShot => {
                let needed = 2 * self.k + self.t + 2 * self.b + self.r - 1;
                if self.n != needed {
                    return bad(format!(
                        "one-shot scheme needs n = 2k+t+2b+r-1 = {needed}, got n = {}",
                        self.n
                    ));
                }
                if self.alpha != 1 || self.beta != 1 {
                    return bad("one-shot scheme is defined for alpha = beta = 1 only".into());
                }
            }
        }
        Ok(())
    }
}
