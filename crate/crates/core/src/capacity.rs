//! Capacity expressions, bounds and download costs in exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapacityError {
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
}

type Result<T> = std::result::Result<T, CapacityError>;

fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `"num/den"`, also for integers (`"1/1"`).
pub fn fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or an integer.
pub fn parse_fraction(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CapacityError::InfeasibleParams(msg()))
    }
}

fn require_positive(n: u64, k: u64, t: u64) -> Result<()> {
    require(n > 0 && k > 0 && t > 0, || "n, k and t must be at least 1".into())
}

fn check_robust(n: u64, k: u64, t: u64, b: u64, r: u64) -> Result<u64> {
    require_positive(n, k, t)?;
    let used = k + t + 2 * b + r - 1;
    require(n > used, || format!("need n > k+t+2b+r-1 = {used}, got n = {n}"))?;
    Ok(used)
}

/// Capacity of linear, full support-rank MDS-TPIR with `m` files:
/// `(1 − (k+t−1)/n) / (1 − ((k+t−1)/n)^m)`.
pub fn cap_tpir_fsr(n: u64, k: u64, t: u64, m: u32) -> Result<Rational> {
    check_robust(n, k, t, 0, 0)?;
    require(m >= 2, || format!("need m >= 2, got m = {m}"))?;
    let x = ratio(k + t - 1, n);
    let one = Rational::one();
    Ok((&one - &x) / (&one - Pow::pow(&x, m)))
}

/// Limit of [`cap_tpir_fsr`] as `m → ∞`: `1 − (k+t−1)/n`.
pub fn cap_tpir_fsr_limit(n: u64, k: u64, t: u64) -> Result<Rational> {
    cap_asymptotic(n, k, t, 0, 0)
}

/// Asymptotic / strongly linear capacity `1 − (k+t+2b+r−1)/n`.
pub fn cap_asymptotic(n: u64, k: u64, t: u64, b: u64, r: u64) -> Result<Rational> {
    let used = check_robust(n, k, t, b, r)?;
    Ok(Rational::one() - ratio(used, n))
}

/// Capacity of linear MDS-TBSPIR with matched randomness, `1 − (k+t+2b+r−1)/n`.
pub fn cap_tbspir(n: u64, k: u64, t: u64, b: u64, r: u64) -> Result<Rational> {
    cap_asymptotic(n, k, t, b, r)
}

/// Minimum secrecy rate of a linear TBSPIR scheme, `(k+t−1)/(n−k−t−2b−r+1)`.
pub fn secrecy_bound(n: u64, k: u64, t: u64, b: u64, r: u64) -> Result<Rational> {
    let used = check_robust(n, k, t, b, r)?;
    Ok(ratio(k + t - 1, n - used))
}

/// Upper bound for linear, full support-rank MDS-TBPIR,
/// `(1 − (2b+r)/n) · cap_tpir_fsr(n,k,t,m)`. Believed loose.
pub fn cap_tbpir_upper(n: u64, k: u64, t: u64, b: u64, r: u64, m: u32) -> Result<Rational> {
    check_robust(n, k, t, b, r)?;
    let factor = Rational::one() - ratio(2 * b + r, n);
    Ok(factor * cap_tpir_fsr(n, k, t, m)?)
}

/// Limit of [`cap_tbpir_upper`] as `m → ∞`.
pub fn cap_tbpir_upper_limit(n: u64, k: u64, t: u64, b: u64, r: u64) -> Result<Rational> {
    check_robust(n, k, t, b, r)?;
    Ok((Rational::one() - ratio(2 * b + r, n)) * cap_asymptotic(n, k, t, 0, 0)?)
}

/// Optimal download cost `⌈L / C⌉` for `L` file symbols with
/// `C = cap_tpir_fsr(n,k,t,m)`.
pub fn optimal_download(l: u64, n: u64, k: u64, t: u64, m: u32) -> Result<BigInt> {
    let c = cap_tpir_fsr(n, k, t, m)?;
    Ok((Rational::from_integer(BigInt::from(l)) / c).ceil().to_integer())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Regime {
    /// Smallest `m` with `β·(k+t−1)^m < n^(m−1)`.
    pub m_min: u32,
    /// `n^(m_min−1) / (k+t−1)^m_min`; the condition is `β` below this.
    #[serde(serialize_with = "ser_fraction")]
    pub beta_bound: Rational,
}

fn ser_fraction<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fraction_string(r))
}

/// Largest `β` allowed at `m` files: `n^(m−1) / (k+t−1)^m`.
pub fn regime_beta_bound(n: u64, k: u64, t: u64, m: u32) -> Rational {
    let num = Pow::pow(BigInt::from(n), m.saturating_sub(1));
    let den = Pow::pow(BigInt::from(k + t - 1), m);
    Rational::new(num, den)
}

/// Number of files from which the download with subpacketization
/// `L = β(n−k−t+1)` reaches the asymptotic regime. Integer comparison only.
pub fn asymptotic_regime(n: u64, k: u64, t: u64, beta: u64) -> Result<Regime> {
    check_robust(n, k, t, 0, 0)?;
    require(beta >= 1, || "beta must be at least 1".into())?;
    let (nb, kt1, bb) = (BigInt::from(n), BigInt::from(k + t - 1), BigInt::from(beta));
    // n > k+t−1 makes n^(m−1)/(k+t−1)^m grow without bound, so this terminates
    let mut m: u32 = 1;
    let mut lhs = &bb * &kt1; // β·(k+t−1)^m
    let mut rhs = BigInt::one(); // n^(m−1)
    while lhs >= rhs {
        m += 1;
        lhs *= &kt1;
        rhs *= &nb;
    }
    Ok(Regime {
        m_min: m,
        beta_bound: regime_beta_bound(n, k, t, m),
    })
}

/// Restated prior results for symmetric PIR, for reference output only.
pub mod known {
    use super::*;

    /// MDS-coded TSPIR: `1 − (k+t−1)/n` if the secrecy rate is at least
    /// `(k+t−1)/(n−k−t+1)`, else 0.
    pub fn tspir_mds(n: u64, k: u64, t: u64, secrecy: &Rational) -> Result<Rational> {
        let bound = secrecy_bound(n, k, t, 0, 0)?;
        if secrecy >= &bound {
            cap_asymptotic(n, k, t, 0, 0)
        } else {
            Ok(Rational::zero())
        }
    }

    /// Replicated TBSPIR: `1 − (2b+t)/n` if the secrecy rate is at least
    /// `t/(n−t−2b)`, else 0.
    pub fn tbspir_replicated(n: u64, t: u64, b: u64, secrecy: &Rational) -> Result<Rational> {
        check_robust(n, 1, t, b, 0)?;
        let bound = ratio(t, n - t - 2 * b);
        if secrecy >= &bound {
            Ok(Rational::one() - ratio(2 * b + t, n))
        } else {
            Ok(Rational::zero())
        }
    }
}

/// Minimal `(α, β)` of the multi-iteration scheme.
pub fn subpacketization(n: u64, k: u64, t: u64) -> Result<(u64, u64)> {
    check_robust(n, k, t, 0, 0)?;
    let d = n - (k + t - 1);
    let g = k.gcd(&d);
    Ok((d / g, k / g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn headline_values() {
        assert_eq!(cap_tpir_fsr(4, 2, 2, 2).unwrap(), q(4, 7));
        assert_eq!(cap_tpir_fsr(2, 1, 1, 2).unwrap(), q(2, 3));
        assert_eq!(cap_tpir_fsr_limit(4, 2, 2).unwrap(), q(1, 4));
        assert_eq!(cap_asymptotic(4, 2, 2, 0, 0).unwrap(), q(1, 4));
        assert_eq!(cap_asymptotic(7, 2, 2, 1, 0).unwrap(), q(2, 7));
        assert_eq!(cap_asymptotic(4, 1, 1, 0, 0).unwrap(), q(3, 4));
        assert_eq!(cap_tbspir(5, 2, 2, 0, 0).unwrap(), q(2, 5));
        assert_eq!(secrecy_bound(5, 2, 2, 0, 0).unwrap(), q(3, 2));
        assert_eq!(secrecy_bound(7, 2, 2, 1, 0).unwrap(), q(3, 2));
        assert_eq!(cap_tbpir_upper(7, 2, 2, 1, 0, 2).unwrap(), q(1, 2));
        assert_eq!(cap_tbpir_upper(4, 2, 2, 0, 0, 2).unwrap(), cap_tpir_fsr(4, 2, 2, 2).unwrap());
        assert_eq!(cap_tbpir_upper_limit(7, 2, 2, 1, 0).unwrap(), q(5, 7) * q(4, 7));
        assert_eq!(optimal_download(4, 5, 2, 2, 2).unwrap(), BigInt::from(7));
    }

    #[test]
    fn secrecy_bound_replicated_form() {
        // k = 1, b = r = 0: t/(n−t)
        for n in 3..10 {
            for t in 1..n {
                assert_eq!(secrecy_bound(n, 1, t, 0, 0).unwrap(), ratio(t, n - t));
            }
        }
    }

    #[test]
    fn regime() {
        assert_eq!(asymptotic_regime(30, 15, 10, 5).unwrap().m_min, 23);
        // k = t = 1: β < n^(m−1), so m = 2 iff β < n
        assert_eq!(asymptotic_regime(5, 1, 1, 4).unwrap().m_min, 2);
        assert_eq!(asymptotic_regime(5, 1, 1, 5).unwrap().m_min, 3);
        let r = asymptotic_regime(30, 15, 10, 5).unwrap();
        assert!(Rational::from_integer(5.into()) < r.beta_bound);
        assert!(Rational::from_integer(5.into()) >= regime_beta_bound(30, 15, 10, 22));
    }

    #[test]
    fn infeasible() {
        assert!(cap_tpir_fsr(3, 2, 2, 2).is_err());
        assert!(cap_tpir_fsr(4, 2, 2, 1).is_err());
        assert!(cap_asymptotic(5, 2, 2, 1, 0).is_err());
        assert!(asymptotic_regime(3, 2, 2, 1).is_err());
        assert!(cap_asymptotic(4, 0, 1, 0, 0).is_err());
    }

    #[test]
    fn known_results() {
        assert_eq!(known::tspir_mds(5, 2, 2, &q(3, 2)).unwrap(), q(2, 5));
        assert_eq!(known::tspir_mds(5, 2, 2, &q(1, 1)).unwrap(), q(0, 1));
        assert_eq!(known::tbspir_replicated(7, 2, 1, &q(2, 3)).unwrap(), q(3, 7));
        // replicated TBSPIR agrees with the MDS formula at k = 1
        assert_eq!(known::tbspir_replicated(7, 2, 1, &q(1, 1)).unwrap(), cap_tbspir(7, 1, 2, 1, 0).unwrap());
    }

    #[test]
    fn fractions() {
        assert_eq!(fraction_string(&q(4, 7)), "4/7");
        assert_eq!(fraction_string(&q(2, 2)), "1/1");
        assert_eq!(parse_fraction("6/14"), Some(q(3, 7)));
        assert_eq!(parse_fraction("3"), Some(q(3, 1)));
        assert_eq!(parse_fraction("1/0"), None);
        assert_eq!(subpacketization(5, 2, 2).unwrap(), (1, 1));
        assert_eq!(subpacketization(4, 1, 2).unwrap(), (2, 1));
    }
}
