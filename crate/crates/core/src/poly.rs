//! Univariate polynomials over GF(p), coefficients stored low degree first.

use crate::field::{Field, FieldError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: u64) -> Self {
        Poly::new(vec![c])
    }

    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, f: Field, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, f: Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, f: Field, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn mul(&self, f: Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, f: Field, s: u64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    /// Euclidean division: `(q, r)` with `self = q·divisor + r`, `deg r < deg divisor`.
    pub fn div_rem(&self, f: Field, divisor: &Poly) -> Result<(Poly, Poly), FieldError> {
        let dd = divisor.degree().ok_or(FieldError::DivisionByZero)?;
        let lead_inv = f.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![0; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = f.mul(rem[i], lead_inv);
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.sub(rem[i - dd + j], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// `∏ (x − r)` over the given roots.
    pub fn from_roots(f: Field, roots: &[u64]) -> Poly {
        roots.iter().fold(Poly::constant(1), |acc, &r| {
            acc.mul(f, &Poly::new(vec![f.neg(r), 1]))
        })
    }

    /// Lagrange interpolation through `(xs[i], ys[i])`; the points must be distinct.
    pub fn interpolate(f: Field, xs: &[u64], ys: &[u64]) -> Result<Poly, FieldError> {
        if xs.len() != ys.len() {
            return Err(FieldError::ShapeMismatch(format!(
                "interpolate: {} points vs {} values",
                xs.len(),
                ys.len()
            )));
        }
        let mut acc = Poly::zero();
        for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
            if yi == 0 {
                continue;
            }
            let mut basis = Poly::constant(1);
            let mut denom = 1;
            for (j, &xj) in xs.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = basis.mul(f, &Poly::new(vec![f.neg(xj), 1]));
                denom = f.mul(denom, f.sub(xi, xj));
            }
            let scale = f.mul(yi, f.inv(denom)?);
            acc = acc.add(f, &basis.scale(f, scale));
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_identity() {
        let f = Field::new(7).unwrap();
        let a = Poly::new(vec![3, 0, 5, 1, 6]);
        let b = Poly::new(vec![2, 4, 1]);
        let (q, r) = a.div_rem(f, &b).unwrap();
        assert_eq!(q.mul(f, &b).add(f, &r), a);
        assert!(r.degree() < b.degree());
        assert!(a.div_rem(f, &Poly::zero()).is_err());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = Field::new(11).unwrap();
        let p = Poly::new(vec![4, 0, 7, 2]);
        let xs = [0, 3, 5, 9, 10];
        let ys: Vec<u64> = xs.iter().map(|&x| p.eval(f, x)).collect();
        assert_eq!(Poly::interpolate(f, &xs, &ys).unwrap(), p);
    }

    #[test]
    fn roots_vanish() {
        let f = Field::new(5).unwrap();
        let z = Poly::from_roots(f, &[0, 2, 4]);
        assert_eq!(z.degree(), Some(3));
        for x in [0, 2, 4] {
            assert_eq!(z.eval(f, x), 0);
        }
        assert_ne!(z.eval(f, 1), 0);
    }
}
