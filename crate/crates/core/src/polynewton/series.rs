//! Truncated multivariate power series with exact rational coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{PolyError, Rat, SparsePoly};

/// One-variable analytic germs that can be composed with a series without
/// constant term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Germ {
    /// √(1+u)
    Sqrt1p,
    Sin,
    Cos,
}

impl Germ {
    /// Taylor coefficients c_0..=c_n at 0.
    pub fn coefficients(self, n: u32) -> Vec<Rat> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut fact = BigInt::one();
        for k in 0..=n {
            if k > 0 {
                fact *= BigInt::from(k);
            }
            let c = match self {
                Germ::Sqrt1p => binom_half(k),
                Germ::Sin if k % 2 == 1 => {
                    let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
                    Rat::new(BigInt::from(sign), fact.clone())
                }
                Germ::Cos if k % 2 == 0 => {
                    let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
                    Rat::new(BigInt::from(sign), fact.clone())
                }
                _ => Rat::zero(),
            };
            out.push(c);
        }
        out
    }
}

/// Binomial coefficient C(1/2, k).
fn binom_half(k: u32) -> Rat {
    let half = Rat::new(BigInt::from(1), BigInt::from(2));
    let mut c = Rat::one();
    for i in 0..k {
        c = c * (&half - Rat::from_integer(BigInt::from(i))) / Rat::from_integer(BigInt::from(i + 1));
    }
    c
}

/// A polynomial together with a truncation degree D; all arithmetic discards
/// monomials of total degree above D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    poly: SparsePoly,
    degree: u32,
}

impl TruncatedSeries {
    pub fn new(poly: SparsePoly, degree: u32) -> Self {
        TruncatedSeries { poly: poly.truncate(degree), degree }
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self::new(SparsePoly::zero(nvars), degree)
    }

    pub fn var(i: usize, nvars: usize, degree: u32) -> Self {
        Self::new(SparsePoly::var(i, nvars), degree)
    }

    pub fn constant(nvars: usize, c: Rat, degree: u32) -> Self {
        Self::new(SparsePoly::constant(nvars, c), degree)
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }

    pub fn into_poly(self) -> SparsePoly {
        self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn constant_term(&self) -> Rat {
        self.poly.coeff(&vec![0; self.nvars()])
    }

    pub fn scale(&self, c: &Rat) -> Self {
        TruncatedSeries { poly: self.poly.scale(c), degree: self.degree }
    }

    pub fn homogeneous_part(&self, k: u32) -> SparsePoly {
        self.poly.homogeneous_part(k)
    }

    /// P(A x), truncated.
    pub fn compose_linear(&self, a: &[Vec<Rat>]) -> Result<Self, PolyError> {
        Ok(TruncatedSeries { poly: self.poly.compose_linear_truncated(a, Some(self.degree))?, degree: self.degree })
    }

    /// g(self) for a germ g; requires a zero constant term.
    pub fn compose_germ(&self, g: Germ) -> Result<Self, PolyError> {
        if !self.constant_term().is_zero() {
            return Err(PolyError::NonzeroConstant);
        }
        let c = g.coefficients(self.degree);
        let n = self.nvars();
        // Horner: c_0 + u(c_1 + u(c_2 + ...))
        let mut acc = SparsePoly::constant(n, c[self.degree as usize].clone());
        for k in (0..self.degree as usize).rev() {
            acc = acc.mul_truncated(&self.poly, Some(self.degree));
            acc.add_term(vec![0; n], c[k].clone());
        }
        Ok(TruncatedSeries { poly: acc, degree: self.degree })
    }

    fn check(&self, other: &Self) -> u32 {
        assert_eq!(self.nvars(), other.nvars(), "variable count mismatch");
        self.degree.min(other.degree)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        let d = self.check(o);
        TruncatedSeries::new(&self.poly + &o.poly, d)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        let d = self.check(o);
        TruncatedSeries::new(&self.poly - &o.poly, d)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { poly: -&self.poly, degree: self.degree }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        let d = self.check(o);
        TruncatedSeries { poly: self.poly.mul_truncated(&o.poly, Some(d)), degree: d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynewton::{parse_poly_in, rat};

    #[test]
    fn germ_coefficients() {
        assert_eq!(Germ::Sqrt1p.coefficients(3), vec![rat(1, 1), rat(1, 2), rat(-1, 8), rat(1, 16)]);
        assert_eq!(Germ::Sin.coefficients(5)[5], rat(1, 120));
        assert_eq!(Germ::Cos.coefficients(4)[2], rat(-1, 2));
    }

    #[test]
    fn sqrt_squared_is_identity() {
        let u = TruncatedSeries::new(parse_poly_in("x1 + 1/3*x2^2 - x1*x2", 2).unwrap(), 6);
        let s = u.compose_germ(Germ::Sqrt1p).unwrap();
        let sq = &s * &s;
        let one_plus_u = &TruncatedSeries::constant(2, rat(1, 1), 6) + &u;
        assert_eq!(sq, one_plus_u);
    }

    #[test]
    fn sin_cos_pythagoras() {
        let u = TruncatedSeries::new(parse_poly_in("x1 - 2*x2", 2).unwrap(), 7);
        let s = u.compose_germ(Germ::Sin).unwrap();
        let c = u.compose_germ(Germ::Cos).unwrap();
        let sum = &(&s * &s) + &(&c * &c);
        assert_eq!(sum, TruncatedSeries::constant(2, rat(1, 1), 7));
    }

    #[test]
    fn constant_term_is_rejected() {
        let u = TruncatedSeries::new(parse_poly_in("1 + x1", 1).unwrap(), 4);
        assert_eq!(u.compose_germ(Germ::Sin), Err(PolyError::NonzeroConstant));
    }
}
