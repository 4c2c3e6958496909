//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    BigRational::from_integer(BigInt::from(p))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rat>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The coordinate function x_i (0-based).
    pub fn var(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Exponent, c: Rat) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Rat)>) -> Result<Self, PolyError> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::DimensionMismatch { expected: nvars, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rat> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Adds c·x^e, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exponent, c: Rat) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        SparsePoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    /// Terms of total degree ≤ `deg`.
    pub fn truncate(&self, deg: u32) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() <= deg).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Homogeneous part of total degree `deg`.
    pub fn homogeneous_part(&self, deg: u32) -> Self {
        self.filter(|e| e.iter().sum::<u32>() == deg)
    }

    pub fn filter(&self, keep: impl Fn(&[u32]) -> bool) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn mul_truncated(&self, other: &Self, deg: Option<u32>) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            let da: u32 = ea.iter().sum();
            for (eb, cb) in &other.terms {
                if let Some(dmax) = deg {
                    if da + eb.iter().sum::<u32>() > dmax {
                        continue;
                    }
                }
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * rat_int(e[i] as i64));
            }
        }
        out
    }

    /// Substitutes x_i ↦ images[i] (all images share a variable count).
    pub fn substitute(&self, images: &[SparsePoly], deg: Option<u32>) -> Result<Self, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: images.len() });
        }
        let m = images.first().map_or(0, |p| p.nvars);
        if images.iter().any(|p| p.nvars != m) {
            return Err(PolyError::DimensionMismatch { expected: m, got: images.iter().map(|p| p.nvars).find(|&k| k != m).unwrap() });
        }
        // cache powers of each image
        let mut powers: Vec<Vec<SparsePoly>> = images.iter().map(|p| vec![Self::one(m), p.clone()]).collect();
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut term = Self::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul_truncated(&images[i], deg);
                    powers[i].push(next);
                }
                term = term.mul_truncated(&powers[i][k as usize], deg);
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// P(A x) for a square rational matrix A (row i gives the image of x_i).
    pub fn compose_linear(&self, a: &[Vec<Rat>]) -> Result<Self, PolyError> {
        self.compose_linear_truncated(a, None)
    }

    pub fn compose_linear_truncated(&self, a: &[Vec<Rat>], deg: Option<u32>) -> Result<Self, PolyError> {
        if a.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: a.len() });
        }
        let m = a.first().map_or(self.nvars, |r| r.len());
        if m != self.nvars || a.iter().any(|r| r.len() != m) {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: m });
        }
        let images: Vec<SparsePoly> = a
            .iter()
            .map(|row| {
                let mut p = Self::zero(m);
                for (j, c) in row.iter().enumerate() {
                    let mut e = vec![0; m];
                    e[j] = 1;
                    p.add_term(e, c.clone());
                }
                p
            })
            .collect();
        self.substitute(&images, deg)
    }

    /// Reorders variables: new variable i is old variable perm[i].
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let f: Exponent = perm.iter().map(|&p| e[p]).collect();
            out.add_term(f, c.clone());
        }
        out
    }

    /// Embeds into a ring with more variables (new ones appended).
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f.resize(nvars, 0);
            out.add_term(f, c.clone());
        }
        out
    }

    /// Floating-point copy of the terms.
    pub fn to_f64_terms(&self) -> Vec<(Exponent, f64)> {
        self.terms.iter().map(|(e, c)| (e.clone(), rat_to_f64(c))).collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| rat_to_f64(c) * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_rat(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (&k, v) in e.iter().zip(x) {
                for _ in 0..k {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Variables that occur in at least one term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    pub fn max_abs_coeff(&self) -> Rat {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rat::zero)
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        self + &(-rhs)
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        self.mul_truncated(rhs, None)
    }
}

impl fmt::Display for SparsePoly {
    /// Prints in the input grammar, highest exponents first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { format!("x{}", j + 1) } else { format!("x{}^{}", j + 1, k) })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", rat_string(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", rat_string(&mag), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize, n: usize) -> SparsePoly {
        SparsePoly::var(i, n)
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let p = &x(0, 2) + &x(1, 2);
        let q = &x(0, 2) - &x(1, 2);
        let prod = &p * &q;
        let expect = &x(0, 2).pow(2) - &x(1, 2).pow(2);
        assert_eq!(prod, expect);
        assert!((&prod - &expect).is_zero());
    }

    #[test]
    fn cubic_identity_by_linear_composition() {
        // (y1+y2+y3)^3 - y1^3 - y2^3 - y3^3 = 3(y1+y2)(y1+y3)(y2+y3)
        let s = &(&x(0, 3) + &x(1, 3)) + &x(2, 3);
        let lhs = &(&(&s.pow(3) - &x(0, 3).pow(3)) - &x(1, 3).pow(3)) - &x(2, 3).pow(3);
        let rhs = (&(&(&x(0, 3) + &x(1, 3)) * &(&x(0, 3) + &x(2, 3))) * &(&x(1, 3) + &x(2, 3))).scale(&rat_int(3));
        assert_eq!(lhs, rhs);
        let id: Vec<Vec<Rat>> = (0..3).map(|i| (0..3).map(|j| rat_int((i == j) as i64)).collect()).collect();
        assert_eq!(lhs.compose_linear(&id).unwrap(), lhs);
    }

    #[test]
    fn display_round_trip_shape() {
        let p = &(&x(0, 2).pow(2) * &x(1, 2)) - &x(1, 2).pow(3);
        assert_eq!(p.to_string(), "x1^2*x2 - x2^3");
        let q = SparsePoly::constant(1, rat(-3, 2));
        assert_eq!(q.to_string(), "-3/2");
    }

    #[test]
    fn derivative_and_eval() {
        let p = &(&x(0, 2).pow(2) * &x(1, 2)) - &x(1, 2).pow(3);
        let dp = p.derivative(1);
        assert_eq!(dp.eval_f64(&[2.0, 1.0]), 4.0 - 3.0);
        assert_eq!(p.eval_rat(&[rat(1, 2), rat_int(2)]), rat(1, 2) - rat_int(8));
    }
}
