//! Periodic lattice fields, their d-dimensional FFT, lᵖ norms and file formats.

use std::io::{self, Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::numerics::pairwise_sum;

use super::EvolveError;

/// Samples on the periodic box (ℤ/Lℤ)^d, row-major with the last axis fastest.
/// Site x ∈ ℤ^d is stored at the index of x mod L.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    d: usize,
    l: usize,
    pub data: Vec<Complex64>,
}

impl LatticeField {
    pub fn zeros(d: usize, l: usize) -> Self {
        assert!(d >= 1 && l >= 1);
        LatticeField { d, l, data: vec![Complex64::new(0.0, 0.0); l.pow(d as u32)] }
    }

    pub fn from_data(d: usize, l: usize, data: Vec<Complex64>) -> Result<Self, EvolveError> {
        if d == 0 || l == 0 || data.len() != l.pow(d as u32) {
            return Err(EvolveError::Shape(format!("{} samples for d={d}, L={l}", data.len())));
        }
        Ok(LatticeField { d, l, data })
    }

    pub fn from_real(d: usize, l: usize, data: &[f64]) -> Result<Self, EvolveError> {
        Self::from_data(d, l, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Unit mass at the origin.
    pub fn delta(d: usize, l: usize) -> Self {
        let mut f = Self::zeros(d, l);
        f.data[0] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn index_of(&self, x: &[i64]) -> usize {
        assert_eq!(x.len(), self.d);
        x.iter().fold(0usize, |acc, &xi| acc * self.l + xi.rem_euclid(self.l as i64) as usize)
    }

    /// Centered coordinates in [−L/2, L/2) of a storage index.
    pub fn coords_of(&self, mut idx: usize) -> Vec<i64> {
        let l = self.l as i64;
        let mut x = vec![0i64; self.d];
        for j in (0..self.d).rev() {
            let c = (idx % self.l) as i64;
            x[j] = if c >= (l + 1) / 2 { c - l } else { c };
            idx /= self.l;
        }
        x
    }

    pub fn get(&self, x: &[i64]) -> Complex64 {
        self.data[self.index_of(x)]
    }

    pub fn set(&mut self, x: &[i64], v: Complex64) {
        let i = self.index_of(x);
        self.data[i] = v;
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> Self {
        LatticeField { d: self.d, l: self.l, data: self.data.par_iter().map(|&z| f(z)).collect() }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.d == other.d && self.l == other.l
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// ‖u‖_p; p = ∞ gives the supremum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_of(self.data.iter().map(|z| z.norm()), p)
    }

    pub fn write_binary(&self, w: &mut impl Write) -> io::Result<()> {
        let complex = !self.is_real(0.0);
        w.write_all(&(self.d as u64).to_le_bytes())?;
        w.write_all(&(self.l as u64).to_le_bytes())?;
        w.write_all(&[complex as u8])?;
        for z in &self.data {
            w.write_all(&z.re.to_le_bytes())?;
            if complex {
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads the format of [`write_binary`]: d and L as little-endian u64, one
    /// byte (0 real, 1 complex), then row-major f64 samples.
    pub fn read_binary(r: &mut impl Read) -> Result<Self, EvolveError> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let d = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let l = u64::from_le_bytes(b8) as usize;
        if d == 0 || d > 8 || l == 0 || (l as f64).powi(d as i32) > 1e9 {
            return Err(EvolveError::Shape(format!("implausible header d={d}, L={l}")));
        }
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let complex = match flag[0] {
            0 => false,
            1 => true,
            f => return Err(EvolveError::Shape(format!("bad real/complex flag {f}"))),
        };
        let n = l.pow(d as u32);
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            let im = if complex {
                r.read_exact(&mut b8)?;
                f64::from_le_bytes(b8)
            } else {
                0.0
            };
            data.push(Complex64::new(re, im));
        }
        Self::from_data(d, l, data)
    }
}

pub(crate) fn lp_norm_of(abs: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        return abs.fold(0.0, f64::max);
    }
    let terms: Vec<f64> = abs.map(|a| a.powf(p)).collect();
    pairwise_sum(&terms).powf(1.0 / p)
}

/// Unnormalized forward / inverse FFT over all axes of a (ℤ/Lℤ)^d field.
pub struct FftNd {
    d: usize,
    l: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftNd {
    pub fn new(d: usize, l: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftNd { d, l, forward: planner.plan_fft_forward(l), inverse: planner.plan_fft_inverse(l) }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the 1/L^d factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let s = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    fn run(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let l = self.l;
        assert_eq!(data.len(), l.pow(self.d as u32));
        for axis in 0..self.d {
            let stride = l.pow((self.d - 1 - axis) as u32);
            if stride == 1 {
                data.par_chunks_mut(l * 64).for_each(|c| fft.process(c));
                continue;
            }
            // Each block of l·stride samples holds `stride` interleaved lines.
            data.par_chunks_mut(l * stride).for_each(|block| {
                let mut lines = vec![Complex64::new(0.0, 0.0); l * stride];
                for k in 0..l {
                    for i in 0..stride {
                        lines[i * l + k] = block[k * stride + i];
                    }
                }
                fft.process(&mut lines);
                for k in 0..l {
                    for i in 0..stride {
                        block[k * stride + i] = lines[i * l + k];
                    }
                }
            });
        }
    }
}
