//! Exact expansions of the lattice wave phase φ(v, ξ) = v·ξ − ω(ξ) at critical
//! points, and the coordinate changes that expose its Newton data.
//!
//! Around a base point ξ0 with c_j = cos ξ0_j, s_j = sin ξ0_j,
//!
//!   ω(ξ0 + ξ)² = ω0² + Σ_j [2c_j(1 − cos ξ_j) + 2s_j sin ξ_j],
//!
//! so with u = (ω(ξ0+ξ)² − ω0²)/ω0² and v0 = ∇ω(ξ0) = s/ω0,
//!
//!   φ(v0, ξ0 + ξ) = v0·ξ0 − ω0 + ω0 · P(ξ),   P = (s/ω0²)·ξ − (√(1+u) − 1).
//!
//! P has rational coefficients whenever ω0², c and s are rational, which holds
//! exactly on the π/2 lattice and, via the exact binary value of a double, for
//! floating base points.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::dispersion::DispersionRelation;

use super::newton::{newton_data, NewtonData};
use super::series::{Germ, TruncatedSeries};
use super::{rat, rat_int, Exponent, PolyError, Rat, SparsePoly};

pub const MAX_SERIES_DEGREE: u32 = 8;

/// Positive rational weight α for the classes ℰ_α (α-degree ≥ 1) and
/// H_α (every monomial of α-degree > 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight {
    alpha: Vec<Rat>,
}

impl Weight {
    pub fn new(alpha: Vec<Rat>) -> Result<Self, PolyError> {
        if alpha.is_empty() || alpha.iter().any(|a| !a.is_positive()) {
            return Err(PolyError::InvalidInput("weights must be positive".into()));
        }
        Ok(Weight { alpha })
    }

    pub fn alpha(&self) -> &[Rat] {
        &self.alpha
    }

    pub fn degree_of(&self, e: &[u32]) -> Rat {
        self.alpha.iter().zip(e).map(|(a, &k)| a * rat_int(k as i64)).sum()
    }
}

/// w_d = (1/3, …, 1/3, 1/2).
pub fn weight_wd(d: usize) -> Weight {
    let mut a = vec![rat(1, 3); d];
    a[d - 1] = rat(1, 2);
    Weight { alpha: a }
}

/// Minimum α-degree over the terms; None stands for +∞ (the zero polynomial).
pub fn weighted_min_degree(p: &SparsePoly, w: &Weight) -> Option<Rat> {
    assert_eq!(p.nvars(), w.alpha.len(), "weight length mismatch");
    p.terms().keys().map(|e| w.degree_of(e)).min()
}

pub fn is_in_h(p: &SparsePoly, w: &Weight) -> bool {
    weighted_min_degree(p, w).is_none_or(|m| m > Rat::one())
}

/// Q^m_{a,b}(z) = a(Σz_j)³ − bΣz_j³.
pub fn make_q(a: &Rat, b: &Rat, m: usize) -> SparsePoly {
    let s = (0..m).fold(SparsePoly::zero(m), |acc, j| &acc + &SparsePoly::var(j, m));
    let cubes = (0..m).fold(SparsePoly::zero(m), |acc, j| &acc + &SparsePoly::var(j, m).pow(3));
    &s.pow(3).scale(a) - &cubes.scale(b)
}

/// Y(z') = 4(Σ z_{2j−1})³ − Σ z_{2j−1}³ − 3Σ z_{2j−1} z_{2j}², in 2k variables.
pub fn make_y(k: usize) -> SparsePoly {
    let n = 2 * k;
    let odd = |j: usize| SparsePoly::var(2 * j, n);
    let even = |j: usize| SparsePoly::var(2 * j + 1, n);
    let s = (0..k).fold(SparsePoly::zero(n), |acc, j| &acc + &odd(j));
    let mut y = s.pow(3).scale(&rat_int(4));
    for j in 0..k {
        y = &y - &odd(j).pow(3);
        y = &y - &(&odd(j) * &even(j).pow(2)).scale(&rat_int(3));
    }
    y
}

/// One coordinate of a base point: an exact multiple of π/2 or a double.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseCoord {
    HalfPi(i64),
    Value(f64),
}

impl BaseCoord {
    pub fn value(self) -> f64 {
        match self {
            BaseCoord::HalfPi(k) => k as f64 * std::f64::consts::FRAC_PI_2,
            BaseCoord::Value(x) => x,
        }
    }

    fn cos_sin(self) -> (Rat, Rat) {
        match self {
            BaseCoord::HalfPi(k) => match k.rem_euclid(4) {
                0 => (rat_int(1), rat_int(0)),
                1 => (rat_int(0), rat_int(1)),
                2 => (rat_int(-1), rat_int(0)),
                _ => (rat_int(0), rat_int(-1)),
            },
            BaseCoord::Value(x) => (exact(x.cos()), exact(x.sin())),
        }
    }
}

fn exact(x: f64) -> Rat {
    Rat::from_float(x).expect("finite value")
}

/// φ(v0, ξ0 + ξ) = constant + omega0 · P(ξ) with P an exact truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSeries {
    pub omega0: f64,
    pub omega0_sq: Rat,
    pub constant: f64,
    pub velocity: Vec<f64>,
    pub series: TruncatedSeries,
}

impl PhaseSeries {
    /// Symmetric M with P₂(ξ) = ξᵀMξ.
    pub fn quadratic_matrix(&self) -> Vec<Vec<Rat>> {
        let d = self.series.nvars();
        let mut m = vec![vec![Rat::zero(); d]; d];
        for (e, c) in self.series.homogeneous_part(2).terms() {
            let idx: Vec<usize> = (0..d).filter(|&j| e[j] > 0).collect();
            if idx.len() == 1 {
                m[idx[0]][idx[0]] = c.clone();
            } else {
                let half = c / rat_int(2);
                m[idx[0]][idx[1]] = half.clone();
                m[idx[1]][idx[0]] = half;
            }
        }
        m
    }

    /// Hess_ξ φ(v0, ξ0) = 2·omega0·M.
    pub fn hessian(&self) -> DMatrix<f64> {
        let m = self.quadratic_matrix();
        let d = m.len();
        DMatrix::from_fn(d, d, |i, j| 2.0 * self.omega0 * super::rat_to_f64(&m[i][j]))
    }
}

/// Exact Taylor series of φ(v0, ξ0 + ·) up to total degree `degree` (≤ 8).
///
/// With `v0 = None` the velocity is taken to be ∇ω(ξ0), which makes ξ0 critical.
pub fn taylor_phase(rel: &DispersionRelation, v0: Option<&[f64]>, xi0: &[BaseCoord], degree: u32) -> Result<PhaseSeries, PolyError> {
    let d = rel.dim();
    if xi0.len() != d {
        return Err(PolyError::DimensionMismatch { expected: d, got: xi0.len() });
    }
    if degree > MAX_SERIES_DEGREE {
        return Err(PolyError::InvalidInput(format!("degree {degree} exceeds {MAX_SERIES_DEGREE}")));
    }
    let cs: Vec<(Rat, Rat)> = xi0.iter().map(|c| c.cos_sin()).collect();
    let m = exact(rel.mass());
    let w2: Rat = &m * &m + cs.iter().map(|(c, _)| rat_int(2) - rat_int(2) * c).sum::<Rat>();
    if w2.is_zero() {
        return Err(PolyError::InvalidInput("ω vanishes at the base point".into()));
    }
    let omega0 = super::rat_to_f64(&w2).sqrt();
    let grad: Vec<f64> = cs.iter().map(|(_, s)| super::rat_to_f64(s) / omega0).collect();
    if let Some(v) = v0 {
        if v.len() != d {
            return Err(PolyError::DimensionMismatch { expected: d, got: v.len() });
        }
        let residual = v.iter().zip(&grad).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if residual > 1e-10 {
            return Err(PolyError::NotCritical { residual });
        }
    }

    let one_minus_cos = |j: usize| -> Result<TruncatedSeries, PolyError> {
        let x = TruncatedSeries::var(j, d, degree);
        Ok(&TruncatedSeries::constant(d, Rat::one(), degree) - &x.compose_germ(Germ::Cos)?)
    };
    let mut l = TruncatedSeries::zero(d, degree);
    let mut lin = TruncatedSeries::zero(d, degree);
    for (j, (c, s)) in cs.iter().enumerate() {
        if !c.is_zero() {
            l = &l + &one_minus_cos(j)?.scale(&(rat_int(2) * c));
        }
        if !s.is_zero() {
            let x = TruncatedSeries::var(j, d, degree);
            l = &l + &x.compose_germ(Germ::Sin)?.scale(&(rat_int(2) * s));
            lin = &lin + &x.scale(&(s / &w2));
        }
    }
    let u = l.scale(&(Rat::one() / &w2));
    let root = &u.compose_germ(Germ::Sqrt1p)? - &TruncatedSeries::constant(d, Rat::one(), degree);
    let series = &lin - &root;
    let linear = series.homogeneous_part(1);
    if !linear.is_zero() {
        return Err(PolyError::NotCritical { residual: super::rat_to_f64(&linear.max_abs_coeff()) });
    }
    let constant = grad.iter().zip(xi0).map(|(g, c)| g * c.value()).sum::<f64>() - omega0;
    Ok(PhaseSeries { omega0, omega0_sq: w2, constant, velocity: grad, series })
}

/// Expansion at the most degenerate point ξ0 = (π/2, …, π/2):
/// P∘Φ(z) = A z_d² + B·Q^{d−1}_{1,1}(z') + R(z) exactly, with Φ the linear change
/// ξ_j = z_j (j < d), ξ_d = z_d − Σ_{j<d} z_j.
///
/// A and B are rational; rescaling y_d = √(ω0 A)·z_d and y' = ∛(ω0 B)·z' turns
/// ω0·P∘Φ into y_d² + Q(y') + R̃ without changing any support.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerExpansion {
    pub phase: PhaseSeries,
    pub transform: Vec<Vec<Rat>>,
    pub quad_coeff: Rat,
    pub cubic_coeff: Rat,
    pub transformed: TruncatedSeries,
    pub remainder: SparsePoly,
}

impl CornerExpansion {
    pub fn dim(&self) -> usize {
        self.transform.len()
    }

    pub fn remainder_in_h(&self) -> bool {
        is_in_h(&self.remainder, &weight_wd(self.dim()))
    }

    /// Monomials of R with w_d-degree ≤ 1 (empty when R ∈ H_{w_d}).
    pub fn remainder_violations(&self) -> Vec<Exponent> {
        let w = weight_wd(self.dim());
        self.remainder.terms().keys().filter(|e| w.degree_of(e) <= Rat::one()).cloned().collect()
    }

    /// Diagonal scales z = scale ⊙ y normalizing the quadratic and cubic parts.
    pub fn normalizing_scales(&self) -> Vec<f64> {
        let d = self.dim();
        let a = self.phase.omega0 * super::rat_to_f64(&self.quad_coeff);
        let b = self.phase.omega0 * super::rat_to_f64(&self.cubic_coeff);
        let mut s = vec![1.0 / b.cbrt(); d];
        s[d - 1] = 1.0 / a.sqrt();
        s
    }
}

fn pi_half_point(d: usize) -> Vec<BaseCoord> {
    vec![BaseCoord::HalfPi(1); d]
}

pub fn corner_expansion(d: usize, degree: u32) -> Result<CornerExpansion, PolyError> {
    if d < 3 {
        return Err(PolyError::InvalidInput("the expansion needs d >= 3".into()));
    }
    let rel = DispersionRelation::wave(d);
    let phase = taylor_phase(&rel, None, &pi_half_point(d), degree)?;
    let mut transform = vec![vec![Rat::zero(); d]; d];
    for (j, row) in transform.iter_mut().enumerate().take(d - 1) {
        row[j] = Rat::one();
    }
    for j in 0..d - 1 {
        transform[d - 1][j] = -Rat::one();
    }
    transform[d - 1][d - 1] = Rat::one();
    let transformed = phase.series.compose_linear(&transform)?;
    let mut zd2 = vec![0u32; d];
    zd2[d - 1] = 2;
    let quad_coeff = transformed.poly().coeff(&zd2);
    let mut cross = vec![0u32; d];
    cross[0] = 2;
    cross[1] = 1;
    let cubic_coeff = transformed.poly().coeff(&cross) / rat_int(3);
    let q = make_q(&Rat::one(), &Rat::one(), d - 1).extend_vars(d);
    let principal = &SparsePoly::monomial(zd2, quad_coeff.clone()) + &q.scale(&cubic_coeff);
    let remainder = transformed.poly() - &principal;
    Ok(CornerExpansion { phase, transform, quad_coeff, cubic_coeff, transformed, remainder })
}

/// The corank-two expansion in d = 4 at ξ0 = (π/2, π/2, π/2, ξ⋆) in the basis
/// 𝔸 = (γ1, γ2, e3, e4), γ1 = (1,−1,0,0), γ2 = (1,1,−2,0).
#[derive(Clone, Debug, PartialEq)]
pub struct CorankTwoExpansion {
    pub phase: PhaseSeries,
    /// max |Mγ| over both kernel vectors, M the exact quadratic form.
    pub kernel_residual: f64,
    pub transformed: TruncatedSeries,
    /// Cubic part in (y1, y2) alone.
    pub cubic_part: SparsePoly,
    pub quadratic_part: SparsePoly,
    pub remainder: SparsePoly,
}

impl CorankTwoExpansion {
    pub fn alpha_star() -> Weight {
        Weight { alpha: vec![rat(1, 3), rat(1, 3), rat(1, 2), rat(1, 2)] }
    }

    pub fn remainder_in_h(&self) -> bool {
        is_in_h(&self.remainder, &Self::alpha_star())
    }

    /// Whether the cubic part is a nonzero multiple of y2³ − y1²y2.
    pub fn cubic_is_d4_minus(&self) -> bool {
        let c = self.cubic_part.coeff(&[0, 3, 0, 0]);
        !c.is_zero() && self.cubic_part == SparsePoly::from_terms(4, [(vec![0, 3, 0, 0], c.clone()), (vec![2, 1, 0, 0], -c)]).unwrap()
    }
}

pub fn corank_two_expansion_d4(xi_star: f64, degree: u32) -> Result<CorankTwoExpansion, PolyError> {
    let rel = DispersionRelation::wave(4);
    let base = [BaseCoord::HalfPi(1), BaseCoord::HalfPi(1), BaseCoord::HalfPi(1), BaseCoord::Value(xi_star)];
    let phase = taylor_phase(&rel, None, &base, degree)?;
    let gammas = [[1i64, -1, 0, 0], [1, 1, -2, 0]];
    let m = phase.quadratic_matrix();
    let kernel_residual = gammas
        .iter()
        .flat_map(|g| m.iter().map(move |row| row.iter().zip(g).map(|(a, &b)| a * rat_int(b)).sum::<Rat>()))
        .map(|r| super::rat_to_f64(&r).abs())
        .fold(0.0, f64::max);
    // columns γ1, γ2, e3, e4: row i gives ξ_i in terms of y
    let a: Vec<Vec<Rat>> = vec![
        vec![rat_int(1), rat_int(1), rat_int(0), rat_int(0)],
        vec![rat_int(-1), rat_int(1), rat_int(0), rat_int(0)],
        vec![rat_int(0), rat_int(-2), rat_int(1), rat_int(0)],
        vec![rat_int(0), rat_int(0), rat_int(0), rat_int(1)],
    ];
    let transformed = phase.series.compose_linear(&a)?;
    let quadratic_part = transformed.homogeneous_part(2);
    let cubic_part = transformed.homogeneous_part(3).filter(|e| e[2] == 0 && e[3] == 0);
    let remainder = &(transformed.poly() - &quadratic_part) - &cubic_part;
    Ok(CorankTwoExpansion { phase, kernel_residual, transformed, cubic_part, quadratic_part, remainder })
}

/// An exact containment check of exponents against a Newton polyhedron.
#[derive(Clone, Debug, PartialEq)]
pub struct Containment {
    pub label: String,
    /// Every exponent lies in the stated relative interior.
    pub relative_interior: bool,
    /// Every exponent lies in the polyhedron and off all of its compact faces.
    pub avoids_compact_faces: bool,
    /// Exponents violating the relative-interior statement.
    pub offenders: Vec<Exponent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjPhase {
    pub d: usize,
    pub expansion: CornerExpansion,
    /// Ψ: row i gives y_i in terms of z.
    pub psi: Vec<Vec<Rat>>,
    /// S̃ = P∘Φ∘Ψ (unnormalized coefficients, same support as the normalized phase).
    pub series: TruncatedSeries,
    /// 𝐒 = A z_d² + 2B·Y(z').
    pub principal: SparsePoly,
    /// Whether S̃ − R∘Ψ equals 𝐒 exactly.
    pub principal_identity: bool,
    pub newton: NewtonData,
    pub lambda0: Rat,
    /// Coefficients of A_1..A_d in the convex combination giving λ0·1.
    pub vertex_weights: Vec<(Exponent, Rat)>,
    pub combination_verified: bool,
    pub containments: Vec<Containment>,
}

fn exponents_of(p: &SparsePoly) -> Vec<Vec<Rat>> {
    p.terms().keys().map(|e| e.iter().map(|&k| rat_int(k as i64)).collect()).collect()
}

/// Builds the conjugated phase at (π/2,…,π/2) for odd d and checks its Newton data.
pub fn build_conj_phase(d: usize, degree: u32) -> Result<ConjPhase, PolyError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(PolyError::InvalidInput(format!("d must be odd and >= 3, got {d}")));
    }
    let k = (d - 1) / 2;
    let expansion = corner_expansion(d, degree)?;
    let mut psi = vec![vec![Rat::zero(); d]; d];
    for j in 0..k {
        let (i, i1) = (2 * j, 2 * j + 1);
        psi[i][i] = Rat::one();
        psi[i][i1] = Rat::one();
        psi[i1][i] = Rat::one();
        psi[i1][i1] = -Rat::one();
    }
    psi[d - 1][d - 1] = Rat::one();
    let series = expansion.transformed.compose_linear(&psi)?;
    let r_psi = expansion.remainder.compose_linear_truncated(&psi, Some(degree))?;
    let mut zd2 = vec![0u32; d];
    zd2[d - 1] = 2;
    let y = make_y(k);
    let principal = &SparsePoly::monomial(zd2, expansion.quad_coeff.clone()) + &y.extend_vars(d).scale(&(rat_int(2) * &expansion.cubic_coeff));
    let principal_identity = (series.poly() - &r_psi) == principal;
    let newton = newton_data(series.poly())?;

    let lambda0 = rat(6, 2 * d as i64 + 1);
    let mut vertex_weights = Vec::new();
    for j in 0..k {
        let mut a_odd = vec![0u32; d];
        a_odd[2 * j] = 3;
        let mut a_even = vec![0u32; d];
        a_even[2 * j] = 1;
        a_even[2 * j + 1] = 2;
        vertex_weights.push((a_odd, &lambda0 / rat_int(6)));
        vertex_weights.push((a_even, &lambda0 / rat_int(2)));
    }
    let mut a_d = vec![0u32; d];
    a_d[d - 1] = 2;
    vertex_weights.push((a_d, &lambda0 / rat_int(2)));
    let total: Rat = vertex_weights.iter().map(|(_, w)| w.clone()).sum();
    let point: Vec<Rat> = (0..d).map(|i| vertex_weights.iter().map(|(e, w)| w * rat_int(e[i] as i64)).sum()).collect();
    let combination_verified = total.is_one()
        && vertex_weights.iter().all(|(e, w)| w.is_positive() && !series.poly().coeff(e).is_zero())
        && point.iter().all(|p| *p == lambda0);

    let mut containments = Vec::new();
    let ny = newton_data(&y)?;
    for n in [2u32, 3] {
        let t = (0..k).fold(SparsePoly::zero(2 * k), |acc, j| {
            let a = SparsePoly::var(2 * j, 2 * k);
            let b = SparsePoly::var(2 * j + 1, 2 * k);
            &(&acc + &(&a - &b).pow(2 * n + 1)) + &(&a + &b).pow(2 * n + 1)
        });
        containments.push(check_points(format!("T_{} in ri N(Y)", 2 * n + 1), &ny, &exponents_of(&t), None));
    }
    let ns = newton_data(&principal)?;
    let mut even_normal = vec![Rat::zero(); d];
    for j in 0..k {
        even_normal[2 * j + 1] = Rat::one();
    }
    let u_face = ns.exposed_face(&even_normal).expect("nonnegative normal");
    let s_odd = (0..k).fold(SparsePoly::zero(d), |acc, j| &acc + &SparsePoly::var(2 * j, d));
    let t1 = &SparsePoly::var(d - 1, d) * &s_odd.pow(2);
    containments.push(check_points("T_1 in ri U_S".into(), &ns, &exponents_of(&t1), Some(&u_face)));

    Ok(ConjPhase {
        d,
        expansion,
        psi,
        series,
        principal,
        principal_identity,
        newton,
        lambda0,
        vertex_weights,
        combination_verified,
        containments,
    })
}

fn check_points(label: String, nd: &NewtonData, points: &[Vec<Rat>], face: Option<&super::newton::Face>) -> Containment {
    let mut offenders = Vec::new();
    let mut avoids = true;
    for q in points {
        let inside = match face {
            Some(f) => nd.in_relative_interior(f, q),
            None => nd.facets.iter().all(|f| f.normal.iter().zip(q).map(|(a, b)| a * b).sum::<Rat>() > f.support),
        };
        if !inside {
            offenders.push(q.iter().map(|r| r.to_integer().try_into().unwrap_or(u32::MAX)).collect());
        }
        let on_compact = nd.compact_faces.iter().any(|f| f.normal.iter().zip(q).map(|(a, b)| a * b).sum::<Rat>() == f.support);
        if !nd.contains(q) || on_compact {
            avoids = false;
        }
    }
    Containment { label, relative_interior: offenders.is_empty(), avoids_compact_faces: avoids, offenders }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynewton::{parse_poly, parse_poly_in, rat_to_f64};

    #[test]
    fn q_and_y_examples() {
        assert_eq!(make_q(&rat(1, 1), &rat(1, 1), 2), parse_poly("3*x1^2*x2 + 3*x1*x2^2").unwrap());
        assert_eq!(make_y(1), parse_poly("3*x1^3 - 3*x1*x2^2").unwrap());
        assert_eq!(weight_wd(4).alpha(), &[rat(1, 3), rat(1, 3), rat(1, 3), rat(1, 2)]);
    }

    #[test]
    fn q3_factorizes() {
        let q = make_q(&rat(1, 1), &rat(1, 1), 3);
        let prod = &(&parse_poly_in("x1 + x2", 3).unwrap() * &parse_poly_in("x1 + x3", 3).unwrap()) * &parse_poly_in("x2 + x3", 3).unwrap();
        assert_eq!(q, prod.scale(&rat(3, 1)));
    }

    #[test]
    fn weighted_degrees() {
        let q = make_q(&rat(1, 1), &rat(1, 1), 3);
        let w = Weight::new(vec![rat(1, 3); 3]).unwrap();
        assert_eq!(weighted_min_degree(&q, &w), Some(rat(1, 1)));
        assert!(!is_in_h(&q, &w));
        assert!(is_in_h(&SparsePoly::zero(3), &w));
        assert_eq!(weight_wd(2).degree_of(&[0, 2]), rat(1, 1));
    }

    #[test]
    fn quadratic_part_matches_hessian() {
        for d in [2usize, 3, 4] {
            let rel = DispersionRelation::wave(d);
            let p = taylor_phase(&rel, None, &pi_half_point(d), 4).unwrap();
            let xi: Vec<f64> = vec![std::f64::consts::FRAC_PI_2; d];
            let h = rel.hess_omega(&xi).unwrap();
            let ours = p.hessian();
            for i in 0..d {
                for j in 0..d {
                    assert!((ours[(i, j)] + h[(i, j)]).abs() < 1e-14, "d={d}");
                }
            }
        }
        let rel = DispersionRelation::wave(4);
        let p = taylor_phase(&rel, None, &pi_half_point(4), 4).unwrap();
        // φ's quadratic part at (π/2)^4 is (Σξ)²/(32√2)
        let m = p.quadratic_matrix();
        assert!((p.omega0 * rat_to_f64(&m[0][1]) - 1.0 / (32.0 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn floating_base_point_and_criticality() {
        let rel = DispersionRelation::new(3, 0.5).unwrap();
        let base = [BaseCoord::Value(0.7), BaseCoord::Value(-1.3), BaseCoord::HalfPi(1)];
        let xi: Vec<f64> = base.iter().map(|b| b.value()).collect();
        let p = taylor_phase(&rel, Some(&rel.grad_omega(&xi).unwrap()), &base, 5).unwrap();
        let h = rel.hess_omega(&xi).unwrap();
        let ours = p.hessian();
        for i in 0..3 {
            for j in 0..3 {
                assert!((ours[(i, j)] + h[(i, j)]).abs() < 1e-12);
            }
        }
        // series reproduces φ at a nearby point
        let dx = [1e-2, -2e-2, 1.5e-2];
        let v = rel.grad_omega(&xi).unwrap();
        let x: Vec<f64> = xi.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let direct = rel.phase(&v, &x);
        let approx = p.constant + p.omega0 * p.series.poly().eval_f64(&dx);
        assert!((direct - approx).abs() < 1e-12);
        let bad = [v[0] + 1e-6, v[1], v[2]];
        assert!(matches!(taylor_phase(&rel, Some(&bad), &base, 4), Err(PolyError::NotCritical { .. })));
    }

    #[test]
    fn corner_remainder_in_h() {
        for d in [3usize, 4, 5] {
            let e = corner_expansion(d, 6).unwrap();
            assert!(e.remainder_in_h(), "d={d}: {:?}", e.remainder_violations());
            assert!(e.quad_coeff.is_positive());
            assert!(e.cubic_coeff.is_negative());
        }
    }

    #[test]
    fn corank_two_expansion() {
        let e = corank_two_expansion_d4(1.0, 6).unwrap();
        assert!(e.kernel_residual < 1e-10);
        assert!(e.cubic_is_d4_minus());
        assert!(e.remainder_in_h());
        assert!(e.quadratic_part.terms().keys().all(|k| k[0] == 0 && k[1] == 0));
    }

    #[test]
    fn conj_phase_d3() {
        let c = build_conj_phase(3, 6).unwrap();
        assert!(c.principal_identity);
        assert!(c.combination_verified);
        assert_eq!(c.newton.d_s, rat(6, 7));
        assert_eq!(c.newton.k_s, 1);
    }
}
