//! Newton polyhedra 𝒩(S) = conv(T) + ℝ₊^d of a Taylor support T.
//!
//! Facets are found by brute force over d-element sets of generators (vertices
//! and the coordinate rays), which is adequate for the instance sizes at hand;
//! all other faces are intersections of facets.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lp::{null_space, rank, solve_standard, LpOutcome};
use super::{rat, rat_int, rat_string, Exponent, PolyError, Rat, SparsePoly};

pub const MAX_VARS: usize = 8;
pub const MAX_CANDIDATES: usize = 200;
const MAX_FACET_SUBSETS: f64 = 5e6;

/// A face of 𝒩(S), described by the vertices and coordinate rays it contains.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// A normal exposing exactly this face: κ·x ≥ support on 𝒩(S), with equality on the face.
    pub normal: Vec<Rat>,
    pub support: Rat,
    pub vertices: Vec<Exponent>,
    /// Coordinate directions e_j in the face's recession cone (empty iff compact).
    pub rays: Vec<usize>,
    pub dim: usize,
}

impl Face {
    pub fn is_compact(&self) -> bool {
        self.rays.is_empty()
    }

    fn contains_exponent(&self, e: &[u32]) -> bool {
        dot_exp(&self.normal, e) == self.support
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: Vec<Rat>,
    pub support: Rat,
    points: BTreeSet<usize>,
    rays: BTreeSet<usize>,
}

/// Exact witnesses that d_S is the Newton distance: a convex combination λ of
/// vertices with Σλ_iγ_i ≤ d_S·1, and a normal κ ≥ 0, Σκ = 1, with κ·γ ≥ d_S on
/// the whole support (so (d_S − ε)·1 lies outside for every ε > 0).
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceCertificate {
    pub weights: Vec<(Exponent, Rat)>,
    pub normal: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonData {
    pub nvars: usize,
    pub support: Vec<Exponent>,
    pub vertices: Vec<Exponent>,
    pub facets: Vec<Facet>,
    pub compact_faces: Vec<Face>,
    pub d_s: Rat,
    pub principal_face: Face,
    pub k_s: usize,
    pub certificate: DistanceCertificate,
}

impl NewtonData {
    /// Predicted (β, p) = (−1/d_S, k_S − 1).
    pub fn varchenko(&self) -> (Rat, usize) {
        varchenko_bound(self)
    }

    /// Whether q ∈ 𝒩(S), decided from the facet inequalities.
    pub fn contains(&self, q: &[Rat]) -> bool {
        q.iter().all(|v| !v.is_negative()) && self.facets.iter().all(|f| dot(&f.normal, q) >= f.support)
    }

    /// Whether q lies in the relative interior of `face`.
    pub fn in_relative_interior(&self, face: &Face, q: &[Rat]) -> bool {
        if !self.contains(q) || dot(&face.normal, q) != face.support {
            return false;
        }
        // strict on every facet that does not contain the whole face
        let verts: BTreeSet<usize> = face.vertices.iter().filter_map(|v| self.vertices.iter().position(|w| w == v)).collect();
        let rays: BTreeSet<usize> = face.rays.iter().cloned().collect();
        self.facets.iter().all(|f| {
            let contains_face = verts.is_subset(&f.points) && rays.is_subset(&f.rays);
            contains_face || dot(&f.normal, q) > f.support
        })
    }

    /// The face exposed by a nonnegative normal κ (the minimizers of κ·x over 𝒩(S)).
    pub fn exposed_face(&self, normal: &[Rat]) -> Option<Face> {
        if normal.len() != self.nvars || normal.iter().any(|k| k.is_negative()) {
            return None;
        }
        let support = self.vertices.iter().map(|v| dot_exp(normal, v)).min()?;
        let points: BTreeSet<usize> = (0..self.vertices.len()).filter(|&i| dot_exp(normal, &self.vertices[i]) == support).collect();
        let rays: BTreeSet<usize> = (0..self.nvars).filter(|&j| normal[j].is_zero()).collect();
        Some(self.make_face(&points, &rays))
    }

    /// Exact re-verification of the distance certificate (ε = 1/1000 by default).
    pub fn verify_certificate(&self, eps: &Rat) -> bool {
        let c = &self.certificate;
        let d = self.nvars;
        let sum_w: Rat = c.weights.iter().map(|(_, w)| w.clone()).sum();
        let primal = sum_w.is_one()
            && c.weights.iter().all(|(e, w)| !w.is_negative() && self.support.contains(e))
            && (0..d).all(|j| {
                let s: Rat = c.weights.iter().map(|(e, w)| w * rat_int(e[j] as i64)).sum();
                s <= self.d_s
            });
        let sum_k: Rat = c.normal.iter().cloned().sum();
        let outside = &self.d_s - eps;
        let dual = sum_k.is_one()
            && c.normal.iter().all(|k| !k.is_negative())
            && self.support.iter().all(|e| dot_exp(&c.normal, e) >= self.d_s)
            && &outside * &sum_k < self.d_s;
        primal && dual
    }

    fn make_face(&self, points: &BTreeSet<usize>, rays: &BTreeSet<usize>) -> Face {
        let containing: Vec<&Facet> = self.facets.iter().filter(|f| points.is_subset(&f.points) && rays.is_subset(&f.rays)).collect();
        let mut normal = vec![Rat::zero(); self.nvars];
        for f in &containing {
            for (n, k) in normal.iter_mut().zip(&f.normal) {
                *n += k;
            }
        }
        let vertices: Vec<Exponent> = points.iter().map(|&i| self.vertices[i].clone()).collect();
        let support = vertices.first().map_or(Rat::zero(), |v| dot_exp(&normal, v));
        let dim = affine_dim(&vertices, rays, self.nvars);
        Face { normal, support, vertices, rays: rays.iter().cloned().collect(), dim }
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_exp(a: &[Rat], e: &[u32]) -> Rat {
    a.iter().zip(e).filter(|(_, &k)| k != 0).map(|(x, &k)| x * rat_int(k as i64)).sum()
}

fn to_rat(e: &[u32]) -> Vec<Rat> {
    e.iter().map(|&k| rat_int(k as i64)).collect()
}

fn affine_dim(points: &[Exponent], rays: &BTreeSet<usize>, d: usize) -> usize {
    let Some(p0) = points.first() else { return 0 };
    let mut rows: Vec<Vec<Rat>> = points[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| rat_int(*a as i64 - *b as i64)).collect()).collect();
    for &j in rays {
        let mut r = vec![Rat::zero(); d];
        r[j] = Rat::one();
        rows.push(r);
    }
    if rows.is_empty() {
        0
    } else {
        rank(&rows)
    }
}

/// Whether q ∈ conv(points) + ℝ₊^d, by an exact feasibility LP.
fn in_hull_plus_orthant(points: &[&Exponent], q: &[Rat]) -> bool {
    let d = q.len();
    let n = points.len();
    if n == 0 {
        return false;
    }
    // variables λ (n), s (d):  Σλγ + s = q, Σλ = 1
    let mut a = Vec::with_capacity(d + 1);
    for j in 0..d {
        let mut row: Vec<Rat> = points.iter().map(|p| rat_int(p[j] as i64)).collect();
        row.extend((0..d).map(|k| if k == j { Rat::one() } else { Rat::zero() }));
        a.push(row);
    }
    let mut last = vec![Rat::one(); n];
    last.extend(vec![Rat::zero(); d]);
    a.push(last);
    let mut b = q.to_vec();
    b.push(Rat::one());
    let c = vec![Rat::zero(); n + d];
    matches!(solve_standard(&a, &b, &c), LpOutcome::Optimal { .. })
}

/// Newton data of the Taylor support of `p`.
pub fn newton_data(p: &SparsePoly) -> Result<NewtonData, PolyError> {
    let d = p.nvars();
    if p.is_zero() {
        return Err(PolyError::Degenerate("empty Taylor support".into()));
    }
    if d == 0 || d > MAX_VARS {
        return Err(PolyError::TooLarge(format!("{d} variables (at most {MAX_VARS})")));
    }
    let support: Vec<Exponent> = p.terms().keys().cloned().collect();
    if support.iter().any(|e| e.iter().all(|&k| k == 0)) {
        return Err(PolyError::Degenerate("nonzero constant term".into()));
    }

    // Exponents dominating another exponent are never vertices.
    let minimal: Vec<&Exponent> = support
        .iter()
        .filter(|e| !support.iter().any(|f| f != *e && f.iter().zip(e.iter()).all(|(a, b)| a <= b)))
        .collect();
    if minimal.len() > MAX_CANDIDATES {
        return Err(PolyError::TooLarge(format!("{} candidate vertices (at most {MAX_CANDIDATES})", minimal.len())));
    }
    let vertices: Vec<Exponent> = minimal
        .iter()
        .filter(|e| {
            let others: Vec<&Exponent> = minimal.iter().filter(|f| f != e).cloned().collect();
            !in_hull_plus_orthant(&others, &to_rat(e))
        })
        .map(|e| (*e).clone())
        .collect();

    let facets = enumerate_facets(&vertices, d)?;
    let (d_s, certificate) = newton_distance(&vertices, &support, d);

    let mut nd = NewtonData {
        nvars: d,
        support,
        vertices,
        facets,
        compact_faces: Vec::new(),
        d_s,
        principal_face: Face { normal: vec![], support: Rat::zero(), vertices: vec![], rays: vec![], dim: 0 },
        k_s: 0,
        certificate,
    };

    // All faces are intersections of facets.
    let mut faces: BTreeSet<(BTreeSet<usize>, BTreeSet<usize>)> = BTreeSet::new();
    let mut frontier: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = nd.facets.iter().map(|f| (f.points.clone(), f.rays.clone())).collect();
    while let Some(f) = frontier.pop() {
        if f.0.is_empty() || !faces.insert(f.clone()) {
            continue;
        }
        for g in &nd.facets {
            let meet = (f.0.intersection(&g.points).cloned().collect(), f.1.intersection(&g.rays).cloned().collect());
            if !faces.contains(&meet) {
                frontier.push(meet);
            }
        }
    }
    nd.compact_faces = faces.iter().filter(|(_, r)| r.is_empty()).map(|(p, r)| nd.make_face(p, r)).collect();
    nd.compact_faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.vertices.cmp(&b.vertices)));

    // principal face: intersection of the facets tight at d_S·1
    let diag = vec![nd.d_s.clone(); d];
    let mut pts: BTreeSet<usize> = (0..nd.vertices.len()).collect();
    let mut rays: BTreeSet<usize> = (0..d).collect();
    for f in &nd.facets {
        if dot(&f.normal, &diag) == f.support {
            pts = pts.intersection(&f.points).cloned().collect();
            rays = rays.intersection(&f.rays).cloned().collect();
        }
    }
    nd.principal_face = nd.make_face(&pts, &rays);
    nd.k_s = d - nd.principal_face.dim;
    Ok(nd)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

fn enumerate_facets(vertices: &[Exponent], d: usize) -> Result<Vec<Facet>, PolyError> {
    let ng = vertices.len() + d;
    if binomial(ng, d) > MAX_FACET_SUBSETS {
        return Err(PolyError::TooLarge(format!("{} vertices in {d} variables", vertices.len())));
    }
    // generator g < nv is a vertex, otherwise the ray e_{g − nv}
    let nv = vertices.len();
    let mut found: BTreeMap<(BTreeSet<usize>, BTreeSet<usize>), Facet> = BTreeMap::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        if idx[0] < nv {
            let rows: Vec<Vec<Rat>> = idx
                .iter()
                .map(|&g| {
                    if g < nv {
                        let mut r = to_rat(&vertices[g]);
                        r.push(-Rat::one());
                        r
                    } else {
                        let mut r = vec![Rat::zero(); d + 1];
                        r[g - nv] = Rat::one();
                        r
                    }
                })
                .collect();
            let ns = null_space(&rows, d + 1);
            if ns.len() == 1 {
                let mut v = ns.into_iter().next().unwrap();
                let pos = v[..d].iter().any(|x| x.is_positive());
                let neg = v[..d].iter().any(|x| x.is_negative());
                if !(pos && neg) && (pos || neg) {
                    if neg {
                        v.iter_mut().for_each(|x| *x = -x.clone());
                    }
                    let total: Rat = v[..d].iter().cloned().sum();
                    v.iter_mut().for_each(|x| *x /= &total);
                    let (normal, support) = (v[..d].to_vec(), v[d].clone());
                    if vertices.iter().all(|e| dot_exp(&normal, e) >= support) {
                        let points: BTreeSet<usize> = (0..nv).filter(|&i| dot_exp(&normal, &vertices[i]) == support).collect();
                        let rays: BTreeSet<usize> = (0..d).filter(|&j| normal[j].is_zero()).collect();
                        found.entry((points.clone(), rays.clone())).or_insert(Facet { normal, support, points, rays });
                    }
                }
            }
        }
        // next d-subset in lexicographic order
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(found.into_values().collect());
            }
            i -= 1;
            if idx[i] < ng - d + i {
                idx[i] += 1;
                for k in i + 1..d {
                    idx[k] = idx[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// min ϱ s.t. ϱ·1 ∈ conv(V) + ℝ₊^d, with primal and dual witnesses.
fn newton_distance(vertices: &[Exponent], support: &[Exponent], d: usize) -> (Rat, DistanceCertificate) {
    let n = vertices.len();
    // variables: λ (n), s (d), ϱ (1)
    let mut a = Vec::with_capacity(d + 1);
    for j in 0..d {
        let mut row: Vec<Rat> = vertices.iter().map(|v| rat_int(v[j] as i64)).collect();
        row.extend((0..d).map(|k| if k == j { Rat::one() } else { Rat::zero() }));
        row.push(-Rat::one());
        a.push(row);
    }
    let mut last = vec![Rat::one(); n];
    last.extend(vec![Rat::zero(); d + 1]);
    a.push(last);
    let mut b = vec![Rat::zero(); d];
    b.push(Rat::one());
    let mut c = vec![Rat::zero(); n + d];
    c.push(Rat::one());
    match solve_standard(&a, &b, &c) {
        LpOutcome::Optimal { x, value, dual } => {
            let weights = (0..n).filter(|&i| !x[i].is_zero()).map(|i| (vertices[i].clone(), x[i].clone())).collect();
            let mut normal: Vec<Rat> = dual[..d].iter().map(|y| -y.clone()).collect();
            let total: Rat = normal.iter().cloned().sum();
            if total.is_positive() {
                normal.iter_mut().for_each(|k| *k /= &total);
            }
            let _ = support;
            (value, DistanceCertificate { weights, normal })
        }
        other => unreachable!("distance LP is feasible and bounded: {other:?}"),
    }
}

/// (−1/d_S, k_S − 1).
pub fn varchenko_bound(nd: &NewtonData) -> (Rat, usize) {
    (-(Rat::one() / &nd.d_s), nd.k_s - 1)
}

/// The 𝒫-part of `p`: its terms whose exponents lie on `face`, which must be a
/// face of 𝒩(p).
pub fn face_part(p: &SparsePoly, face: &Face) -> Result<SparsePoly, PolyError> {
    let nd = newton_data(p)?;
    let valid = face.normal.len() == p.nvars()
        && face.normal.iter().all(|k| !k.is_negative())
        && nd.exposed_face(&face.normal).is_some_and(|f| f.vertices == face.vertices && f.rays == face.rays);
    if !valid {
        return Err(PolyError::FaceNotFound);
    }
    Ok(p.filter(|e| face.contains_exponent(e)))
}

/// Sampling grid for the nondegeneracy check: magnitudes 10^(k/per_decade)
/// over `decades` decades centred on 1, both signs per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub per_decade: usize,
    pub decades: usize,
    /// Full grids above this size are subsampled (uniformly over grid tuples).
    pub max_points: usize,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions { per_decade: 20, decades: 3, max_points: 2_000_000, seed: 7, threshold: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    /// No sampled point came close to a critical point of the face part.
    NumericallyNondegenerate,
    /// A sampled point with ‖∇S_𝒫‖ ≤ threshold relative to the term sizes.
    DegenerateWitness(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceVerdict {
    pub face_vertices: Vec<Exponent>,
    pub min_ratio: f64,
    pub samples: usize,
    pub verdict: Verdict,
    /// Always "sampled evidence": the check is not a proof.
    pub evidence: String,
}

/// Samples ∇S_𝒫 on (ℝ∖{0})^d for every compact face 𝒫.
pub fn check_r_nondegenerate(p: &SparsePoly, opts: &SamplerOptions) -> Result<Vec<FaceVerdict>, PolyError> {
    let d = p.nvars();
    if d > 5 {
        return Err(PolyError::TooLarge(format!("{d} variables (at most 5 for sampling)")));
    }
    let nd = newton_data(p)?;
    let half = opts.decades as f64 / 2.0;
    let mags: Vec<f64> = (0..=opts.per_decade * opts.decades).map(|k| 10f64.powf(k as f64 / opts.per_decade as f64 - half)).collect();
    let axis: Vec<f64> = mags.iter().flat_map(|&m| [m, -m]).collect();
    let full = (axis.len() as f64).powi(d as i32);
    let mut out = Vec::new();
    for face in &nd.compact_faces {
        let part = p.filter(|e| face.contains_exponent(e)).to_f64_terms();
        let grads: Vec<Vec<(Exponent, f64)>> = (0..d)
            .map(|j| {
                part.iter()
                    .filter(|(e, _)| e[j] > 0)
                    .map(|(e, c)| {
                        let mut f = e.clone();
                        f[j] -= 1;
                        (f, c * e[j] as f64)
                    })
                    .collect()
            })
            .collect();
        let mut best = (f64::INFINITY, vec![]);
        let mut test = |x: &[f64]| {
            let mut g2 = 0.0;
            let mut s2 = 0.0;
            for gj in &grads {
                let mut g = 0.0;
                let mut s = 0.0;
                for (e, c) in gj {
                    let m: f64 = c * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>();
                    g += m;
                    s += m.abs();
                }
                g2 += g * g;
                s2 += s * s;
            }
            let r = if s2 == 0.0 { 0.0 } else { (g2 / s2).sqrt() };
            if r < best.0 {
                best = (r, x.to_vec());
            }
        };
        let samples = if full <= opts.max_points as f64 {
            let n = axis.len();
            let total = n.pow(d as u32);
            let mut x = vec![0.0; d];
            for mut idx in 0..total {
                for slot in x.iter_mut() {
                    *slot = axis[idx % n];
                    idx /= n;
                }
                test(&x);
            }
            total
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut x = vec![0.0; d];
            for _ in 0..opts.max_points {
                for slot in x.iter_mut() {
                    *slot = axis[rng.gen_range(0..axis.len())];
                }
                test(&x);
            }
            opts.max_points
        };
        let verdict = if best.0 > opts.threshold { Verdict::NumericallyNondegenerate } else { Verdict::DegenerateWitness(best.1.clone()) };
        out.push(FaceVerdict { face_vertices: face.vertices.clone(), min_ratio: best.0, samples, verdict, evidence: "sampled evidence".into() });
    }
    Ok(out)
}

/// JSON view of Newton data with rationals as "p/q" strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonDataJson {
    pub nvars: usize,
    pub vertices: Vec<Exponent>,
    pub compact_faces: Vec<FaceJson>,
    pub d_s: String,
    pub principal_face: FaceJson,
    pub k_s: usize,
    pub bound: (String, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceJson {
    pub normal: Vec<String>,
    pub support: String,
    pub vertices: Vec<Exponent>,
    pub rays: Vec<usize>,
    pub dim: usize,
}

impl From<&Face> for FaceJson {
    fn from(f: &Face) -> Self {
        FaceJson {
            normal: f.normal.iter().map(rat_string).collect(),
            support: rat_string(&f.support),
            vertices: f.vertices.clone(),
            rays: f.rays.clone(),
            dim: f.dim,
        }
    }
}

impl From<&NewtonData> for NewtonDataJson {
    fn from(nd: &NewtonData) -> Self {
        let (b, p) = varchenko_bound(nd);
        NewtonDataJson {
            nvars: nd.nvars,
            vertices: nd.vertices.clone(),
            compact_faces: nd.compact_faces.iter().map(FaceJson::from).collect(),
            d_s: rat_string(&nd.d_s),
            principal_face: FaceJson::from(&nd.principal_face),
            k_s: nd.k_s,
            bound: (rat_string(&b), p),
        }
    }
}

/// ε used by the distance certificate.
pub fn default_certificate_eps() -> Rat {
    rat(1, 1000)
}
