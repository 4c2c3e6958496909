//! Univariate rational polynomials: square-free factorization and Sturm counts,
//! used by the two-variable adaptedness test.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::newton::{newton_data, Face};
use super::{rat_int, rat_string, PolyError, Rat, SparsePoly};

/// Coefficients from degree 0 upward, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(pub Vec<Rat>);

impl UPoly {
    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn lead(&self) -> &Rat {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * rat_int(k as i64)).collect())
    }

    fn monic(&self) -> UPoly {
        let l = self.lead().clone();
        UPoly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly(vec![]), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / d.lead();
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            q[k] = c;
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|k| self.0.get(k).cloned().unwrap_or_default() - o.0.get(k).cloned().unwrap_or_default()).collect())
    }

    /// Yun's square-free factorization: f = c · Π_i a_i^i with the a_i
    /// square-free and pairwise coprime. Returns (i, a_i) for nonconstant a_i.
    pub fn squarefree(&self) -> Vec<(usize, UPoly)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f1 = self.derivative();
        let a0 = self.gcd(&f1);
        let mut b = self.div_rem(&a0).0;
        let c = f1.div_rem(&a0).0;
        let mut dpoly = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dpoly);
            let nb = b.div_rem(&a).0;
            let nc = dpoly.div_rem(&a).0;
            if a.degree().unwrap_or(0) > 0 {
                out.push((i, a));
            }
            dpoly = nc.sub(&nb.derivative());
            b = nb;
            i += 1;
        }
        out
    }

    /// Number of distinct real roots, by Sturm's theorem.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(UPoly(r.0.iter().map(|c| -c.clone()).collect()));
        }
        let changes = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
        let at_pos: Vec<bool> = seq.iter().map(|p| p.lead().is_positive()).collect();
        let at_neg: Vec<bool> = seq.iter().map(|p| p.lead().is_positive() == (p.degree().unwrap() % 2 == 0)).collect();
        changes(at_neg) - changes(at_pos)
    }

    /// Largest multiplicity of a real root (0 if there is none).
    pub fn max_real_multiplicity(&self) -> usize {
        self.squarefree().iter().filter(|(_, a)| a.count_real_roots() > 0).map(|(i, _)| *i).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptedCheck {
    pub adapted: bool,
    /// The face lies in {a₁ξ₁ + ξ₂ = a₂}.
    pub a1: String,
    pub a2: String,
    pub bound: String,
    pub max_real_multiplicity: usize,
}

/// Sufficient test that the coordinates of a two-variable phase are adapted:
/// the center lies on a compact edge in a line a₁ξ₁ + ξ₂ = a₂ with a₁, a₂ ∈ ℕ and
/// every real root of S_Γ(·, 1) has multiplicity ≤ a₂/(1 + a₁).
pub fn adapted_check_2d(p: &SparsePoly) -> Result<AdaptedCheck, PolyError> {
    if p.nvars() != 2 {
        return Err(PolyError::NotApplicable(format!("{} variables, need 2", p.nvars())));
    }
    let nd = newton_data(p)?;
    let diag = vec![nd.d_s.clone(), nd.d_s.clone()];
    let candidates: Vec<&Face> = nd
        .compact_faces
        .iter()
        .filter(|f| f.dim == 1 && f.normal.iter().zip(&diag).map(|(a, b)| a * b).sum::<Rat>() == f.support)
        .collect();
    for face in candidates {
        let a1 = &face.normal[0] / &face.normal[1];
        let a2 = &face.support / &face.normal[1];
        if !(a1.is_integer() && a2.is_integer()) || a1.is_negative() {
            continue;
        }
        let mut coeffs = vec![Rat::zero(); 1];
        for (e, c) in p.terms() {
            let on_face = &face.normal[0] * rat_int(e[0] as i64) + &face.normal[1] * rat_int(e[1] as i64) == face.support;
            if on_face {
                let k = e[0] as usize;
                if coeffs.len() <= k {
                    coeffs.resize(k + 1, Rat::zero());
                }
                coeffs[k] += c;
            }
        }
        let s = UPoly::new(coeffs);
        let mult = s.max_real_multiplicity();
        let bound = &a2 / (Rat::one() + &a1);
        return Ok(AdaptedCheck {
            adapted: rat_int(mult as i64) <= bound,
            a1: rat_string(&a1),
            a2: rat_string(&a2),
            bound: rat_string(&bound),
            max_real_multiplicity: mult,
        });
    }
    Err(PolyError::NotApplicable("the center is not on a compact edge a1*x1 + x2 = a2 with natural a1, a2".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynewton::parse_poly_in;

    fn up(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| rat_int(x)).collect())
    }

    #[test]
    fn yun_and_sturm() {
        // (x − 1)^2 (x + 2) (x^2 + 1)^3
        let mut p = up(&[1]);
        for f in [up(&[-1, 1]), up(&[-1, 1]), up(&[2, 1]), up(&[1, 0, 1]), up(&[1, 0, 1]), up(&[1, 0, 1])] {
            let mut c = vec![Rat::zero(); p.0.len() + f.0.len() - 1];
            for (i, a) in p.0.iter().enumerate() {
                for (j, b) in f.0.iter().enumerate() {
                    c[i + j] += a * b;
                }
            }
            p = UPoly::new(c);
        }
        let sf = p.squarefree();
        assert_eq!(sf.iter().map(|(i, a)| (*i, a.degree().unwrap())).collect::<Vec<_>>(), vec![(1, 1), (2, 1), (3, 2)]);
        assert_eq!(p.max_real_multiplicity(), 2);
        assert_eq!(up(&[-2, 0, 1]).count_real_roots(), 2);
        assert_eq!(up(&[1, 0, 1]).count_real_roots(), 0);
    }

    #[test]
    fn adapted_examples() {
        let a = adapted_check_2d(&parse_poly_in("x1^2*x2 - x2^3", 2).unwrap()).unwrap();
        assert!(a.adapted);
        assert_eq!((a.a1.as_str(), a.a2.as_str()), ("1", "3"));
        assert!(adapted_check_2d(&parse_poly_in("x1^2 + x1*x2^2", 2).unwrap()).unwrap().adapted);
        let b = adapted_check_2d(&parse_poly_in("x1^2 - 2*x1*x2 + x2^2", 2).unwrap()).unwrap();
        assert!(!b.adapted);
        assert_eq!(b.max_real_multiplicity, 2);
        assert!(matches!(adapted_check_2d(&parse_poly_in("x1^3", 2).unwrap()), Err(PolyError::NotApplicable(_))));
    }
}
