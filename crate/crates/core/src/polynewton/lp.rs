//! Dense two-phase simplex over exact rationals with Bland's anti-cycling rule.
//!
//! Problems are small (tens of rows, a few hundred columns), so a full tableau
//! is kept and every pivot is exact.

use num_traits::{One, Signed, Zero};

use super::Rat;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat, dual: Vec<Rat> },
    Infeasible,
    Unbounded,
}

/// minimize c·x subject to A x = b, x ≥ 0.
///
/// `dual` solves Bᵀy = c_B for the optimal basis, so y·b equals the optimum and
/// c − Aᵀy ≥ 0 componentwise.
pub fn solve_standard(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert!(b.len() == m && a.iter().all(|r| r.len() == n));

    // Phase 1 tableau: columns 0..n original, n..n+m artificial, last = rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![Rat::zero(); width];
        for j in 0..n {
            row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = Rat::one();
        row[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // objective row: minimize Σ artificials, expressed in reduced form
    let mut obj = vec![Rat::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    t.push(obj);
    if !run_simplex(&mut t, &mut basis, n + m) {
        unreachable!("phase one is bounded below by zero");
    }
    if !t[m][width - 1].is_zero() {
        return LpOutcome::Infeasible;
    }
    // Drive artificials out of the basis where possible; rows that cannot be
    // pivoted are redundant and are dropped.
    let mut keep = vec![true; m];
    for i in 0..m {
        if basis[i] >= n {
            match (0..n).find(|&j| !t[i][j].is_zero()) {
                Some(j) => pivot(&mut t, &mut basis, i, j),
                None => keep[i] = false,
            }
        }
    }
    let rows: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
    let mut t2: Vec<Vec<Rat>> = rows
        .iter()
        .map(|&i| {
            let mut r: Vec<Rat> = t[i][..n].to_vec();
            r.push(t[i][width - 1].clone());
            r
        })
        .collect();
    let mut basis2: Vec<usize> = rows.iter().map(|&i| basis[i]).collect();
    let mut obj = vec![Rat::zero(); n + 1];
    obj[..n].clone_from_slice(c);
    for (k, &bj) in basis2.iter().enumerate() {
        let cb = c[bj].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..=n {
            let v = &cb * &t2[k][j];
            obj[j] -= v;
        }
    }
    t2.push(obj);
    if !run_simplex(&mut t2, &mut basis2, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (k, &bj) in basis2.iter().enumerate() {
        x[bj] = t2[k][n].clone();
    }
    let value: Rat = x.iter().zip(c).map(|(xi, ci)| xi * ci).fold(Rat::zero(), |s, v| s + v);
    let dual = basis_dual(a, c, &rows, &basis2);
    LpOutcome::Optimal { x, value, dual }
}

fn pivot(t: &mut [Vec<Rat>], basis: &mut [usize], r: usize, col: usize) {
    let p = t[r][col].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[col].is_zero() {
            continue;
        }
        let f = row[col].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    basis[r] = col;
}

/// Runs Bland's-rule simplex on a tableau whose last row holds reduced costs
/// and whose last column holds the rhs. Columns ≥ `ncols` never enter.
/// Returns false if unbounded.
fn run_simplex(t: &mut [Vec<Rat>], basis: &mut [usize], ncols: usize) -> bool {
    let m = t.len() - 1;
    let rhs = t[0].len() - 1;
    loop {
        let Some(col) = (0..ncols).find(|&j| t[m][j].is_negative()) else {
            return true;
        };
        let mut best: Option<(usize, Rat)> = None;
        for i in 0..m {
            if t[i][col].is_positive() {
                let ratio = &t[i][rhs] / &t[i][col];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        match best {
            Some((r, _)) => pivot(t, basis, r, col),
            None => return false,
        }
    }
}

/// Solves B_ᵀ y = c_B restricted to the kept rows; dropped rows get y = 0.
fn basis_dual(a: &[Vec<Rat>], c: &[Rat], rows: &[usize], basis: &[usize]) -> Vec<Rat> {
    let k = rows.len();
    // matrix M[j][i] = a[rows[i]][basis[j]]
    let mut mat: Vec<Vec<Rat>> = (0..k)
        .map(|j| {
            let mut r: Vec<Rat> = rows.iter().map(|&i| a[i][basis[j]].clone()).collect();
            r.push(c[basis[j]].clone());
            r
        })
        .collect();
    let sol = gauss_solve(&mut mat, k).expect("optimal basis is nonsingular");
    let mut y = vec![Rat::zero(); a.len()];
    for (idx, &i) in rows.iter().enumerate() {
        y[i] = sol[idx].clone();
    }
    y
}

/// Gaussian elimination on an augmented k×(k+1) system.
pub(crate) fn gauss_solve(mat: &mut [Vec<Rat>], k: usize) -> Option<Vec<Rat>> {
    for col in 0..k {
        let piv = (col..k).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, piv);
        let p = mat[col][col].clone();
        for v in mat[col].iter_mut() {
            *v /= &p;
        }
        let prow = mat[col].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(mat.iter().map(|r| r[k].clone()).collect())
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let pv = m[r][col].clone();
        let prow: Vec<Rat> = m[r].iter().map(|v| v / &pv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, q) in row.iter_mut().zip(&prow) {
                    *v -= &f * q;
                }
            }
        }
        m[r] = prow;
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// A basis of the right null space of a rational matrix with `ncols` columns.
pub fn null_space(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let pv = m[r][col].clone();
        let prow: Vec<Rat> = m[r].iter().map(|v| v / &pv).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, q) in row.iter_mut().zip(&prow) {
                    *v -= &f * q;
                }
            }
        }
        m[r] = prow;
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rat::zero(); ncols];
            v[free] = Rat::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][free].clone();
            }
            v
        })
        .collect()
}
