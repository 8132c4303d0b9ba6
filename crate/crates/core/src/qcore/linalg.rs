use nalgebra::SymmetricEigen;

use super::{CMatrix, C64};

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `(m + m^dag) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Hermitian eigendecomposition with eigenvalues sorted in non-increasing
/// order. Each eigenvector is phase-fixed so that its largest-magnitude
/// component (first one on ties) is real and positive.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for k in 1..n {
            if col[k].norm() > col[pivot].norm() + 1e-12 {
                pivot = k;
            }
        }
        let phase = if col[pivot].norm() > 0.0 { col[pivot].conj() / col[pivot].norm() } else { C64::new(1.0, 0.0) };
        vectors.set_column(dst, &(col * phase));
    }
    (values, vectors)
}

// Eigenvalues below this are numerical noise once clamped; keeping them
// would inject sqrt(noise) ~ 1e-8 errors into matrix square roots.
const SQRT_FLOOR: f64 = 1e-14;

/// Principal square root of a PSD matrix. Eigenvalues below `-tol` are an
/// error (returned as the offending minimum eigenvalue).
pub fn sqrt_psd(m: &CMatrix, tol: f64) -> Result<CMatrix, f64> {
    let (values, vectors) = eigh(m);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(min);
    }
    let roots: Vec<C64> = values.iter().map(|&v| C64::new(if v > SQRT_FLOOR { v.sqrt() } else { 0.0 }, 0.0)).collect();
    let scaled = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| vectors[(i, j)] * roots[j]);
    Ok(hermitize(&(scaled * vectors.adjoint())))
}

/// Full SVD `m = U diag(s) V^dag` of an `r x c` matrix, singular values in
/// non-increasing order. `U` is `r x r` and `V` is `c x c`, both unitary;
/// `s` has `min(r, c)` entries. Returns `(U, s, V^dag)`.
///
/// One-sided (Hestenes) Jacobi: column pairs are rotated until mutually
/// orthogonal, which keeps small singular values accurate to roundoff.
pub fn svd_sorted(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    if m.nrows() < m.ncols() {
        let (u, s, v_t) = svd_sorted(&m.adjoint());
        return (v_t.adjoint(), s, u.adjoint());
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Rotate the phase of column q so the pair's Gram entry is real,
                // then apply a real Jacobi rotation.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for k in 0..mat.nrows() {
                        let xp = mat[(k, p)];
                        let xq = mat[(k, q)] * phase;
                        mat[(k, p)] = xp * cs - xq * sn;
                        mat[(k, q)] = xp * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..cols).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let mut u = CMatrix::zeros(rows, rows);
    let mut v_sorted = CMatrix::zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    let mut filled = 0;
    for (dst, &src) in order.iter().enumerate() {
        s.push(norms[src]);
        v_sorted.set_column(dst, &v.column(src));
        if norms[src] > scale * 1e-13 && norms[src] > 0.0 {
            u.set_column(dst, &a.column(src).unscale(norms[src]));
            filled = dst + 1;
        }
    }
    complete_orthonormal(&mut u, filled);
    (u, s, v_sorted.adjoint())
}

/// Fills columns `filled..` of `u` with an orthonormal completion of the
/// first `filled` columns.
fn complete_orthonormal(u: &mut CMatrix, filled: usize) {
    let n = u.nrows();
    for col in filled..n {
        let mut best: Option<(f64, nalgebra::DVector<C64>)> = None;
        for e in 0..n {
            let mut cand = nalgebra::DVector::<C64>::zeros(n);
            cand[e] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for k in 0..col {
                    let proj = u.column(k).dotc(&cand);
                    cand -= u.column(k) * proj;
                }
            }
            let norm = cand.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, cand));
            }
        }
        let (norm, cand) = best.expect("n >= 1");
        u.set_column(col, &cand.unscale(norm));
    }
}
