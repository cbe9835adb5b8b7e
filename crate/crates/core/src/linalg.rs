//! Small dense linear-algebra helpers over `Complex<f64>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

pub type C64 = nalgebra::Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Lift a real matrix to a complex one.
pub fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let mut v: Vec<f64> = sv.iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

pub fn operator_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a square matrix; `+inf` for the empty matrix.
pub fn smallest_singular_value(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sv = singular_values(m);
    if m.nrows() != m.ncols() {
        return 0.0;
    }
    sv.last().copied().unwrap_or(0.0)
}

/// Numerical rank with singular values thresholded relative to the largest.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&top) if top == 0.0 => 0,
        Some(&top) => sv.iter().filter(|&&s| s > rel_tol * top).count(),
    }
}

/// Orthonormal basis (as columns) for the null space of `m`; singular values
/// at or below `rel_tol` times the largest are treated as zero.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    null_space_by(m, |top| rel_tol * top)
}

/// Null space with singular values at or below `abs_tol` treated as zero.
pub fn null_space_abs(m: &CMat, abs_tol: f64) -> CMat {
    null_space_by(m, |_| abs_tol)
}

fn null_space_by(m: &CMat, cut: impl Fn(f64) -> f64) -> CMat {
    let n = m.ncols();
    if m.nrows() == 0 || n == 0 {
        return CMat::identity(n, n);
    }
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<CVec> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| top == 0.0 || s <= cut(top))
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        CMat::zeros(n, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Gram-Schmidt over columns in index order (two passes per column); a
/// column is kept when its residual norm exceeds `rel_tol` times the largest
/// input column norm.
pub fn orthonormal_columns(m: &CMat, rel_tol: f64) -> CMat {
    let scale = (0..m.ncols())
        .map(|j| m.column(j).norm())
        .fold(0.0, f64::max);
    let mut basis: Vec<CVec> = Vec::new();
    if scale == 0.0 {
        return CMat::zeros(m.nrows(), 0);
    }
    for j in 0..m.ncols() {
        let mut v: CVec = m.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let n = v.norm();
        if n > rel_tol * scale {
            basis.push(v / C64::new(n, 0.0));
        }
    }
    if basis.is_empty() {
        CMat::zeros(m.nrows(), 0)
    } else {
        CMat::from_columns(&basis)
    }
}

/// Orthonormal basis of the range of an orthogonal projector by pivoted
/// Gram-Schmidt: at each step the column with the largest residual is taken
/// (ties broken by column index). Stops once every residual is below 1e-6.
pub fn projector_basis(p: &CMat) -> CMat {
    let n = p.ncols();
    let mut resid: Vec<CVec> = (0..n).map(|j| p.column(j).into_owned()).collect();
    let mut basis: Vec<CVec> = Vec::new();
    loop {
        let mut best = None;
        let mut best_norm = 1e-6;
        for (j, v) in resid.iter().enumerate() {
            let nv = v.norm();
            if nv > best_norm {
                best_norm = nv;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        let mut b = resid[j].clone();
        for q in &basis {
            let proj = q.dotc(&b);
            b -= q * proj;
        }
        let nb = b.norm();
        if nb <= 1e-6 {
            resid[j].fill(ZERO);
            continue;
        }
        let b = b / C64::new(nb, 0.0);
        for v in resid.iter_mut() {
            let proj = b.dotc(v);
            *v -= &b * proj;
        }
        basis.push(b);
    }
    if basis.is_empty() {
        CMat::zeros(p.nrows(), 0)
    } else {
        CMat::from_columns(&basis)
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<CVec> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let vecs = if cols.is_empty() {
        CMat::zeros(m.nrows(), 0)
    } else {
        CMat::from_columns(&cols)
    };
    (vals, vecs)
}

/// Column-major flattening.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.iter().copied())
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    m.is_square() && frobenius(&(m.adjoint() * m - CMat::identity(m.nrows(), m.ncols()))) <= tol
}

/// Block-diagonal matrix from square blocks.
pub fn block_diagonal(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols()))
            .copy_from(b);
        off += b.nrows();
    }
    out
}

/// Trace as a complex number.
pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}
