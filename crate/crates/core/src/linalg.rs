//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Matrices that come from direct sums carry a [`BlockLayout`]; products of
//! block-diagonal matrices are then formed block by block.

use std::borrow::Cow;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(k: usize) -> CMat {
    CMat::identity(k, k)
}

pub fn real_diag(entries: &[f64]) -> CMat {
    let mut m = CMat::zeros(entries.len(), entries.len());
    for (i, &x) in entries.iter().enumerate() {
        m[(i, i)] = c(x, 0.0);
    }
    m
}

/// Sizes of the diagonal blocks of a block-diagonal matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout(pub Vec<usize>);

impl BlockLayout {
    pub fn single(k: usize) -> Self {
        BlockLayout(vec![k])
    }

    pub fn uniform(blocks: usize, size: usize) -> Self {
        BlockLayout(vec![size; blocks])
    }

    pub fn dim(&self) -> usize {
        self.0.iter().sum()
    }

    /// `(offset, size)` of each block.
    pub fn ranges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().scan(0usize, |off, &s| {
            let start = *off;
            *off += s;
            Some((start, s))
        })
    }

    pub fn concat(&self, other: &BlockLayout) -> BlockLayout {
        BlockLayout(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    /// Largest modulus of an entry outside the diagonal blocks.
    pub fn off_block_max(&self, x: &CMat) -> f64 {
        let mut owner = vec![0usize; self.dim()];
        for (b, (off, s)) in self.ranges().enumerate() {
            owner[off..off + s].iter_mut().for_each(|o| *o = b);
        }
        let mut worst = 0.0f64;
        for j in 0..x.ncols() {
            for i in 0..x.nrows() {
                if owner[i] != owner[j] {
                    worst = worst.max(x[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// Block-diagonal product `a·b`; entries outside the blocks are taken as zero.
pub fn mul_blocks(a: &CMat, b: &CMat, layout: &BlockLayout) -> CMat {
    if layout.0.len() <= 1 {
        return a * b;
    }
    let k = layout.dim();
    let mut out = CMat::zeros(k, k);
    for (off, s) in layout.ranges() {
        let prod = a.view((off, off), (s, s)) * b.view((off, off), (s, s));
        out.view_mut((off, off), (s, s)).copy_from(&prod);
    }
    out
}

/// Direct sum of two matrices.
pub fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let (p, q) = (a.nrows(), b.nrows());
    let mut out = CMat::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(a);
    out.view_mut((p, p), (q, q)).copy_from(b);
    out
}

pub fn hermitian_part(h: &CMat) -> CMat {
    (h + h.adjoint()).scale(0.5)
}

pub fn hermitian_deviation(h: &CMat) -> f64 {
    (h - h.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors matching `values`.
    pub vectors: CMat,
}

/// Hermitian eigendecomposition. Equal eigenvalues keep the solver's column
/// order, so ties resolve deterministically.
pub fn eigh(h: &CMat) -> Eigh {
    let sym = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..sym.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        sym.eigenvalues[b]
            .partial_cmp(&sym.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(h.nrows(), order.len(), |r, col| sym.eigenvectors[(r, order[col])]);
    Eigh { values, vectors }
}

pub fn min_eigenvalue(h: &CMat) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    eigh(h).values.last().copied().unwrap_or(0.0)
}

pub fn real_min_eigenvalue(h: &RMat) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    let sym = SymmetricEigen::new((h + h.transpose()).scale(0.5));
    sym.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest singular value.
pub fn op_norm(x: &CMat) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Projection onto the span of the columns of an isometry `v` (k×r).
pub fn range_projection(v: &CMat) -> CMat {
    v * v.adjoint()
}

/// Trace weights, either explicit or the normalized trace.
pub fn weights_or_uniform(w: Option<&[f64]>, k: usize) -> Cow<'_, [f64]> {
    match w {
        Some(w) => Cow::Borrowed(w),
        None => Cow::Owned(vec![1.0 / k as f64; k]),
    }
}

pub fn weighted_trace(x: &CMat, w: &[f64]) -> Complex64 {
    (0..x.nrows()).map(|i| x[(i, i)] * w[i]).sum()
}

/// `τ(a·b) = Σ_c w_c Σ_d a[c,d]·b[d,c]` without forming the product.
pub fn trace_of_product(a: &CMat, b: &CMat, w: &[f64]) -> Complex64 {
    let k = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for cc in 0..k {
        let mut row = Complex64::new(0.0, 0.0);
        for d in 0..k {
            row += a[(cc, d)] * b[(d, cc)];
        }
        acc += row * w[cc];
    }
    acc
}

/// `τ(a*·b)` without forming the product.
pub fn trace_of_adjoint_product(a: &CMat, b: &CMat, w: &[f64]) -> Complex64 {
    let k = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for cc in 0..k {
        let col_a = a.column(cc);
        let col_b = b.column(cc);
        let dot: Complex64 = col_a.iter().zip(col_b.iter()).map(|(x, y)| x.conj() * y).sum();
        acc += dot * w[cc];
    }
    acc
}

/// `‖x‖₂ = τ(x*x)^{1/2}`.
pub fn trace_two_norm(x: &CMat, w: &[f64]) -> f64 {
    trace_of_adjoint_product(x, x, w).re.max(0.0).sqrt()
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Haar-distributed k×r isometry (orthonormal columns).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, k: usize, r: usize) -> CMat {
    if r == 0 {
        return CMat::zeros(k, 0);
    }
    let g = gaussian_matrix(rng, k, r);
    let qr = g.qr();
    let q = qr.q();
    let rr = qr.r();
    let mut out = CMat::zeros(k, r);
    for j in 0..r {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..k {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, k: usize) -> CMat {
    random_isometry(rng, k, k)
}

/// Largest entry modulus.
pub fn max_modulus(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest deviation `‖u*u − 1‖_F` over a block layout.
pub fn unitarity_deviation(u: &CMat, layout: &BlockLayout) -> f64 {
    let uu = mul_blocks(&u.adjoint(), u, layout);
    (uu - identity(u.nrows())).norm()
}

/// Eigendecomposition of a normal matrix through the complex Schur form.
pub fn normal_eigen(u: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let k = u.nrows();
    if k == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let schur = nalgebra::Schur::try_new(u.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let values = (0..k).map(|i| t[(i, i)]).collect();
    Ok((values, q))
}

/// JSON encoding of complex matrices: rows of `[re, im]` pairs, row-major.
pub mod cmat_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> std::result::Result<CMat, String> {
        let nr = rows.len();
        let nc = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != nc) {
            return Err("ragged matrix rows".into());
        }
        Ok(CMat::from_fn(nr, nc, |i, j| c(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(ms: &[CMat], s: S) -> std::result::Result<S::Ok, S::Error> {
            ms.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<CMat>, D::Error> {
            let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            all.iter()
                .map(|rows| from_rows(rows).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// JSON encoding of real matrices as nested row arrays.
pub mod rmat_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &RMat, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<RMat, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let nr = rows.len();
        let nc = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != nc) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(RMat::from_fn(nr, nc, |i, j| rows[i][j]))
    }
}
