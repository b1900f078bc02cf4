//! Unitaries built from projections, their correlation (Gram) matrices and
//! finite-spectrum approximations.
//!
//! The bridge sends a projection tuple `p_1, …, p_n` to the `2n + 1`
//! unitaries `u_0 = 1`, `u_j = 2p_j − 1`, `u_{n+j} = (u_j + i)/√2`, and back.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cmat_serde, identity, mul_blocks, BlockLayout, CMat, I};
use crate::scalar::Scalar;
use crate::tuples::{self, ProjectionTuple, Provenance};

pub const CORRELATION_HERMITIAN_TOL: f64 = 1e-12;
pub const CORRELATION_DIAGONAL_TOL: f64 = 1e-12;
pub const PSD_THRESHOLD: f64 = -1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryTuple {
    pub count: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_weights: Option<Vec<f64>>,
    #[serde(with = "cmat_serde::vec")]
    pub unitaries: Vec<CMat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<BlockLayout>,
}

impl UnitaryTuple {
    pub fn new(unitaries: Vec<CMat>, trace_weights: Option<Vec<f64>>) -> Result<Self> {
        let count = unitaries.len();
        let m = unitaries.first().map(|u| u.nrows()).unwrap_or(0);
        if unitaries.iter().any(|u| u.nrows() != m || u.ncols() != m) {
            return Err(Error::invalid(format!("all unitaries must be {m}×{m}")));
        }
        if let Some(w) = &trace_weights {
            if w.len() != m || w.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::invalid("trace weights must be positive, one per coordinate"));
            }
        }
        Ok(UnitaryTuple { count, m, trace_weights, unitaries, layout: None })
    }

    pub fn layout(&self) -> BlockLayout {
        self.layout.clone().unwrap_or_else(|| BlockLayout::single(self.m))
    }

    pub fn weights(&self) -> std::borrow::Cow<'_, [f64]> {
        linalg::weights_or_uniform(self.trace_weights.as_deref(), self.m)
    }

    /// `max_j ‖u_j* u_j − 1‖_F`.
    pub fn unitarity_deviation(&self) -> f64 {
        let layout = self.layout();
        self.unitaries
            .iter()
            .map(|u| linalg::unitarity_deviation(u, &layout))
            .fold(0.0, f64::max)
    }
}

/// Hermitian, positive semidefinite, unit diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub k: usize,
    #[serde(with = "cmat_serde")]
    pub entries: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub hermitian: f64,
    pub diagonal: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

impl CorrelationMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::invalid("correlation matrix must be square"));
        }
        Ok(CorrelationMatrix { k: entries.nrows(), entries })
    }

    pub fn report(&self) -> CorrelationReport {
        let hermitian = linalg::max_modulus(&(&self.entries - self.entries.adjoint()));
        let diagonal = (0..self.k)
            .map(|i| (self.entries[(i, i)] - c(1.0, 0.0)).norm())
            .fold(0.0, f64::max);
        let min_eigenvalue = if self.k == 0 {
            0.0
        } else {
            linalg::min_eigenvalue(&linalg::hermitian_part(&self.entries))
        };
        CorrelationReport {
            hermitian,
            diagonal,
            min_eigenvalue,
            pass: hermitian <= CORRELATION_HERMITIAN_TOL
                && diagonal <= CORRELATION_DIAGONAL_TOL
                && min_eigenvalue >= PSD_THRESHOLD,
        }
    }

    pub fn max_abs_diff(&self, other: &CorrelationMatrix) -> f64 {
        linalg::max_modulus(&(&self.entries - &other.entries))
    }
}

/// `u_0 = 1`, `u_j = 2p_j − 1`, `u_{n+j} = (u_j + i)/√2`.
pub fn projections_to_unitaries(t: &ProjectionTuple) -> Result<UnitaryTuple> {
    let check = tuples::verify_tuple(t, t.alpha_f64(), t.tol);
    if check.idempotent > t.tol || check.hermitian > t.tol {
        return Err(Error::check(format!(
            "input is not a projection tuple at tol {:e}: idempotent {:e}, hermitian {:e}",
            t.tol, check.idempotent, check.hermitian
        )));
    }
    let one = identity(t.k);
    let mut unitaries = Vec::with_capacity(2 * t.n + 1);
    unitaries.push(one.clone());
    let symmetries: Vec<CMat> = t.projections.iter().map(|p| p.scale(2.0) - &one).collect();
    let shifted: Vec<CMat> = symmetries
        .iter()
        .map(|u| (u + one.map(|x| x * I)).map(|x| x * FRAC_1_SQRT_2))
        .collect();
    unitaries.extend(symmetries);
    unitaries.extend(shifted);
    let mut out = UnitaryTuple::new(unitaries, t.trace_weights.clone())?;
    out.layout = t.layout.clone();
    let dev = out.unitarity_deviation();
    if dev > 10.0 * t.tol {
        return Err(Error::check(format!("bridge output deviates from unitary by {dev:e}")));
    }
    Ok(out)
}

/// Inverse of the bridge after fixing the gauge `v_j ← v_0* v_j`.
pub fn unitaries_to_projections(v: &UnitaryTuple, tol: f64) -> Result<ProjectionTuple> {
    if v.count.is_multiple_of(2) || v.count < 3 {
        return Err(Error::invalid(format!("expected 2n+1 ≥ 3 unitaries, got {}", v.count)));
    }
    let n = (v.count - 1) / 2;
    let layout = v.layout();
    let w = v.weights();
    let v0_adj = v.unitaries[0].adjoint();
    let gauged: Vec<CMat> = v.unitaries[1..]
        .iter()
        .map(|x| mul_blocks(&v0_adj, x, &layout))
        .collect();
    let one = identity(v.m);
    let mut projections = Vec::with_capacity(n);
    for j in 0..n {
        let vj = &gauged[j];
        let sym = linalg::trace_two_norm(&(vj - vj.adjoint()), &w);
        if sym > tol {
            return Err(Error::check(format!(
                "relation j={}: v_{} is not self-adjoint (‖v − v*‖₂ = {sym:e})",
                j + 1,
                j + 1
            )));
        }
        let expected = (vj + one.map(|x| x * I)).map(|x| x * FRAC_1_SQRT_2);
        let shift = linalg::trace_two_norm(&(&gauged[n + j] - expected), &w);
        if shift > tol {
            return Err(Error::check(format!(
                "relation j={}: v_{} ≠ (v_{} + i)/√2 (‖·‖₂ deviation {shift:e})",
                j + 1,
                n + j + 1,
                j + 1
            )));
        }
        projections.push((vj + &one).map(|x| x * 0.5));
    }
    let mut t = ProjectionTuple::new(projections, v.trace_weights.clone())?
        .with_provenance(Provenance::Input);
    t.layout = v.layout.clone();
    t.tol = tol;
    Ok(t)
}

/// `[τ(u_j* u_i)]_{i,j}`.
pub fn gram(u: &UnitaryTuple) -> Result<CorrelationMatrix> {
    let w = u.weights();
    let k = u.count;
    let mut entries = CMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            entries[(i, j)] = linalg::trace_of_adjoint_product(&u.unitaries[j], &u.unitaries[i], &w);
        }
    }
    let cm = CorrelationMatrix::new(entries)?;
    let r = cm.report();
    if !r.pass {
        return Err(Error::check(format!(
            "Gram matrix is not a correlation matrix: hermitian {:e}, diagonal {:e}, min eigenvalue {:e}",
            r.hermitian, r.diagonal, r.min_eigenvalue
        )));
    }
    Ok(cm)
}

/// The `(2n+1)×(2n+1)` correlation matrix of the bridge applied to a tuple
/// with moments `A_t^{(n)}`.
pub fn build_b(n: usize, t: &Scalar) -> Result<CorrelationMatrix> {
    if n < 2 {
        return Err(Error::invalid(format!("B_t needs n ≥ 2, got {n}")));
    }
    if t.lt(&Scalar::ratio(1, n as i64)) || t.gt(&Scalar::integer(1)) {
        return Err(Error::invalid(format!("t = {t} is outside [1/{n}, 1]")));
    }
    let tf = t.to_f64();
    let r = crate::moments::off_diagonal_floor(n, t).to_f64();
    let s = 2.0 * tf - 1.0;
    let d1 = 4.0 * (r - tf) + 1.0;
    let d2 = 2.0 * (r - tf) + 1.0;
    let x = c(s, 0.0);
    let y = c(s, 1.0) * FRAC_1_SQRT_2;
    let c_diag = c(1.0, s) * FRAC_1_SQRT_2;
    let c_all = c(d1, s) * FRAC_1_SQRT_2;
    let dim = 2 * n + 1;
    let mut b = CMat::zeros(dim, dim);
    b[(0, 0)] = c(1.0, 0.0);
    for a in 0..n {
        b[(1 + a, 0)] = x;
        b[(0, 1 + a)] = x.conj();
        b[(1 + n + a, 0)] = y;
        b[(0, 1 + n + a)] = y.conj();
        for bb in 0..n {
            // E has zero diagonal and ones elsewhere
            let (e1, e2, cc) = if a == bb {
                (c(1.0, 0.0), c(1.0, 0.0), c_diag)
            } else {
                (c(d1, 0.0), c(d2, 0.0), c_all)
            };
            b[(1 + a, 1 + bb)] = e1;
            b[(1 + n + a, 1 + n + bb)] = e2;
            // C sits below D1, C* above D2
            b[(1 + n + a, 1 + bb)] = cc;
            b[(1 + bb, 1 + n + a)] = cc.conj();
        }
    }
    CorrelationMatrix::new(b)
}

/// The 3×3 correlation matrix of `1, 2p − 1, (2p − 1 + i)/√2` for a
/// projection `p` of trace `α`, with `γ = 2α − 1`.
pub fn build_b3(alpha: &Scalar) -> Result<CorrelationMatrix> {
    if !alpha.gt(&Scalar::integer(0)) || !alpha.lt(&Scalar::integer(1)) {
        return Err(Error::invalid(format!("α = {alpha} must lie in (0, 1)")));
    }
    let g = 2.0 * alpha.to_f64() - 1.0;
    let h = FRAC_1_SQRT_2;
    let rows = [
        [c(1.0, 0.0), c(g, 0.0), c(g, -1.0) * h],
        [c(g, 0.0), c(1.0, 0.0), c(1.0, -g) * h],
        [c(g, 1.0) * h, c(1.0, g) * h, c(1.0, 0.0)],
    ];
    CorrelationMatrix::new(CMat::from_fn(3, 3, |i, j| rows[i][j]))
}

/// The three unitaries above in the two-point algebra with weights `(α, 1 − α)`.
pub fn two_point_unitaries(alpha: f64) -> Result<UnitaryTuple> {
    let p = linalg::real_diag(&[1.0, 0.0]);
    let t = ProjectionTuple::new(vec![p], Some(vec![alpha, 1.0 - alpha]))?;
    projections_to_unitaries(&t)
}

/// Repeats the first row and column, as when appending `u_{k+1} = u_1`.
pub fn pad_correlation(cm: &CorrelationMatrix) -> Result<CorrelationMatrix> {
    let k = cm.k;
    if k == 0 {
        return Err(Error::invalid("cannot pad an empty matrix"));
    }
    let mut out = CMat::zeros(k + 1, k + 1);
    out.view_mut((0, 0), (k, k)).copy_from(&cm.entries);
    for j in 0..k {
        out[(k, j)] = cm.entries[(0, j)];
        out[(j, k)] = cm.entries[(j, 0)];
    }
    out[(k, k)] = c(1.0, 0.0);
    CorrelationMatrix::new(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub m: usize,
    /// `pvm[k − 1]` is the spectral projection for `ω^k`, `k = 1, …, m`.
    #[serde(with = "cmat_serde::vec")]
    pub pvm: Vec<CMat>,
    #[serde(with = "cmat_serde")]
    pub v: CMat,
    /// `‖u − v‖` (operator norm).
    pub distance: f64,
    /// `2 sin(π/(2m))`.
    pub bound: f64,
    /// `‖Σ p_k − 1‖_F`.
    pub completeness: f64,
    /// `max_{k≠l} ‖p_k p_l‖_F`.
    pub orthogonality: f64,
}

/// Sector index in `1..=m` of the eigenphase `θ`: nearest center `2πk/m`,
/// ties to the lower `k`, and phase zero labelled `m`.
pub fn sector_of(theta: f64, m: usize) -> usize {
    let x = theta.rem_euclid(2.0 * PI) * m as f64 / (2.0 * PI);
    let k = (x - 0.5).ceil() as i64;
    let k = k.rem_euclid(m as i64) as usize;
    if k == 0 {
        m
    } else {
        k
    }
}

/// Rounds every eigenvalue of `u` to the nearest `m`-th root of unity.
pub fn discretize_unitary(u: &CMat, m: usize, tol: f64) -> Result<Discretization> {
    if m < 2 {
        return Err(Error::invalid(format!("m must be at least 2, got {m}")));
    }
    let k = u.nrows();
    let dev = linalg::unitarity_deviation(u, &BlockLayout::single(k));
    if dev > tol {
        return Err(Error::invalid(format!("input deviates from unitary by {dev:e}")));
    }
    let (values, q) = linalg::normal_eigen(u)?;
    let mut pvm = vec![CMat::zeros(k, k); m];
    for (l, lambda) in values.iter().enumerate() {
        let sector = sector_of(lambda.arg(), m);
        let col = q.column(l);
        pvm[sector - 1] += col * col.adjoint();
    }
    let omega = Complex64::from_polar(1.0, 2.0 * PI / m as f64);
    let mut v = CMat::zeros(k, k);
    for (idx, p) in pvm.iter().enumerate() {
        v += p.map(|x| x * omega.powu(idx as u32 + 1));
    }
    let completeness = (pvm.iter().fold(CMat::zeros(k, k), |a, p| a + p) - identity(k)).norm();
    let mut orthogonality = 0.0f64;
    for a in 0..m {
        for b in (a + 1)..m {
            orthogonality = orthogonality.max((&pvm[a] * &pvm[b]).norm());
        }
    }
    Ok(Discretization {
        m,
        distance: linalg::op_norm(&(u - &v)),
        bound: 2.0 * (PI / (2.0 * m as f64)).sin(),
        pvm,
        v,
        completeness,
        orthogonality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments;
    use crate::tuples::{seed, SeedKind};

    #[test]
    fn bridge_of_single_projection() {
        let p = linalg::real_diag(&[1.0, 0.0]);
        let t = ProjectionTuple::new(vec![p], None).unwrap();
        let u = projections_to_unitaries(&t).unwrap();
        assert_eq!(u.count, 3);
        assert_eq!(u.unitaries[1], linalg::real_diag(&[1.0, -1.0]));
        let h = FRAC_1_SQRT_2;
        assert!((u.unitaries[2][(0, 0)] - c(h, h)).norm() < 1e-15);
        assert!((u.unitaries[2][(1, 1)] - c(-h, h)).norm() < 1e-15);
        let zero = ProjectionTuple::new(vec![CMat::zeros(1, 1)], None).unwrap();
        let u = projections_to_unitaries(&zero).unwrap();
        assert_eq!(u.unitaries[1][(0, 0)], c(-1.0, 0.0));
        assert!((u.unitaries[2][(0, 0)] - c(-h, h)).norm() < 1e-15);
    }

    #[test]
    fn bridge_round_trip_and_gauge() {
        let t = seed(SeedKind::PlanarHalf, 5, &Scalar::ratio(5, 2)).unwrap();
        let u = projections_to_unitaries(&t).unwrap();
        let back = unitaries_to_projections(&u, 1e-10).unwrap();
        for (a, b) in back.projections.iter().zip(&t.projections) {
            assert!(linalg::max_modulus(&(a - b)) < 1e-12);
        }
        let phase = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.8)]);
        let mut rotated = u.clone();
        for x in rotated.unitaries.iter_mut() {
            *x = &phase * &*x;
        }
        let back = unitaries_to_projections(&rotated, 1e-10).unwrap();
        for (a, b) in back.projections.iter().zip(&t.projections) {
            assert!(linalg::max_modulus(&(a - b)) < 1e-12);
        }
    }

    #[test]
    fn bridge_reports_broken_relation() {
        let t = seed(SeedKind::PlanarHalf, 3, &Scalar::ratio(3, 2)).unwrap();
        let mut u = projections_to_unitaries(&t).unwrap();
        u.unitaries[4][(0, 0)] += c(1e-3, 0.0);
        let err = unitaries_to_projections(&u, 1e-10).unwrap_err();
        assert!(err.to_string().contains("relation j=1"), "{err}");
    }

    #[test]
    fn gram_examples() {
        let u = UnitaryTuple::new(vec![identity(2), linalg::real_diag(&[1.0, -1.0])], None).unwrap();
        let g = gram(&u).unwrap();
        assert!(linalg::max_modulus(&(g.entries.clone() - identity(2))) < 1e-15);
        let l1 = Complex64::from_polar(1.0, 0.3);
        let l2 = Complex64::from_polar(1.0, -1.1);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![l1, l2]));
        let u = UnitaryTuple::new(vec![identity(2), d], None).unwrap();
        let g = gram(&u).unwrap();
        assert!((g.entries[(1, 0)] - (l1 + l2) / 2.0).norm() < 1e-15);
    }

    #[test]
    fn build_b_examples() {
        let b = build_b(5, &Scalar::ratio(2, 5)).unwrap();
        assert_eq!(b.entries[(1, 1)], c(1.0, 0.0));
        assert!((b.entries[(1, 2)].re + 0.2).abs() < 1e-15);
        assert!((b.entries[(1, 0)].re + 0.2).abs() < 1e-15);
        let r = b.report();
        assert!(r.pass, "{r:?}");
        let ones = build_b(5, &Scalar::integer(1)).unwrap();
        assert!((1..=5).all(|i| (1..=5).all(|j| ones.entries[(i, j)] == c(1.0, 0.0))));
        for t in [Scalar::ratio(1, 3), Scalar::ratio(2, 3), Scalar::integer(1)] {
            let b = build_b(3, &t).unwrap();
            assert!((0..7).all(|i| b.entries[(i, i)] == c(1.0, 0.0)));
        }
        assert!(build_b(5, &Scalar::ratio(1, 10)).is_err());
    }

    #[test]
    fn build_b_matches_gram_for_orthogonal_tuple() {
        // t = 1/n: orthogonal projections with all off-diagonal moments zero
        let t = moments::realize_ats(4, &Scalar::ratio(1, 4), &Scalar::integer(0), &Default::default()).unwrap();
        let g = gram(&projections_to_unitaries(&t).unwrap()).unwrap();
        let b = build_b(4, &Scalar::ratio(1, 4)).unwrap();
        assert!(g.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn build_b3_examples() {
        let b = build_b3(&Scalar::ratio(1, 2)).unwrap();
        assert!((b.entries[(0, 2)] - c(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(b.report().pass);
        for a in [0.1, 0.25, 0.5, 0.9] {
            let g = gram(&two_point_unitaries(a).unwrap()).unwrap();
            let b = build_b3(&Scalar::real(a)).unwrap();
            assert!(g.max_abs_diff(&b) < 1e-15);
        }
        assert!(build_b3(&Scalar::integer(1)).is_err());
    }

    #[test]
    fn padding() {
        let one = CorrelationMatrix::new(identity(1)).unwrap();
        let p = pad_correlation(&one).unwrap();
        assert!(p.entries.iter().all(|x| *x == c(1.0, 0.0)));
        let b = build_b(5, &Scalar::ratio(2, 5)).unwrap();
        let p = pad_correlation(&pad_correlation(&b).unwrap()).unwrap();
        assert_eq!(p.k, 13);
        assert_eq!(p.entries.row(11), p.entries.row(12));
        assert!(p.report().pass);
    }

    #[test]
    fn sector_rule() {
        assert_eq!(sector_of(0.0, 4), 4);
        assert_eq!(sector_of(PI / 2.0, 4), 1);
        assert_eq!(sector_of(PI / 4.0, 4), 4);
        assert_eq!(sector_of(-PI / 2.0, 4), 3);
        assert_eq!(sector_of(PI, 2), 1);
    }

    #[test]
    fn discretize_examples() {
        let d = discretize_unitary(&identity(3), 4, 1e-10).unwrap();
        assert!(linalg::max_modulus(&(d.v.clone() - identity(3))) < 1e-15);
        assert!(d.pvm[..3].iter().all(|p| linalg::max_modulus(p) < 1e-15));
        assert!(linalg::max_modulus(&(d.pvm[3].clone() - identity(3))) < 1e-15);
        let z = Complex64::from_polar(1.0, PI / 8.0);
        let u = CMat::from_element(1, 1, z);
        let d = discretize_unitary(&u, 8, 1e-10).unwrap();
        assert!(d.distance <= d.bound + 1e-15);
        assert!(discretize_unitary(&linalg::real_diag(&[2.0]), 4, 1e-10).is_err());
    }
}
