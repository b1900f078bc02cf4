//! Schur-multiplier channels `T_B(x) = B ∘ x`, their Choi matrices, and
//! factorizations `T_B(x) = (id ⊗ τ)(u (x ⊗ 1) u*)` through a block-diagonal
//! unitary `u = Σ_i e_ii ⊗ u_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cmat_serde, identity, CMat};
use crate::scalar::Scalar;
use crate::unitaries::{gram, CorrelationMatrix, UnitaryTuple};

pub const CHOI_PSD_THRESHOLD: f64 = -1e-10;
pub const FACTORIZATION_TOL: f64 = 1e-10;
/// Dense evaluation of the factorization identity is done up to this `k·m`.
pub const DENSE_CHECK_LIMIT: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchurChannel {
    pub k: usize,
    #[serde(rename = "B")]
    pub b: CorrelationMatrix,
}

impl SchurChannel {
    pub fn new(b: CorrelationMatrix) -> Result<Self> {
        let r = b.report();
        if !r.pass {
            return Err(Error::invalid(format!(
                "multiplier is not a correlation matrix: hermitian {:e}, diagonal {:e}, min eigenvalue {:e}",
                r.hermitian, r.diagonal, r.min_eigenvalue
            )));
        }
        Ok(SchurChannel { k: b.k, b })
    }

    /// No validation, so that invalid multipliers can be analyzed.
    pub fn unchecked(b: CorrelationMatrix) -> Self {
        SchurChannel { k: b.k, b }
    }
}

pub fn schur_apply(ch: &SchurChannel, x: &CMat) -> Result<CMat> {
    if x.nrows() != ch.k || x.ncols() != ch.k {
        return Err(Error::invalid(format!(
            "input is {}×{}, multiplier is {}×{}",
            x.nrows(),
            x.ncols(),
            ch.k,
            ch.k
        )));
    }
    Ok(ch.b.entries.component_mul(x))
}

/// Matrix unit `e_ij` of size `k`.
pub fn matrix_unit(k: usize, i: usize, j: usize) -> CMat {
    let mut e = CMat::zeros(k, k);
    e[(i, j)] = c(1.0, 0.0);
    e
}

/// Unnormalized `Σ_ij e_ij ⊗ T(e_ij)`.
pub fn choi_matrix(ch: &SchurChannel) -> Result<CMat> {
    let k = ch.k;
    let mut choi = CMat::zeros(k * k, k * k);
    for i in 0..k {
        for j in 0..k {
            let image = schur_apply(ch, &matrix_unit(k, i, j))?;
            choi.view_mut((i * k, j * k), (k, k)).copy_from(&image);
        }
    }
    Ok(choi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub k: usize,
    #[serde(with = "cmat_serde")]
    pub choi: CMat,
    pub choi_hermitian: f64,
    pub choi_min_eigenvalue: f64,
    /// Eigenvalues above `1e-10`.
    pub choi_rank: usize,
    /// `‖T(1) − 1‖_F`.
    pub unital_deviation: f64,
    /// `max_ij |tr T(e_ij) − tr e_ij|`.
    pub trace_deviation: f64,
    pub unital: bool,
    pub trace_preserving: bool,
    pub completely_positive: bool,
}

pub fn analyze_channel(ch: &SchurChannel) -> Result<ChannelReport> {
    let k = ch.k;
    let choi = choi_matrix(ch)?;
    let choi_hermitian = linalg::max_modulus(&(&choi - choi.adjoint()));
    let e = linalg::eigh(&linalg::hermitian_part(&choi));
    let choi_min_eigenvalue = e.values.last().copied().unwrap_or(0.0);
    let choi_rank = e.values.iter().filter(|&&x| x > 1e-10).count();
    let unital_deviation = (schur_apply(ch, &identity(k))? - identity(k)).norm();
    let mut trace_deviation = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let image = schur_apply(ch, &matrix_unit(k, i, j))?;
            let expected = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            trace_deviation = trace_deviation.max((image.trace() - expected).norm());
        }
    }
    Ok(ChannelReport {
        k,
        choi_hermitian,
        choi_min_eigenvalue,
        choi_rank,
        unital_deviation,
        trace_deviation,
        unital: unital_deviation <= 1e-12,
        trace_preserving: trace_deviation <= 1e-12,
        completely_positive: choi_hermitian <= 1e-12 && choi_min_eigenvalue >= CHOI_PSD_THRESHOLD,
        choi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCertificate {
    #[serde(rename = "B", with = "cmat_serde")]
    pub b: CMat,
    pub ancilla_dim: usize,
    pub trace_weights: Option<Vec<f64>>,
    /// `max_ij ‖T_B(e_ij) − (id ⊗ τ)(u (e_ij ⊗ 1) u*)‖`.
    pub residual: f64,
    pub dim_lower_bound: Option<u64>,
    pub worst_unit: (usize, usize),
    pub unitarity_deviation: f64,
    /// The identity was also evaluated with the full `km × km` unitary.
    pub dense_checked: bool,
    /// The blocks `u_i` of `u`; not serialized.
    #[serde(skip)]
    pub blocks: Option<UnitaryTuple>,
}

/// `(id ⊗ τ)(u (x ⊗ 1) u*)` with the full block-diagonal `u`.
fn dense_right_side(u: &UnitaryTuple, x: &CMat) -> CMat {
    let (k, m) = (u.count, u.m);
    let w = u.weights();
    let mut big_u = CMat::zeros(k * m, k * m);
    for (i, ui) in u.unitaries.iter().enumerate() {
        big_u.view_mut((i * m, i * m), (m, m)).copy_from(ui);
    }
    let x1 = x.kronecker(&identity(m));
    let y = &big_u * x1 * big_u.adjoint();
    CMat::from_fn(k, k, |a, b| {
        (0..m).map(|cc| y[(a * m + cc, b * m + cc)] * w[cc]).sum()
    })
}

/// Checks the factorization identity on every matrix unit for
/// `u = Σ_i e_ii ⊗ u_i`, whose multiplier is `B = [τ(u_j* u_i)]`.
pub fn build_factorization(u: &UnitaryTuple) -> Result<FactorizationCertificate> {
    let unitarity_deviation = u.unitarity_deviation();
    if unitarity_deviation > FACTORIZATION_TOL {
        return Err(Error::check(format!(
            "block unitary deviates from unitary by {unitarity_deviation:e}"
        )));
    }
    let b = gram(u)?;
    let ch = SchurChannel::new(b.clone())?;
    let k = u.count;
    let w = u.weights();
    let dense = k * u.m <= DENSE_CHECK_LIMIT;
    let mut residual = 0.0f64;
    let mut worst_unit = (0, 0);
    for a in 0..k {
        for bb in 0..k {
            let unit = matrix_unit(k, a, bb);
            let target = schur_apply(&ch, &unit)?;
            // u (e_ab ⊗ 1) u* = e_ab ⊗ u_a u_b*
            let coef = linalg::trace_of_product(&u.unitaries[a], &u.unitaries[bb].adjoint(), &w);
            let mut err = (coef - target[(a, bb)]).norm();
            if dense {
                err = err.max(linalg::op_norm(&(dense_right_side(u, &unit) - &target)));
            }
            if err > residual {
                residual = err;
                worst_unit = (a, bb);
            }
        }
    }
    if residual > FACTORIZATION_TOL {
        return Err(Error::check(format!(
            "factorization residual {residual:e} at e_{}{} exceeds {FACTORIZATION_TOL:e}",
            worst_unit.0 + 1,
            worst_unit.1 + 1
        )));
    }
    Ok(FactorizationCertificate {
        b: b.entries,
        ancilla_dim: u.m,
        trace_weights: u.trace_weights.clone(),
        residual,
        dim_lower_bound: None,
        worst_unit,
        unitarity_deviation,
        dense_checked: dense,
        blocks: Some(u.clone()),
    })
}

/// Denominator `b` of `nt = a/b` in lowest terms: no factorization of
/// `T_{B_t}` runs through an ancilla of dimension below `b`.
pub fn ancilla_bound(n: usize, t: &Scalar) -> Result<u64> {
    if t.lt(&Scalar::ratio(1, n as i64)) || t.gt(&Scalar::integer(1)) {
        return Err(Error::invalid(format!("t = {t} is outside [1/{n}, 1]")));
    }
    let nt = t.mul(&Scalar::integer(n as i64));
    match nt.as_rational() {
        Some(q) => num_traits::ToPrimitive::to_u64(q.denom())
            .ok_or_else(|| Error::invalid("denominator does not fit in 64 bits")),
        None => Err(Error::Infeasible(format!(
            "nt = {nt} is irrational: no finite-dimensional ancilla exists, the channel requires an ancilla of type II₁"
        ))),
    }
}

/// `B ∘ B′`, the multiplier of `T_B ∘ T_{B′}`.
pub fn compose(b1: &CorrelationMatrix, b2: &CorrelationMatrix) -> Result<CorrelationMatrix> {
    if b1.k != b2.k {
        return Err(Error::invalid("multipliers have different sizes"));
    }
    CorrelationMatrix::new(b1.entries.component_mul(&b2.entries))
}
