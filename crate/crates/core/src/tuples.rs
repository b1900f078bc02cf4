//! Tuples of projections with prescribed scalar sum `Σ p_i = α·1`.
//!
//! Construction routes: explicit seeds, the linear reflection `T`
//! (`p ↦ 1 − p`, `α ↦ n − α`), the hyperbolic reflection `S`
//! (`α ↦ α/(α − 1)`), and an alternating top-eigenspace solver. Tuples can be
//! symmetrized over a permutation group so that their second-order moments
//! become pair independent.

use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cmat_serde, eigh, identity, mul_blocks, BlockLayout, CMat};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_RESIDUAL_TARGET: f64 = 1e-8;
pub const DEFAULT_PROPAGATION_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Seed,
    FunctorT,
    FunctorS,
    Solver,
    Symmetrized,
    DirectSum,
    Input,
}

/// Maximum deviations recorded on a tuple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleResidual {
    pub hermitian: f64,
    pub idempotent: f64,
    pub sum: Option<f64>,
}

impl TupleResidual {
    pub fn max(&self) -> f64 {
        self.hermitian.max(self.idempotent).max(self.sum.unwrap_or(0.0))
    }
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_provenance() -> Provenance {
    Provenance::Input
}

/// `n` Hermitian idempotent `k×k` matrices with a faithful trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionTuple {
    pub n: usize,
    pub k: usize,
    /// Positive weights summing to one; absent means the normalized trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_weights: Option<Vec<f64>>,
    #[serde(with = "cmat_serde::vec")]
    pub projections: Vec<CMat>,
    /// The scalar `α` with `Σ p_i = α·1`, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Scalar>,
    /// Block-diagonal structure shared by all members.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<BlockLayout>,
    #[serde(default = "default_provenance")]
    pub provenance: Provenance,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<TupleResidual>,
    /// Source of a `T` reflection, so that reflecting twice is exact.
    #[serde(skip)]
    reflected_from: Option<Arc<ProjectionTuple>>,
}

impl PartialEq for ProjectionTuple {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.trace_weights == other.trace_weights
            && self.projections == other.projections
            && self.alpha == other.alpha
            && self.layout == other.layout
    }
}

impl ProjectionTuple {
    /// Wraps matrices as a tuple after checking shapes, weights and block
    /// structure. Projection properties are checked by [`Self::validate`].
    pub fn new(projections: Vec<CMat>, trace_weights: Option<Vec<f64>>) -> Result<Self> {
        let n = projections.len();
        let k = projections.first().map(|p| p.nrows()).unwrap_or(0);
        let t = ProjectionTuple {
            n,
            k,
            trace_weights,
            projections,
            alpha: None,
            layout: None,
            provenance: Provenance::Input,
            tol: DEFAULT_TOL,
            residual: None,
            reflected_from: None,
        };
        t.check_shape()?;
        Ok(t)
    }

    pub fn with_alpha(mut self, alpha: Scalar) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_layout(mut self, layout: BlockLayout) -> Result<Self> {
        self.layout = Some(layout);
        self.check_shape()?;
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.projections.len() != self.n {
            return Err(Error::invalid("n does not match the number of projections"));
        }
        for (i, p) in self.projections.iter().enumerate() {
            if p.nrows() != self.k || p.ncols() != self.k {
                return Err(Error::invalid(format!("projection {i} is not {0}×{0}", self.k)));
            }
        }
        if let Some(w) = &self.trace_weights {
            if w.len() != self.k {
                return Err(Error::invalid("trace weight vector has the wrong length"));
            }
            if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(Error::invalid("trace weights must be strictly positive"));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("trace weights sum to {total}, not 1")));
            }
        }
        if let Some(layout) = &self.layout {
            if layout.dim() != self.k {
                return Err(Error::invalid("block layout does not cover the matrix dimension"));
            }
            for (i, p) in self.projections.iter().enumerate() {
                if layout.off_block_max(p) > 0.0 {
                    return Err(Error::invalid(format!("projection {i} violates the block layout")));
                }
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> BlockLayout {
        self.layout.clone().unwrap_or_else(|| BlockLayout::single(self.k))
    }

    pub fn weights(&self) -> std::borrow::Cow<'_, [f64]> {
        linalg::weights_or_uniform(self.trace_weights.as_deref(), self.k)
    }

    pub fn sum(&self) -> CMat {
        self.projections
            .iter()
            .fold(CMat::zeros(self.k, self.k), |acc, p| acc + p)
    }

    /// `α` from the trace of the sum, `Re tr(Σp)/k`.
    pub fn estimated_alpha(&self) -> f64 {
        if self.k == 0 {
            return 0.0;
        }
        let s = self.sum();
        (0..self.k).map(|i| s[(i, i)].re).sum::<f64>() / self.k as f64
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha
            .as_ref()
            .map(|a| a.to_f64())
            .unwrap_or_else(|| self.estimated_alpha())
    }

    /// Measures the projection and sum deviations and records them.
    pub fn validate(&mut self) -> Result<TupleResidual> {
        self.check_shape()?;
        let report = verify_tuple(self, self.alpha_f64(), self.tol);
        let res = TupleResidual {
            hermitian: report.hermitian,
            idempotent: report.idempotent,
            sum: Some(report.sum),
        };
        self.residual = Some(res);
        if report.hermitian > self.tol || report.idempotent > self.tol {
            return Err(Error::check(format!(
                "not a projection tuple at tol {:e}: hermitian {:e}, idempotent {:e}",
                self.tol, report.hermitian, report.idempotent
            )));
        }
        Ok(res)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedKind {
    /// Diagonal 0/1 projections, each coordinate covered exactly `α` times.
    IntegerCover,
    /// Rank-one projections in dimension 2 onto lines at angles `jπ/n`.
    PlanarHalf,
}

pub fn seed(kind: SeedKind, n: usize, alpha: &Scalar) -> Result<ProjectionTuple> {
    let tuple = match kind {
        SeedKind::IntegerCover => {
            let a = alpha
                .as_rational()
                .filter(|q| q.is_integer())
                .and_then(|q| num_traits::ToPrimitive::to_i64(q.numer()))
                .filter(|&a| a >= 0 && a as usize <= n)
                .ok_or_else(|| Error::invalid(format!("integer cover needs α ∈ {{0,…,{n}}}, got {alpha}")))?
                as usize;
            if n == 0 {
                return Err(Error::invalid("integer cover needs n ≥ 1"));
            }
            let projections = (0..n)
                .map(|i| {
                    let mut diag = vec![0.0; n];
                    for j in 0..a {
                        diag[(i + j) % n] = 1.0;
                    }
                    linalg::real_diag(&diag)
                })
                .collect();
            ProjectionTuple::new(projections, None)?
        }
        SeedKind::PlanarHalf => {
            if n < 2 {
                return Err(Error::invalid("planar-half seed needs n ≥ 2"));
            }
            let half = Scalar::ratio(n as i64, 2);
            if *alpha != half {
                return Err(Error::invalid(format!("planar-half seed has α = n/2 = {half}, got {alpha}")));
            }
            let projections = (0..n)
                .map(|j| {
                    let theta = j as f64 * std::f64::consts::PI / n as f64;
                    let (s, co) = theta.sin_cos();
                    CMat::from_row_slice(2, 2, &[c(co * co, 0.0), c(co * s, 0.0), c(co * s, 0.0), c(s * s, 0.0)])
                })
                .collect();
            ProjectionTuple::new(projections, None)?
        }
    };
    let mut tuple = tuple.with_alpha(alpha.clone()).with_provenance(Provenance::Seed);
    tuple.validate()?;
    Ok(tuple)
}

/// Linear reflection `p_i ↦ 1 − p_i`; the scalar goes to `n − α`.
///
/// Reflecting a reflection returns the original tuple bit for bit.
pub fn functor_t(t: &ProjectionTuple) -> ProjectionTuple {
    if let Some(orig) = &t.reflected_from {
        return (**orig).clone();
    }
    let one = identity(t.k);
    let projections = t.projections.iter().map(|p| &one - p).collect();
    let alpha = t
        .alpha
        .as_ref()
        .map(|a| Scalar::integer(t.n as i64).sub(a));
    let mut out = ProjectionTuple {
        n: t.n,
        k: t.k,
        trace_weights: t.trace_weights.clone(),
        projections,
        alpha,
        layout: t.layout.clone(),
        provenance: Provenance::FunctorT,
        tol: t.tol,
        residual: t.residual,
        reflected_from: None,
    };
    out.reflected_from = Some(Arc::new(t.clone()));
    out
}

/// Diagnostics of the hyperbolic reflection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctorSReport {
    pub alpha_in: f64,
    pub alpha_out: Scalar,
    /// `max_i ‖V_i V_i* − P_i‖_F`.
    pub partial_isometry_deviation: f64,
    /// `‖Q² − Q‖_F`.
    pub q_idempotency_deviation: f64,
    /// `(1 − 1/α)·Σ rank(p_i)`.
    pub predicted_rank: f64,
    pub trace_q: f64,
    pub rank_q: usize,
    /// `‖Σ Q_i − α/(α−1)·Q‖_F` before compression.
    pub uncompressed_residual: f64,
    /// `‖Σ Q'_i − α/(α−1)·1‖_F` after compression.
    pub residual: f64,
}

/// Hyperbolic reflection: from `Σ P_i = α` with `α > 1`, build
/// `V_i = (α² − α)^{-1/2} P_i [−P_1 ⋯ α − P_i ⋯ −P_n]`, `Q_i = V_i* V_i`,
/// and compress to the range of `Q = diag(P_i) − α^{-1}[P_i P_j]`, where
/// `Σ Q_i = α/(α−1)·Q`.
pub fn functor_s(t: &ProjectionTuple) -> Result<(ProjectionTuple, FunctorSReport)> {
    let (n, k) = (t.n, t.k);
    let alpha = t.alpha.clone().unwrap_or_else(|| Scalar::real(t.estimated_alpha()));
    let a = alpha.to_f64();
    if !(a > 1.0) {
        return Err(Error::invalid(format!("hyperbolic reflection needs α > 1, got {alpha}")));
    }
    let input = verify_tuple(t, a, t.tol);
    let tol = t.tol.max(10.0 * input.max_deviation());
    if input.sum > tol {
        return Err(Error::check(format!(
            "input does not sum to α·1: deviation {:e}",
            input.sum
        )));
    }
    let nk = n * k;
    let scale = (a * a - a).powf(-0.5);
    let layout = t.layout();
    let products: Vec<Vec<CMat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| mul_blocks(&t.projections[i], &t.projections[j], &layout))
                .collect()
        })
        .collect();

    let mut q_parts = Vec::with_capacity(n);
    let mut pi_dev = 0.0f64;
    for i in 0..n {
        let mut v = CMat::zeros(k, nk);
        for j in 0..n {
            let block = if i == j {
                // P_i(α − P_i)
                t.projections[i].scale(a) - &products[i][i]
            } else {
                -&products[i][j]
            };
            v.view_mut((0, j * k), (k, k)).copy_from(&block.scale(scale));
        }
        pi_dev = pi_dev.max((&v * v.adjoint() - &t.projections[i]).norm());
        q_parts.push(v.adjoint() * &v);
    }
    if pi_dev > tol.max(1e-9) {
        return Err(Error::check(format!("V_i V_i* deviates from P_i by {pi_dev:e}")));
    }

    let mut q = CMat::zeros(nk, nk);
    for i in 0..n {
        for j in 0..n {
            let mut block = products[i][j].scale(-1.0 / a);
            if i == j {
                block += &t.projections[i];
            }
            q.view_mut((i * k, j * k), (k, k)).copy_from(&block);
        }
    }
    let q_idem = (&q * &q - &q).norm();
    if q_idem > tol.max(1e-9) {
        return Err(Error::check(format!(
            "Q is not idempotent (deviation {q_idem:e}); the input is not a valid tuple"
        )));
    }
    let rank_sum: f64 = t
        .projections
        .iter()
        .map(|p| (0..k).map(|i| p[(i, i)].re).sum::<f64>().round())
        .sum();
    let predicted_rank = (1.0 - 1.0 / a) * rank_sum;
    let trace_q: f64 = (0..nk).map(|i| q[(i, i)].re).sum();
    let e = eigh(&q);
    let rank_q = e.values.iter().filter(|&&x| x > 0.5).count();
    if (rank_q as f64 - predicted_rank).abs() > 0.5 {
        return Err(Error::check(format!(
            "rank(Q) = {rank_q} but the trace identity predicts {predicted_rank}"
        )));
    }

    let alpha_out = alpha.hyperbolic_image()?;
    let a_out = alpha_out.to_f64();
    let sum_q = q_parts.iter().fold(CMat::zeros(nk, nk), |acc, x| acc + x);
    let uncompressed_residual = (&sum_q - q.scale(a_out)).norm();

    let basis = e.vectors.columns(0, rank_q).into_owned();
    let compressed: Vec<CMat> = q_parts
        .iter()
        .map(|qi| linalg::hermitian_part(&(basis.adjoint() * qi * &basis)))
        .collect();
    let mut out = ProjectionTuple::new(compressed, None)?
        .with_alpha(alpha_out.clone())
        .with_provenance(Provenance::FunctorS);
    out.tol = t.tol;
    let check = verify_tuple(&out, a_out, tol);
    out.residual = Some(TupleResidual {
        hermitian: check.hermitian,
        idempotent: check.idempotent,
        sum: Some(check.sum),
    });
    let report = FunctorSReport {
        alpha_in: a,
        alpha_out,
        partial_isometry_deviation: pi_dev,
        q_idempotency_deviation: q_idem,
        predicted_rank,
        trace_q,
        rank_q,
        uncompressed_residual,
        residual: check.sum,
    };
    Ok((out, report))
}

/// Rank profile `r_i = rank(p_i)` of a candidate tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankVector(pub Vec<usize>);

impl RankVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Ranks as even as possible, larger ranks first.
    pub fn balanced(n: usize, total: usize) -> Self {
        let (q, r) = (total / n, total % n);
        RankVector((0..n).map(|i| q + usize::from(i < r)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceObstruction {
    /// `α·k` is not an integer, so no ranks can add up to it.
    NonIntegerTrace {
        distance: f64,
        certified_lower_bound: Option<f64>,
    },
    /// `α·k` is outside `[0, n·k]`.
    OutOfRange { total: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RankFeasibility {
    Feasible { total: usize, rank_vectors: Vec<RankVector> },
    Infeasible { n: usize, k: usize, alpha: Scalar, obstruction: TraceObstruction },
}

impl RankFeasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, RankFeasibility::Feasible { .. })
    }
}

const MAX_RANK_VECTORS: usize = 32;

fn partitions(n: usize, total: usize, max_part: usize, out: &mut Vec<RankVector>, cur: &mut Vec<usize>) {
    if out.len() >= MAX_RANK_VECTORS {
        return;
    }
    if cur.len() == n {
        if total == 0 {
            out.push(RankVector(cur.clone()));
        }
        return;
    }
    let slots = n - cur.len();
    let hi = max_part.min(total);
    for part in (0..=hi).rev() {
        if part * slots < total {
            break;
        }
        cur.push(part);
        partitions(n, total - part, part, out, cur);
        cur.pop();
    }
}

/// Trace test `Σ rank(p_i) = α·k` for `n` projections in dimension `k`.
///
/// Feasible answers list the balanced rank vector first, followed by other
/// non-increasing vectors (at most 32 in total).
pub fn rank_feasible(n: usize, alpha: &Scalar, k: usize) -> RankFeasibility {
    let infeasible = |obstruction| RankFeasibility::Infeasible {
        n,
        k,
        alpha: alpha.clone(),
        obstruction,
    };
    let dist = alpha.integer_distance(k as u64);
    if !dist.is_integer() {
        return infeasible(TraceObstruction::NonIntegerTrace {
            distance: dist.value,
            certified_lower_bound: dist.certified_lower_bound,
        });
    }
    let total_q = alpha.mul(&Scalar::integer(k as i64));
    let total = total_q.to_f64();
    if total < 0.0 || total > (n * k) as f64 {
        return infeasible(TraceObstruction::OutOfRange { total });
    }
    let total = total.round() as usize;
    let balanced = RankVector::balanced(n, total);
    let mut rest = Vec::new();
    partitions(n, total, k, &mut rest, &mut Vec::new());
    let mut rank_vectors = vec![balanced.clone()];
    rank_vectors.extend(rest.into_iter().filter(|r| *r != balanced).take(MAX_RANK_VECTORS - 1));
    RankFeasibility::Feasible { total, rank_vectors }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Maximum number of full sweeps per restart.
    pub max_iterations: usize,
    pub restarts: usize,
    pub rng_seed: u64,
    pub residual_target: f64,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 5000,
            restarts: 50,
            rng_seed: 0,
            residual_target: DEFAULT_RESIDUAL_TARGET,
            tol: DEFAULT_TOL,
        }
    }
}

impl SolverConfig {
    fn check(&self) -> Result<()> {
        if !(self.residual_target > 0.0) {
            return Err(Error::invalid("residual_target must be positive"));
        }
        if self.restarts < 1 {
            return Err(Error::invalid("at least one restart is required"));
        }
        Ok(())
    }

    /// Seed of restart `index`, independent across restarts.
    pub fn restart_seed(&self, index: usize) -> u64 {
        // splitmix64 step
        let mut z = self
            .rng_seed
            .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub success: bool,
    /// `‖Σ p_i − α·1‖_F` of the best tuple.
    pub best_residual: f64,
    pub iterations: usize,
    pub restart_index: usize,
    pub restarts_run: usize,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub tuple: ProjectionTuple,
    pub report: SolveReport,
}

impl SolveResult {
    pub fn into_result(self) -> Result<ProjectionTuple> {
        if self.report.success {
            Ok(self.tuple)
        } else {
            Err(Error::check(format!(
                "solver failed: best residual {:e} after {} restarts (best at restart {}, {} sweeps)",
                self.report.best_residual,
                self.report.restarts_run,
                self.report.restart_index,
                self.report.iterations
            )))
        }
    }
}

fn top_eigenspace_projection(m: &CMat, rank: usize) -> CMat {
    let k = m.nrows();
    if rank == 0 {
        return CMat::zeros(k, k);
    }
    if rank == k {
        return identity(k);
    }
    let e = eigh(m);
    let v = e.vectors.columns(0, rank).into_owned();
    linalg::hermitian_part(&linalg::range_projection(&v))
}

fn sum_residual(ps: &[CMat], alpha: f64) -> f64 {
    let k = ps[0].nrows();
    let s = ps.iter().fold(CMat::zeros(k, k), |acc, p| acc + p);
    (s - identity(k).scale(alpha)).norm()
}

fn run_restart(n: usize, alpha: f64, k: usize, ranks: &RankVector, cfg: &SolverConfig, index: usize) -> (Vec<CMat>, f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.restart_seed(index));
    let mut ps: Vec<CMat> = ranks
        .0
        .iter()
        .map(|&r| match r {
            0 => CMat::zeros(k, k),
            r if r == k => identity(k),
            r => linalg::range_projection(&linalg::random_isometry(&mut rng, k, r)),
        })
        .collect();
    let target = identity(k).scale(alpha);
    let mut total = ps.iter().fold(CMat::zeros(k, k), |acc, p| acc + p);
    let mut residual = sum_residual(&ps, alpha);
    let mut best = residual;
    let mut since_progress = 0usize;
    let mut sweeps = 0usize;
    while sweeps < cfg.max_iterations && residual > cfg.residual_target {
        for i in 0..n {
            let others = &total - &ps[i];
            let updated = top_eigenspace_projection(&(&target - &others), ranks.0[i]);
            total = others + &updated;
            ps[i] = updated;
        }
        sweeps += 1;
        // recompute from scratch to avoid drift in the running sum
        total = ps.iter().fold(CMat::zeros(k, k), |acc, p| acc + p);
        residual = (&total - &target).norm();
        if residual < best * (1.0 - 1e-9) {
            best = residual;
            since_progress = 0;
        } else {
            since_progress += 1;
            if since_progress > 200 {
                break;
            }
        }
    }
    (ps, residual, sweeps)
}

/// Alternating top-eigenspace solver for `Σ p_i = α·1` with `rank(p_i) = r_i`.
///
/// Each step replaces `p_i` by the spectral projection onto the top `r_i`
/// eigenvectors of `α·1 − Σ_{j≠i} p_j`, which minimizes the Frobenius
/// residual in `p_i`, so residuals never increase within a restart. Restarts
/// begin from random tuples seeded deterministically by `cfg.rng_seed`.
pub fn solve(n: usize, alpha: &Scalar, k: usize, ranks: &RankVector, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.check()?;
    if n == 0 || k == 0 {
        return Err(Error::invalid("solver needs n ≥ 1 and k ≥ 1"));
    }
    if ranks.0.len() != n || ranks.0.iter().any(|&r| r > k) {
        return Err(Error::invalid("rank vector must have n entries in [0, k]"));
    }
    let a = alpha.to_f64();
    let mut best: Option<(Vec<CMat>, f64, usize, usize)> = None;
    let mut restarts_run = 0;
    for index in 0..cfg.restarts {
        let (ps, residual, sweeps) = run_restart(n, a, k, ranks, cfg, index);
        restarts_run += 1;
        // strict comparison keeps the lowest restart index on ties
        if best.as_ref().is_none_or(|b| residual < b.1) {
            best = Some((ps, residual, sweeps, index));
        }
        if residual <= cfg.residual_target {
            break;
        }
    }
    let (ps, residual, sweeps, index) = best.expect("at least one restart");
    let mut tuple = ProjectionTuple::new(ps, None)?
        .with_alpha(alpha.clone())
        .with_provenance(Provenance::Solver);
    tuple.tol = cfg.tol;
    let check = verify_tuple(&tuple, a, cfg.tol);
    tuple.residual = Some(TupleResidual {
        hermitian: check.hermitian,
        idempotent: check.idempotent,
        sum: Some(check.sum),
    });
    Ok(SolveResult {
        tuple,
        report: SolveReport {
            success: residual <= cfg.residual_target,
            best_residual: residual,
            iterations: sweeps,
            restart_index: index,
            restarts_run,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryGroup {
    /// All `n!` permutations.
    Full,
    /// The affine group `x ↦ a·x + b (mod n)` of order `n(n−1)`, for prime `n`.
    /// It is 2-transitive, which is all the moment averaging needs.
    Affine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizeOptions {
    pub group: SymmetryGroup,
    /// Refuse `n` above this bound (the dimension grows like `n!·k`).
    pub max_n: usize,
}

impl Default for SymmetrizeOptions {
    fn default() -> Self {
        SymmetrizeOptions { group: SymmetryGroup::Full, max_n: 8 }
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn group_elements(n: usize, group: SymmetryGroup) -> Result<Vec<Vec<usize>>> {
    match group {
        SymmetryGroup::Full => Ok((0..n).permutations(n).collect()),
        SymmetryGroup::Affine => {
            if !is_prime(n) {
                return Err(Error::invalid(format!("affine symmetrization needs prime n, got {n}")));
            }
            Ok((1..n)
                .flat_map(|a| (0..n).map(move |b| (0..n).map(|x| (a * x + b) % n).collect()))
                .collect())
        }
    }
}

/// `p̃_j = ⊕_σ p_{σ(j)}` over a permutation group.
pub fn symmetrize(t: &ProjectionTuple, opts: &SymmetrizeOptions) -> Result<ProjectionTuple> {
    let n = t.n;
    if n > opts.max_n {
        return Err(Error::invalid(format!(
            "refusing to symmetrize n = {n} > {} (dimension grows like n!·k)",
            opts.max_n
        )));
    }
    let a = t.alpha_f64();
    let input = verify_tuple(t, a, t.tol);
    if input.sum > t.tol.max(10.0 * input.hermitian.max(input.idempotent)) {
        return Err(Error::check(format!(
            "input does not sum to α·1 (deviation {:e})",
            input.sum
        )));
    }
    let perms = group_elements(n, opts.group)?;
    let g = perms.len();
    let k = t.k;
    let dim = g * k;
    let projections = (0..n)
        .map(|j| {
            let mut m = CMat::zeros(dim, dim);
            for (b, sigma) in perms.iter().enumerate() {
                m.view_mut((b * k, b * k), (k, k)).copy_from(&t.projections[sigma[j]]);
            }
            m
        })
        .collect();
    let weights = t.trace_weights.as_ref().map(|w| {
        (0..g)
            .flat_map(|_| w.iter().map(|x| x / g as f64))
            .collect::<Vec<_>>()
    });
    let base = t.layout();
    let layout = BlockLayout((0..g).flat_map(|_| base.0.iter().copied()).collect());
    let mut out = ProjectionTuple::new(projections, weights)?
        .with_provenance(Provenance::Symmetrized);
    out.layout = Some(layout);
    out.alpha = t.alpha.clone();
    out.tol = t.tol;
    out.residual = t.residual;
    Ok(out)
}

/// Block direct sum of two tuples with trace `λ·τ_a ⊕ (1−λ)·τ_b`.
pub fn direct_sum(a: &ProjectionTuple, b: &ProjectionTuple, lambda: f64) -> Result<ProjectionTuple> {
    if a.n != b.n {
        return Err(Error::invalid("direct sum needs tuples of equal length"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(format!("direct-sum weight must lie in (0, 1), got {lambda}")));
    }
    let projections = a
        .projections
        .iter()
        .zip(&b.projections)
        .map(|(p, q)| linalg::direct_sum(p, q))
        .collect();
    let weights: Vec<f64> = a
        .weights()
        .iter()
        .map(|w| w * lambda)
        .chain(b.weights().iter().map(|w| w * (1.0 - lambda)))
        .collect();
    let total: f64 = weights.iter().sum();
    let weights = weights.iter().map(|w| w / total).collect();
    let mut out = ProjectionTuple::new(projections, Some(weights))?
        .with_provenance(Provenance::DirectSum);
    out.layout = Some(a.layout().concat(&b.layout()));
    out.tol = a.tol.max(b.tol);
    if a.alpha.is_some() && a.alpha == b.alpha {
        out.alpha = a.alpha.clone();
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// `max_i ‖p_i − p_i*‖_F`.
    pub hermitian: f64,
    /// `max_i ‖p_i² − p_i‖_F`.
    pub idempotent: f64,
    /// `‖Σ p_i − α·1‖_F`.
    pub sum: f64,
    pub tol: f64,
    pub pass: bool,
}

impl VerifyReport {
    pub fn max_deviation(&self) -> f64 {
        self.hermitian.max(self.idempotent).max(self.sum)
    }
}

pub fn verify_tuple(t: &ProjectionTuple, alpha: f64, tol: f64) -> VerifyReport {
    let layout = t.layout();
    let mut hermitian = 0.0f64;
    let mut idempotent = 0.0f64;
    for p in &t.projections {
        hermitian = hermitian.max(linalg::hermitian_deviation(p));
        idempotent = idempotent.max((mul_blocks(p, p, &layout) - p).norm());
    }
    let sum = if t.k == 0 {
        0.0
    } else {
        (t.sum() - identity(t.k).scale(alpha)).norm()
    };
    VerifyReport {
        hermitian,
        idempotent,
        sum,
        tol,
        pass: hermitian <= tol && idempotent <= tol && sum <= tol,
    }
}

/// `max |i − j|` over entries with modulus above `threshold`.
pub fn propagation(x: &CMat, threshold: f64) -> usize {
    let mut best = 0;
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if x[(i, j)].norm() > threshold {
                best = best.max(i.abs_diff(j));
            }
        }
    }
    best
}

/// Propagation measured on the cycle `ℤ/k`.
pub fn cyclic_propagation(x: &CMat, threshold: f64) -> usize {
    let k = x.nrows();
    let mut best = 0;
    for j in 0..x.ncols() {
        for i in 0..k {
            if x[(i, j)].norm() > threshold {
                let d = i.abs_diff(j);
                best = best.max(d.min(k - d));
            }
        }
    }
    best
}

/// Cyclic shift `z_k` with `(z_k)_{i,j} = δ_{i+1,j}` (indices mod k), raised to `m`.
pub fn shift_power(k: usize, m: i64) -> CMat {
    let mut z = CMat::zeros(k, k);
    let kk = k as i64;
    for i in 0..k {
        let j = (i as i64 + m).rem_euclid(kk) as usize;
        z[(i, j)] = c(1.0, 0.0);
    }
    z
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftDecomposition {
    pub l: usize,
    /// Diagonals `f_{−l}, …, f_l` of `y = Σ_m f_m z_k^m`.
    pub diagonals: Vec<Vec<Complex64>>,
    pub reconstruction_error: f64,
    /// `max_m ‖f_m‖` against `‖y‖` (operator norms).
    pub max_diagonal_norm: f64,
    pub norm: f64,
}

impl ShiftDecomposition {
    pub fn diagonal(&self, m: i64) -> &[Complex64] {
        &self.diagonals[(m + self.l as i64) as usize]
    }

    pub fn reconstruct(&self) -> CMat {
        let k = self.diagonals.first().map(|d| d.len()).unwrap_or(0);
        let mut y = CMat::zeros(k, k);
        for (idx, f) in self.diagonals.iter().enumerate() {
            let m = idx as i64 - self.l as i64;
            let fm = CMat::from_diagonal(&nalgebra::DVector::from_vec(f.clone()));
            y += fm * shift_power(k, m);
        }
        y
    }
}

/// Writes a matrix of cyclic propagation at most `l` as `Σ_{m=−l}^{l} f_m z_k^m`
/// with diagonal `f_m`.
pub fn shift_decompose(y: &CMat, l: usize) -> Result<ShiftDecomposition> {
    let k = y.nrows();
    if y.ncols() != k {
        return Err(Error::invalid("shift decomposition needs a square matrix"));
    }
    if 2 * l + 1 > k {
        return Err(Error::invalid(format!("2l+1 = {} exceeds k = {k}; the bands overlap", 2 * l + 1)));
    }
    let prop = cyclic_propagation(y, DEFAULT_PROPAGATION_THRESHOLD);
    if prop > l {
        return Err(Error::invalid(format!("cyclic propagation {prop} exceeds l = {l}")));
    }
    let kk = k as i64;
    let diagonals: Vec<Vec<Complex64>> = (-(l as i64)..=l as i64)
        .map(|m| {
            (0..k)
                .map(|i| y[(i, (i as i64 + m).rem_euclid(kk) as usize)])
                .collect()
        })
        .collect();
    let max_diagonal_norm = diagonals
        .iter()
        .flat_map(|d| d.iter().map(|x| x.norm()))
        .fold(0.0, f64::max);
    let mut dec = ShiftDecomposition {
        l,
        diagonals,
        reconstruction_error: 0.0,
        max_diagonal_norm,
        norm: linalg::op_norm(y),
    };
    dec.reconstruction_error = (dec.reconstruct() - y).norm();
    Ok(dec)
}

/// One step of a construction route, in the order it is applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum RouteStep {
    Seed { kind: SeedKind, alpha: Scalar },
    FunctorT { alpha: Scalar },
    FunctorS { alpha: Scalar },
    Solver { alpha: Scalar, k: usize, residual: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    T,
    S,
}

fn seed_kind_for(n: usize, alpha: &Scalar) -> Option<SeedKind> {
    let q = alpha.as_rational()?;
    if q.is_integer() && !alpha.lt(&Scalar::integer(0)) && !alpha.gt(&Scalar::integer(n as i64)) {
        return Some(SeedKind::IntegerCover);
    }
    if *alpha == Scalar::ratio(n as i64, 2) {
        return Some(SeedKind::PlanarHalf);
    }
    None
}

/// Shortest chain of reflections leading from a seedable scalar to `alpha`.
fn precursor_route(n: usize, alpha: &Scalar, max_depth: usize) -> Option<(Scalar, Vec<Move>)> {
    let nn = Scalar::integer(n as i64);
    let one = Scalar::integer(1);
    let mut frontier = vec![(alpha.clone(), Vec::new())];
    let mut seen = vec![alpha.clone()];
    for _ in 0..=max_depth {
        let mut next = Vec::new();
        for (beta, moves) in frontier {
            if seed_kind_for(n, &beta).is_some() {
                return Some((beta, moves));
            }
            // T is an involution, so its precursor is n − β
            let t_pre = nn.sub(&beta);
            // S maps γ > 1 to γ/(γ−1) > 1 and is an involution on (1, ∞)
            let s_pre = if beta.gt(&one) { beta.hyperbolic_image().ok() } else { None };
            for (pre, mv) in [(Some(t_pre), Move::T), (s_pre, Move::S)] {
                let Some(pre) = pre else { continue };
                if seen.contains(&pre) {
                    continue;
                }
                seen.push(pre.clone());
                let mut m = vec![mv];
                m.extend(moves.iter().copied());
                next.push((pre, m));
            }
        }
        frontier = next;
    }
    None
}

/// Some tuple with `Σ p_i = α·1`.
///
/// Seeds are tried first, then chains of at most four reflections ending in a
/// seed, then the solver in dimensions that are multiples of the denominator
/// of `α`. Irrational `α` has no finite-dimensional realization.
pub fn realize_sum(n: usize, alpha: &Scalar, cfg: &SolverConfig) -> Result<(ProjectionTuple, Vec<RouteStep>)> {
    if !alpha.is_rational() {
        return Err(Error::Infeasible(format!(
            "α = {alpha} is irrational, so α·k is never an integer trace"
        )));
    }
    if let Some((start, moves)) = precursor_route(n, alpha, 4) {
        let kind = seed_kind_for(n, &start).expect("route starts at a seed");
        let mut route = vec![RouteStep::Seed { kind, alpha: start.clone() }];
        let mut t = seed(kind, n, &start)?;
        for mv in moves {
            t = match mv {
                Move::T => functor_t(&t),
                Move::S => functor_s(&t)?.0,
            };
            let a = t.alpha.clone().expect("reflections keep α");
            route.push(match mv {
                Move::T => RouteStep::FunctorT { alpha: a },
                Move::S => RouteStep::FunctorS { alpha: a },
            });
        }
        return Ok((t, route));
    }
    let den = alpha
        .as_rational()
        .and_then(|q| num_traits::ToPrimitive::to_usize(q.denom()))
        .ok_or_else(|| Error::invalid("denominator too large"))?;
    let mut last = None;
    for mult in 1..=4 {
        let k = den * mult;
        let RankFeasibility::Feasible { rank_vectors, .. } = rank_feasible(n, alpha, k) else {
            return Err(Error::Infeasible(format!("no rank vector for α = {alpha} in dimension {k}")));
        };
        let res = solve(n, alpha, k, &rank_vectors[0], cfg)?;
        if res.report.success {
            let residual = res.report.best_residual;
            return Ok((res.tuple, vec![RouteStep::Solver { alpha: alpha.clone(), k, residual }]));
        }
        last = Some(res);
    }
    Err(last.expect("at least one solve").into_result().unwrap_err())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_cover_is_exact() {
        let t = seed(SeedKind::IntegerCover, 5, &Scalar::integer(2)).unwrap();
        assert_eq!((t.n, t.k), (5, 5));
        let r = verify_tuple(&t, 2.0, 0.0);
        assert!(r.pass);
        assert_eq!(r.max_deviation(), 0.0);
        let zero = seed(SeedKind::IntegerCover, 3, &Scalar::integer(0)).unwrap();
        assert!(zero.projections.iter().all(|p| p.iter().all(|x| *x == c(0.0, 0.0))));
        assert!(seed(SeedKind::IntegerCover, 3, &Scalar::integer(4)).is_err());
        assert!(seed(SeedKind::IntegerCover, 3, &Scalar::ratio(1, 2)).is_err());
    }

    #[test]
    fn planar_half_sums_to_half_n() {
        let t = seed(SeedKind::PlanarHalf, 5, &Scalar::ratio(5, 2)).unwrap();
        let dev = (t.sum() - identity(2).scale(2.5)).norm();
        assert!(dev <= 1e-14, "{dev}");
        assert!(verify_tuple(&t, 2.5, 1e-12).pass);
        let bad = verify_tuple(&t, 2.6, 1e-12);
        assert!(!bad.pass);
        assert!((bad.sum - 0.1 * 2f64.sqrt()).abs() < 1e-12);
        assert!(seed(SeedKind::PlanarHalf, 5, &Scalar::integer(2)).is_err());
    }

    #[test]
    fn non_idempotent_entry_fails_verification() {
        let mut t = seed(SeedKind::PlanarHalf, 5, &Scalar::ratio(5, 2)).unwrap();
        t.projections[2] = linalg::real_diag(&[0.5, 0.25]);
        let r = verify_tuple(&t, 2.5, 1e-10);
        assert!(!r.pass);
        assert!(r.idempotent > 0.1);
    }

    #[test]
    fn functor_t_complements() {
        let t = seed(SeedKind::IntegerCover, 5, &Scalar::integer(2)).unwrap();
        let r = functor_t(&t);
        assert_eq!(r.alpha, Some(Scalar::integer(3)));
        assert!(verify_tuple(&r, 3.0, 0.0).pass);
        let all = seed(SeedKind::IntegerCover, 4, &Scalar::integer(4)).unwrap();
        let none = functor_t(&all);
        assert!(none.projections.iter().all(|p| p.norm() == 0.0));
        assert_eq!(none.alpha, Some(Scalar::integer(0)));
        let half = seed(SeedKind::PlanarHalf, 5, &Scalar::ratio(5, 2)).unwrap();
        let fixed = functor_t(&half);
        assert_eq!(fixed.alpha, Some(Scalar::ratio(5, 2)));
        assert!(verify_tuple(&fixed, 2.5, 1e-12).pass);
    }

    #[test]
    fn functor_t_twice_is_identity() {
        let half = seed(SeedKind::PlanarHalf, 7, &Scalar::ratio(7, 2)).unwrap();
        assert_eq!(functor_t(&functor_t(&half)), half);
        // materialized twice-reflection agrees to rounding as well
        let once = functor_t(&half);
        let detached = ProjectionTuple::new(once.projections.clone(), None).unwrap();
        let twice = functor_t(&detached);
        for (a, b) in twice.projections.iter().zip(&half.projections) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn functor_s_on_planar_half() {
        let t = seed(SeedKind::PlanarHalf, 5, &Scalar::ratio(5, 2)).unwrap();
        let (out, rep) = functor_s(&t).unwrap();
        assert_eq!(rep.rank_q, 3);
        assert!((rep.predicted_rank - 3.0).abs() < 1e-12);
        assert_eq!(out.k, 3);
        assert_eq!(out.alpha, Some(Scalar::ratio(5, 3)));
        assert!(rep.residual <= 1e-10, "{}", rep.residual);
        assert!(verify_tuple(&out, 5.0 / 3.0, 1e-10).pass);
    }

    #[test]
    fn functor_s_on_integer_cover() {
        let t = seed(SeedKind::IntegerCover, 5, &Scalar::integer(2)).unwrap();
        let (out, rep) = functor_s(&t).unwrap();
        // trace Q = (1 − 1/2)·10 = 5
        assert_eq!(rep.rank_q, 5);
        assert!((rep.trace_q - 5.0).abs() < 1e-12);
        assert_eq!(out.alpha, Some(Scalar::integer(2)));
        assert!(rep.residual <= 1e-10);
    }

    #[test]
    fn functor_s_rejects_small_alpha() {
        let t = seed(SeedKind::IntegerCover, 5, &Scalar::integer(1)).unwrap();
        assert!(functor_s(&t).is_err());
    }

    #[test]
    fn rank_feasibility_examples() {
        match rank_feasible(5, &Scalar::ratio(5, 3), 3) {
            RankFeasibility::Feasible { total, rank_vectors } => {
                assert_eq!(total, 5);
                assert_eq!(rank_vectors[0], RankVector(vec![1, 1, 1, 1, 1]));
                assert!(rank_vectors.iter().all(|r| r.total() == 5 && r.0.iter().all(|&x| x <= 3)));
            }
            other => panic!("{other:?}"),
        }
        match rank_feasible(5, &Scalar::ratio(5, 3), 2) {
            RankFeasibility::Infeasible { obstruction: TraceObstruction::NonIntegerTrace { distance, .. }, .. } => {
                assert!((distance - 1.0 / 3.0).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
        assert!(!rank_feasible(5, &Scalar::surd(5, 2, 2), 7).is_feasible());
        assert!(!rank_feasible(2, &Scalar::integer(3), 1).is_feasible());
    }

    #[test]
    fn solver_forced_identity() {
        let cfg = SolverConfig { restarts: 1, ..Default::default() };
        let res = solve(5, &Scalar::integer(5), 2, &RankVector(vec![2; 5]), &cfg).unwrap();
        assert!(res.report.success);
        assert_eq!(res.report.best_residual, 0.0);
    }

    #[test]
    fn solver_is_deterministic() {
        let cfg = SolverConfig { restarts: 3, rng_seed: 11, ..Default::default() };
        let ranks = RankVector(vec![1; 5]);
        let a = solve(5, &Scalar::ratio(5, 3), 3, &ranks, &cfg).unwrap();
        let b = solve(5, &Scalar::ratio(5, 3), 3, &ranks, &cfg).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.tuple, b.tuple);
    }

    #[test]
    fn affine_group_is_two_transitive() {
        let g = group_elements(5, SymmetryGroup::Affine).unwrap();
        assert_eq!(g.len(), 20);
        let mut seen = std::collections::HashSet::new();
        for s in &g {
            for i in 0..5 {
                for j in 0..5 {
                    if i != j {
                        seen.insert((i, s[i], j, s[j]));
                    }
                }
            }
        }
        // every ordered pair maps to every ordered pair
        assert_eq!(seen.len(), 20 * 20);
        assert!(group_elements(6, SymmetryGroup::Affine).is_err());
    }

    #[test]
    fn symmetrize_guards_size() {
        let t = seed(SeedKind::IntegerCover, 9, &Scalar::integer(3)).unwrap();
        assert!(symmetrize(&t, &SymmetrizeOptions::default()).is_err());
    }

    #[test]
    fn realize_sum_routes() {
        let cfg = SolverConfig::default();
        let (t, route) = realize_sum(5, &Scalar::ratio(5, 3), &cfg).unwrap();
        assert_eq!(t.k, 3);
        assert!(matches!(route[0], RouteStep::Seed { kind: SeedKind::PlanarHalf, .. }));
        assert!(verify_tuple(&t, 5.0 / 3.0, 1e-10).pass);
        let (t, route) = realize_sum(5, &Scalar::integer(2), &cfg).unwrap();
        assert_eq!((t.k, route.len()), (5, 1));
        // 5/4 is the hyperbolic image of the seed 5
        let (t, _) = realize_sum(5, &Scalar::ratio(5, 4), &cfg).unwrap();
        assert!(verify_tuple(&t, 1.25, 1e-10).pass);
        let (t, _) = realize_sum(5, &Scalar::ratio(10, 3), &cfg).unwrap();
        assert!(verify_tuple(&t, 10.0 / 3.0, 1e-10).pass);
        let err = realize_sum(5, &Scalar::surd(5, 2, 2), &cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn propagation_examples() {
        assert_eq!(propagation(&identity(6), 1e-12), 0);
        let mut tri = identity(5);
        for i in 0..4 {
            tri[(i, i + 1)] = c(0.5, 0.0);
            tri[(i + 1, i)] = c(0.5, 0.0);
        }
        assert_eq!(propagation(&tri, 1e-12), 1);
        let half = seed(SeedKind::PlanarHalf, 5, &Scalar::ratio(5, 2)).unwrap();
        let mut embedded = CMat::zeros(6, 6);
        embedded.view_mut((2, 2), (2, 2)).copy_from(&half.projections[1]);
        assert_eq!(propagation(&embedded, 1e-12), 1);
    }

    #[test]
    fn shift_decomposition_examples() {
        let z = shift_power(6, 1);
        let d = shift_decompose(&z, 1).unwrap();
        assert!(d.diagonal(1).iter().all(|x| *x == c(1.0, 0.0)));
        assert!(d.diagonal(0).iter().all(|x| *x == c(0.0, 0.0)));
        assert!(d.diagonal(-1).iter().all(|x| *x == c(0.0, 0.0)));
        let y = linalg::real_diag(&[1.0, 2.0, 3.0]);
        let d = shift_decompose(&y, 0).unwrap();
        assert_eq!(d.diagonal(0), &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert!(shift_decompose(&z, 3).is_err());
        assert!(shift_decompose(&shift_power(6, 2), 1).is_err());
    }
}
