//! End-to-end witnesses: from a tuple with `Σ p_i = nt·1` to a certified
//! factorization of the Schur multiplier `T_{B_t}`, plus residual sweeps over
//! grids of `(t, k)`.

use serde::{Deserialize, Serialize};

use crate::channels::{self, FactorizationCertificate};
use crate::error::{Error, Result};
use crate::moments::{self, MomentMatrix};
use crate::scalar::Scalar;
use crate::tuples::{
    self, rank_feasible, solve, ProjectionTuple, RankFeasibility, RankVector, RouteStep, SolverConfig,
    SymmetrizeOptions, TraceObstruction,
};
use crate::unitaries::{self, CorrelationMatrix};

pub const WITNESS_TOL: f64 = 1e-10;
/// Largest dimension covered by an infeasibility certificate.
pub const OBSTRUCTION_K_MAX: u64 = 10_000;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    pub symmetry: SymmetrizeOptions,
}

/// `nt·k` stays away from the integers for every `k ≤ k_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub n: usize,
    pub t: Scalar,
    pub alpha: Scalar,
    pub k_max: u64,
    /// `min_k dist(αk, ℤ)` over the range, as computed.
    pub min_distance: f64,
    /// `min_k` of the certified lower bounds.
    pub min_certified_lower_bound: f64,
    pub argmin_k: u64,
    /// `min_k dist(αk, ℤ)/√k`, a lower bound on `‖Σ p_i − α·1‖_F` in dimension `k`.
    pub min_residual_lower_bound: f64,
}

/// Certifies `dist(αk, ℤ) > 0` for all `1 ≤ k ≤ k_max` with exact arithmetic.
pub fn trace_obstruction(n: usize, t: &Scalar, k_max: u64) -> Result<ObstructionCertificate> {
    let alpha = t.mul(&Scalar::integer(n as i64));
    if !alpha.is_certified_irrational() {
        return Err(Error::invalid(format!(
            "α = {alpha} is not a certified irrational; no uniform obstruction exists"
        )));
    }
    let mut cert = ObstructionCertificate {
        n,
        t: t.clone(),
        alpha: alpha.clone(),
        k_max,
        min_distance: f64::INFINITY,
        min_certified_lower_bound: f64::INFINITY,
        argmin_k: 0,
        min_residual_lower_bound: f64::INFINITY,
    };
    for k in 1..=k_max {
        let d = alpha.integer_distance(k);
        let bound = d
            .certified_lower_bound
            .ok_or_else(|| Error::Numerical("missing certified bound".into()))?;
        if !(bound > 0.0) {
            return Err(Error::Numerical(format!("certified bound vanished at k = {k}")));
        }
        if d.value < cert.min_distance {
            cert.min_distance = d.value;
            cert.argmin_k = k;
        }
        cert.min_certified_lower_bound = cert.min_certified_lower_bound.min(bound);
        cert.min_residual_lower_bound = cert.min_residual_lower_bound.min(bound / (k as f64).sqrt());
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessResiduals {
    /// `‖Σ p_i − nt·1‖_F` of the base tuple.
    pub base_sum: f64,
    /// `max |moments − A_t|`.
    pub moments_vs_a: f64,
    pub unitarity: f64,
    /// `max |gram − B_t|`.
    pub gram_vs_b: f64,
    pub factorization: f64,
}

impl WitnessResiduals {
    pub fn max(&self) -> f64 {
        [self.base_sum, self.moments_vs_a, self.unitarity, self.gram_vs_b, self.factorization]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Everything needed to rebuild and re-check a witness.
///
/// The symmetrized tuple and its unitaries are large (dimension `n!·k`), so the
/// bundle keeps the base tuple and the group; both are rebuilt on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessBundle {
    pub n: usize,
    pub t: Scalar,
    pub route: Vec<RouteStep>,
    pub base_tuple: ProjectionTuple,
    pub symmetry: SymmetrizeOptions,
    pub dimension: usize,
    #[serde(rename = "A")]
    pub a: MomentMatrix,
    #[serde(rename = "B")]
    pub b: CorrelationMatrix,
    pub certificate: FactorizationCertificate,
    pub ancilla_multiple_of_bound: Option<bool>,
    pub residuals: WitnessResiduals,
}

/// A failed witness run: the stage, what went wrong, and any certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineFailure {
    pub stage: String,
    pub message: String,
    pub residual: Option<f64>,
    pub obstruction: Option<ObstructionCertificate>,
    pub exit_code: i32,
}

impl PipelineFailure {
    fn from_error(stage: &str, e: Error) -> Self {
        PipelineFailure {
            stage: stage.into(),
            exit_code: e.exit_code(),
            message: e.to_string(),
            residual: None,
            obstruction: None,
        }
    }

    fn residual(stage: &str, what: &str, residual: f64) -> Self {
        PipelineFailure {
            stage: stage.into(),
            message: format!("{what} residual {residual:e} exceeds {WITNESS_TOL:e}"),
            residual: Some(residual),
            obstruction: None,
            exit_code: 2,
        }
    }
}

impl std::fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.message)
    }
}

impl std::error::Error for PipelineFailure {}

/// Symmetrized tuple, unitaries, and cross-checks shared by the pipeline and
/// bundle reloading.
struct Derived {
    a: MomentMatrix,
    b: CorrelationMatrix,
    certificate: FactorizationCertificate,
    dimension: usize,
    moments_vs_a: f64,
    gram_vs_b: f64,
    unitarity: f64,
}

fn derive(n: usize, t: &Scalar, base: &ProjectionTuple, symmetry: &SymmetrizeOptions) -> std::result::Result<Derived, PipelineFailure> {
    let sym = tuples::symmetrize(base, symmetry).map_err(|e| PipelineFailure::from_error("symmetrize", e))?;
    let a = moments::moments_of(&sym).map_err(|e| PipelineFailure::from_error("moments", e))?;
    let a_ref = moments::build_a(n, t, None).map_err(|e| PipelineFailure::from_error("moments", e))?;
    let moments_vs_a = a.max_abs_diff(&a_ref);
    if moments_vs_a > WITNESS_TOL {
        return Err(PipelineFailure::residual("moments", "moments vs A_t", moments_vs_a));
    }
    let u = unitaries::projections_to_unitaries(&sym).map_err(|e| PipelineFailure::from_error("bridge", e))?;
    let unitarity = u.unitarity_deviation();
    let b = unitaries::gram(&u).map_err(|e| PipelineFailure::from_error("gram", e))?;
    let b_ref = unitaries::build_b(n, t).map_err(|e| PipelineFailure::from_error("gram", e))?;
    let gram_vs_b = b.max_abs_diff(&b_ref);
    if gram_vs_b > WITNESS_TOL {
        return Err(PipelineFailure::residual("gram", "gram vs B_t", gram_vs_b));
    }
    let mut certificate =
        channels::build_factorization(&u).map_err(|e| PipelineFailure::from_error("factorization", e))?;
    certificate.dim_lower_bound = channels::ancilla_bound(n, t).ok();
    certificate.blocks = None;
    Ok(Derived { a, b, certificate, dimension: sym.k, moments_vs_a, gram_vs_b, unitarity })
}

/// Realize → symmetrize → moments vs `A_t` → bridge → gram vs `B_t` → factorize.
pub fn pipeline_witness(n: usize, t: &Scalar, cfg: &PipelineConfig) -> std::result::Result<WitnessBundle, PipelineFailure> {
    if n < 2 {
        return Err(PipelineFailure::from_error("input", Error::invalid("n must be at least 2")));
    }
    if t.lt(&Scalar::ratio(1, n as i64)) || t.gt(&Scalar::integer(1)) {
        return Err(PipelineFailure::from_error(
            "input",
            Error::invalid(format!("t = {t} is outside [1/{n}, 1]")),
        ));
    }
    let alpha = t.mul(&Scalar::integer(n as i64));
    if !alpha.is_rational() {
        let obstruction = trace_obstruction(n, t, OBSTRUCTION_K_MAX)
            .map_err(|e| PipelineFailure::from_error("rank_feasible", e))?;
        return Err(PipelineFailure {
            stage: "rank_feasible".into(),
            message: format!(
                "α = nt = {alpha} is irrational: α·k is at distance ≥ {:e} from the integers for every k ≤ {}",
                obstruction.min_certified_lower_bound, OBSTRUCTION_K_MAX
            ),
            residual: Some(obstruction.min_residual_lower_bound),
            obstruction: Some(obstruction),
            exit_code: 3,
        });
    }
    let (mut base, route) =
        tuples::realize_sum(n, &alpha, &cfg.solver).map_err(|e| PipelineFailure::from_error("realize", e))?;
    let base_sum = tuples::verify_tuple(&base, alpha.to_f64(), base.tol).sum;
    base.residual = None;
    let d = derive(n, t, &base, &cfg.symmetry)?;
    let ancilla_multiple_of_bound = d
        .certificate
        .dim_lower_bound
        .map(|b| (d.certificate.ancilla_dim as u64).is_multiple_of(b));
    Ok(WitnessBundle {
        n,
        t: t.clone(),
        route,
        base_tuple: base,
        symmetry: cfg.symmetry.clone(),
        dimension: d.dimension,
        residuals: WitnessResiduals {
            base_sum,
            moments_vs_a: d.moments_vs_a,
            unitarity: d.unitarity,
            gram_vs_b: d.gram_vs_b,
            factorization: d.certificate.residual,
        },
        a: d.a,
        b: d.b,
        certificate: d.certificate,
        ancilla_multiple_of_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleCheck {
    pub moments_vs_a: f64,
    pub moments_vs_stored: f64,
    pub gram_vs_b: f64,
    pub gram_vs_stored: f64,
    pub factorization: f64,
    pub pass: bool,
}

/// Rebuilds a bundle from its JSON and re-runs every cross-check.
pub fn load_and_verify(json: &str) -> Result<(WitnessBundle, BundleCheck)> {
    let bundle: WitnessBundle = serde_json::from_str(json)?;
    let d = derive(bundle.n, &bundle.t, &bundle.base_tuple, &bundle.symmetry)
        .map_err(|f| Error::check(f.to_string()))?;
    let check = BundleCheck {
        moments_vs_a: d.moments_vs_a,
        moments_vs_stored: d.a.max_abs_diff(&bundle.a),
        gram_vs_b: d.gram_vs_b,
        gram_vs_stored: d.b.max_abs_diff(&bundle.b),
        factorization: d.certificate.residual,
        pass: false,
    };
    let pass = check.moments_vs_stored <= WITNESS_TOL && check.gram_vs_stored <= WITNESS_TOL;
    Ok((bundle, BundleCheck { pass, ..check }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub t: Scalar,
    pub k: usize,
    pub alpha: Scalar,
    /// `αk` is an integer in `[0, nk]`.
    pub feasible: bool,
    pub ranks: Vec<usize>,
    /// Best `‖Σ p_i − α·1‖_F` found.
    pub residual: f64,
    /// `dist(αk, ℤ)/√k`, below which no tuple in dimension `k` can go.
    pub trace_lower_bound: f64,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub n: usize,
    pub config: SolverConfig,
    pub cells: Vec<SweepCell>,
}

/// Best solver residual for each `(t, k)`. Infeasible cells are solved with
/// the ranks of the nearest integer trace and carry the trace lower bound.
pub fn sweep(n: usize, t_grid: &[Scalar], dims: &[usize], cfg: &SolverConfig) -> SweepTable {
    let mut cells = Vec::with_capacity(t_grid.len() * dims.len());
    for t in t_grid {
        let alpha = t.mul(&Scalar::integer(n as i64));
        for &k in dims {
            let dist = alpha.integer_distance(k as u64);
            let trace_lower_bound = dist.certified_lower_bound.unwrap_or(dist.value) / (k as f64).sqrt();
            let (feasible, ranks) = match rank_feasible(n, &alpha, k) {
                RankFeasibility::Feasible { rank_vectors, .. } => (true, rank_vectors[0].clone()),
                RankFeasibility::Infeasible { obstruction, .. } => {
                    let total = (alpha.to_f64() * k as f64).round().clamp(0.0, (n * k) as f64) as usize;
                    if let TraceObstruction::OutOfRange { .. } = obstruction {
                        cells.push(SweepCell {
                            t: t.clone(),
                            k,
                            alpha: alpha.clone(),
                            feasible: false,
                            ranks: Vec::new(),
                            residual: f64::NAN,
                            trace_lower_bound,
                            success: false,
                            error: Some("α·k is outside [0, nk]".into()),
                        });
                        continue;
                    }
                    (false, RankVector::balanced(n, total))
                }
            };
            // Infeasible cells cannot reach the target; one restart shows the gap.
            let single = SolverConfig { restarts: 1, ..cfg.clone() };
            let run_cfg = if feasible { cfg } else { &single };
            let (residual, success, error) = match solve(n, &alpha, k, &ranks, run_cfg) {
                Ok(res) => (res.report.best_residual, res.report.success, None),
                Err(e) => (f64::NAN, false, Some(e.to_string())),
            };
            cells.push(SweepCell {
                t: t.clone(),
                k,
                alpha: alpha.clone(),
                feasible,
                ranks: ranks.0,
                residual,
                trace_lower_bound,
                success,
                error,
            });
        }
    }
    SweepTable { n, config: cfg.clone(), cells }
}
