//! Second-order trace moments `[τ(p_j p_i)]` of projection tuples.
//!
//! Covers the constant matrices `A_{t,s}^{(n)}` (diagonal `t`, off-diagonal
//! `s`), the admissible-pair intervals `I_t^{(n)}` and their realizations, the
//! complete description of 2×2 moment matrices, and export to synchronous
//! correlation tables.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, identity, rmat_serde, CMat, RMat};
use crate::scalar::Scalar;
use crate::spectra::{sigma_membership, Membership, SigmaQuery};
use crate::tuples::{self, ProjectionTuple, SolverConfig, SymmetrizeOptions};

/// Imaginary parts above this are rejected as a sign of non-Hermitian input.
pub const IMAG_REJECT: f64 = 1e-10;
pub const SYNC_TOL: f64 = 1e-10;

/// `entries[(i, j)] = τ(p_j p_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentMatrix {
    pub n: usize,
    #[serde(with = "rmat_serde")]
    pub entries: RMat,
}

impl MomentMatrix {
    pub fn constant(n: usize, diag: f64, off: f64) -> Self {
        MomentMatrix {
            n,
            entries: DMatrix::from_fn(n, n, |i, j| if i == j { diag } else { off }),
        }
    }

    pub fn max_abs_diff(&self, other: &MomentMatrix) -> f64 {
        (&self.entries - &other.entries).amax()
    }

    pub fn symmetry_deviation(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::real_min_eigenvalue(&self.entries)
    }

    /// Largest violation of `m_ij ≤ min(m_ii, m_jj)` and `0 ≤ m_ii ≤ 1`.
    pub fn entry_bound_violation(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0f64;
        for i in 0..self.n {
            worst = worst.max(-m[(i, i)]).max(m[(i, i)] - 1.0);
            for j in 0..self.n {
                worst = worst.max(m[(i, j)] - m[(i, i)].min(m[(j, j)]));
            }
        }
        worst
    }
}

/// `t(nt − 1)/(n − 1)`, the smallest constant off-diagonal moment.
pub fn off_diagonal_floor(n: usize, t: &Scalar) -> Scalar {
    let nn = Scalar::integer(n as i64);
    let one = Scalar::integer(1);
    t.mul(&nn.mul(t).sub(&one))
        .div(&Scalar::integer(n as i64 - 1))
        .expect("n ≥ 2")
}

/// `A_{t,s}^{(n)}`; `s` defaults to `t(nt − 1)/(n − 1)`, which needs `t ≥ 1/n`.
pub fn build_a(n: usize, t: &Scalar, s: Option<&Scalar>) -> Result<MomentMatrix> {
    if n < 2 {
        return Err(Error::invalid(format!("A_t needs n ≥ 2, got {n}")));
    }
    let zero = Scalar::integer(0);
    let one = Scalar::integer(1);
    if t.lt(&zero) || t.gt(&one) {
        return Err(Error::invalid(format!("t = {t} is outside [0, 1]")));
    }
    let s = match s {
        Some(s) => {
            if s.lt(&zero) || s.gt(&one) {
                return Err(Error::invalid(format!("s = {s} is outside [0, 1]")));
            }
            s.clone()
        }
        None => {
            if t.lt(&Scalar::ratio(1, n as i64)) {
                return Err(Error::invalid(format!(
                    "t = {t} < 1/{n}: the default off-diagonal t(nt−1)/(n−1) is negative"
                )));
            }
            off_diagonal_floor(n, t)
        }
    };
    Ok(MomentMatrix::constant(n, t.to_f64(), s.to_f64()))
}

pub fn moments_of(t: &ProjectionTuple) -> Result<MomentMatrix> {
    let w = t.weights();
    let mut entries = RMat::zeros(t.n, t.n);
    for i in 0..t.n {
        for j in i..t.n {
            let z = linalg::trace_of_product(&t.projections[j], &t.projections[i], &w);
            if z.im.abs() > IMAG_REJECT {
                return Err(Error::check(format!(
                    "τ(p_{j} p_{i}) has imaginary part {:e}; input is not Hermitian",
                    z.im
                )));
            }
            entries[(i, j)] = z.re;
            entries[(j, i)] = z.re;
        }
    }
    Ok(MomentMatrix { n: t.n, entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Exact,
    LowerBoundOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `t ≤ 1/n`: `[0, t]`.
    Small,
    /// `t ≥ 1 − 1/n`: `[2t − 1, t]`.
    Large,
    /// `nt ∈ Σ_n`: `[t(nt−1)/(n−1), t]`.
    Spectral,
    /// Membership of `nt` is negative or undecided.
    Undetermined,
}

/// The interval `I_t^{(n)}` of off-diagonal values `s` for which `A_{t,s}` is
/// a moment matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleInterval {
    pub n: usize,
    pub t: Scalar,
    pub lo: Scalar,
    pub hi: Scalar,
    pub confidence: Confidence,
    pub regime: Regime,
    /// The true minimum is known to lie strictly above `lo`.
    pub strict_lower_bound: bool,
}

impl AdmissibleInterval {
    /// `Some(answer)` where it is decided, `None` inside an undetermined range.
    pub fn contains(&self, s: &Scalar) -> Option<bool> {
        if s.gt(&self.hi) || s.lt(&self.lo) {
            return Some(false);
        }
        match self.confidence {
            Confidence::Exact => Some(true),
            Confidence::LowerBoundOnly => {
                if *s == self.hi {
                    Some(true)
                } else if self.strict_lower_bound && *s == self.lo {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }
}

pub fn classify_admissible(n: usize, t: &Scalar) -> Result<AdmissibleInterval> {
    if n < 2 {
        return Err(Error::invalid(format!("admissible pairs need n ≥ 2, got {n}")));
    }
    let zero = Scalar::integer(0);
    let one = Scalar::integer(1);
    if t.lt(&zero) || t.gt(&one) {
        return Err(Error::invalid(format!("t = {t} is outside [0, 1]")));
    }
    let inv_n = Scalar::ratio(1, n as i64);
    let make = |lo: Scalar, confidence, regime, strict| AdmissibleInterval {
        n,
        t: t.clone(),
        lo,
        hi: t.clone(),
        confidence,
        regime,
        strict_lower_bound: strict,
    };
    if !t.gt(&inv_n) {
        return Ok(make(zero, Confidence::Exact, Regime::Small, false));
    }
    if !t.lt(&one.sub(&inv_n)) {
        let lo = t.mul(&Scalar::integer(2)).sub(&one);
        return Ok(make(lo, Confidence::Exact, Regime::Large, false));
    }
    let lo = off_diagonal_floor(n, t);
    let alpha = t.mul(&Scalar::integer(n as i64));
    let verdict = sigma_membership(&SigmaQuery::new(n as u32, alpha))?;
    Ok(match verdict.member {
        Membership::In => make(lo, Confidence::Exact, Regime::Spectral, false),
        Membership::Out => make(lo, Confidence::LowerBoundOnly, Regime::Undetermined, true),
        Membership::UnknownDiscrete => make(lo, Confidence::LowerBoundOnly, Regime::Undetermined, false),
    })
}

/// `n` copies of one projection of trace `t`.
fn equal_projections(n: usize, t: &Scalar) -> Result<ProjectionTuple> {
    let (diag, weights) = split_diagonal(t, 1)?;
    let p = linalg::real_diag(&diag);
    ProjectionTuple::new(vec![p; n], weights)
}

/// `n` pairwise orthogonal projections of trace `t ≤ 1/n`.
fn orthogonal_projections(n: usize, t: &Scalar) -> Result<ProjectionTuple> {
    let (base, weights) = split_diagonal(t, n)?;
    let k = base.len();
    let block = base.iter().filter(|&&x| x == 1.0).count() / n;
    let projections = (0..n)
        .map(|i| {
            let mut d = vec![0.0; k];
            for x in d.iter_mut().skip(i * block).take(block) {
                *x = 1.0;
            }
            linalg::real_diag(&d)
        })
        .collect();
    ProjectionTuple::new(projections, weights)
}

/// Diagonal support pattern with room for `copies` disjoint projections of
/// trace `t`: for rational `t = a/b`, dimension `b` (or a multiple) under the
/// normalized trace with `copies·a` leading ones; otherwise `copies + 1`
/// weighted coordinates.
fn split_diagonal(t: &Scalar, copies: usize) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    if let Some(q) = t.as_rational() {
        let a = num_traits::ToPrimitive::to_usize(q.numer());
        let b = num_traits::ToPrimitive::to_usize(q.denom());
        if let (Some(a), Some(b)) = (a, b) {
            if b <= 100_000 {
                let k = b.max(copies * a);
                let mut d = vec![0.0; k];
                for x in d.iter_mut().take(copies * a) {
                    *x = 1.0;
                }
                return Ok((d, None));
            }
        }
    }
    let tf = t.to_f64();
    let rest = 1.0 - copies as f64 * tf;
    if rest < -1e-15 {
        return Err(Error::invalid(format!("{copies} disjoint projections of trace {t} do not fit")));
    }
    let mut d = vec![1.0; copies];
    let mut w = vec![tf; copies];
    if rest > 1e-15 {
        d.push(0.0);
        w.push(rest);
    }
    if tf == 0.0 {
        return Ok((vec![0.0], None));
    }
    Ok((d, Some(w)))
}

/// Tuple whose moment matrix is `A_{t,s}^{(n)}` for an exactly admissible pair.
pub fn realize_ats(n: usize, t: &Scalar, s: &Scalar, cfg: &SolverConfig) -> Result<ProjectionTuple> {
    let interval = classify_admissible(n, t)?;
    if interval.confidence != Confidence::Exact {
        return Err(Error::invalid(format!(
            "I_t for t = {t}, n = {n} is not determined; cannot certify s = {s}"
        )));
    }
    if interval.contains(s) != Some(true) {
        return Err(Error::invalid(format!(
            "s = {s} is outside the admissible interval [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    if *s == interval.hi {
        return equal_projections(n, t);
    }
    let lower = lower_extreme(n, t, &interval, cfg)?;
    if *s == interval.lo {
        return Ok(lower);
    }
    let upper = equal_projections(n, t)?;
    let lambda = t.sub(s).div(&t.sub(&interval.lo))?.to_f64();
    tuples::direct_sum(&lower, &upper, lambda)
}

fn lower_extreme(n: usize, t: &Scalar, interval: &AdmissibleInterval, cfg: &SolverConfig) -> Result<ProjectionTuple> {
    match interval.regime {
        Regime::Small => orthogonal_projections(n, t),
        Regime::Large => {
            let complement = Scalar::integer(1).sub(t);
            let mut base = orthogonal_projections(n, &complement)?;
            base.alpha = None;
            Ok(tuples::functor_t(&base))
        }
        Regime::Spectral => {
            let alpha = t.mul(&Scalar::integer(n as i64));
            let (base, _) = tuples::realize_sum(n, &alpha, cfg)?;
            tuples::symmetrize(&base, &SymmetrizeOptions::default())
        }
        Regime::Undetermined => unreachable!("undetermined intervals are rejected"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum D2Violation {
    SOutOfRange,
    TOutOfRange,
    /// `u < 0`.
    UBelowZero,
    /// `u < s + t − 1`.
    UBelowSPlusTMinusOne,
    /// `u > s` (so `u > min{s, t}`).
    UAboveS,
    /// `u > t` (so `u > min{s, t}`).
    UAboveT,
}

impl std::fmt::Display for D2Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            D2Violation::SOutOfRange => "s is outside [0, 1]",
            D2Violation::TOutOfRange => "t is outside [0, 1]",
            D2Violation::UBelowZero => "u < 0 = max{0, s+t-1}",
            D2Violation::UBelowSPlusTMinusOne => "u < s+t-1 = max{0, s+t-1}",
            D2Violation::UAboveS => "u > s = min{s, t}",
            D2Violation::UAboveT => "u > t = min{s, t}",
        })
    }
}

/// Inequality chain `max{0, s+t−1} ≤ u ≤ min{s, t}` with `s, t ∈ [0, 1]`,
/// and the weights `(u, s−u, t−u, 1−s−t+u)`.
pub fn d2_weights<T>(s: &T, t: &T, u: &T) -> std::result::Result<[T; 4], D2Violation>
where
    T: Clone + PartialOrd + Zero + One + std::ops::Sub<Output = T> + std::ops::Add<Output = T>,
{
    let zero = T::zero();
    let one = T::one();
    if *s < zero || *s > one {
        return Err(D2Violation::SOutOfRange);
    }
    if *t < zero || *t > one {
        return Err(D2Violation::TOutOfRange);
    }
    if *u < zero {
        return Err(D2Violation::UBelowZero);
    }
    if *u < s.clone() + t.clone() - one.clone() {
        return Err(D2Violation::UBelowSPlusTMinusOne);
    }
    if *u > *s {
        return Err(D2Violation::UAboveS);
    }
    if *u > *t {
        return Err(D2Violation::UAboveT);
    }
    let a1 = u.clone();
    let a2 = s.clone() - u.clone();
    let a3 = t.clone() - u.clone();
    let a4 = one - (a1.clone() + a2.clone() + a3.clone());
    Ok([a1, a2, a3, a4])
}

/// `[[τ(p), τ(pq)], [τ(qp), τ(q)]]` for `p = (1,1,0,0)`, `q = (1,0,1,0)` under
/// the diagonal weights `w`.
pub fn d2_moments<T>(w: &[T; 4]) -> [[T; 2]; 2]
where
    T: Clone + std::ops::Add<Output = T>,
{
    let s = w[0].clone() + w[1].clone();
    let t = w[0].clone() + w[2].clone();
    let u = w[0].clone();
    [[s, u.clone()], [u, t]]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct D2Point {
    pub s: Scalar,
    pub t: Scalar,
    pub u: Scalar,
    pub weights: [Scalar; 4],
    /// The check was carried out in rational arithmetic.
    pub exact: bool,
    /// Largest entry deviation of the reproduced matrix (zero when exact).
    pub residual: f64,
}

pub fn d2_check_and_realize(s: &Scalar, t: &Scalar, u: &Scalar) -> Result<D2Point> {
    let reject = |v: D2Violation| Error::check(format!("not a 2×2 moment matrix: {v}"));
    if let (Some(sq), Some(tq), Some(uq)) = (s.as_rational(), t.as_rational(), u.as_rational()) {
        let w: [BigRational; 4] = d2_weights(sq, tq, uq).map_err(reject)?;
        let m = d2_moments(&w);
        if m[0][0] != *sq || m[1][1] != *tq || m[0][1] != *uq || m[1][0] != *uq {
            return Err(Error::Numerical("rational D(2) weights do not reproduce the matrix".into()));
        }
        return Ok(D2Point {
            s: s.clone(),
            t: t.clone(),
            u: u.clone(),
            weights: w.map(Scalar::Rational),
            exact: true,
            residual: 0.0,
        });
    }
    let (sf, tf, uf) = (s.to_f64(), t.to_f64(), u.to_f64());
    let w = d2_weights(&sf, &tf, &uf).map_err(reject)?;
    let m = d2_moments(&w);
    let residual = (m[0][0] - sf)
        .abs()
        .max((m[1][1] - tf).abs())
        .max((m[0][1] - uf).abs());
    Ok(D2Point {
        s: s.clone(),
        t: t.clone(),
        u: u.clone(),
        weights: w.map(Scalar::real),
        exact: false,
        residual,
    })
}

/// `p(i, j | v, w) = τ(e_{v,i} e_{w,j})` with `e_{v,0} = p_v`, `e_{v,1} = 1 − p_v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyncTable {
    pub n: usize,
    /// Indexed `[v][w][i][j]`.
    pub table: Vec<Vec<[[f64; 2]; 2]>>,
    /// `max_{v, i≠j} |p(i, j | v, v)|`.
    pub synchronicity: f64,
    /// Most negative entry, as a non-negative number.
    pub negativity: f64,
    /// `max_{v,w} |Σ_{i,j} p(i, j | v, w) − 1|`.
    pub normalization: f64,
}

impl SyncTable {
    pub fn get(&self, i: usize, j: usize, v: usize, w: usize) -> f64 {
        self.table[v][w][i][j]
    }
}

pub fn synchronous_export(t: &ProjectionTuple) -> Result<SyncTable> {
    let w = t.weights();
    let one = identity(t.k);
    let e: Vec<[CMat; 2]> = t
        .projections
        .iter()
        .map(|p| [p.clone(), &one - p])
        .collect();
    let mut table = vec![vec![[[0.0; 2]; 2]; t.n]; t.n];
    let (mut sync, mut neg, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for v in 0..t.n {
        for u in 0..t.n {
            let mut total = c(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    let z = linalg::trace_of_product(&e[v][i], &e[u][j], &w);
                    if z.im.abs() > IMAG_REJECT {
                        return Err(Error::check(format!(
                            "p({i},{j}|{v},{u}) has imaginary part {:e}",
                            z.im
                        )));
                    }
                    total += z;
                    table[v][u][i][j] = z.re;
                    neg = neg.max(-z.re);
                    if v == u && i != j {
                        sync = sync.max(z.re.abs());
                    }
                }
            }
            norm = norm.max((total.re - 1.0).abs());
        }
    }
    if sync > SYNC_TOL || neg > SYNC_TOL || norm > SYNC_TOL {
        return Err(Error::check(format!(
            "correlation is not synchronous: off-diagonal {sync:e}, negativity {neg:e}, normalization {norm:e}"
        )));
    }
    Ok(SyncTable { n: t.n, table, synchronicity: sync, negativity: neg, normalization: norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::{seed, SeedKind};

    fn q(a: i64, b: i64) -> Scalar {
        Scalar::ratio(a, b)
    }

    #[test]
    fn build_a_examples() {
        let a = build_a(5, &q(2, 5), None).unwrap();
        assert!((a.entries[(0, 0)] - 0.4).abs() < 1e-15);
        assert!((a.entries[(0, 1)] - 0.1).abs() < 1e-15);
        assert_eq!(build_a(5, &q(1, 5), None).unwrap().entries[(2, 3)], 0.0);
        let ones = build_a(5, &Scalar::integer(1), None).unwrap();
        assert!(ones.entries.iter().all(|&x| x == 1.0));
        assert!(build_a(5, &q(1, 10), None).is_err());
        assert!(build_a(5, &q(11, 10), None).is_err());
        assert!(build_a(5, &q(1, 10), Some(&Scalar::integer(0))).is_ok());
    }

    #[test]
    fn moments_of_simple_tuples() {
        let p = linalg::real_diag(&[1.0, 0.0, 0.0, 1.0, 0.0]);
        let t = ProjectionTuple::new(vec![p; 3], None).unwrap();
        let m = moments_of(&t).unwrap();
        assert!(m.entries.iter().all(|&x| (x - 0.4).abs() < 1e-15));
        let orth = orthogonal_projections(5, &q(1, 10)).unwrap();
        let m = moments_of(&orth).unwrap();
        assert!(m.max_abs_diff(&MomentMatrix::constant(5, 0.1, 0.0)) < 1e-15);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut p = CMat::zeros(2, 2);
        p[(0, 1)] = c(0.0, 1.0);
        p[(0, 0)] = c(1.0, 0.0);
        let q = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let t = ProjectionTuple::new(vec![p, q], None).unwrap();
        assert!(moments_of(&t).is_err());
    }

    #[test]
    fn admissible_examples() {
        let i = classify_admissible(5, &q(1, 10)).unwrap();
        assert_eq!((i.lo.clone(), i.hi.clone(), i.confidence), (Scalar::integer(0), q(1, 10), Confidence::Exact));
        let i = classify_admissible(5, &q(19, 20)).unwrap();
        assert_eq!((i.lo.clone(), i.confidence), (q(9, 10), Confidence::Exact));
        let i = classify_admissible(5, &q(2, 5)).unwrap();
        assert_eq!((i.lo.clone(), i.regime), (q(1, 10), Regime::Spectral));
        // 5t = 13/10 is an undecided rational for n = 5
        let i = classify_admissible(5, &q(13, 50)).unwrap();
        assert_eq!(i.confidence, Confidence::LowerBoundOnly);
        assert!(!i.strict_lower_bound);
        assert_eq!(i.contains(&i.lo), None);
        // 5t = √5/2 is irrational and below the interval
        let i = classify_admissible(5, &Scalar::surd(1, 10, 5)).unwrap();
        assert!(i.strict_lower_bound);
        assert_eq!(i.contains(&i.lo), Some(false));
    }

    #[test]
    fn realize_examples() {
        let cfg = SolverConfig::default();
        let t = realize_ats(5, &q(1, 10), &Scalar::integer(0), &cfg).unwrap();
        assert_eq!(t.k, 10);
        assert!(t.trace_weights.is_none());
        assert!(t.projections.iter().all(|p| (linalg::weighted_trace(p, &t.weights()).re - 0.1).abs() < 1e-15));
        let t = realize_ats(5, &q(3, 10), &q(3, 10), &cfg).unwrap();
        assert!(t.projections.windows(2).all(|w| w[0] == w[1]));
        let t = realize_ats(5, &q(19, 20), &q(9, 10), &cfg).unwrap();
        let m = moments_of(&t).unwrap();
        assert!(m.max_abs_diff(&MomentMatrix::constant(5, 0.95, 0.9)) < 1e-12);
        assert!(realize_ats(5, &q(3, 10), &q(1, 2), &cfg).is_err());
    }

    #[test]
    fn d2_examples() {
        let p = d2_check_and_realize(&q(1, 2), &q(1, 2), &q(1, 4)).unwrap();
        assert!(p.exact);
        assert!(p.weights.iter().all(|w| *w == q(1, 4)));
        let one = Scalar::integer(1);
        let p = d2_check_and_realize(&one, &one, &one).unwrap();
        assert_eq!(p.weights[0], one);
        assert!(p.weights[1..].iter().all(|w| w.is_zero()));
        let err = d2_check_and_realize(&q(3, 10), &q(2, 5), &q(7, 20)).unwrap_err();
        assert!(err.to_string().contains("min{s, t}"), "{err}");
        let err = d2_check_and_realize(&q(9, 10), &q(9, 10), &q(1, 2)).unwrap_err();
        assert!(err.to_string().contains("s+t-1"), "{err}");
        let p = d2_check_and_realize(&Scalar::real(0.5), &Scalar::real(0.25), &Scalar::real(0.1)).unwrap();
        assert!(!p.exact);
        assert_eq!(p.residual, 0.0);
    }

    #[test]
    fn sync_export_examples() {
        let p = linalg::real_diag(&[1.0, 0.0, 0.0, 0.0]);
        let t = ProjectionTuple::new(vec![p], None).unwrap();
        let s = synchronous_export(&t).unwrap();
        assert_eq!(s.table[0][0], [[0.25, 0.0], [0.0, 0.75]]);
        let cover = seed(SeedKind::IntegerCover, 4, &Scalar::integer(2)).unwrap();
        let s = synchronous_export(&cover).unwrap();
        // coordinates {0,1} and {1,2} share one of four
        assert_eq!(s.get(0, 0, 0, 1), 0.25);
        assert_eq!(s.get(1, 1, 0, 2), 0.0);
        let bad = ProjectionTuple::new(vec![linalg::real_diag(&[0.5, 0.5])], None).unwrap();
        assert!(synchronous_export(&bad).is_err());
    }
}
