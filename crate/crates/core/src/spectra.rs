//! Membership oracles for `Σ_n`, the set of scalars `α` for which `n`
//! projections can sum to `α·1`, and for its normalized interval `Π_n`.
//!
//! For `n ≥ 5` the set is the closed interval
//! `[(n − √(n² − 4n))/2, (n + √(n² − 4n))/2]` together with a discrete set of
//! rationals. Only part of that discrete set is enumerated here; any other
//! rational is reported as [`Membership::UnknownDiscrete`].

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_ENDPOINT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaQuery {
    pub n: u32,
    pub alpha: Scalar,
    /// Absolute tolerance at the interval endpoints, used for floating `alpha` only.
    pub tol: f64,
}

impl SigmaQuery {
    pub fn new(n: u32, alpha: Scalar) -> Self {
        SigmaQuery { n, alpha, tol: DEFAULT_ENDPOINT_TOL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    In,
    Out,
    UnknownDiscrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    Interval,
    /// One of the explicitly known points `0, 1, n/(n−1)` (and the extra
    /// points known for `n ≤ 4`).
    ListedPoint,
    /// `n − α` is a listed point.
    SymmetricImage,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaVerdict {
    pub member: Membership,
    pub component: Component,
    pub dim_lower_bound: Option<u64>,
    /// The verdict relied on the endpoint tolerance of a floating query.
    pub endpoint_tolerance_used: bool,
}

/// Endpoints of the interval part of `Σ_n`, `n ≥ 4`.
pub fn continuum_interval(n: u32) -> Result<(f64, f64)> {
    if n < 4 {
        return Err(Error::invalid(format!("Σ_{n} has no interval part")));
    }
    let nf = n as f64;
    let root = (nf * nf - 4.0 * nf).sqrt();
    Ok((0.5 * (nf - root), 0.5 * (nf + root)))
}

/// `Π_n = [(1 − √(1 − 4/n))/2, (1 + √(1 − 4/n))/2]`, defined for `n ≥ 5`.
pub fn pi_interval(n: u32) -> Result<(f64, f64)> {
    if n < 5 {
        return Err(Error::invalid(format!(
            "Π_n needs n ≥ 5 (got {n}); for n = 4 it degenerates to a point"
        )));
    }
    let root = (1.0 - 4.0 / n as f64).sqrt();
    Ok((0.5 * (1.0 - root), 0.5 * (1.0 + root)))
}

/// Lower bound `b` on the Hilbert space dimension of any `n`-tuple summing to
/// `(a/b)·1` with `a/b` in lowest terms.
pub fn dim_lower_bound(a: i64, b: i64) -> Result<u64> {
    if a <= 0 || b <= 0 {
        return Err(Error::invalid(format!("{a}/{b} must have positive numerator and denominator")));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::invalid(format!("{a}/{b} is not in lowest terms")));
    }
    Ok(b as u64)
}

/// Exact test `α ∈ [(n − √(n²−4n))/2, (n + √(n²−4n))/2]`, i.e. `(2α − n)² ≤ n² − 4n`.
fn in_interval_exact(n: u32, alpha: &Scalar) -> bool {
    let x = alpha.mul(&Scalar::integer(2)).sub(&Scalar::integer(n as i64));
    let radicand = Scalar::integer((n as i64) * (n as i64) - 4 * n as i64);
    !x.mul(&x).gt(&radicand)
}

fn listed_lower_half(n: u32) -> Vec<Scalar> {
    match n {
        2 => vec![Scalar::integer(0), Scalar::integer(1)],
        3 => vec![Scalar::integer(0), Scalar::integer(1), Scalar::ratio(3, 2)],
        4 => vec![Scalar::integer(0), Scalar::integer(1), Scalar::integer(2)],
        _ => vec![
            Scalar::integer(0),
            Scalar::integer(1),
            Scalar::ratio(n as i64, n as i64 - 1),
        ],
    }
}

pub fn sigma_membership(q: &SigmaQuery) -> Result<SigmaVerdict> {
    let n = q.n;
    if n < 2 {
        return Err(Error::invalid(format!("Σ_n needs n ≥ 2 (got {n})")));
    }
    if !q.tol.is_finite() || q.tol < 0.0 {
        return Err(Error::invalid("endpoint tolerance must be finite and non-negative"));
    }
    let alpha = &q.alpha;
    let nn = Scalar::integer(n as i64);
    let dim_bound = || {
        alpha
            .as_rational()
            .and_then(|r| r.denom().abs().to_u64())
    };
    let verdict = |member, component, used| SigmaVerdict {
        member,
        component,
        dim_lower_bound: if member != Membership::Out { dim_bound() } else { None },
        endpoint_tolerance_used: used,
    };

    if alpha.lt(&Scalar::integer(0)) || alpha.gt(&nn) {
        return Ok(verdict(Membership::Out, Component::None, false));
    }

    if n >= 5 {
        match alpha {
            Scalar::Real(x) => {
                let (lo, hi) = continuum_interval(n)?;
                if *x >= lo && *x <= hi {
                    return Ok(verdict(Membership::In, Component::Interval, false));
                }
                if *x >= lo - q.tol && *x <= hi + q.tol {
                    return Ok(verdict(Membership::In, Component::Interval, true));
                }
            }
            _ => {
                if in_interval_exact(n, alpha) {
                    return Ok(verdict(Membership::In, Component::Interval, false));
                }
            }
        }
    }

    if alpha.is_rational() {
        let lower = listed_lower_half(n);
        if lower.iter().any(|p| p == alpha) {
            return Ok(verdict(Membership::In, Component::ListedPoint, false));
        }
        let mirror = nn.sub(alpha);
        if lower.contains(&mirror) {
            return Ok(verdict(Membership::In, Component::SymmetricImage, false));
        }
        if n <= 3 {
            return Ok(verdict(Membership::Out, Component::None, false));
        }
        return Ok(verdict(Membership::UnknownDiscrete, Component::None, false));
    }

    // Outside the interval every point of Σ_n is rational.
    Ok(verdict(Membership::Out, Component::None, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(n: u32, alpha: Scalar) -> SigmaVerdict {
        sigma_membership(&SigmaQuery::new(n, alpha)).unwrap()
    }

    #[test]
    fn small_n_are_fully_enumerated() {
        for a in [0, 1, 2] {
            assert_eq!(member(2, Scalar::integer(a)).member, Membership::In);
        }
        let v = member(2, Scalar::integer(1));
        assert_eq!(v.component, Component::ListedPoint);
        assert_eq!(member(2, Scalar::ratio(1, 2)).member, Membership::Out);
        assert_eq!(member(3, Scalar::ratio(3, 2)).member, Membership::In);
        assert_eq!(member(3, Scalar::ratio(4, 3)).member, Membership::Out);
        assert_eq!(member(3, Scalar::integer(3)).component, Component::SymmetricImage);
    }

    #[test]
    fn n4_handling() {
        assert_eq!(member(4, Scalar::integer(2)).member, Membership::In);
        assert_eq!(member(4, Scalar::integer(3)).component, Component::SymmetricImage);
        assert_eq!(member(4, Scalar::ratio(5, 3)).member, Membership::UnknownDiscrete);
        assert_eq!(member(4, Scalar::surd(1, 1, 2)).member, Membership::Out);
    }

    #[test]
    fn n5_examples() {
        let v = member(5, Scalar::integer(0));
        assert_eq!((v.member, v.component), (Membership::In, Component::ListedPoint));
        let v = member(5, Scalar::integer(2));
        assert_eq!((v.member, v.component), (Membership::In, Component::Interval));
        assert_eq!(v.dim_lower_bound, Some(1));
        let v = member(5, Scalar::ratio(13, 10));
        assert_eq!(v.member, Membership::UnknownDiscrete);
        assert_eq!(v.dim_lower_bound, Some(10));
        assert_eq!(member(5, Scalar::real(0.5)).member, Membership::Out);
        assert_eq!(member(5, Scalar::surd(1, 2, 2)).member, Membership::Out);
        assert_eq!(member(5, Scalar::ratio(5, 4)).component, Component::ListedPoint);
        assert_eq!(member(5, Scalar::ratio(15, 4)).component, Component::SymmetricImage);
        assert_eq!(member(5, Scalar::integer(6)).member, Membership::Out);
        assert_eq!(member(5, Scalar::integer(-1)).member, Membership::Out);
    }

    #[test]
    fn interval_endpoints_are_exact() {
        let lo: Scalar = "(5 - sqrt(5))/2".parse().unwrap();
        let hi: Scalar = "(5 + sqrt(5))/2".parse().unwrap();
        assert_eq!(member(5, lo.clone()).component, Component::Interval);
        assert_eq!(member(5, hi).component, Component::Interval);
        let below = lo.sub(&Scalar::ratio(1, 1_000_000_000));
        assert_eq!(member(5, below).member, Membership::Out);
    }

    #[test]
    fn floating_endpoint_tolerance_is_recorded() {
        let (lo, _) = continuum_interval(5).unwrap();
        let v = member(5, Scalar::real(lo - 1e-13));
        assert_eq!(v.member, Membership::In);
        assert!(v.endpoint_tolerance_used);
        assert_eq!(v.dim_lower_bound, None);
        let v = member(5, Scalar::real(lo - 1e-9));
        assert_eq!(v.member, Membership::Out);
    }

    #[test]
    fn rejects_small_n() {
        assert!(sigma_membership(&SigmaQuery::new(1, Scalar::integer(0))).is_err());
    }

    #[test]
    fn pi_interval_values() {
        let (lo, hi) = pi_interval(5).unwrap();
        let r = (0.2f64).sqrt();
        assert!((lo - 0.5 * (1.0 - r)).abs() < 1e-15);
        assert!((lo - 0.276_393_202_250_021).abs() < 1e-12);
        assert!((hi - 0.723_606_797_749_979).abs() < 1e-12);
        assert!(pi_interval(4).is_err());
    }

    #[test]
    fn dim_bound_examples() {
        assert_eq!(dim_lower_bound(5, 3).unwrap(), 3);
        assert_eq!(dim_lower_bound(2, 1).unwrap(), 1);
        assert_eq!(dim_lower_bound(7, 10).unwrap(), 10);
        assert!(dim_lower_bound(10, 6).is_err());
        assert!(dim_lower_bound(0, 1).is_err());
        assert!(dim_lower_bound(3, -2).is_err());
    }
}
