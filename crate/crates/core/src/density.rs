//! Critical deployment densities under a coverage constraint.
//!
//! Densifying the network first grows spatial throughput, then destroys
//! it: with a positive antenna height difference the coverage
//! probability decays exponentially in density, so `ST = lambda CP
//! log2(1+tau)` has an interior maximum. Two densities matter:
//!
//! * `lambda_dagger`, the unconstrained throughput maximizer, and
//! * `lambda_star`, the largest density that still meets a coverage
//!   requirement `CP >= epsilon` (the throughput maximizer under the
//!   constraint, since ST increases up to `lambda_dagger` and the
//!   constraint boundary sits below it whenever the constraint binds).
//!
//! Both are closed-form for the single-slope model and found numerically
//! (golden section / bisection) for any other model.

use serde::Serialize;
use thiserror::Error;

use crate::analytic::{coverage_probability, spatial_throughput, EvalError, NetworkConfig};
use crate::montecarlo::FadingModel;
use crate::pathloss::PathlossModel;
use crate::special::omega1;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("coverage requirement must lie strictly between 0 and 1, got {0}")]
    Epsilon(f64),
    #[error("critical densities diverge at zero antenna height difference: throughput has no interior maximum")]
    ZeroHeight,
    #[error("throughput is not unimodal over the scanned density grid ({rises} rising stretches); cannot search for a maximum")]
    NotUnimodal { rises: usize },
    #[error("failed to bracket the throughput maximum within {decades} decades of density")]
    BracketFailure { decades: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Coverage requirement `CP > epsilon`, `epsilon` strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QosConstraint {
    epsilon: f64,
}

impl QosConstraint {
    pub fn new(epsilon: f64) -> Result<Self, DensityError> {
        if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
            return Err(DensityError::Epsilon(epsilon));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Feasibility budget `g(epsilon) = 1/epsilon - 1`.
    pub fn budget(&self) -> f64 {
        1.0 / self.epsilon - 1.0
    }
}

/// Critical densities in BS per square meter. `lambda_star` is `None`
/// when no density meets the coverage requirement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalDensities {
    pub lambda_star: Option<f64>,
    pub lambda_dagger: f64,
}

/// Whether the coverage requirement is attainable at all under a
/// single-slope model: `C1 < 1/epsilon - 1` with
/// `C1 = 2 tau omega1(tau, alpha0)/(alpha0 - 2)`. Density does not enter;
/// the flat-network ceiling `1/(1+C1)` must already exceed `epsilon`.
pub fn necessary_condition(alpha0: f64, tau: f64, qos: QosConstraint) -> bool {
    assert!(alpha0 > 2.0, "single-slope analysis requires alpha0 > 2, got {alpha0}");
    assert!(tau > 0.0, "threshold must be positive, got {tau}");
    let c1 = 2.0 * tau * omega1(tau, alpha0) / (alpha0 - 2.0);
    c1 < qos.budget()
}

/// Largest density meeting `CP >= epsilon` under a single-slope model:
///
/// `lambda_star = (alpha0 - 2) ln[eps^{-1} (1 + C1)^{-1}]
///                / (2 pi tau omega1(tau, alpha0) dh^2)`.
///
/// Returns `None` when the requirement is infeasible at any density.
pub fn lambda_star(
    alpha0: f64,
    tau: f64,
    ahd: f64,
    qos: QosConstraint,
) -> Result<Option<f64>, DensityError> {
    if ahd <= 0.0 {
        return Err(DensityError::ZeroHeight);
    }
    if !necessary_condition(alpha0, tau, qos) {
        return Ok(None);
    }
    let w = omega1(tau, alpha0);
    let c1 = 2.0 * tau * w / (alpha0 - 2.0);
    let log_margin = -(qos.epsilon() * (1.0 + c1)).ln();
    Ok(Some((alpha0 - 2.0) * log_margin / (2.0 * std::f64::consts::PI * tau * w * ahd * ahd)))
}

/// Unconstrained throughput-maximizing density under a single-slope
/// model: `(alpha0 - 2) / (2 pi tau omega1(tau, alpha0) dh^2)`.
pub fn lambda_dagger(alpha0: f64, tau: f64, ahd: f64) -> Result<f64, DensityError> {
    assert!(alpha0 > 2.0, "single-slope analysis requires alpha0 > 2, got {alpha0}");
    assert!(tau > 0.0, "threshold must be positive, got {tau}");
    if ahd <= 0.0 {
        return Err(DensityError::ZeroHeight);
    }
    Ok((alpha0 - 2.0) / (2.0 * std::f64::consts::PI * tau * omega1(tau, alpha0) * ahd * ahd))
}

/// Relative width tolerance of the golden-section search (1% in density).
const SEARCH_REL_TOL: f64 = 0.01;

/// Numerical critical density for any pathloss model.
///
/// Without a constraint, returns the throughput-maximizing density
/// (golden section over log density after bracketing by doubling, with a
/// coarse-grid unimodality check). With a constraint, returns the larger
/// of the feasibility set's densities: the coverage boundary
/// `CP(lambda) = epsilon` on the decreasing branch, capped at the
/// unconstrained maximizer; `None` when the requirement is infeasible.
pub fn critical_density_numeric(
    model: &PathlossModel,
    ahd: f64,
    tau: f64,
    qos: Option<QosConstraint>,
) -> Result<Option<f64>, DensityError> {
    if ahd <= 0.0 {
        return Err(DensityError::ZeroHeight);
    }
    let st_at = |lambda: f64| -> Result<f64, DensityError> {
        let cfg = NetworkConfig::new(lambda, ahd, tau, 1.0, model.clone(), FadingModel::Rayleigh)
            .expect("validated inputs");
        Ok(spatial_throughput(&cfg)?)
    };
    let cp_at = |lambda: f64| -> Result<f64, DensityError> {
        let cfg = NetworkConfig::new(lambda, ahd, tau, 1.0, model.clone(), FadingModel::Rayleigh)
            .expect("validated inputs");
        Ok(coverage_probability(&cfg)?)
    };

    // the single-slope closed form with the outermost exponent sets the
    // density scale of the peak; search four decades either side
    let alpha_last = *model.exponents().last().unwrap();
    let scale = (alpha_last - 2.0)
        / (2.0 * std::f64::consts::PI * tau * omega1(tau, alpha_last) * ahd * ahd);
    let lambda_lo = scale * 1e-4;

    // bracket the peak by doubling
    let mut prev = st_at(lambda_lo)?;
    let mut peak_hi = None;
    let mut lambda = lambda_lo;
    for _ in 0..60 {
        let next_lambda = lambda * 2.0;
        let next = st_at(next_lambda)?;
        if next < prev {
            peak_hi = Some(next_lambda);
            break;
        }
        prev = next;
        lambda = next_lambda;
    }
    let hi = peak_hi.ok_or(DensityError::BracketFailure { decades: 60.0 * 2f64.log10() })?;
    let lo = (hi / 8.0).max(lambda_lo);

    // coarse unimodality check over the whole scanned range
    let mut rises = 0usize;
    let mut in_rise = false;
    let mut last = None;
    let grid_hi = hi * 4.0;
    for i in 0..60 {
        let l = lambda_lo * (grid_hi / lambda_lo).powf(i as f64 / 59.0);
        let v = st_at(l)?;
        if let Some(p) = last {
            let d = v - p;
            if d > 1e-12 * v.abs() {
                if !in_rise {
                    rises += 1;
                    in_rise = true;
                }
            } else if d < -1e-12 * v.abs() {
                in_rise = false;
            }
        }
        last = Some(v);
    }
    if rises > 1 {
        return Err(DensityError::NotUnimodal { rises });
    }

    let lambda_max = golden_section_max(
        |ln_l| st_at(ln_l.exp()),
        lo.ln(),
        hi.ln(),
        SEARCH_REL_TOL.ln_1p(),
    )?
    .exp();

    let Some(qos) = qos else {
        return Ok(Some(lambda_max));
    };

    // feasibility: coverage is maximal toward vanishing density
    let eps = qos.epsilon();
    let mut best_cp: f64 = 0.0;
    for i in 0..20 {
        let l = lambda_lo * 1e-2 * (grid_hi / (lambda_lo * 1e-2)).powf(i as f64 / 19.0);
        best_cp = best_cp.max(cp_at(l)?);
    }
    if best_cp < eps {
        return Ok(None);
    }

    // largest density on the decreasing branch with CP >= eps
    let mut lo_b = lambda_lo * 1e-2;
    if cp_at(lo_b)? < eps {
        return Ok(None);
    }
    let mut hi_b = lo_b;
    for _ in 0..120 {
        hi_b *= 2.0;
        if cp_at(hi_b)? < eps {
            break;
        }
        lo_b = hi_b;
    }
    for _ in 0..200 {
        if hi_b / lo_b - 1.0 < 1e-9 {
            break;
        }
        let mid = (lo_b.ln() + hi_b.ln()).mul_add(0.5, 0.0).exp();
        if cp_at(mid)? >= eps {
            lo_b = mid;
        } else {
            hi_b = mid;
        }
    }
    Ok(Some(lo_b.min(lambda_max)))
}

/// Golden-section maximum of `f` over `[a, b]`, to interval width `tol`.
fn golden_section_max<E>(
    f: impl Fn(f64) -> Result<f64, E>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64, E> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::cp_sspm;

    fn qos(e: f64) -> QosConstraint {
        QosConstraint::new(e).unwrap()
    }

    #[test]
    fn qos_validation() {
        assert!(QosConstraint::new(0.0).is_err());
        assert!(QosConstraint::new(1.0).is_err());
        assert!(QosConstraint::new(f64::NAN).is_err());
        assert_eq!(qos(0.5).budget(), 1.0);
    }

    #[test]
    fn necessary_condition_examples() {
        // alpha0 = 5, tau = 1: C1 ~ 0.507 < 1
        assert!(necessary_condition(5.0, 1.0, qos(0.5)));
        assert!(!necessary_condition(5.0, 1.0, qos(0.999999)));
        // just either side of the feasibility boundary 1/(1+C1)
        let c1 = 2.0 * omega1(1.0, 5.0) / 3.0;
        let boundary = 1.0 / (1.0 + c1);
        assert!(!necessary_condition(5.0, 1.0, qos(boundary + 2e-12)));
        assert!(necessary_condition(5.0, 1.0, qos(boundary - 2e-12)));
    }

    #[test]
    fn necessary_condition_monotone_in_epsilon() {
        let mut feasible_so_far = true;
        for i in 1..100 {
            let e = i as f64 / 100.0;
            let f = necessary_condition(5.0, 1.0, qos(e));
            assert!(feasible_so_far || !f, "feasibility regained at epsilon={e}");
            feasible_so_far = f;
        }
    }

    #[test]
    fn closed_form_values() {
        // independently computed: lambda_dagger(5, 1, 2) = 0.15680193218444559 /m^2
        let ld = lambda_dagger(5.0, 1.0, 2.0).unwrap();
        assert!((ld - 0.15680193218444559).abs() < 1e-13 * ld);
        let ls = lambda_star(5.0, 1.0, 2.0, qos(0.5)).unwrap().unwrap();
        assert!((ls - 0.044326722989993538).abs() < 1e-13 * ls);
        assert!((ld / ls - 3.5374131360859359).abs() < 1e-10);
        let ls6 = lambda_star(5.0, 1.0, 2.0, qos(0.6)).unwrap().unwrap();
        assert!((ld / ls6 - 9.9630473428649929).abs() < 1e-10);
    }

    #[test]
    fn lambda_star_round_trip() {
        // CP at lambda_star equals epsilon by construction
        for e in [0.3, 0.5, 0.6] {
            let ls = lambda_star(5.0, 1.0, 2.0, qos(e)).unwrap().unwrap();
            let cfg = NetworkConfig::new(
                ls,
                2.0,
                1.0,
                0.2,
                PathlossModel::single_slope(5.0).unwrap(),
                FadingModel::Rayleigh,
            )
            .unwrap();
            let cp = cp_sspm(&cfg).unwrap();
            assert!((cp - e).abs() < 1e-9, "epsilon={e}: CP {cp}");
        }
    }

    #[test]
    fn lambda_star_infeasible_near_one() {
        assert_eq!(lambda_star(5.0, 1.0, 2.0, qos(0.99)).unwrap(), None);
        // just feasible: lambda_star collapses toward zero
        let c1 = 2.0 * omega1(1.0, 5.0) / 3.0;
        let e = 1.0 / (1.0 + c1) - 1e-9;
        let ls = lambda_star(5.0, 1.0, 2.0, qos(e)).unwrap().unwrap();
        assert!(ls > 0.0 && ls < 1e-8, "lambda_star {ls} should vanish at the boundary");
    }

    #[test]
    fn inverse_square_height_law() {
        let ref_star = lambda_star(5.0, 1.0, 1.0, qos(0.5)).unwrap().unwrap();
        let ref_dagger = lambda_dagger(5.0, 1.0, 1.0).unwrap();
        for dh in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let s = lambda_star(5.0, 1.0, dh, qos(0.5)).unwrap().unwrap() * dh * dh;
            let d = lambda_dagger(5.0, 1.0, dh).unwrap() * dh * dh;
            assert!((s - ref_star).abs() < 1e-9 * ref_star, "dh={dh}");
            assert!((d - ref_dagger).abs() < 1e-9 * ref_dagger, "dh={dh}");
        }
        // doubling the height quarters the critical density
        let d1 = lambda_dagger(5.0, 1.0, 3.0).unwrap();
        let d2 = lambda_dagger(5.0, 1.0, 6.0).unwrap();
        assert!((d1 / d2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn dagger_decreases_with_threshold() {
        let mut last = f64::INFINITY;
        for tau in [0.5, 1.0, 2.0, 4.0] {
            let d = lambda_dagger(5.0, tau, 2.0).unwrap();
            assert!(d < last, "tau={tau}");
            last = d;
        }
    }

    #[test]
    fn zero_height_is_rejected() {
        assert!(matches!(lambda_dagger(5.0, 1.0, 0.0), Err(DensityError::ZeroHeight)));
        assert!(matches!(lambda_star(5.0, 1.0, 0.0, qos(0.5)), Err(DensityError::ZeroHeight)));
        let m = PathlossModel::single_slope(5.0).unwrap();
        assert!(matches!(
            critical_density_numeric(&m, 0.0, 1.0, None),
            Err(DensityError::ZeroHeight)
        ));
    }

    #[test]
    fn numeric_matches_closed_forms() {
        let m = PathlossModel::single_slope(5.0).unwrap();
        let dagger = critical_density_numeric(&m, 2.0, 1.0, None).unwrap().unwrap();
        let want = lambda_dagger(5.0, 1.0, 2.0).unwrap();
        assert!((dagger - want).abs() < 0.01 * want, "numeric {dagger} vs closed {want}");

        let star = critical_density_numeric(&m, 2.0, 1.0, Some(qos(0.5))).unwrap().unwrap();
        let want = lambda_star(5.0, 1.0, 2.0, qos(0.5)).unwrap().unwrap();
        assert!((star - want).abs() < 0.01 * want, "numeric {star} vs closed {want}");
    }

    #[test]
    fn numeric_dual_slope_decreases_with_height() {
        let m = PathlossModel::dual_slope(1.5, 5.0, 10.0).unwrap();
        let a = critical_density_numeric(&m, 2.0, 1.0, Some(qos(0.5))).unwrap().unwrap();
        let b = critical_density_numeric(&m, 4.0, 1.0, Some(qos(0.5))).unwrap().unwrap();
        assert!(a.is_finite() && b.is_finite());
        assert!(b < a, "critical density should fall with height: {a} -> {b}");
    }

    #[test]
    fn numeric_infeasible_epsilon() {
        let m = PathlossModel::single_slope(5.0).unwrap();
        assert_eq!(critical_density_numeric(&m, 2.0, 1.0, Some(qos(0.999))).unwrap(), None);
    }
}
