//! Globally adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss estimate, bisecting
//! the interval with the largest error estimate until the summed error
//! meets the requested tolerance. The coverage integrands are smooth
//! within pathloss segments, so callers integrate segment by segment and
//! the subdivision depth stays small.

use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: value {value:.6e}, error estimate {abs_error:.3e} after {subdivisions} subdivisions")]
    ToleranceNotReached { value: f64, abs_error: f64, subdivisions: usize },
    #[error("integrand returned a non-finite value near x = {x:.6e}")]
    NonFinite { x: f64 },
}

/// Converged integral with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

// 15-point Kronrod abscissae (positive half) and weights, with the
// embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod evaluation over `[a, b]`.
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.abs();
    let mut samples = [0.0_f64; 15];
    samples[7] = f_center;

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[j] = f1;
        samples[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((samples[j] - mean).abs() + (samples[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0_f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

#[derive(Debug)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_SUBDIVISIONS: usize = 512;

/// Integrates `f` over the finite interval `[a, b]` to the requested
/// relative tolerance (with an absolute floor for integrals near zero).
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature, QuadError> {
    assert!(a.is_finite() && b.is_finite() && a <= b);
    if a == b {
        return Ok(Quadrature { value: 0.0, abs_error: 0.0, subdivisions: 0 });
    }

    let (value, error) = qk15(f, a, b);
    if !value.is_finite() {
        return Err(QuadError::NonFinite { x: 0.5 * (a + b) });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;

    for n in 0..MAX_SUBDIVISIONS {
        if total_error <= abs_tol.max(rel_tol * total_value.abs()) {
            return Ok(Quadrature { value: total_value, abs_error: total_error, subdivisions: n });
        }
        let worst = heap.pop().expect("non-empty interval heap");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = qk15(f, worst.a, mid);
        let (rv, re) = qk15(f, mid, worst.b);
        if !(lv.is_finite() && rv.is_finite()) {
            return Err(QuadError::NonFinite { x: mid });
        }
        total_value += lv + rv - worst.value;
        total_error += le + re - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Interval { a: mid, b: worst.b, value: rv, error: re });
    }

    Err(QuadError::ToleranceNotReached {
        value: total_value,
        abs_error: total_error,
        subdivisions: MAX_SUBDIVISIONS,
    })
}
