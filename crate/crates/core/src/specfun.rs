//! Special-function kernels used by the closed-form phase profiles.

use crate::error::{Error, Result};

/// Parameter triple (a, b; c) of the Gauss hypergeometric function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Hyp2F1Params {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if c <= 0.0 && c == c.floor() {
            return Err(Error::Domain(format!(
                "2F1 parameter c = {c} is a non-positive integer"
            )));
        }
        Ok(Self { a, b, c })
    }

    /// The (1/2, 3/2; 5/2) instance appearing in the parabolic phase profile.
    pub fn parabolic_phase() -> Self {
        Self {
            a: 0.5,
            b: 1.5,
            c: 2.5,
        }
    }
}

/// Argument at which the evaluation switches from the direct power series to
/// the Pfaff-transformed series.
const SERIES_SWITCH: f64 = -0.5;
const MAX_TERMS: usize = 500;

/// Gauss hypergeometric 2F1(a, b; c; x) for non-positive real arguments.
///
/// For SERIES_SWITCH < x <= 0 the direct power series converges quickly; for
/// x <= SERIES_SWITCH the Pfaff transformation
/// 2F1(a,b;c;x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1)) maps the argument into
/// [0, 1/3], where the series again decays monotonically.
pub fn gauss_2f1(params: Hyp2F1Params, x: f64) -> Result<f64> {
    if x > 0.0 {
        return Err(Error::Domain(format!(
            "2F1 argument {x} > 0 outside supported domain"
        )));
    }
    if params.c <= 0.0 && params.c == params.c.floor() {
        return Err(Error::Domain(format!(
            "2F1 parameter c = {} is a non-positive integer",
            params.c
        )));
    }
    if x >= SERIES_SWITCH {
        Ok(series_2f1(params.a, params.b, params.c, x))
    } else {
        let t = x / (x - 1.0);
        let pre = (1.0 - x).powf(-params.a);
        Ok(pre * series_2f1(params.a, params.c - params.b, params.c, t))
    }
}

/// Direct power series, truncated when |term| < 1e-16 * |partial sum|.
fn series_2f1(a: f64, b: f64, c: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    sum
}

/// Principal-value arcsecant: arccos(1/x) in [0, pi], defined for |x| >= 1.
pub fn arcsec(x: f64) -> Result<f64> {
    if x.abs() < 1.0 {
        return Err(Error::Domain(format!("arcsec argument |{x}| < 1")));
    }
    Ok((1.0 / x).acos())
}
