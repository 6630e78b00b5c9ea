//! Similarity factorization `w = e^s F` of solutions of `∂̄w = α w̄`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{area_lp_norm_within, wirtinger_derivatives, GridFunction};
use crate::transforms::{cauchy, reflect_transform};

/// Interior disk on which residuals are measured, away from rim stencils.
pub const RESIDUAL_RADIUS: f64 = 0.9;

/// Boundary normalization of the exponent `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `Im tr s = 0` and `∫_T Re s = 0`: `s = C(β) − R(β)`.
    RealOnT,
    /// `Re tr s = 0` and `∫_T Im s = 0`: `s = C(β) + R(β)`.
    ImaginaryOnT,
}

#[derive(Clone, Debug)]
pub struct Factorization {
    /// Exponent; `None` for the degenerate factorization of `w ≡ 0`.
    pub s: Option<GridFunction>,
    pub f: GridFunction,
    pub normalization: Normalization,
    /// `‖∂̄F‖_{L²(D_{0.9})}`.
    pub residual_holo: f64,
    /// `‖∂̄w − α w̄‖_{L²(D_{0.9})}` of `e^s F`.
    pub residual_beltrami: f64,
}

impl Factorization {
    pub fn is_degenerate(&self) -> bool {
        self.s.is_none()
    }
}

/// `conj(w)/w` with the convention that it vanishes where `|w| ≤ threshold`.
pub(crate) fn phase_quotient(w: Complex64, threshold: f64) -> Complex64 {
    if w.norm() <= threshold {
        Complex64::new(0.0, 0.0)
    } else {
        w.conj() / w
    }
}

/// Absolute threshold from a relative one: `rel · max|w|`.
pub(crate) fn absolute_threshold(w: &GridFunction, rel: f64) -> f64 {
    rel * w.max_abs()
}

/// `s = C(β) ∓ R(β)` for the chosen normalization.
pub fn exponent_for(beta: &GridFunction, normalization: Normalization) -> GridFunction {
    let c = cauchy(beta);
    let r = reflect_transform(beta);
    match normalization {
        Normalization::RealOnT => &c - &r,
        Normalization::ImaginaryOnT => &c + &r,
    }
}

/// Factors `w = e^s F` with `β = α·conj(w)/w` and `s` from [`exponent_for`].
///
/// `zero_threshold` is relative to `max |w|`; below it the quotient
/// `conj(w)/w` is set to zero.
pub fn factorize(
    w: &GridFunction,
    alpha: &GridFunction,
    normalization: Normalization,
    zero_threshold: f64,
) -> Result<Factorization> {
    w.check_grid(alpha)?;
    w.require_unmasked("factorize: w")?;
    alpha.require_unmasked("factorize: alpha")?;
    let g = w.grid();
    let thr = absolute_threshold(w, zero_threshold);
    if w.max_abs() == 0.0 {
        return Ok(Factorization {
            s: None,
            f: GridFunction::zeros(g),
            normalization,
            residual_holo: 0.0,
            residual_beltrami: 0.0,
        });
    }
    let beta = alpha.zip_map(w, |a, w| a * phase_quotient(w, thr));
    let s = exponent_for(&beta, normalization);
    let f = s.zip_map(w, |s, w| (-s).exp() * w);
    let (_, dbf) = wirtinger_derivatives(&f);
    let residual_holo = area_lp_norm_within(&dbf, 2.0, RESIDUAL_RADIUS)?;
    let residual = residual_beltrami(&reconstruct(&s, &f), alpha)?;
    Ok(Factorization {
        s: Some(s),
        f,
        normalization,
        residual_holo,
        residual_beltrami: residual,
    })
}

/// `e^s F` pointwise.
pub fn reconstruct(s: &GridFunction, f: &GridFunction) -> GridFunction {
    s.zip_map(f, |s, f| s.exp() * f)
}

/// `‖∂̄w − α w̄‖_{L²(D_{0.9})}`.
pub fn residual_beltrami(w: &GridFunction, alpha: &GridFunction) -> Result<f64> {
    w.check_grid(alpha)?;
    let (_, db) = wirtinger_derivatives(w);
    let r = db.zip_map(&alpha.zip_map(w, |a, w| a * w.conj()), |d, aw| d - aw);
    area_lp_norm_within(&r, 2.0, RESIDUAL_RADIUS)
}

/// The coefficient `α = ∂̄s · e^s F / (e^{s̄} conj(F))` for which `e^s F`
/// solves `∂̄w = α w̄`; zero where `|F| ≤ zero_threshold · max|F|`.
pub fn alpha_from_pair(
    s: &GridFunction,
    f: &GridFunction,
    zero_threshold: f64,
) -> Result<GridFunction> {
    s.check_grid(f)?;
    if f.max_abs() == 0.0 {
        return Err(Error::ZeroFunction("alpha_from_pair: F"));
    }
    let thr = absolute_threshold(f, zero_threshold);
    let (_, dbs) = wirtinger_derivatives(s);
    let ph = f.map(|v| phase_quotient(v, thr).conj());
    let e = s.map(|s| (s - s.conj()).exp());
    Ok(&(&dbs * &e) * &ph)
}
