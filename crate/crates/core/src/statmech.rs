//! Fermi–Dirac statistics and per-area thermodynamic densities of the
//! neutral material (Fermi level pinned at zero).
//!
//! Only the two positive bands are integrated. Filling the negative bands
//! with occupations `1 − f` and subtracting the (divergent) zero-temperature
//! ground state leaves exactly the positive-band contribution a second time,
//! so every density below carries an overall factor of 2 on top of the spin
//! degeneracy already folded into the `k dk / π` measure.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{FieldPotential, MaterialParams};
use crate::quadrature::{integrate_decaying, QuadratureSettings};

/// Boltzmann constant in meV/K.
pub const BOLTZMANN_MEV_PER_K: f64 = 0.086_173_332_62;

/// Temperature and field at one corner of a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    temperature: f64,
    u: FieldPotential,
}

impl ThermoPoint {
    pub fn new(temperature: f64, u: impl Into<FieldPotential>) -> Result<Self> {
        let u = u.into();
        check_temperature(temperature)?;
        if !u.0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "field potential must be finite, got {}",
                u.0
            )));
        }
        Ok(Self { temperature, u })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn u(&self) -> FieldPotential {
        self.u
    }

    /// `k_B·T` in meV.
    pub fn thermal_energy(&self) -> f64 {
        BOLTZMANN_MEV_PER_K * self.temperature
    }
}

pub(crate) fn check_temperature(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "temperature must be finite and > 0 K, got {t}"
        )))
    }
}

/// A per-area density in natural units together with its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
    pub error_estimate: f64,
}

pub fn fermi_occupation(energy: f64, temperature: f64) -> Result<f64> {
    check_temperature(temperature)?;
    Ok(fermi(energy / (BOLTZMANN_MEV_PER_K * temperature)))
}

/// `1 / (e^x + 1)`, evaluated without overflow.
#[inline]
pub(crate) fn fermi(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Entropy of one fermionic mode with occupation `f`, in units of k_B.
#[inline]
pub fn mode_entropy(f: f64) -> f64 {
    let mut s = 0.0;
    if f > 0.0 {
        s -= f * f.ln();
    }
    if f < 1.0 {
        s -= (1.0 - f) * (-f).ln_1p();
    }
    s
}

/// `ln(1 + e^{-x})` for `x >= 0`.
#[inline]
pub(crate) fn log_one_plus_exp_neg(x: f64) -> f64 {
    (-x).exp().ln_1p()
}

/// Slowest decay length of integrands at the given temperatures and fields.
pub(crate) fn decay_scale(
    p: &MaterialParams,
    temperatures: &[f64],
    fields: &[FieldPotential],
) -> f64 {
    let t_max = temperatures.iter().cloned().fold(0.0, f64::max);
    let u_max = fields.iter().map(|u| u.0.abs()).fold(0.0, f64::max);
    (BOLTZMANN_MEV_PER_K * t_max).max(p.lambda_so() + u_max)
}

fn integrate_density<F>(
    f: F,
    scale: f64,
    prefactor: f64,
    q: &QuadratureSettings,
) -> Result<DensityValue>
where
    F: Fn(f64) -> f64,
{
    let r = integrate_decaying(f, scale, q)?.require_converged()?;
    Ok(DensityValue {
        value: prefactor * r.value,
        error_estimate: prefactor.abs() * r.error_estimate,
    })
}

/// Renormalized internal energy `U = (2/π) ∫ dk k Σ_n E_n f(E_n)`, meV³.
pub fn internal_energy_density(
    pt: &ThermoPoint,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<DensityValue> {
    let beta = 1.0 / pt.thermal_energy();
    let (m1, m2) = p.masses(pt.u);
    let integrand = move |k: f64| {
        let e1 = k.hypot(m1);
        let e2 = k.hypot(m2);
        k * (e1 * fermi(beta * e1) + e2 * fermi(beta * e2))
    };
    let scale = decay_scale(p, &[pt.temperature], &[pt.u]);
    integrate_density(integrand, scale, 2.0 / PI, q)
}

/// Entropy `S = (2 k_B/π) ∫ dk k Σ_n s(f_n)`, in meV³/K so that `T·S` is meV³.
pub fn entropy_density(
    pt: &ThermoPoint,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<DensityValue> {
    let beta = 1.0 / pt.thermal_energy();
    let (m1, m2) = p.masses(pt.u);
    let integrand = move |k: f64| {
        let f1 = fermi(beta * k.hypot(m1));
        let f2 = fermi(beta * k.hypot(m2));
        k * (mode_entropy(f1) + mode_entropy(f2))
    };
    let scale = decay_scale(p, &[pt.temperature], &[pt.u]);
    integrate_density(integrand, scale, 2.0 * BOLTZMANN_MEV_PER_K / PI, q)
}

/// Grand-potential term `T·S − U = (2 k_B T/π) ∫ dk k Σ_n ln(1 + e^{−βE_n})`, meV³.
pub fn grand_term_density(
    pt: &ThermoPoint,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<DensityValue> {
    let kt = pt.thermal_energy();
    let beta = 1.0 / kt;
    let (m1, m2) = p.masses(pt.u);
    let integrand = move |k: f64| {
        k * (log_one_plus_exp_neg(beta * k.hypot(m1)) + log_one_plus_exp_neg(beta * k.hypot(m2)))
    };
    let scale = decay_scale(p, &[pt.temperature], &[pt.u]);
    integrate_density(integrand, scale, 2.0 * kt / PI, q)
}
