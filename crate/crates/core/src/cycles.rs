//! Heat ledgers, net work and efficiency of the quantum Otto and Stirling
//! cycles.
//!
//! Otto corners: A → B isochore at `u_hot` touching the hot bath, B → C
//! adiabat to `u_cold` (occupations frozen), C → D isochore at `u_cold`
//! touching the cold bath, D → A adiabat back to `u_hot`.
//!
//! Stirling corners: A = (T_h, u_hot), B = (T_h, u_cold), C = (T_c, u_cold),
//! D = (T_c, u_hot). A → B and C → D are isotherms, B → C and D → A are
//! isoelectric strokes. Ground-state subtractions are dropped from the
//! per-stroke heats; they cancel in the net work.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{FieldPotential, MaterialParams};
use crate::quadrature::{integrate_decaying, QuadratureSettings};
use crate::statmech::{
    check_temperature, decay_scale, entropy_density, fermi, internal_energy_density,
    log_one_plus_exp_neg, DensityValue, ThermoPoint, BOLTZMANN_MEV_PER_K,
};

/// Bath temperatures (K) and the field potentials (meV) held on the hot and
/// cold strokes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub t_hot: f64,
    pub t_cold: f64,
    pub u_hot: f64,
    pub u_cold: f64,
}

pub type OttoSpec = CycleSpec;
pub type StirlingSpec = CycleSpec;

impl CycleSpec {
    pub fn new(t_hot: f64, t_cold: f64, u_hot: f64, u_cold: f64) -> Result<Self> {
        let spec = Self {
            t_hot,
            t_cold,
            u_hot,
            u_cold,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_temperature(self.t_hot)?;
        check_temperature(self.t_cold)?;
        for (name, u) in [("u_hot", self.u_hot), ("u_cold", self.u_cold)] {
            if !u.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {u}"
                )));
            }
        }
        Ok(())
    }

    fn decay_scale(&self, p: &MaterialParams) -> f64 {
        decay_scale(
            p,
            &[self.t_hot, self.t_cold],
            &[FieldPotential(self.u_hot), FieldPotential(self.u_cold)],
        )
    }

    /// Carnot bound `1 − T_c/T_h`.
    pub fn carnot(&self) -> f64 {
        1.0 - self.t_cold / self.t_hot
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Otto,
    Stirling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationMode {
    Engine,
    Refrigerator,
    Dissipator,
}

/// Engine when the positive-work condition holds with heat drawn from the
/// hot side; refrigerator when work is consumed while the cold bath gives up
/// heat; dissipator otherwise.
pub fn classify_mode(work: f64, q_in: f64, q_cold_absorbed: f64) -> OperationMode {
    if work > 0.0 && q_in > 0.0 {
        OperationMode::Engine
    } else if work <= 0.0 && q_cold_absorbed > 0.0 {
        OperationMode::Refrigerator
    } else {
        OperationMode::Dissipator
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OttoHeats {
    pub q_in: DensityValue,
    pub q_out: DensityValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirlingHeats {
    /// Isotherm A → B at `T_h`.
    pub q_ba: DensityValue,
    /// Isoelectric cooling B → C at `u_cold`.
    pub q_cb: DensityValue,
    /// Isotherm C → D at `T_c`.
    pub q_dc: DensityValue,
    /// Isoelectric heating D → A at `u_hot`.
    pub q_ad: DensityValue,
    /// Floating-point bound on the recombination of the eight densities.
    pub rounding: f64,
}

impl StirlingHeats {
    pub fn sum(&self) -> f64 {
        self.q_ba.value + self.q_cb.value + self.q_dc.value + self.q_ad.value
    }

    pub fn error_estimate(&self) -> f64 {
        self.q_ba.error_estimate
            + self.q_cb.error_estimate
            + self.q_dc.error_estimate
            + self.q_ad.error_estimate
            + self.rounding
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Heats {
    Otto {
        q_in: f64,
        q_out: f64,
    },
    Stirling {
        q_ba: f64,
        q_cb: f64,
        q_dc: f64,
        q_ad: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle: CycleKind,
    pub spec: CycleSpec,
    pub work: f64,
    /// Heat taken in per cycle: `q_in` (Otto) or `q_BA + q_AD` (Stirling).
    pub q_in: f64,
    pub heats: Heats,
    pub efficiency: Option<f64>,
    pub mode: OperationMode,
    /// Aggregated error bound on `work` (quadrature plus rounding).
    pub numerics: f64,
}

fn efficiency(spec: &CycleSpec, mode: OperationMode, work: f64, q_in: f64) -> Option<f64> {
    (mode == OperationMode::Engine && spec.t_hot > spec.t_cold).then(|| work / q_in)
}

fn rounding_bound(terms: &[f64]) -> f64 {
    8.0 * f64::EPSILON * terms.iter().map(|t| t.abs()).sum::<f64>()
}

fn integrate_heat<F>(f: F, scale: f64, q: &QuadratureSettings) -> Result<DensityValue>
where
    F: Fn(f64) -> f64,
{
    let prefactor = 2.0 / PI;
    let r = integrate_decaying(f, scale, q)?.require_converged()?;
    Ok(DensityValue {
        value: prefactor * r.value,
        error_estimate: prefactor * r.error_estimate,
    })
}

/// Heat absorbed on the hot isochore and on the cold isochore.
///
/// Occupations are thermal at B (hot bath, `u_hot`) and D (cold bath,
/// `u_cold`) and carried unchanged across the adiabats.
pub fn otto_heats(
    spec: &OttoSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<OttoHeats> {
    spec.validate()?;
    let beta_h = 1.0 / (BOLTZMANN_MEV_PER_K * spec.t_hot);
    let beta_c = 1.0 / (BOLTZMANN_MEV_PER_K * spec.t_cold);
    let (mh1, mh2) = p.masses(FieldPotential(spec.u_hot));
    let (mc1, mc2) = p.masses(FieldPotential(spec.u_cold));
    let scale = spec.decay_scale(p);

    // (E^h, E^c, f(B), f(D)) for both bands
    let levels = move |k: f64| {
        let (h1, h2) = (k.hypot(mh1), k.hypot(mh2));
        let (c1, c2) = (k.hypot(mc1), k.hypot(mc2));
        (
            [h1, h2],
            [c1, c2],
            [fermi(beta_h * h1), fermi(beta_h * h2)],
            [fermi(beta_c * c1), fermi(beta_c * c2)],
        )
    };
    let q_in = integrate_heat(
        |k| {
            let (eh, _, fb, fd) = levels(k);
            k * (eh[0] * (fb[0] - fd[0]) + eh[1] * (fb[1] - fd[1]))
        },
        scale,
        q,
    )?;
    let q_out = integrate_heat(
        |k| {
            let (_, ec, fb, fd) = levels(k);
            k * (ec[0] * (fd[0] - fb[0]) + ec[1] * (fd[1] - fb[1]))
        },
        scale,
        q,
    )?;
    Ok(OttoHeats { q_in, q_out })
}

pub fn otto_report(
    spec: &OttoSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<CycleReport> {
    let OttoHeats { q_in, q_out } = otto_heats(spec, p, q)?;
    let work = q_in.value + q_out.value;
    let numerics =
        q_in.error_estimate + q_out.error_estimate + rounding_bound(&[q_in.value, q_out.value]);
    let mode = classify_mode(work, q_in.value, q_out.value);
    Ok(CycleReport {
        cycle: CycleKind::Otto,
        spec: *spec,
        work,
        q_in: q_in.value,
        heats: Heats::Otto {
            q_in: q_in.value,
            q_out: q_out.value,
        },
        efficiency: efficiency(spec, mode, work, q_in.value),
        mode,
        numerics,
    })
}

/// The four stroke heats from renormalized entropies and internal energies.
pub fn stirling_heats(
    spec: &StirlingSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<StirlingHeats> {
    spec.validate()?;
    let a = ThermoPoint::new(spec.t_hot, spec.u_hot)?;
    let b = ThermoPoint::new(spec.t_hot, spec.u_cold)?;
    let c = ThermoPoint::new(spec.t_cold, spec.u_cold)?;
    let d = ThermoPoint::new(spec.t_cold, spec.u_hot)?;

    let [sa, sb, sc, sd] = [a, b, c, d].map(|pt| entropy_density(&pt, p, q));
    let [ua, ub, uc, ud] = [a, b, c, d].map(|pt| internal_energy_density(&pt, p, q));
    let (sa, sb, sc, sd) = (sa?, sb?, sc?, sd?);
    let (ua, ub, uc, ud) = (ua?, ub?, uc?, ud?);

    let (th, tc) = (spec.t_hot, spec.t_cold);
    let q_ba = DensityValue {
        value: th * (sb.value - sa.value),
        error_estimate: th * (sb.error_estimate + sa.error_estimate),
    };
    let q_cb = DensityValue {
        value: uc.value - ub.value,
        error_estimate: uc.error_estimate + ub.error_estimate,
    };
    let q_dc = DensityValue {
        value: tc * (sd.value - sc.value),
        error_estimate: tc * (sd.error_estimate + sc.error_estimate),
    };
    let q_ad = DensityValue {
        value: ua.value - ud.value,
        error_estimate: ua.error_estimate + ud.error_estimate,
    };
    let rounding = rounding_bound(&[
        th * sb.value,
        th * sa.value,
        tc * sd.value,
        tc * sc.value,
        ua.value,
        ub.value,
        uc.value,
        ud.value,
    ]);
    Ok(StirlingHeats {
        q_ba,
        q_cb,
        q_dc,
        q_ad,
        rounding,
    })
}

/// Stirling work from the grand-potential terms at the four corners,
/// `(2/π) ∫ dk k Σ_n [k_B T_h (ℓ_h(E^c) − ℓ_h(E^h)) + k_B T_c (ℓ_c(E^h) − ℓ_c(E^c))]`
/// with `ℓ(E) = ln(1 + e^{−βE})`.
pub fn stirling_work_grand(
    spec: &StirlingSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<DensityValue> {
    spec.validate()?;
    let kt_h = BOLTZMANN_MEV_PER_K * spec.t_hot;
    let kt_c = BOLTZMANN_MEV_PER_K * spec.t_cold;
    let (mh1, mh2) = p.masses(FieldPotential(spec.u_hot));
    let (mc1, mc2) = p.masses(FieldPotential(spec.u_cold));
    let integrand = move |k: f64| {
        let mut acc = 0.0;
        for (mh, mc) in [(mh1, mc1), (mh2, mc2)] {
            let eh = k.hypot(mh);
            let ec = k.hypot(mc);
            acc += kt_h * (log_one_plus_exp_neg(ec / kt_h) - log_one_plus_exp_neg(eh / kt_h))
                + kt_c * (log_one_plus_exp_neg(eh / kt_c) - log_one_plus_exp_neg(ec / kt_c));
        }
        k * acc
    };
    integrate_heat(integrand, spec.decay_scale(p), q)
}

/// Stirling report. Work is taken from the grand-potential route and
/// cross-checked against the sum of the four heats.
pub fn stirling_report(
    spec: &StirlingSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<CycleReport> {
    let heats = stirling_heats(spec, p, q)?;
    let grand = stirling_work_grand(spec, p, q)?;
    let heat_sum = heats.sum();
    let numerics = heats.error_estimate() + grand.error_estimate;
    let allowed = 10.0 * numerics;
    let mismatch = (heat_sum - grand.value).abs();
    if mismatch.is_nan() || mismatch > allowed {
        return Err(Error::Inconsistent {
            heat_sum,
            grand: grand.value,
            allowed,
        });
    }
    let work = grand.value;
    let q_in = heats.q_ba.value + heats.q_ad.value;
    let mode = classify_mode(work, q_in, heats.q_dc.value);
    Ok(CycleReport {
        cycle: CycleKind::Stirling,
        spec: *spec,
        work,
        q_in,
        heats: Heats::Stirling {
            q_ba: heats.q_ba.value,
            q_cb: heats.q_cb.value,
            q_dc: heats.q_dc.value,
            q_ad: heats.q_ad.value,
        },
        efficiency: efficiency(spec, mode, work, q_in),
        mode,
        numerics,
    })
}

pub fn cycle_report(
    kind: CycleKind,
    spec: &CycleSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<CycleReport> {
    match kind {
        CycleKind::Otto => otto_report(spec, p, q),
        CycleKind::Stirling => stirling_report(spec, p, q),
    }
}
