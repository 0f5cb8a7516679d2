//! Low-energy band structure of a buckled honeycomb monolayer (stanene class)
//! in a perpendicular electric field.
//!
//! Natural units are used throughout: ħ = v_f = 1, so momenta carry meV.
//! The field enters only through the on-site potential `u = l·ε_z` (meV).

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spin-orbit coupling of the working substance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    lambda_so: f64,
}

impl MaterialParams {
    /// Stanene spin-orbit coupling, 30 meV.
    pub const STANENE: MaterialParams = MaterialParams { lambda_so: 30.0 };

    pub fn new(lambda_so: f64) -> Result<Self> {
        if !lambda_so.is_finite() || lambda_so <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda_so must be finite and > 0, got {lambda_so}"
            )));
        }
        Ok(Self { lambda_so })
    }

    pub fn lambda_so(&self) -> f64 {
        self.lambda_so
    }

    /// Field potential at which the gap closes. Equal to `lambda_so`.
    pub fn critical_potential(&self) -> f64 {
        self.lambda_so
    }

    /// The two positive bands at momentum `k`.
    ///
    /// `e1 = sqrt(k² + (|u| − λ)²)`, `e2 = sqrt(k² + (|u| + λ)²)`.
    pub fn band_energies(&self, k: f64, u: FieldPotential) -> Result<BandPair> {
        if !k.is_finite() || !u.0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "band energies need finite inputs, got k = {k}, u = {}",
                u.0
            )));
        }
        if k < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "momentum must be >= 0, got {k}"
            )));
        }
        let (m1, m2) = self.masses(u);
        Ok(BandPair {
            e1: k.hypot(m1),
            e2: k.hypot(m2),
        })
    }

    /// Mass terms `(||u| − λ|, |u| + λ)` of the two positive bands.
    #[inline]
    pub fn masses(&self, u: FieldPotential) -> (f64, f64) {
        let a = u.0.abs();
        ((a - self.lambda_so).abs(), a + self.lambda_so)
    }

    /// Gap at the Dirac point, `2·|λ − |u||`.
    pub fn band_gap(&self, u: FieldPotential) -> f64 {
        2.0 * (self.lambda_so - u.0.abs()).abs()
    }

    pub fn classify_phase(&self, u: FieldPotential) -> Phase {
        let a = u.0.abs();
        if a < self.lambda_so {
            Phase::TopologicalInsulator
        } else if a > self.lambda_so {
            Phase::BandInsulator
        } else {
            Phase::Critical
        }
    }

    /// Four-band Bloch Hamiltonian at valley `valley`.
    ///
    /// Basis ordering follows the block form with diagonal
    /// `(ηλ + u, −ηλ + u, −ηλ − u, ηλ − u)` and `k_x ± iηk_y` couplings
    /// between entries (0,2) and (1,3).
    pub fn hamiltonian_matrix(
        &self,
        kx: f64,
        ky: f64,
        valley: Valley,
        u: FieldPotential,
    ) -> Matrix4<Complex64> {
        let eta = valley.eta();
        let lam = eta * self.lambda_so;
        let u = u.0;
        let up = Complex64::new(kx, eta * ky);
        let dn = up.conj();
        let z = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        #[rustfmt::skip]
        let h = Matrix4::new(
            re(lam + u), z,          up,          z,
            z,           re(-lam + u), z,         up,
            dn,          z,          re(-lam - u), z,
            z,           dn,         z,           re(lam - u),
        );
        h
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::STANENE
    }
}

/// On-site potential `u = l·ε_z` in meV. May be negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldPotential(pub f64);

impl FieldPotential {
    pub fn mev(self) -> f64 {
        self.0
    }
}

impl From<f64> for FieldPotential {
    fn from(u: f64) -> Self {
        FieldPotential(u)
    }
}

/// Positive-energy band pair at one momentum, `e1 <= e2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPair {
    pub e1: f64,
    pub e2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    TopologicalInsulator,
    BandInsulator,
    Critical,
}

/// Dirac valley `K` (η = +1) or `K'` (η = −1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valley {
    K,
    KPrime,
}

impl Valley {
    pub fn eta(self) -> f64 {
        match self {
            Valley::K => 1.0,
            Valley::KPrime => -1.0,
        }
    }
}

impl TryFrom<i32> for Valley {
    type Error = Error;

    fn try_from(eta: i32) -> Result<Self> {
        match eta {
            1 => Ok(Valley::K),
            -1 => Ok(Valley::KPrime),
            other => Err(Error::InvalidParameter(format!(
                "valley index must be +1 or -1, got {other}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stanene() -> MaterialParams {
        MaterialParams::new(30.0).unwrap()
    }

    #[test]
    fn bands_at_dirac_point() {
        let p = stanene();
        let b = p.band_energies(0.0, 40.0.into()).unwrap();
        assert_eq!((b.e1, b.e2), (10.0, 70.0));
        let b = p.band_energies(0.0, 30.0.into()).unwrap();
        assert_eq!((b.e1, b.e2), (0.0, 60.0));
    }

    #[test]
    fn bands_degenerate_at_zero_field() {
        let b = stanene().band_energies(40.0, 0.0.into()).unwrap();
        assert_eq!((b.e1, b.e2), (50.0, 50.0));
    }

    #[test]
    fn bands_even_in_field() {
        let p = stanene();
        for u in [0.5, 12.0, 30.0, 47.25, 140.0] {
            for k in [0.0, 3.0, 80.0] {
                assert_eq!(
                    p.band_energies(k, u.into()).unwrap(),
                    p.band_energies(k, (-u).into()).unwrap()
                );
            }
        }
    }

    #[test]
    fn bands_reject_bad_inputs() {
        let p = stanene();
        assert!(p.band_energies(-1.0, 0.0.into()).is_err());
        assert!(p.band_energies(f64::NAN, 0.0.into()).is_err());
        assert!(p.band_energies(1.0, f64::INFINITY.into()).is_err());
    }

    #[test]
    fn gap_values() {
        let p = stanene();
        assert_eq!(p.band_gap(30.0.into()), 0.0);
        assert_eq!(p.band_gap((-30.0).into()), 0.0);
        assert_eq!(p.band_gap(0.0.into()), 60.0);
        assert_eq!(p.band_gap(45.0.into()), 30.0);
    }

    #[test]
    fn phases() {
        let p = stanene();
        assert_eq!(p.classify_phase(20.0.into()), Phase::TopologicalInsulator);
        assert_eq!(p.classify_phase(40.0.into()), Phase::BandInsulator);
        assert_eq!(p.classify_phase(30.0.into()), Phase::Critical);
        assert_eq!(p.classify_phase((-30.0).into()), Phase::Critical);
        assert_eq!(
            p.classify_phase((-29.999).into()),
            Phase::TopologicalInsulator
        );
    }

    #[test]
    fn invalid_params() {
        assert!(MaterialParams::new(0.0).is_err());
        assert!(MaterialParams::new(-3.0).is_err());
        assert!(MaterialParams::new(f64::NAN).is_err());
        assert_eq!(stanene().critical_potential(), 30.0);
    }

    #[test]
    fn valley_from_index() {
        assert_eq!(Valley::try_from(1).unwrap(), Valley::K);
        assert_eq!(Valley::try_from(-1).unwrap(), Valley::KPrime);
        assert!(Valley::try_from(0).is_err());
        assert!(Valley::try_from(2).is_err());
    }

    #[test]
    fn hamiltonian_diagonal_at_k_zero() {
        let h = stanene().hamiltonian_matrix(0.0, 0.0, Valley::K, 40.0.into());
        let diag: Vec<f64> = (0..4).map(|i| h[(i, i)].re).collect();
        // (ηλ + u, −ηλ + u, −ηλ − u, ηλ − u) with η = 1, λ = 30, u = 40
        assert_eq!(diag, vec![70.0, 10.0, -70.0, -10.0]);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let p = stanene();
        for valley in [Valley::K, Valley::KPrime] {
            let h = p.hamiltonian_matrix(3.0, -4.5, valley, 12.0.into());
            assert_eq!(h, h.adjoint());
        }
    }
}
