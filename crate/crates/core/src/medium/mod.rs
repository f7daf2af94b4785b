//! The layered medium as two-way travel times and reflection coefficients.
//!
//! A medium with `M` layers has `M + 1` interfaces `z_0 .. z_M`. Interface `n`
//! carries the reflection coefficient `R_n` seen by a wave arriving from above,
//! and `tau_n` is the two-way travel time across the slab directly above it
//! (for `n = 0`, the slab between the source depth `z_{-1}` and `z_0`).
//! `tail_tau` is the two-way time from `z_M` down to the transmission receiver.

mod io;

pub use io::{
    detect_format, read_medium, read_medium_str, read_physical_str, write_medium, write_physical,
    MediumFormat,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    layer_taus: Vec<f64>,
    tail_tau: f64,
    reflections: Vec<f64>,
}

impl Medium {
    /// Validates and builds a medium from `tau_0..tau_M`, `tau_{M+1}` and `R_0..R_M`.
    pub fn new(layer_taus: Vec<f64>, tail_tau: f64, reflections: Vec<f64>) -> Result<Self> {
        if layer_taus.len() != reflections.len() {
            return Err(Error::LengthMismatch {
                taus: layer_taus.len(),
                reflections: reflections.len(),
            });
        }
        if layer_taus.len() < 2 {
            return Err(Error::TooFewLayers(layer_taus.len().saturating_sub(1)));
        }
        for (index, &value) in layer_taus.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveTau { index, value });
            }
        }
        if !(tail_tau >= 0.0 && tail_tau.is_finite()) {
            return Err(Error::NegativeTailTau(tail_tau));
        }
        for (index, &value) in reflections.iter().enumerate() {
            if !(value > -1.0 && value < 1.0) {
                return Err(Error::ReflectionOutOfRange { index, value });
            }
        }
        Ok(Self {
            layer_taus,
            tail_tau,
            reflections,
        })
    }

    /// Number of layers `M`; there are `M + 1` interfaces.
    pub fn layers(&self) -> usize {
        self.layer_taus.len() - 1
    }

    pub fn interfaces(&self) -> usize {
        self.layer_taus.len()
    }

    pub fn layer_taus(&self) -> &[f64] {
        &self.layer_taus
    }

    pub fn tail_tau(&self) -> f64 {
        self.tail_tau
    }

    pub fn reflections(&self) -> &[f64] {
        &self.reflections
    }

    pub fn transmissions(&self) -> TransmissionCoeffs {
        TransmissionCoeffs::from_reflections(&self.reflections)
    }

    /// `|tau'| = tau_0 + ... + tau_M + tau_{M+1}`, summed left to right.
    pub fn total_tau(&self) -> f64 {
        self.layer_taus.iter().fold(0.0, |acc, &t| acc + t) + self.tail_tau
    }

    /// Arrival time of the direct transmitted pulse, `|tau'| / 2`.
    pub fn direct_transmission_time(&self) -> f64 {
        0.5 * self.total_tau()
    }

    /// Replaces the reflection coefficients, keeping the travel times.
    pub fn with_reflections(&self, reflections: Vec<f64>) -> Result<Self> {
        Self::new(self.layer_taus.clone(), self.tail_tau, reflections)
    }

    /// Builds a medium from densities, bulk moduli and interface depths.
    pub fn from_physical(profile: &PhysicalProfile) -> Result<Self> {
        profile.validate()?;
        let m = profile.layers();
        let impedance = |i: usize| (profile.bulk_moduli[i] * profile.densities[i]).sqrt();
        let velocity = |i: usize| (profile.bulk_moduli[i] / profile.densities[i]).sqrt();

        // depths[0] is z_{-1}, depths[n + 1] is z_n.
        let layer_taus = (0..=m)
            .map(|n| 2.0 * (profile.depths[n + 1] - profile.depths[n]) / velocity(n))
            .collect();
        let reflections = (0..=m)
            .map(|n| {
                let (upper, lower) = (impedance(n), impedance(n + 1));
                (upper - lower) / (upper + lower)
            })
            .collect();
        let tail_tau = match profile.depths.get(m + 2) {
            Some(&z) => 2.0 * (z - profile.depths[m + 1]) / velocity(m + 1),
            None => 0.0,
        };
        Self::new(layer_taus, tail_tau, reflections)
    }
}

/// `T_n = sqrt(1 - R_n^2)` for every interface.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionCoeffs(Vec<f64>);

impl TransmissionCoeffs {
    pub fn from_reflections(reflections: &[f64]) -> Self {
        Self(reflections.iter().map(|r| (1.0 - r * r).sqrt()).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `T^1 = prod_n T_n`, the amplitude of the direct transmitted pulse.
    pub fn product(&self) -> f64 {
        self.0.iter().product()
    }
}

/// Depths, densities and bulk moduli of a piecewise-constant profile.
///
/// `depths` holds `z_{-1} < z_0 < ... < z_M`, optionally followed by the
/// receiver depth `z_{M+1}`. `densities` and `bulk_moduli` have `M + 2`
/// entries: index 0 is the upper half-space (the region containing the
/// source), `1..=M` the layers and `M + 1` the lower half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalProfile {
    pub depths: Vec<f64>,
    pub densities: Vec<f64>,
    pub bulk_moduli: Vec<f64>,
}

impl PhysicalProfile {
    pub fn layers(&self) -> usize {
        self.densities.len().saturating_sub(2)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidProfile(msg));
        if self.densities.len() != self.bulk_moduli.len() {
            return invalid(format!(
                "{} densities but {} bulk moduli",
                self.densities.len(),
                self.bulk_moduli.len()
            ));
        }
        if self.densities.len() < 3 {
            return Err(Error::TooFewLayers(self.layers()));
        }
        let m = self.layers();
        if self.depths.len() != m + 2 && self.depths.len() != m + 3 {
            return invalid(format!(
                "expected {} or {} depths for M = {m}, got {}",
                m + 2,
                m + 3,
                self.depths.len()
            ));
        }
        if let Some(w) = self.depths.windows(2).position(|w| !(w[0] < w[1])) {
            return invalid(format!(
                "depths must be strictly increasing ({} then {})",
                self.depths[w],
                self.depths[w + 1]
            ));
        }
        if self.depths.iter().any(|z| !z.is_finite()) {
            return invalid("depths must be finite".into());
        }
        for (name, values) in [("density", &self.densities), ("bulk modulus", &self.bulk_moduli)] {
            if let Some(i) = values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
                return invalid(format!("{name} at index {i} must be positive, got {}", values[i]));
            }
        }
        Ok(())
    }
}
