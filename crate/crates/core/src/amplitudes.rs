//! Closed-form pulse amplitudes.
//!
//! For a reflection transit vector `k` with `u = min(1, k~)`:
//!
//! ```text
//! a(R, k) = sum_{u <= b <= min(k, k~)} C(k, b) C(k~ - u, b - u) (-R)^(k~ - b) R^(k - b) T^(2b)
//! ```
//!
//! and for a transmission transit vector:
//!
//! ```text
//! b(R, k) = sum_{0 <= m <= min(k, k~)} C(k, m) C(k~, m) (-R)^(k~ - m) R^(k - m) T^(2m + 1)
//! ```
//!
//! Every summand is a product of per-interface factors. Each interface gets a
//! small table of its factor over its own branch range; the sum then sweeps an
//! odometer over the product of ranges, keeping prefix products so that a
//! step which changes coordinate `j` only refreshes the products from `j` on.

use crate::error::{Error, Result};
use crate::transit::{binomial, Kind, TransitVector};

pub fn check_reflections(reflections: &[f64]) -> Result<()> {
    for (index, &value) in reflections.iter().enumerate() {
        if !(value > -1.0 && value < 1.0) {
            return Err(Error::ReflectionOutOfRange { index, value });
        }
    }
    Ok(())
}

fn check_shape(reflections: &[f64], k: &TransitVector, kind: Kind) -> Result<()> {
    if k.kind() != kind {
        return Err(Error::InvalidTransitVector(format!(
            "expected a {kind} vector, got a {} vector",
            k.kind()
        )));
    }
    if k.len() != reflections.len() {
        return Err(Error::InvalidTransitVector(format!(
            "vector has {} entries but the medium has {} interfaces",
            k.len(),
            reflections.len()
        )));
    }
    check_reflections(reflections)
}

/// Factor contributed by one interface to one summand.
///
/// `lower_shift` is `u_n` for reflection (the edge-arrangement binomial is
/// `C(k~ - u, b - u)`) and 0 for transmission (`C(k~, m)`). The transmission
/// `T^1` factor is applied once, outside the sum.
fn interface_factor(k: u32, shifted: u32, lower_shift: u32, b: u32, r: f64, t2: f64) -> f64 {
    let binomials = binomial(k, b) * binomial(shifted - lower_shift, b - lower_shift);
    let neg_exp = shifted - b;
    let sign = if neg_exp.is_multiple_of(2) { 1.0 } else { -1.0 };
    // (-R)^(k~ - b) R^(k - b) = (-1)^(k~ - b) R^(k + k~ - 2b)
    let r_pow = r.powi((k + shifted - 2 * b) as i32);
    binomials * sign * r_pow * t2.powi(b as i32)
}

struct FactorTables {
    tables: Vec<Vec<f64>>,
}

impl FactorTables {
    fn build(reflections: &[f64], k: &TransitVector) -> Self {
        let counts = k.counts();
        let shifted = k.left_shift();
        let ranges = k.branch_ranges();
        let tables = (0..counts.len())
            .map(|n| {
                let lower_shift = match k.kind() {
                    Kind::Reflection => shifted[n].min(1),
                    Kind::Transmission => 0,
                };
                let r = reflections[n];
                let t2 = 1.0 - r * r;
                ranges[n]
                    .clone()
                    .map(|b| interface_factor(counts[n], shifted[n], lower_shift, b, r, t2))
                    .collect()
            })
            .collect();
        Self { tables }
    }

    /// Sum over the Cartesian product of per-interface choices.
    fn odometer_sum(&self) -> f64 {
        let tables = &self.tables;
        let len = tables.len();
        if tables.iter().any(Vec::is_empty) {
            return 0.0;
        }
        let mut idx = vec![0usize; len];
        // prefix[j] = product of tables[i][idx[i]] for i < j
        let mut prefix = vec![1.0; len + 1];
        for j in 0..len {
            prefix[j + 1] = prefix[j] * tables[j][0];
        }
        let mut sum = prefix[len];
        loop {
            let Some(j) = (0..len).rev().find(|&j| idx[j] + 1 < tables[j].len()) else {
                return sum;
            };
            idx[j] += 1;
            idx[j + 1..].iter_mut().for_each(|i| *i = 0);
            for i in j..len {
                prefix[i + 1] = prefix[i] * tables[i][idx[i]];
            }
            sum += prefix[len];
        }
    }
}

/// Reflection amplitude `a(R, k)`.
pub fn reflection_amplitude(reflections: &[f64], k: &TransitVector) -> Result<f64> {
    check_shape(reflections, k, Kind::Reflection)?;
    Ok(FactorTables::build(reflections, k).odometer_sum())
}

/// Transmission amplitude `b(R, k)`.
pub fn transmission_amplitude(reflections: &[f64], k: &TransitVector) -> Result<f64> {
    check_shape(reflections, k, Kind::Transmission)?;
    let direct: f64 = reflections.iter().map(|r| (1.0 - r * r).sqrt()).product();
    Ok(FactorTables::build(reflections, k).odometer_sum() * direct)
}

/// Dispatches on the vector's kind.
pub fn amplitude(reflections: &[f64], k: &TransitVector) -> Result<f64> {
    match k.kind() {
        Kind::Reflection => reflection_amplitude(reflections, k),
        Kind::Transmission => transmission_amplitude(reflections, k),
    }
}

/// Amplitude of the primary reflection off interface `n`:
/// `R_n * prod_{j < n} (1 - R_j^2)`.
pub fn kunetz_primary(reflections: &[f64], n: usize) -> Result<f64> {
    check_reflections(reflections)?;
    if n >= reflections.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: reflections.len(),
        });
    }
    let through: f64 = reflections[..n].iter().map(|r| 1.0 - r * r).product();
    Ok(reflections[n] * through)
}
