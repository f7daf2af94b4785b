//! Exact time-domain reflection and transmission Green's functions of
//! piecewise-constant layered acoustic media.
//!
//! A medium is described by two-way layer travel times and interface
//! reflection coefficients ([`Medium`]). Every arrival of the impulse
//! response is indexed by a transit-count vector ([`TransitVector`]) and its
//! amplitude is a finite binomial sum in the reflection coefficients
//! ([`amplitudes`]). [`greens`] assembles the resulting delta trains up to a
//! cutoff time.
//!
//! Two independent checks ship with the library: [`oracle`] enumerates
//! scattering paths one by one, and [`goupillaud`] runs a discrete wavefield
//! recursion on equal-travel-time media.

pub mod amplitudes;
pub mod error;
pub mod goupillaud;
pub mod greens;
pub mod medium;
pub mod oracle;
pub mod transit;

pub use amplitudes::{kunetz_primary, reflection_amplitude, transmission_amplitude};
pub use error::{Error, Result};
pub use greens::{
    convolve, merge_ties, reflection_green, transmission_green, PulseTerm, PulseTrain, SampledSignal, Wavelet,
};
pub use medium::{Medium, PhysicalProfile, TransmissionCoeffs};
pub use transit::{
    branch_set, enumerate_reflection, enumerate_transmission, left_shift, multi_binomial,
    multi_binomial_exact, BranchVector, Kind, TransitVector,
};
