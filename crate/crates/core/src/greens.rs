//! Pulse trains of the reflection and transmission Green's functions, plus
//! tie merging, CSV output and wavelet rendering.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;

use crate::amplitudes;
use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::transit::{Kind, TransitEnumerator, TransitVector};

/// Relative tolerance used when merging coincident arrivals.
pub const DEFAULT_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PulseTerm {
    pub time: f64,
    pub amplitude: f64,
    pub k: TransitVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    pub kind: Kind,
    pub cutoff: f64,
    /// Time scale for relative tie tolerance (`tau_0` of the medium).
    pub reference_time: f64,
    pub terms: Vec<PulseTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    /// Drop terms with `|amplitude| < floor`. Zero keeps everything.
    pub floor: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { floor: 0.0 }
    }
}

fn term_order(a: &PulseTerm, b: &PulseTerm) -> Ordering {
    a.time
        .total_cmp(&b.time)
        .then_with(|| a.k.counts().cmp(b.k.counts()))
}

fn build_train(medium: &Medium, kind: Kind, cutoff: f64, opts: &TrainOptions) -> Result<PulseTrain> {
    let reflections = medium.reflections();
    let transits: Vec<(TransitVector, f64)> = TransitEnumerator::new(medium, kind, cutoff).collect();
    let mut terms = transits
        .into_par_iter()
        .map(|(k, time)| {
            let amplitude = amplitudes::amplitude(reflections, &k)?;
            Ok(PulseTerm { time, amplitude, k })
        })
        .filter(|t: &Result<PulseTerm>| t.as_ref().map_or(true, |t| !(t.amplitude.abs() < opts.floor)))
        .collect::<Result<Vec<_>>>()?;
    terms.par_sort_unstable_by(term_order);
    Ok(PulseTrain {
        kind,
        cutoff,
        reference_time: medium.layer_taus()[0],
        terms,
    })
}

/// Reflection Green's function up to `cutoff`, one term per transit vector.
pub fn reflection_green(medium: &Medium, cutoff: f64) -> Result<PulseTrain> {
    reflection_green_with(medium, cutoff, &TrainOptions::default())
}

pub fn reflection_green_with(medium: &Medium, cutoff: f64, opts: &TrainOptions) -> Result<PulseTrain> {
    build_train(medium, Kind::Reflection, cutoff, opts)
}

/// Transmission Green's function up to `cutoff`, one term per transit vector.
pub fn transmission_green(medium: &Medium, cutoff: f64) -> Result<PulseTrain> {
    transmission_green_with(medium, cutoff, &TrainOptions::default())
}

pub fn transmission_green_with(medium: &Medium, cutoff: f64, opts: &TrainOptions) -> Result<PulseTrain> {
    build_train(medium, Kind::Transmission, cutoff, opts)
}

impl PulseTrain {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Combines runs of arrivals lying within `tol_rel * max(t, tau_0)` of the
    /// run's first arrival. The merged term keeps the first arrival time and
    /// the lexicographically smallest contributing transit vector.
    pub fn merge_ties(&self, tol_rel: f64) -> PulseTrain {
        let mut merged: Vec<PulseTerm> = Vec::with_capacity(self.terms.len());
        let mut run_start = 0.0;
        for term in &self.terms {
            if let Some(last) = merged.last_mut() {
                let tol = tol_rel * term.time.max(self.reference_time);
                if (term.time - run_start).abs() <= tol {
                    last.amplitude += term.amplitude;
                    if term.k.counts() < last.k.counts() {
                        last.k = term.k.clone();
                    }
                    continue;
                }
            }
            run_start = term.time;
            merged.push(term.clone());
        }
        PulseTrain {
            terms: merged,
            ..self.clone()
        }
    }

    pub fn amplitude_range(&self) -> Option<(f64, f64)> {
        self.terms
            .iter()
            .map(|t| t.amplitude)
            .fold(None, |acc, a| match acc {
                None => Some((a, a)),
                Some((lo, hi)) => Some((lo.min(a), hi.max(a))),
            })
    }

    /// Writes `time,amplitude[,k]` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, with_k: bool) -> io::Result<()> {
        if with_k {
            writeln!(out, "time,amplitude,k")?;
        } else {
            writeln!(out, "time,amplitude")?;
        }
        for t in &self.terms {
            if with_k {
                writeln!(out, "{:.16e},{:.16e},{}", t.time, t.amplitude, t.k)?;
            } else {
                writeln!(out, "{:.16e},{:.16e}", t.time, t.amplitude)?;
            }
        }
        Ok(())
    }
}

/// Free function form of [`PulseTrain::merge_ties`].
pub fn merge_ties(train: &PulseTrain, tol_rel: f64) -> PulseTrain {
    train.merge_ties(tol_rel)
}

/// A `(time, amplitude)` list read back from CSV; provenance is optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrivals(pub Vec<(f64, f64)>);

impl Arrivals {
    pub fn from_train(train: &PulseTrain) -> Self {
        Self(train.terms.iter().map(|t| (t.time, t.amplitude)).collect())
    }

    /// Parses the CSV written by [`PulseTrain::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut rows = Vec::new();
        let mut seen_header = false;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let no = i + 1;
            if i == 0 {
                seen_header = true;
                if !line.starts_with("time,amplitude") {
                    return Err(Error::Parse {
                        line: no,
                        message: "expected header `time,amplitude[,k]`".into(),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let mut field = |name: &str| -> Result<f64> {
                let raw = fields.next().ok_or_else(|| Error::Parse {
                    line: no,
                    message: format!("missing {name}"),
                })?;
                raw.trim().parse().map_err(|_| Error::Parse {
                    line: no,
                    message: format!("bad {name} `{raw}`"),
                })
            };
            let time = field("time")?;
            let amplitude = field("amplitude")?;
            rows.push((time, amplitude));
        }
        if !seen_header {
            return Err(Error::Parse {
                line: 1,
                message: "empty input, expected header `time,amplitude[,k]`".into(),
            });
        }
        Ok(Self(rows))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wavelet {
    /// Unit-peak Ricker wavelet with the given peak frequency in Hz.
    Ricker(f64),
    /// Each amplitude lands in the nearest sample bin.
    Spike,
}

impl std::str::FromStr for Wavelet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "spike" {
            return Ok(Wavelet::Spike);
        }
        if let Some(f) = s.strip_prefix("ricker:") {
            let freq: f64 = f.parse().map_err(|_| format!("bad Ricker frequency `{f}`"))?;
            if !(freq > 0.0 && freq.is_finite()) {
                return Err(format!("Ricker frequency must be positive, got {freq}"));
            }
            return Ok(Wavelet::Ricker(freq));
        }
        Err(format!(
            "unknown wavelet `{s}` (expected `spike` or `ricker:FREQ`)"
        ))
    }
}

/// `w(t) = (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2)`, peak 1 at `t = 0`.
pub fn ricker(freq: f64, t: f64) -> f64 {
    let a = (PI * freq * t).powi(2);
    (1.0 - 2.0 * a) * (-a).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl SampledSignal {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "time,value")?;
        for (i, v) in self.samples.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.time(i), v)?;
        }
        Ok(())
    }
}

/// Renders arrivals on the grid `t0 + i*dt`, `i < n_samples`.
pub fn convolve(
    arrivals: &[(f64, f64)],
    wavelet: Wavelet,
    t0: f64,
    dt: f64,
    n_samples: usize,
) -> Result<SampledSignal> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!(
            "sample interval must be positive, got {dt}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut samples = vec![0.0; n_samples];
    match wavelet {
        Wavelet::Spike => {
            for &(time, amp) in arrivals {
                let bin = ((time - t0) / dt).round();
                if bin >= 0.0 && bin < n_samples as f64 {
                    samples[bin as usize] += amp;
                }
            }
        }
        Wavelet::Ricker(freq) => {
            // exp(-x) underflows to zero past x ~ 745.
            let reach = 745f64.sqrt() / (PI * freq);
            for &(time, amp) in arrivals {
                let first = (((time - reach - t0) / dt).ceil().max(0.0)) as usize;
                let last = ((time + reach - t0) / dt).floor();
                if last < 0.0 {
                    continue;
                }
                let last = (last as usize).min(n_samples - 1);
                for (i, s) in samples.iter_mut().enumerate().take(last + 1).skip(first) {
                    *s += amp * ricker(freq, t0 + i as f64 * dt - time);
                }
            }
        }
    }
    Ok(SampledSignal { t0, dt, samples })
}
