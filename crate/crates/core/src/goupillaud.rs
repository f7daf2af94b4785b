//! Discrete-time wavefield recursion for media whose layer travel times are
//! all equal.
//!
//! With every `tau_n = D`, a wave crosses any layer in `D / 2`, so all
//! interface hits fall on the grid `s * D / 2`. Each half step applies the
//! local 2x2 scattering map at every interface `z_n`:
//!
//! ```text
//! up_above   = R_n * down_above + T_n * up_below
//! down_below = T_n * down_above - R_n * up_below
//! ```

use crate::error::{Error, Result};
use crate::greens::{reflection_green, transmission_green, PulseTrain, DEFAULT_MERGE_TOL};
use crate::medium::Medium;

/// Waves in flight, one slot per region: region 0 lies between the source and
/// `z_0`, region `n` between `z_{n-1}` and `z_n`, region `M + 1` below `z_M`.
///
/// `down[n]` is the downgoing pulse about to hit the bottom of region `n`;
/// `up[n]` the upgoing pulse about to hit its top. `up[0]` is heading for the
/// source depth and `down[M + 1]` for the receiver; neither is scattered again.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub down: Vec<f64>,
    pub up: Vec<f64>,
    pub step: usize,
}

impl LatticeState {
    fn new(interfaces: usize) -> Self {
        let mut down = vec![0.0; interfaces + 1];
        down[0] = 1.0;
        Self {
            down,
            up: vec![0.0; interfaces + 1],
            step: 1,
        }
    }

    fn advance(&mut self, reflections: &[f64], transmissions: &[f64]) {
        let regions = self.down.len();
        let mut down = vec![0.0; regions];
        let mut up = vec![0.0; regions];
        for (n, (&r, &t)) in reflections.iter().zip(transmissions).enumerate() {
            let from_above = self.down[n];
            let from_below = self.up[n + 1];
            up[n] = r * from_above + t * from_below;
            down[n + 1] = t * from_above - r * from_below;
        }
        self.down = down;
        self.up = up;
        self.step += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeResponse {
    /// Common layer travel time.
    pub period: f64,
    /// `reflection[j]` is the reflected amplitude arriving at `j * period`.
    pub reflection: Vec<f64>,
    /// Arrival time of `transmission[0]`, i.e. `|tau'| / 2`.
    pub transmission_start: f64,
    /// `transmission[j]` arrives at `transmission_start + j * period`.
    pub transmission: Vec<f64>,
}

impl LatticeResponse {
    pub fn energy(&self) -> f64 {
        self.reflection
            .iter()
            .chain(&self.transmission)
            .map(|a| a * a)
            .sum()
    }
}

/// Steps the recursion far enough to fill `n_steps + 1` samples of both the
/// reflected response (times `0, D, .., n_steps * D`) and the transmitted one
/// (from `|tau'| / 2` on).
pub fn simulate(medium: &Medium, n_steps: usize) -> Result<LatticeResponse> {
    if n_steps < 1 {
        return Err(Error::Domain("lattice needs at least one step".into()));
    }
    let taus = medium.layer_taus();
    let period = taus[0];
    if let Some((index, &value)) = taus.iter().enumerate().find(|(_, &t)| t != period) {
        return Err(Error::UnequalTaus {
            index,
            value,
            expected: period,
        });
    }
    let reflections = medium.reflections();
    let transmissions = medium.transmissions();
    let transmissions = transmissions.values();
    let interfaces = medium.interfaces();

    let mut reflection = vec![0.0; n_steps + 1];
    let mut transmission = vec![0.0; n_steps + 1];
    let mut state = LatticeState::new(interfaces);
    // Half steps needed for the last transmitted sample: M + 1 + 2 * n_steps.
    let last = interfaces + 2 * n_steps;
    while state.step <= last {
        let s = state.step;
        state.advance(reflections, transmissions);
        // up[0] left z_0 at s and reaches the source at s + 1 half steps.
        let arrival = s + 1;
        if arrival.is_multiple_of(2) {
            if arrival / 2 <= n_steps {
                reflection[arrival / 2] += state.up[0];
            }
        } else {
            debug_assert!(state.up[0] == 0.0);
        }
        // down[M + 1] left z_M at s; it reaches the receiver tail_tau/2 later.
        if s >= interfaces && (s - interfaces).is_multiple_of(2) {
            if (s - interfaces) / 2 <= n_steps {
                transmission[(s - interfaces) / 2] += state.down[interfaces];
            }
        } else {
            debug_assert!(state.down[interfaces] == 0.0);
        }
    }
    Ok(LatticeResponse {
        period,
        reflection,
        transmission_start: medium.direct_transmission_time(),
        transmission,
    })
}

/// Lattice samples against the merged closed-form trains on the same grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeComparison {
    pub samples: usize,
    pub max_abs_deviation: f64,
    pub energy: f64,
}

/// Runs [`simulate`] and compares every sample with the closed-form
/// amplitude summed over arrivals at that grid time.
pub fn compare(medium: &Medium, n_steps: usize) -> Result<LatticeComparison> {
    let lattice = simulate(medium, n_steps)?;
    let period = lattice.period;
    // Half a period of slack keeps grid-time arrivals clear of the cutoff.
    let horizon = (n_steps as f64 + 0.5) * period;
    let g = reflection_green(medium, horizon)?.merge_ties(DEFAULT_MERGE_TOL);
    let start = lattice.transmission_start;
    let h = transmission_green(medium, start + horizon)?.merge_ties(DEFAULT_MERGE_TOL);
    let at = |train: &PulseTrain, t: f64| -> f64 {
        train
            .terms
            .iter()
            .filter(|term| (term.time - t).abs() <= 1e-9 * period)
            .map(|term| term.amplitude)
            .sum()
    };
    let mut max_abs_deviation: f64 = 0.0;
    for j in 0..=n_steps {
        let t = j as f64 * period;
        max_abs_deviation = max_abs_deviation
            .max((lattice.reflection[j] - at(&g, t)).abs())
            .max((lattice.transmission[j] - at(&h, start + t)).abs());
    }
    // An arrival off the grid would be silently skipped by the sampling above.
    let off_grid = |train: &PulseTrain, origin: f64| {
        train.terms.iter().any(|term| {
            let x = (term.time - origin) / period;
            (x - x.round()).abs() > 1e-9
        })
    };
    if off_grid(&g, 0.0) || off_grid(&h, start) {
        max_abs_deviation = f64::INFINITY;
    }
    Ok(LatticeComparison {
        samples: 2 * (n_steps + 1),
        max_abs_deviation,
        energy: lattice.energy(),
    })
}
