//! Brute-force ground truth: explicit scattering sequences, their weights
//! from the local reflection/transmission rule, and the transit/branch
//! statistics read off each path.
//!
//! Depths are interface indices: `-1` is the source depth, `0..=M` the
//! interfaces, and `M + 1` the transmission receiver.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::greens::{PulseTerm, PulseTrain, DEFAULT_MERGE_TOL};
use crate::medium::Medium;
use crate::transit::{binomial_exact, BranchVector, Kind, TransitEnumerator, TransitVector};

/// Default cap on enumerated sequences.
pub const DEFAULT_SEQUENCE_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScatteringSequence {
    kind: Kind,
    depths: Vec<i32>,
}

impl ScatteringSequence {
    /// Checks endpoints, interior range and unit steps for `interfaces`
    /// interfaces (`M + 1`).
    pub fn new(kind: Kind, depths: Vec<i32>, interfaces: usize) -> Result<Self> {
        let bottom = interfaces as i32 - 1;
        let invalid = |msg: String| Err(Error::InvalidSequence(msg));
        if depths.len() < 3 {
            return invalid(format!("{depths:?} is too short"));
        }
        let end = match kind {
            Kind::Reflection => -1,
            Kind::Transmission => bottom + 1,
        };
        if depths[0] != -1 || *depths.last().unwrap() != end {
            return invalid(format!("{depths:?} must run from -1 to {end}"));
        }
        if let Some(p) = depths[1..depths.len() - 1]
            .iter()
            .find(|&&p| !(0..=bottom).contains(&p))
        {
            return invalid(format!("interior depth {p} outside 0..={bottom}"));
        }
        if depths.windows(2).any(|w| (w[0] - w[1]).abs() != 1) {
            return invalid(format!(
                "{depths:?} has a step that is not to an adjacent interface"
            ));
        }
        Ok(Self { kind, depths })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn depths(&self) -> &[i32] {
        &self.depths
    }

    fn check_medium(&self, medium: &Medium) -> Result<()> {
        Self::new(self.kind, self.depths.clone(), medium.interfaces()).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    pub k: TransitVector,
    pub b: BranchVector,
    /// `<k, tau>` (plus `|tau'|/2` for transmission), canonical summation order.
    pub arrival: f64,
    /// Sum of the half-travel times of the individual legs.
    pub leg_time: f64,
    pub weight: f64,
}

/// Product of the local factors `R_j`, `-R_j` or `sqrt(1 - R_j^2)` over the
/// interior of the path.
pub fn weight(p: &ScatteringSequence, reflections: &[f64]) -> Result<f64> {
    ScatteringSequence::new(p.kind, p.depths.clone(), reflections.len())?;
    Ok(weight_unchecked(&p.depths, reflections))
}

fn weight_unchecked(depths: &[i32], reflections: &[f64]) -> f64 {
    depths
        .windows(3)
        .map(|w| {
            let (prev, j, next) = (w[0], w[1] as usize, w[2]);
            let r = reflections[j];
            if prev == next && prev < w[1] {
                r
            } else if prev == next {
                -r
            } else {
                (1.0 - r * r).sqrt()
            }
        })
        .product()
}

/// Transit and branch counts from crossings.
///
/// Every step down into interface `n` opens a tree vertex at depth `n`; the
/// vertex is a branch point if the path goes below `n` before climbing back
/// out. For transmission the vertices still open when the path reaches the
/// receiver form the trunk and are left out.
pub fn crossing_counts(p: &ScatteringSequence, interfaces: usize) -> (Vec<u32>, Vec<u32>) {
    let mut k = vec![0u32; interfaces];
    let mut b = vec![0u32; interfaces];
    // has_child[n] for the currently open vertex at depth n
    let mut has_child = vec![false; interfaces + 1];
    for w in p.depths.windows(2) {
        let (from, to) = (w[0], w[1]);
        if to > from {
            if from >= 0 {
                has_child[from as usize] = true;
            }
            if (to as usize) < interfaces {
                has_child[to as usize] = false;
            }
        } else {
            let n = from as usize;
            k[n] += 1;
            b[n] += u32::from(has_child[n]);
        }
    }
    (k, b)
}

/// Transit and branch counts from the interval picture: at each depth `n`,
/// the maximal runs of path indices with depth `>= n` are the intervals, and
/// runs spanning more than one index are the non-degenerate ones. Used to
/// cross-check [`crossing_counts`].
pub fn interval_counts(p: &ScatteringSequence, interfaces: usize) -> (Vec<u32>, Vec<u32>) {
    let mut k = vec![0u32; interfaces];
    let mut b = vec![0u32; interfaces];
    for n in 0..interfaces {
        let level = n as i32;
        let mut run = 0usize;
        let mut runs = Vec::new();
        for &d in &p.depths {
            if d >= level {
                run += 1;
            } else if run > 0 {
                runs.push(run);
                run = 0;
            }
        }
        if run > 0 {
            runs.push(run);
        }
        k[n] = runs.len() as u32;
        b[n] = runs.iter().filter(|&&r| r > 1).count() as u32;
        if p.kind == Kind::Transmission {
            // The final run reaches the receiver: that is the trunk vertex.
            k[n] -= 1;
            b[n] -= 1;
        }
    }
    (k, b)
}

fn leg_time(depths: &[i32], medium: &Medium) -> f64 {
    let taus = medium.layer_taus();
    depths
        .windows(2)
        .map(|w| {
            let layer = w[0].max(w[1]) as usize;
            0.5 * taus.get(layer).copied().unwrap_or(medium.tail_tau())
        })
        .sum()
}

pub fn stats(p: &ScatteringSequence, medium: &Medium) -> Result<PathStats> {
    p.check_medium(medium)?;
    Ok(stats_unchecked(p, medium))
}

fn stats_unchecked(p: &ScatteringSequence, medium: &Medium) -> PathStats {
    let (k, b) = crossing_counts(p, medium.interfaces());
    let k = TransitVector::new(p.kind, k).expect("paths always yield admissible transit vectors");
    PathStats {
        arrival: k.arrival_time(medium),
        leg_time: leg_time(&p.depths, medium),
        weight: weight_unchecked(&p.depths, medium.reflections()),
        b: BranchVector(b),
        k,
    }
}

/// Every scattering sequence whose arrival is within `cutoff`.
///
/// The search walks the interface graph with the elapsed leg time, pruning
/// whenever the quickest way to finish would overshoot. Paths are kept if
/// their canonical arrival `<k, tau>` is within the cutoff, so the result
/// lines up exactly with the transit-vector enumeration.
pub fn enumerate_sequences(
    medium: &Medium,
    kind: Kind,
    cutoff: f64,
    limit: usize,
) -> Result<Vec<ScatteringSequence>> {
    let mut out = Vec::new();
    for_each_sequence(medium, kind, cutoff, limit, |p| out.push(p.clone()))?;
    Ok(out)
}

pub fn for_each_sequence<F>(
    medium: &Medium,
    kind: Kind,
    cutoff: f64,
    limit: usize,
    mut visit: F,
) -> Result<usize>
where
    F: FnMut(&ScatteringSequence),
{
    let interfaces = medium.interfaces();
    let bottom = interfaces as i32 - 1;
    let taus = medium.layer_taus();
    let half = |layer: i32| 0.5 * taus.get(layer as usize).copied().unwrap_or(medium.tail_tau());
    // Quickest completion from each depth 0..=M.
    let finish: Vec<f64> = (0..=bottom)
        .map(|d| match kind {
            Kind::Reflection => (0..=d).map(half).sum(),
            Kind::Transmission => (d + 1..=bottom + 1).map(half).sum(),
        })
        .collect();
    let slack = cutoff * (1.0 + 1e-9) + 1e-12;

    let mut count = 0usize;
    let mut path = vec![-1i32, 0];
    let mut seq = ScatteringSequence {
        kind,
        depths: Vec::new(),
    };

    fn dfs<F: FnMut(&ScatteringSequence)>(
        ctx: &mut Ctx<'_, F>,
        path: &mut Vec<i32>,
        elapsed: f64,
    ) -> Result<()> {
        let d = *path.last().unwrap();
        for next in [d - 1, d + 1] {
            let layer = d.max(next);
            let t = elapsed + (ctx.half)(layer);
            let finished = match ctx.kind {
                Kind::Reflection => next == -1,
                Kind::Transmission => next == ctx.bottom + 1,
            };
            if finished {
                if t > ctx.slack {
                    continue;
                }
                path.push(next);
                ctx.seq.depths.clear();
                ctx.seq.depths.extend_from_slice(path);
                let (k, _) = crossing_counts(ctx.seq, ctx.medium.interfaces());
                let k = TransitVector::new(ctx.kind, k).expect("admissible");
                if k.arrival_time(ctx.medium) <= ctx.cutoff {
                    *ctx.count += 1;
                    if *ctx.count > ctx.limit {
                        return Err(Error::SequenceLimit(ctx.limit));
                    }
                    (ctx.visit)(ctx.seq);
                }
                path.pop();
                continue;
            }
            if next < 0 || next > ctx.bottom {
                continue;
            }
            if t + ctx.finish[next as usize] > ctx.slack {
                continue;
            }
            path.push(next);
            dfs(ctx, path, t)?;
            path.pop();
        }
        Ok(())
    }

    struct Ctx<'a, F> {
        kind: Kind,
        bottom: i32,
        cutoff: f64,
        slack: f64,
        limit: usize,
        medium: &'a Medium,
        finish: Vec<f64>,
        half: &'a dyn Fn(i32) -> f64,
        seq: &'a mut ScatteringSequence,
        count: &'a mut usize,
        visit: F,
    }

    let first = half(0);
    if first + finish[0] > slack {
        return Ok(0);
    }
    let mut ctx = Ctx {
        kind,
        bottom,
        cutoff,
        slack,
        limit,
        medium,
        finish,
        half: &half,
        seq: &mut seq,
        count: &mut count,
        visit: &mut visit,
    };
    dfs(&mut ctx, &mut path, first)?;
    Ok(count)
}

/// Number of sequences in each `(k, b)` class.
pub fn class_counts(
    medium: &Medium,
    kind: Kind,
    cutoff: f64,
    limit: usize,
) -> Result<BTreeMap<(TransitVector, BranchVector), u64>> {
    let mut counts = BTreeMap::new();
    for_each_sequence(medium, kind, cutoff, limit, |p| {
        let (k, b) = crossing_counts(p, medium.interfaces());
        let k = TransitVector::new(kind, k).expect("admissible");
        *counts.entry((k, BranchVector(b))).or_insert(0u64) += 1;
    })?;
    Ok(counts)
}

/// Per transit vector: the summed weights and the summed absolute weights.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeightSum {
    pub sum: f64,
    pub abs_sum: f64,
    pub sequences: u64,
}

pub fn weight_sums(
    medium: &Medium,
    kind: Kind,
    cutoff: f64,
    limit: usize,
) -> Result<BTreeMap<TransitVector, WeightSum>> {
    let mut sums: BTreeMap<TransitVector, WeightSum> = BTreeMap::new();
    for_each_sequence(medium, kind, cutoff, limit, |p| {
        let s = stats_unchecked(p, medium);
        let e = sums.entry(s.k).or_default();
        e.sum += s.weight;
        e.abs_sum += s.weight.abs();
        e.sequences += 1;
    })?;
    Ok(sums)
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Closed-form amplitudes against brute-force weight sums, per transit vector
/// and per distinct arrival time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Comparison {
    pub classes: usize,
    pub sequences: u64,
    pub max_deviation: f64,
    pub worst: Option<TransitVector>,
    /// Largest deviation after merging coincident arrivals on both sides.
    pub merged_max_deviation: f64,
    /// Vectors seen by only one of the enumerator and the oracle.
    pub unmatched: Vec<TransitVector>,
}

/// Runs the oracle up to `cutoff` and compares each class's weight sum with
/// `amplitude(k)`. The transit-vector enumeration must yield exactly the
/// classes the oracle reaches.
pub fn compare<F>(medium: &Medium, kind: Kind, cutoff: f64, limit: usize, amplitude: F) -> Result<Comparison>
where
    F: Fn(&TransitVector) -> Result<f64>,
{
    let mut sums = weight_sums(medium, kind, cutoff, limit)?;
    let mut out = Comparison::default();
    let mut closed = Vec::new();
    let mut brute = Vec::new();
    for (k, time) in TransitEnumerator::new(medium, kind, cutoff) {
        let Some(sum) = sums.remove(&k) else {
            out.unmatched.push(k);
            continue;
        };
        let a = amplitude(&k)?;
        let dev = relative_deviation(a, sum.sum);
        out.classes += 1;
        out.sequences += sum.sequences;
        if dev > out.max_deviation || out.worst.is_none() {
            out.max_deviation = out.max_deviation.max(dev);
            out.worst = Some(k.clone());
        }
        closed.push(PulseTerm {
            time,
            amplitude: a,
            k: k.clone(),
        });
        brute.push(PulseTerm {
            time,
            amplitude: sum.sum,
            k,
        });
    }
    out.unmatched.extend(sums.into_keys());

    let merged = |terms: Vec<PulseTerm>| {
        let mut train = PulseTrain {
            kind,
            cutoff,
            reference_time: medium.layer_taus()[0],
            terms,
        };
        train
            .terms
            .sort_by(|a, b| a.time.total_cmp(&b.time).then_with(|| a.k.cmp(&b.k)));
        train.merge_ties(DEFAULT_MERGE_TOL).terms
    };
    for (c, b) in merged(closed).iter().zip(&merged(brute)) {
        out.merged_max_deviation = out
            .merged_max_deviation
            .max(relative_deviation(c.amplitude, b.amplitude));
    }
    Ok(out)
}

/// Path count predicted for a `(k, b)` class: `C(k, b) C(k~ - u, b - u)` for
/// reflection, `C(k, m) C(k~, m)` for transmission. Zero outside the branch set.
pub fn predicted_class_count(k: &TransitVector, b: &BranchVector) -> num_bigint::BigUint {
    let choose = |n: u32, r: u32| if r > n { 0u32.into() } else { binomial_exact(n, r) };
    let shifted = k.left_shift();
    k.counts()
        .iter()
        .zip(&shifted)
        .zip(b.counts())
        .map(|((&kn, &sn), &bn)| {
            let u = match k.kind() {
                Kind::Reflection => sn.min(1),
                Kind::Transmission => 0,
            };
            if bn < u {
                return 0u32.into();
            }
            choose(kn, bn) * choose(sn - u, bn - u)
        })
        .product()
}
