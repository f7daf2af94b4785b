//! Transit-count vectors, their branch-count sets, and enumeration of every
//! transit vector whose arrival falls within a cutoff.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::medium::Medium;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Reflection,
    Transmission,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Reflection => "reflection",
            Kind::Transmission => "transmission",
        })
    }
}

/// Per-layer transit counts `k_0..k_M`.
///
/// Reflection vectors have `k_0 = 1` and prefix support (a zero is followed
/// only by zeros). Transmission vectors have `k_0 = 0` and are otherwise free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitVector {
    kind: Kind,
    counts: Vec<u32>,
}

impl TransitVector {
    pub fn new(kind: Kind, counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidTransitVector("empty vector".into()));
        }
        match kind {
            Kind::Reflection => {
                if counts[0] != 1 {
                    return Err(Error::InvalidTransitVector(format!(
                        "reflection vector needs k_0 = 1, got {:?}",
                        counts
                    )));
                }
                if let Some(n) = counts.windows(2).position(|w| w[0] == 0 && w[1] != 0) {
                    return Err(Error::InvalidTransitVector(format!(
                        "support of {:?} is not a prefix (k_{n} = 0 but k_{} > 0)",
                        counts,
                        n + 1
                    )));
                }
            }
            Kind::Transmission => {
                if counts[0] != 0 {
                    return Err(Error::InvalidTransitVector(format!(
                        "transmission vector needs k_0 = 0, got {:?}",
                        counts
                    )));
                }
            }
        }
        Ok(Self { kind, counts })
    }

    pub fn reflection(counts: Vec<u32>) -> Result<Self> {
        Self::new(Kind::Reflection, counts)
    }

    pub fn transmission(counts: Vec<u32>) -> Result<Self> {
        Self::new(Kind::Transmission, counts)
    }

    /// The primary vector `k^n = (1, ..., 1, 0, ..., 0)` with ones at `0..=n`.
    pub fn primary(interfaces: usize, n: usize) -> Result<Self> {
        if n >= interfaces {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: interfaces,
            });
        }
        let counts = (0..interfaces).map(|j| u32::from(j <= n)).collect();
        Self::reflection(counts)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `k~ = (k_1, ..., k_M, 0)`.
    pub fn left_shift(&self) -> Vec<u32> {
        left_shift(&self.counts)
    }

    /// Per-interface ranges whose Cartesian product is the admissible set of
    /// branch vectors: `min(1, k~) ..= min(k, k~)` for reflection and
    /// `0 ..= min(k, k~)` for transmission.
    pub fn branch_ranges(&self) -> Vec<RangeInclusive<u32>> {
        let shifted = self.left_shift();
        self.counts
            .iter()
            .zip(&shifted)
            .map(|(&k, &ks)| {
                let lo = match self.kind {
                    Kind::Reflection => ks.min(1),
                    Kind::Transmission => 0,
                };
                lo..=k.min(ks)
            })
            .collect()
    }

    /// Number of branch vectors admissible for this transit vector.
    pub fn branch_count(&self) -> u128 {
        self.branch_ranges()
            .iter()
            .map(|r| u128::from(r.end() - r.start() + 1))
            .product()
    }

    /// `<k, tau>` accumulated left to right, offset by `|tau'| / 2` for
    /// transmission. Enumeration uses the same summation order, so this
    /// reproduces enumerated arrival times bit for bit.
    pub fn arrival_time(&self, medium: &Medium) -> f64 {
        let start = match self.kind {
            Kind::Reflection => 0.0,
            Kind::Transmission => medium.direct_transmission_time(),
        };
        self.counts
            .iter()
            .zip(medium.layer_taus())
            .fold(start, |acc, (&k, &tau)| acc + f64::from(k) * tau)
    }
}

impl fmt::Display for TransitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// Branch-count vector `b` (reflection) or `m` (transmission).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchVector(pub Vec<u32>);

impl BranchVector {
    pub fn counts(&self) -> &[u32] {
        &self.0
    }
}

pub fn left_shift(k: &[u32]) -> Vec<u32> {
    let mut shifted = Vec::with_capacity(k.len());
    shifted.extend_from_slice(k.get(1..).unwrap_or(&[]));
    if !k.is_empty() {
        shifted.push(0);
    }
    shifted
}

/// `u = min(1, k~)`.
pub fn unit_floor(k: &[u32]) -> Vec<u32> {
    left_shift(k).into_iter().map(|x| x.min(1)).collect()
}

/// Binomial coefficient as `f64`. Exact integer arithmetic while it fits in
/// `u128`, then the multiplicative recurrence in floating point.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut exact: u128 = 1;
    for i in 0..k {
        // exact * (n - i) is divisible by i + 1 at every step
        match exact.checked_mul(u128::from(n - i)) {
            Some(p) => exact = p / u128::from(i + 1),
            None => {
                let mut c = exact as f64;
                for j in i..k {
                    c = c * f64::from(n - j) / f64::from(j + 1);
                }
                return c;
            }
        }
    }
    exact as f64
}

pub fn binomial_exact(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c *= n - i;
        c /= i + 1;
    }
    c
}

fn check_binomial_domain(x: &[u32], y: &[u32]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "length mismatch ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if let Some(n) = x.iter().zip(y).position(|(a, b)| b > a) {
        return Err(Error::Domain(format!(
            "y_{n} = {} exceeds x_{n} = {}",
            y[n], x[n]
        )));
    }
    Ok(())
}

/// `prod_n C(x_n, y_n)` in floating point.
pub fn multi_binomial(x: &[u32], y: &[u32]) -> Result<f64> {
    check_binomial_domain(x, y)?;
    Ok(x.iter().zip(y).map(|(&a, &b)| binomial(a, b)).product())
}

/// `prod_n C(x_n, y_n)` with arbitrary precision.
pub fn multi_binomial_exact(x: &[u32], y: &[u32]) -> Result<BigUint> {
    check_binomial_domain(x, y)?;
    Ok(x.iter().zip(y).map(|(&a, &b)| binomial_exact(a, b)).product())
}

/// Signed-integer front end for callers holding possibly negative data.
pub fn multi_binomial_signed(x: &[i64], y: &[i64]) -> Result<f64> {
    let to_u32 = |v: &[i64]| -> Result<Vec<u32>> {
        v.iter()
            .map(|&e| {
                u32::try_from(e).map_err(|_| Error::Domain(format!("entry {e} is negative or too large")))
            })
            .collect()
    };
    multi_binomial(&to_u32(x)?, &to_u32(y)?)
}

/// All admissible branch vectors for `k`, in lexicographic order.
pub fn branch_set(k: &TransitVector) -> Vec<BranchVector> {
    BranchOdometer::new(&k.branch_ranges())
        .map(BranchVector)
        .collect()
}

/// Odometer over a Cartesian product of inclusive ranges, last index fastest.
pub(crate) struct BranchOdometer {
    lo: Vec<u32>,
    hi: Vec<u32>,
    current: Option<Vec<u32>>,
}

impl BranchOdometer {
    pub(crate) fn new(ranges: &[RangeInclusive<u32>]) -> Self {
        let lo: Vec<u32> = ranges.iter().map(|r| *r.start()).collect();
        let hi: Vec<u32> = ranges.iter().map(|r| *r.end()).collect();
        let nonempty = lo.iter().zip(&hi).all(|(l, h)| l <= h);
        Self {
            current: nonempty.then(|| lo.clone()),
            lo,
            hi,
        }
    }
}

impl Iterator for BranchOdometer {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        match (0..cur.len()).rev().find(|&j| cur[j] < self.hi[j]) {
            Some(j) => {
                cur[j] += 1;
                cur[j + 1..].copy_from_slice(&self.lo[j + 1..]);
            }
            None => self.current = None,
        }
        Some(out)
    }
}

/// Depth-first enumeration of transit vectors with arrival `<= cutoff`.
///
/// Vectors come out in DFS (preorder) order, not sorted by arrival. Each item
/// carries its arrival time, accumulated left to right exactly as
/// [`TransitVector::arrival_time`] does.
pub struct TransitEnumerator<'a> {
    kind: Kind,
    taus: &'a [f64],
    cutoff: f64,
    counts: Vec<u32>,
    // acc[n] = arrival time after adding k_0*tau_0 .. k_n*tau_n.
    acc: Vec<f64>,
    // Reflection: index of the last nonzero entry. Transmission: unused.
    depth: usize,
    state: EnumState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EnumState {
    Start,
    Running,
    Done,
}

impl<'a> TransitEnumerator<'a> {
    pub fn new(medium: &'a Medium, kind: Kind, cutoff: f64) -> Self {
        let taus = medium.layer_taus();
        let n = taus.len();
        let start = match kind {
            Kind::Reflection => 0.0,
            Kind::Transmission => medium.direct_transmission_time(),
        };
        Self {
            kind,
            taus,
            cutoff,
            counts: vec![0; n],
            acc: vec![start; n],
            depth: 0,
            state: EnumState::Start,
        }
    }

    fn term_time(&self, n: usize, k: u32) -> f64 {
        let before = if n == 0 {
            match self.kind {
                Kind::Reflection => 0.0,
                Kind::Transmission => self.acc[0],
            }
        } else {
            self.acc[n - 1]
        };
        before + f64::from(k) * self.taus[n]
    }

    fn emit(&self) -> (TransitVector, f64) {
        debug_assert!(TransitVector::new(self.kind, self.counts.clone()).is_ok());
        let time = *self.acc.last().expect("at least two interfaces");
        (
            TransitVector {
                kind: self.kind,
                counts: self.counts.clone(),
            },
            time,
        )
    }

    fn advance_reflection(&mut self) -> bool {
        let last = self.counts.len() - 1;
        if self.state == EnumState::Start {
            let t = self.term_time(0, 1);
            if !(t <= self.cutoff) {
                return false;
            }
            self.counts[0] = 1;
            self.acc.iter_mut().for_each(|a| *a = t);
            self.depth = 0;
            return true;
        }
        // Descend: extend the support by one layer.
        if self.depth < last {
            let t = self.term_time(self.depth + 1, 1);
            if t <= self.cutoff {
                self.depth += 1;
                self.counts[self.depth] = 1;
                self.acc[self.depth..].iter_mut().for_each(|a| *a = t);
                return true;
            }
        }
        // Otherwise bump the deepest entry, backtracking when it overflows.
        // k_0 is pinned to 1.
        while self.depth > 0 {
            let d = self.depth;
            let t = self.term_time(d, self.counts[d] + 1);
            if t <= self.cutoff {
                self.counts[d] += 1;
                self.acc[d..].iter_mut().for_each(|a| *a = t);
                return true;
            }
            self.counts[d] = 0;
            let prev = self.acc[d - 1];
            self.acc[d..].iter_mut().for_each(|a| *a = prev);
            self.depth -= 1;
        }
        false
    }

    fn advance_transmission(&mut self) -> bool {
        if self.state == EnumState::Start {
            // The zero vector: the direct arrival.
            return self.acc[0] <= self.cutoff;
        }
        let last = self.counts.len() - 1;
        let mut j = last;
        while j >= 1 {
            let t = self.term_time(j, self.counts[j] + 1);
            if t <= self.cutoff {
                self.counts[j] += 1;
                self.acc[j..].iter_mut().for_each(|a| *a = t);
                return true;
            }
            self.counts[j] = 0;
            let prev = self.acc[j - 1];
            self.acc[j..].iter_mut().for_each(|a| *a = prev);
            j -= 1;
        }
        false
    }
}

impl Iterator for TransitEnumerator<'_> {
    type Item = (TransitVector, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.state == EnumState::Done {
            return None;
        }
        let advanced = match self.kind {
            Kind::Reflection => self.advance_reflection(),
            Kind::Transmission => self.advance_transmission(),
        };
        if advanced {
            self.state = EnumState::Running;
            Some(self.emit())
        } else {
            self.state = EnumState::Done;
            None
        }
    }
}

/// Every reflection transit vector with `<k, tau> <= cutoff`.
pub fn enumerate_reflection(medium: &Medium, cutoff: f64) -> TransitEnumerator<'_> {
    TransitEnumerator::new(medium, Kind::Reflection, cutoff)
}

/// Every transmission transit vector with `|tau'|/2 + <k, tau> <= cutoff`.
pub fn enumerate_transmission(medium: &Medium, cutoff: f64) -> TransitEnumerator<'_> {
    TransitEnumerator::new(medium, Kind::Transmission, cutoff)
}
