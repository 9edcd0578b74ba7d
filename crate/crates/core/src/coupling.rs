//! Coupled trajectories: monotone grand couplings, the pairwise coupling of
//! two permutations, the U/F/D difference process, and coupling from the
//! past.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{Monotone, Randomness, SiteKernel};
use crate::lattice::{LatticePath, Permutation};
use crate::stream::Stream;

pub const DEFAULT_STEP_CAP: u64 = 10_000_000_000;
pub const DEFAULT_EPOCH_CAP: u32 = 48;

/// Two states of a monotone chain with `bottom ⪯ top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledPair<S> {
    pub top: S,
    pub bottom: S,
}

impl<S: Clone + Eq> CoupledPair<S> {
    pub fn new<K: Monotone<State = S>>(kernel: &K, top: S, bottom: S) -> Result<Self> {
        if !kernel.precedes(&bottom, &top) {
            return Err(Error::InvalidState("bottom is not below top".into()));
        }
        Ok(CoupledPair { top, bottom })
    }

    /// The pair `(1̂, 0̂)`.
    pub fn extremes<K: Monotone<State = S>>(kernel: &K) -> Self {
        CoupledPair { top: kernel.top(), bottom: kernel.bottom() }
    }

    pub fn coalesced(&self) -> bool {
        self.top == self.bottom
    }
}

/// Apply the same randomness to both states.
pub fn grand_step<K: Monotone>(
    kernel: &K,
    pair: &CoupledPair<K::State>,
    r: &Randomness,
) -> Result<CoupledPair<K::State>> {
    Ok(CoupledPair { top: kernel.step(&pair.top, r)?, bottom: kernel.step(&pair.bottom, r)? })
}

/// Steps until the grand coupling started from `(1̂, 0̂)` coalesces, using
/// stream `trial` of `seed`.
///
/// Coalescence is detected exactly after every step by keeping a running
/// count of differing cells, updated only at the cells the step may touch.
pub fn coalescence_time<K: Monotone>(kernel: &K, seed: u64, trial: u64, cap: u64) -> Result<u64> {
    let mut rng = Stream::new(seed, trial);
    let mut hi = kernel.top();
    let mut lo = kernel.bottom();
    let mut mismatch = kernel.mismatch(&hi, &lo);
    let mut t = 0;
    while mismatch > 0 {
        if t >= cap {
            return Err(Error::StepCap(cap));
        }
        let r = kernel.draw(&mut rng);
        let before = kernel.local_mismatch(&hi, &lo, &r);
        kernel.apply(&mut hi, &r);
        kernel.apply(&mut lo, &r);
        mismatch = mismatch + kernel.local_mismatch(&hi, &lo, &r) - before;
        t += 1;
    }
    Ok(t)
}

/// Coalescence times of `trials` independent trials, in trial order.
pub fn coalescence_stats<K: Monotone>(
    kernel: &K,
    seed: u64,
    trials: u64,
    cap: u64,
    params: impl Into<String>,
) -> Result<CouplingStats> {
    let times = (0..trials)
        .into_par_iter()
        .map(|trial| coalescence_time(kernel, seed, trial, cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(CouplingStats { seed, params: params.into(), times })
}

// ---------------------------------------------------------------------------
// Pairwise coupling of permutations
// ---------------------------------------------------------------------------

/// One step of the pairwise coupling of the exchange chain, where
/// `r.coin` decides whether the pair at `r.site` is exchanged.
///
/// If exchanging in just one permutation would lower the Hamming distance,
/// exactly one of them exchanges: `x` if `extra`, else `y`.
pub fn pairwise_perm_step(
    x: &Permutation,
    y: &Permutation,
    r: &Randomness,
    extra: bool,
) -> Result<(Permutation, Permutation)> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch { expected: x.n(), got: y.n() });
    }
    if r.site == 0 || r.site >= x.n() {
        return Err(Error::SiteOutOfRange { site: r.site, sites: x.n().saturating_sub(1) });
    }
    let (mut x, mut y) = (x.clone(), y.clone());
    let (fx, fy) = pairwise_decision(x.values(), y.values(), r.site - 1, r.coin, extra);
    if fx {
        x.values_mut().swap(r.site - 1, r.site);
    }
    if fy {
        y.values_mut().swap(r.site - 1, r.site);
    }
    Ok((x, y))
}

#[inline]
fn pairwise_decision(x: &[usize], y: &[usize], i: usize, coin: bool, extra: bool) -> (bool, bool) {
    let same = (x[i] == y[i]) as u8 + (x[i + 1] == y[i + 1]) as u8;
    let crossed = (x[i + 1] == y[i]) as u8 + (x[i] == y[i + 1]) as u8;
    if crossed > same {
        (extra, !extra)
    } else {
        (coin, coin)
    }
}

/// Draws per pairwise step: the three of a site step plus the extra bit.
pub const PAIRWISE_DRAWS: u64 = 4;

/// A pair of permutations under the pairwise coupling, reading stream
/// `trial` of `seed`.
struct PairwiseRun {
    rng: Stream,
    x: Vec<usize>,
    y: Vec<usize>,
    mismatch: usize,
    t: u64,
    kernel: crate::kernels::PermKernel,
}

impl PairwiseRun {
    fn new(x: &Permutation, y: &Permutation, seed: u64, trial: u64) -> Result<Self> {
        if x.n() != y.n() {
            return Err(Error::DimensionMismatch { expected: x.n(), got: y.n() });
        }
        let mismatch = x.values().iter().zip(y.values()).filter(|(p, q)| p != q).count();
        Ok(PairwiseRun {
            rng: Stream::new(seed, trial),
            x: x.values().to_vec(),
            y: y.values().to_vec(),
            mismatch,
            t: 0,
            kernel: crate::kernels::PermKernel::new(x.n()),
        })
    }

    /// Step until coalesced or `t == until`.
    fn advance(&mut self, until: u64) {
        let (x, y) = (&mut self.x, &mut self.y);
        while self.t < until && self.mismatch > 0 {
            let r = self.kernel.draw(&mut self.rng);
            let extra = self.rng.coin();
            let i = r.site - 1;
            let before = (x[i] != y[i]) as usize + (x[i + 1] != y[i + 1]) as usize;
            let (fx, fy) = pairwise_decision(x, y, i, r.coin, extra);
            if fx {
                x.swap(i, i + 1);
            }
            if fy {
                y.swap(i, i + 1);
            }
            self.mismatch = self.mismatch + (x[i] != y[i]) as usize + (x[i + 1] != y[i + 1]) as usize - before;
            self.t += 1;
        }
    }
}

/// Run the pairwise coupling from `(x, y)` and report whether the pair
/// still differs at each checkpoint.
pub fn pairwise_trajectory(
    x: &Permutation,
    y: &Permutation,
    seed: u64,
    trial: u64,
    checkpoints: &[u64],
) -> Result<Vec<bool>> {
    let mut run = PairwiseRun::new(x, y, seed, trial)?;
    Ok(checkpoints
        .iter()
        .map(|&c| {
            run.advance(c);
            run.mismatch > 0
        })
        .collect())
}

/// Steps until the pairwise coupling from `(x, y)` coalesces.
pub fn pairwise_coalescence_time(x: &Permutation, y: &Permutation, seed: u64, trial: u64, cap: u64) -> Result<u64> {
    let mut run = PairwiseRun::new(x, y, seed, trial)?;
    run.advance(cap);
    if run.mismatch > 0 {
        return Err(Error::StepCap(cap));
    }
    Ok(run.t)
}

/// Fraction of `trials` pairwise-coupled runs from `(x, y)` not yet
/// coalesced at each checkpoint.
pub fn pairwise_survival(
    x: &Permutation,
    y: &Permutation,
    seed: u64,
    trials: u64,
    checkpoints: &[u64],
) -> Result<Vec<f64>> {
    let runs = (0..trials)
        .into_par_iter()
        .map(|trial| pairwise_trajectory(x, y, seed, trial, checkpoints))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..checkpoints.len())
        .map(|k| runs.iter().filter(|r| r[k]).count() as f64 / trials as f64)
        .collect())
}

// ---------------------------------------------------------------------------
// Difference paths
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    U,
    F,
    D,
}

/// Steps where the top path goes up and the bottom down are `U`, the
/// reverse `D`, agreeing steps `F`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DifferencePath {
    letters: Vec<Letter>,
}

impl DifferencePath {
    pub fn new(letters: Vec<Letter>) -> Self {
        DifferencePath { letters }
    }

    pub fn from_pair(top: &LatticePath, bottom: &LatticePath) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::DimensionMismatch { expected: top.len(), got: bottom.len() });
        }
        let letters = top
            .steps()
            .iter()
            .zip(bottom.steps())
            .map(|(&t, &b)| match (t, b) {
                (1, 0) => Letter::U,
                (0, 1) => Letter::D,
                _ => Letter::F,
            })
            .collect();
        Ok(DifferencePath { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_flat(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::F)
    }

    /// Height of the difference at `x = 0..=n`, counting `U` as +1.
    pub fn heights(&self) -> Vec<i64> {
        let mut h = vec![0];
        for l in &self.letters {
            let d = match l {
                Letter::U => 1,
                Letter::D => -1,
                Letter::F => 0,
            };
            h.push(h.last().unwrap() + d);
        }
        h
    }

    /// `sum_x h(x) sin(pi x / n)`.
    pub fn phi(&self) -> f64 {
        let n = self.len() as f64;
        self.heights().iter().enumerate().map(|(x, &h)| h as f64 * (PI * x as f64 / n).sin()).sum()
    }

    /// 1-based positions of the `i`-th `U` paired with the `i`-th `D`.
    pub fn pairing(&self) -> Vec<(usize, usize)> {
        let pos = |l| (1..=self.len()).filter(move |&k| self.letters[k - 1] == l);
        pos(Letter::U).zip(pos(Letter::D)).collect()
    }
}

impl fmt::Display for DifferencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            f.write_str(match l {
                Letter::U => "U",
                Letter::F => "F",
                Letter::D => "D",
            })?;
        }
        Ok(())
    }
}

impl FromStr for DifferencePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                'U' => Ok(Letter::U),
                'F' => Ok(Letter::F),
                'D' => Ok(Letter::D),
                _ => Err(Error::Parse(format!("unexpected letter {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(DifferencePath::new)
    }
}

/// Opposite letters at `r.site, r.site + 1` both become `F`; otherwise the
/// two letters are exchanged iff `r.coin`.
pub fn difference_path_step(dp: &DifferencePath, r: &Randomness) -> Result<DifferencePath> {
    let n = dp.len();
    if r.site == 0 || r.site >= n {
        return Err(Error::SiteOutOfRange { site: r.site, sites: n.saturating_sub(1) });
    }
    let mut out = dp.clone();
    let i = r.site - 1;
    match (out.letters[i], out.letters[i + 1]) {
        (Letter::U, Letter::D) | (Letter::D, Letter::U) => {
            out.letters[i] = Letter::F;
            out.letters[i + 1] = Letter::F;
        }
        _ if r.coin => out.letters.swap(i, i + 1),
        _ => {}
    }
    Ok(out)
}

/// `sum_{x=i}^{j-1} sin(pi x / n)` for `i <= j`, negated for `i > j`.
pub fn weighted_gap(i: usize, j: usize, n: usize) -> f64 {
    let s = |lo: usize, hi: usize| (lo..hi).map(|x| (PI * x as f64 / n as f64).sin()).sum::<f64>();
    if i <= j {
        s(i, j)
    } else {
        -s(j, i)
    }
}

/// Mean of `weighted_gap(i, j, n)` over uniform pairs `1 <= i < j <= n`.
pub fn expected_abs_wgap(n: usize) -> f64 {
    let nf = n as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    (1..n).map(|x| (x * (n - x)) as f64 * (PI * x as f64 / nf).sin()).sum::<f64>() / pairs
}

// ---------------------------------------------------------------------------
// Coupling from the past
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct CftpSample<S> {
    pub state: S,
    /// Number of epochs run; the last started at time `-2^(epochs-1)`.
    pub epochs: u32,
    /// Total single-site steps applied to each of the two trajectories.
    pub steps: u64,
}

fn epoch_stream(seed: u64, sample: u64, epoch: u32) -> Stream {
    Stream::new(seed, (sample << 6) | epoch as u64)
}

/// Monotone coupling from the past. Epoch `e > 0` supplies the moves at
/// times `-2^e .. -2^(e-1) - 1` and epoch 0 the move at time `-1`; each
/// epoch's moves come from their own stream, so every restart reuses them.
pub fn cftp_sample<K: Monotone>(kernel: &K, seed: u64, sample: u64, epoch_cap: u32) -> Result<CftpSample<K::State>> {
    if epoch_cap > 58 {
        return Err(Error::InvalidParameter(format!("epoch cap {epoch_cap} exceeds 58")));
    }
    let mut steps = 0;
    for e in 0..epoch_cap {
        let mut hi = kernel.top();
        let mut lo = kernel.bottom();
        for ep in (0..=e).rev() {
            let len = if ep == 0 { 1 } else { 1u64 << (ep - 1) };
            let mut rng = epoch_stream(seed, sample, ep);
            for _ in 0..len {
                let r = kernel.draw(&mut rng);
                kernel.apply(&mut hi, &r);
                kernel.apply(&mut lo, &r);
            }
            steps += len;
        }
        if hi == lo {
            return Ok(CftpSample { state: hi, epochs: e + 1, steps });
        }
    }
    Err(Error::EpochCap(epoch_cap))
}

/// `count` independent samples, in sample order.
pub fn cftp_samples<K: Monotone>(kernel: &K, seed: u64, count: u64, epoch_cap: u32) -> Result<Vec<CftpSample<K::State>>> {
    (0..count).into_par_iter().map(|i| cftp_sample(kernel, seed, i, epoch_cap)).collect()
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingStats {
    pub seed: u64,
    pub params: String,
    pub times: Vec<u64>,
}

impl CouplingStats {
    pub fn trials(&self) -> usize {
        self.times.len()
    }

    pub fn mean(&self) -> f64 {
        self.times.iter().map(|&t| t as f64).sum::<f64>() / self.times.len() as f64
    }

    pub fn std_error(&self) -> f64 {
        let n = self.times.len() as f64;
        let m = self.mean();
        let var = self.times.iter().map(|&t| (t as f64 - m).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }

    /// Nearest-rank quantile.
    pub fn quantile(&self, q: f64) -> u64 {
        let mut v = self.times.clone();
        v.sort_unstable();
        let k = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
        v[k - 1]
    }

    pub fn median(&self) -> u64 {
        self.quantile(0.5)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,time\n");
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{i},{t}\n"));
        }
        out
    }
}
