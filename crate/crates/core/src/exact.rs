//! Exhaustive analysis of small chains: enumerate the states, build the
//! sparse transition matrix, and push distributions through it.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::Kernel;

pub const DEFAULT_STATE_CAP: usize = 2_000_000;
pub const EIGEN_GUARD: usize = 5000;
pub const EXHAUSTIVE_GUARD: usize = 5000;

/// Cap on enumerated states: `MIXBENCH_STATE_CAP` if set, else 2 * 10^6.
pub fn state_cap() -> usize {
    std::env::var("MIXBENCH_STATE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

#[derive(Debug, Clone)]
pub struct StateSpace<S> {
    states: Vec<S>,
    index: HashMap<S, usize>,
}

impl<S: Clone + Eq + std::hash::Hash> StateSpace<S> {
    pub fn from_states(states: Vec<S>) -> Result<Self> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidState(format!("state {i} is a duplicate")));
            }
        }
        Ok(StateSpace { states, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }
}

/// Enumerate a kernel's states, refusing if there are more than `cap`.
pub fn build_space<K: Kernel>(kernel: &K, cap: usize) -> Result<StateSpace<K::State>> {
    if let Some(count) = kernel.state_count() {
        if count > BigUint::from(cap) {
            return Err(Error::TooLarge { size: count.to_string(), cap });
        }
    }
    let states = kernel.states()?;
    if states.len() > cap {
        return Err(Error::TooLarge { size: states.len().to_string(), cap });
    }
    StateSpace::from_states(states)
}

/// Probability vector aligned with a [`StateSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    p: Vec<f64>,
}

impl DistributionVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&x| !(x >= -1e-15)) {
            return Err(Error::InvalidParameter("negative or NaN probability".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {sum}")));
        }
        Ok(DistributionVector { p: p.into_iter().map(|x| x.max(0.0)).collect() })
    }

    pub fn point_mass(n: usize, i: usize) -> Self {
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        DistributionVector { p }
    }

    pub fn uniform(n: usize) -> Self {
        DistributionVector { p: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn sum(&self) -> f64 {
        self.p.iter().sum()
    }
}

pub fn tv_distance(p: &DistributionVector, q: &DistributionVector) -> f64 {
    0.5 * p.p.iter().zip(&q.p).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `max_y (mu(y) - p(y))/mu(y)`, floored at 0.
pub fn separation(p: &DistributionVector, mu: &DistributionVector) -> f64 {
    p.p.iter()
        .zip(&mu.p)
        .filter(|(_, m)| **m > 0.0)
        .map(|(x, m)| (m - x) / m)
        .fold(0.0, f64::max)
}

/// Row-compressed transition matrix together with its transpose.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n: usize,
    ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
    tptr: Vec<usize>,
    tcol: Vec<u32>,
    tval: Vec<f64>,
}

impl SparseMatrix {
    pub fn build<K: Kernel>(kernel: &K, space: &StateSpace<K::State>) -> Result<Self> {
        let n = space.len();
        let rows: Vec<Vec<(u32, f64)>> = space
            .states()
            .par_iter()
            .map(|s| {
                kernel
                    .transitions(s)
                    .into_iter()
                    .map(|t| {
                        space
                            .index_of(&t.state)
                            .map(|j| (j as u32, t.probability))
                            .ok_or_else(|| Error::InvalidState(format!("successor {:?} not enumerated", t.state)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ptr = Vec::with_capacity(n + 1);
        let (mut col, mut val) = (Vec::new(), Vec::new());
        ptr.push(0);
        let mut counts = vec![0usize; n];
        for row in &rows {
            for &(j, p) in row {
                col.push(j);
                val.push(p);
                counts[j as usize] += 1;
            }
            ptr.push(col.len());
        }
        let mut tptr = vec![0usize; n + 1];
        for j in 0..n {
            tptr[j + 1] = tptr[j] + counts[j];
        }
        let mut fill = tptr.clone();
        let mut tcol = vec![0u32; col.len()];
        let mut tval = vec![0.0; col.len()];
        for (i, row) in rows.iter().enumerate() {
            for &(j, p) in row {
                let k = &mut fill[j as usize];
                tcol[*k] = i as u32;
                tval[*k] = p;
                *k += 1;
            }
        }
        Ok(SparseMatrix { n, ptr, col, val, tptr, tcol, tval })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    /// Successors of state `i` as `(j, P(i, j))`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.ptr[i]..self.ptr[i + 1]).map(move |k| (self.col[k] as usize, self.val[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map(|(_, p)| p).unwrap_or(0.0)
    }

    /// `p P`.
    pub fn push_forward(&self, p: &[f64], out: &mut [f64]) {
        let gather = |j: usize| (self.tptr[j]..self.tptr[j + 1]).map(|k| p[self.tcol[k] as usize] * self.tval[k]).sum::<f64>();
        if self.n >= 1 << 14 {
            out.par_iter_mut().enumerate().for_each(|(j, o)| *o = gather(j));
        } else {
            for (j, o) in out.iter_mut().enumerate() {
                *o = gather(j);
            }
        }
    }

    /// `P f`, the one-step expectation of `f`.
    pub fn expect(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, p)| p * f[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, p) in self.row(i) {
                m[(i, j)] += p;
            }
        }
        m
    }
}

/// A kernel with its enumerated state space and transition matrix.
pub struct ExactChain<K: Kernel> {
    pub kernel: K,
    pub space: StateSpace<K::State>,
    pub matrix: SparseMatrix,
}

impl<K: Kernel> ExactChain<K> {
    pub fn new(kernel: K) -> Result<Self> {
        Self::with_cap(kernel, state_cap())
    }

    pub fn with_cap(kernel: K, cap: usize) -> Result<Self> {
        let space = build_space(&kernel, cap)?;
        let matrix = SparseMatrix::build(&kernel, &space)?;
        Ok(ExactChain { kernel, space, matrix })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn index(&self, s: &K::State) -> Result<usize> {
        self.space.index_of(s).ok_or_else(|| Error::InvalidState(format!("{s:?} is not in the state space")))
    }

    pub fn point_mass(&self, s: &K::State) -> Result<DistributionVector> {
        Ok(DistributionVector::point_mass(self.len(), self.index(s)?))
    }

    /// `steps`-fold push-forward of `dist`.
    pub fn evolve(&self, dist: &DistributionVector, steps: usize) -> Result<DistributionVector> {
        if dist.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: dist.len() });
        }
        let mut p = dist.p.clone();
        let mut q = vec![0.0; p.len()];
        for _ in 0..steps {
            self.matrix.push_forward(&p, &mut q);
            std::mem::swap(&mut p, &mut q);
        }
        Ok(DistributionVector { p })
    }

    /// Exact `d`, `dbar` and `s` curves started from `lo` and `hi`, for
    /// `t = 0..=t_max`, stopping early once `s` and `d` fall below
    /// `stop_below`.
    pub fn distance_curves(
        &self,
        lo: &K::State,
        hi: &K::State,
        lambda: f64,
        t_max: usize,
        stop_below: f64,
    ) -> Result<Curves> {
        let (ilo, ihi) = (self.index(lo)?, self.index(hi)?);
        let n = self.len();
        let nf = n as f64;
        // Evolve q = p - mu rather than p: mu is fixed, and the tail values
        // then keep their relative precision instead of cancelling.
        let start = |i: usize| {
            let mut q = vec![-1.0 / nf; n];
            q[i] += 1.0;
            q
        };
        let (mut q0, mut q1) = (start(ilo), start(ihi));
        let mut scratch = vec![0.0; n];
        let mut rows = Vec::new();
        for t in 0..=t_max {
            let tv = |q: &[f64]| 0.5 * q.iter().map(|x| x.abs()).sum::<f64>();
            let d = tv(&q0).max(tv(&q1));
            let dbar = 0.5 * q0.iter().zip(&q1).map(|(x, y)| (x - y).abs()).sum::<f64>();
            let s = (-nf * q0[ihi]).max(-nf * q1[ilo]).max(0.0);
            rows.push(CurveRow { t, d, dbar, s, lambda_pow_t: lambda.powi(t as i32) });
            if s < stop_below && d < stop_below {
                break;
            }
            self.matrix.push_forward(&q0, &mut scratch);
            std::mem::swap(&mut q0, &mut scratch);
            self.matrix.push_forward(&q1, &mut scratch);
            std::mem::swap(&mut q1, &mut scratch);
        }
        Ok(Curves { rows, lambda })
    }

    /// Worst-start `d` and `s` over every starting state, for validating
    /// the extreme-start curves on small spaces.
    pub fn exhaustive_curves(&self, t_max: usize) -> Result<Vec<(f64, f64)>> {
        let n = self.len();
        if n > EXHAUSTIVE_GUARD {
            return Err(Error::TooLarge { size: n.to_string(), cap: EXHAUSTIVE_GUARD });
        }
        let nf = n as f64;
        let mut dists: Vec<Vec<f64>> = (0..n).map(|i| DistributionVector::point_mass(n, i).p).collect();
        let mut out = Vec::with_capacity(t_max + 1);
        for t in 0..=t_max {
            let mut d: f64 = 0.0;
            let mut s: f64 = 0.0;
            for p in &dists {
                d = d.max(0.5 * p.iter().map(|x| (x - 1.0 / nf).abs()).sum::<f64>());
                s = s.max(p.iter().map(|x| 1.0 - nf * x).fold(0.0, f64::max));
            }
            out.push((d, s));
            if t < t_max {
                dists = dists
                    .par_iter()
                    .map(|p| {
                        let mut q = vec![0.0; n];
                        self.matrix.push_forward(p, &mut q);
                        q
                    })
                    .collect();
            }
        }
        Ok(out)
    }

    /// Transition symmetry and the uniform fixed point.
    pub fn verify_stationarity(&self) -> StationarityReport {
        let n = self.len();
        let mut max_asymmetry: f64 = 0.0;
        let mut max_row_error: f64 = 0.0;
        for i in 0..n {
            let mut sum = 0.0;
            for (j, p) in self.matrix.row(i) {
                sum += p;
                max_asymmetry = max_asymmetry.max((p - self.matrix.get(j, i)).abs());
            }
            max_row_error = max_row_error.max((sum - 1.0).abs());
        }
        let mu = vec![1.0 / n as f64; n];
        let mut next = vec![0.0; n];
        self.matrix.push_forward(&mu, &mut next);
        let residual = next.iter().zip(&mu).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        StationarityReport { max_asymmetry, max_row_error, residual }
    }

    /// Second-largest eigenvalue modulus of a symmetric transition matrix.
    pub fn second_eigenvalue(&self) -> Result<f64> {
        let n = self.len();
        if n > EIGEN_GUARD {
            return Err(Error::TooLarge { size: n.to_string(), cap: EIGEN_GUARD });
        }
        if n < 2 {
            return Err(Error::InvalidParameter("need at least two states".into()));
        }
        let m = self.matrix.to_dense();
        let asym = (&m - m.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidParameter(format!("transition matrix is not symmetric ({asym:e})")));
        }
        let eig = SymmetricEigen::new((&m + m.transpose()) * 0.5);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        // Drop the eigenvalue 1 of the constant vector.
        let top = vals
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 1.0).abs().partial_cmp(&(b.1 - 1.0).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        vals.swap_remove(top);
        Ok(vals.iter().map(|v| v.abs()).fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    pub max_asymmetry: f64,
    pub max_row_error: f64,
    /// `max |(U P)(y) - U(y)|`.
    pub residual: f64,
}

impl StationarityReport {
    pub fn ok(&self) -> bool {
        self.max_asymmetry < 1e-12 && self.max_row_error < 1e-12 && self.residual < 1e-12
    }
}

/// `evolve` for callers holding only a kernel and a space.
pub fn evolve<K: Kernel>(
    chain: &ExactChain<K>,
    dist: &DistributionVector,
    steps: usize,
) -> Result<DistributionVector> {
    chain.evolve(dist, steps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub t: usize,
    pub d: f64,
    pub dbar: f64,
    pub s: f64,
    pub lambda_pow_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub rows: Vec<CurveRow>,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub a_s: f64,
    pub a_d: f64,
    /// Largest `|ln s - t ln lambda - ln a_s|` over the window.
    pub residual_s: f64,
    pub samples: usize,
}

impl Curves {
    /// Rows at which `d <= dbar <= 2d`, `d <= s` or
    /// `s(2t) <= 2 dbar(t) - dbar(t)^2` fails by more than `tol`.
    pub fn relation_violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if r.d > r.dbar + tol {
                out.push(format!("t = {}: d = {} > dbar = {}", r.t, r.d, r.dbar));
            }
            if r.dbar > 2.0 * r.d + tol {
                out.push(format!("t = {}: dbar = {} > 2d = {}", r.t, r.dbar, 2.0 * r.d));
            }
            if r.d > r.s + tol {
                out.push(format!("t = {}: d = {} > s = {}", r.t, r.d, r.s));
            }
            if let Some(r2) = self.rows.get(2 * r.t) {
                let bound = 2.0 * r.dbar - r.dbar * r.dbar;
                if r2.s > bound + tol {
                    out.push(format!("t = {}: s(2t) = {} > {}", r.t, r2.s, bound));
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,d,dbar,s,lambda_pow_t\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.t, r.d, r.dbar, r.s, r.lambda_pow_t);
        }
        out
    }

    /// `x = t ln(1/lambda) - ln(a_s)` against `s`, `d`, `dbar`.
    pub fn rescaled(&self, a_s: f64) -> Vec<(f64, CurveRow)> {
        let k = -self.lambda.ln();
        self.rows.iter().map(|r| (r.t as f64 * k - a_s.ln(), *r)).collect()
    }

    pub fn rescaled_csv(&self, a_s: f64) -> String {
        let mut out = String::from("x,d,dbar,s,s_curve\n");
        for (x, r) in self.rescaled(a_s) {
            let _ = writeln!(out, "{},{},{},{},{}", x, r.d, r.dbar, r.s, 1.0 - (-(-x).exp()).exp());
        }
        out
    }

    /// Largest `|ln s - ln(1 - exp(-e^{-x}))|` over rows with `0 < s < 0.5`.
    pub fn cutoff_deviation(&self, a_s: f64) -> f64 {
        self.rescaled(a_s)
            .into_iter()
            .filter(|(_, r)| r.s > 0.0 && r.s < 0.5)
            .map(|(x, r)| (r.s.ln() - (1.0 - (-(-x).exp()).exp()).ln()).abs())
            .fold(0.0, f64::max)
    }
}

/// Fit `s(t) = A_s lambda^t` and `d(t) = A_d lambda^t` on the tail where
/// `1e-10 < s < 0.1`. With the slope fixed, least squares reduces to the
/// mean of `ln s - t ln lambda`.
pub fn estimate_amplitudes(curves: &Curves, lambda: f64) -> Result<Amplitudes> {
    let ll = lambda.ln();
    let tail: Vec<&CurveRow> = curves.rows.iter().filter(|r| r.s < 0.1 && r.s > 1e-10).collect();
    if tail.len() < 3 {
        return Err(Error::InsufficientTail(tail.len()));
    }
    let ls: Vec<f64> = tail.iter().map(|r| r.s.ln() - r.t as f64 * ll).collect();
    let mean_s = ls.iter().sum::<f64>() / ls.len() as f64;
    let ld: Vec<f64> = tail.iter().filter(|r| r.d > 1e-10).map(|r| r.d.ln() - r.t as f64 * ll).collect();
    let mean_d = if ld.is_empty() { f64::NAN } else { ld.iter().sum::<f64>() / ld.len() as f64 };
    let residual_s = ls.iter().map(|v| (v - mean_s).abs()).fold(0.0, f64::max);
    Ok(Amplitudes { a_s: mean_s.exp(), a_d: mean_d.exp(), residual_s, samples: tail.len() })
}
