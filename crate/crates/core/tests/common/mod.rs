//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's enumerators, transition lists or
//! closed forms; states are built from raw arrays and dynamics only through
//! `SiteKernel::step`.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::f64::consts::PI;

use mixbench::kernels::{Randomness, SiteKernel};
use mixbench::lattice::{HexRouting, LatticePath, Permutation};
use nalgebra::DMatrix;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Relative tolerance with an absolute floor of 1e-12.
pub fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()) + 1e-12
}

// ---------------------------------------------------------------------------
// Brute-force enumeration
// ---------------------------------------------------------------------------

/// Every 0/1 string with `a` zeros and `b` ones, by scanning bit masks.
pub fn brute_paths(a: usize, b: usize) -> Vec<LatticePath> {
    let n = a + b;
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == b)
        .map(|m| LatticePath::new((0..n).map(|k| ((m >> (n - 1 - k)) & 1) as u8).collect()).unwrap())
        .collect()
}

/// Every arrangement of `1..=n`, by repeated insertion.
pub fn brute_perms(n: usize) -> Vec<Permutation> {
    let mut acc: Vec<Vec<usize>> = vec![vec![]];
    for card in 1..=n {
        acc = acc
            .into_iter()
            .flat_map(|v| {
                (0..=v.len()).map(move |p| {
                    let mut w = v.clone();
                    w.insert(p, card);
                    w
                })
            })
            .collect();
    }
    acc.into_iter().map(|v| Permutation::new(v).unwrap()).collect()
}

/// Raw doubled-height rows of a single path started at `start`.
fn raw_row(p: &LatticePath, start: i32) -> Vec<i32> {
    let mut h = start;
    let mut v = vec![h];
    for &s in p.steps() {
        h += if s == 1 { 1 } else { -1 };
        v.push(h);
    }
    v
}

/// Every `c`-tuple of paths whose doubled heights stay at least 2 apart.
pub fn brute_routings(a: usize, b: usize, c: usize) -> Vec<HexRouting> {
    let paths = brute_paths(a, b);
    let mut out = Vec::new();
    let mut idx = vec![0usize; c];
    loop {
        let rows: Vec<Vec<i32>> = idx.iter().enumerate().map(|(i, &k)| raw_row(&paths[k], 2 * (i as i32 + 1))).collect();
        let ok = rows.windows(2).all(|w| w[1].iter().zip(&w[0]).all(|(h, l)| h - l >= 2));
        if ok {
            out.push(HexRouting::new(a, b, c, rows).unwrap());
        }
        let mut k = 0;
        loop {
            if k == c {
                return out;
            }
            idx[k] += 1;
            if idx[k] < paths.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Potentials by direct summation
// ---------------------------------------------------------------------------

/// `h(x) = (#ones among the first x steps) - x b / n`.
pub fn naive_heights(p: &LatticePath) -> Vec<f64> {
    let n = p.len() as f64;
    let b = p.b() as f64;
    let mut ones = 0.0;
    let mut out = vec![0.0];
    for (x, &s) in p.steps().iter().enumerate() {
        ones += s as f64;
        out.push(ones - (x + 1) as f64 * b / n);
    }
    out
}

pub fn naive_phi_path(p: &LatticePath, beta: f64) -> f64 {
    let n = p.len() as f64;
    naive_heights(p).iter().enumerate().map(|(x, h)| h * (beta * (x as f64 - n / 2.0) / n).cos()).sum()
}

pub fn naive_phi_hex(r: &HexRouting, beta: f64) -> f64 {
    let w = r.w() as f64;
    r.rows()
        .iter()
        .flat_map(|row| row.iter().enumerate().map(|(x, &d)| d as f64 / 2.0 * (beta * (x as f64 - w / 2.0) / w).cos()).collect::<Vec<_>>())
        .sum()
}

/// `cos(pi (pos - 1/2)/n)` for the position of `card`.
pub fn naive_card(perm: &Permutation, card: usize) -> f64 {
    let n = perm.n() as f64;
    let pos = perm.values().iter().position(|&v| v == card).unwrap() + 1;
    (PI * (pos as f64 - 0.5) / n).cos()
}

// ---------------------------------------------------------------------------
// Transition matrices from the step function
// ---------------------------------------------------------------------------

/// The law of one uniform-site, fair-coin step, with `aux` discretized to
/// `grid` midpoints. A grid that is a multiple of every tower height + 1
/// reproduces the tower acceptance probabilities exactly.
pub fn site_law(sites: usize, grid: usize) -> Vec<(Randomness, f64)> {
    let p = 1.0 / (2 * sites * grid) as f64;
    let mut out = Vec::new();
    for site in 1..=sites {
        for coin in [true, false] {
            for m in 0..grid {
                out.push((Randomness::with_aux(site, coin, (m as f64 + 0.5) / grid as f64), p));
            }
        }
    }
    out
}

pub fn index_map<S: Ord + Clone>(states: &[S]) -> BTreeMap<S, usize> {
    states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()
}

/// Dense matrix of the chain `s -> step(s, r)`, `r` drawn from `law`.
pub fn dense_matrix<K: SiteKernel>(k: &K, states: &[K::State], law: &[(Randomness, f64)]) -> DMatrix<f64> {
    let idx = index_map(states);
    let n = states.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, s) in states.iter().enumerate() {
        for (r, p) in law {
            let t = k.step(s, r).unwrap();
            m[(i, idx[&t])] += p;
        }
    }
    m
}

/// `sum_j M[i, j] f[j]` for every row.
pub fn apply(m: &DMatrix<f64>, f: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * f[j]).sum()).collect()
}

/// Row vector `p M^t`.
pub fn dense_power(m: &DMatrix<f64>, p: &[f64], t: usize) -> Vec<f64> {
    let mut v = p.to_vec();
    for _ in 0..t {
        v = (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| v[i] * m[(i, j)]).sum()).collect();
    }
    v
}

pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Upper tail probability of Pearson's statistic against the uniform law.
pub fn chi_square_uniform_p(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    ChiSquared::new((counts.len() - 1) as f64).unwrap().sf(stat)
}

// ---------------------------------------------------------------------------
// Shortest transposition sequences
// ---------------------------------------------------------------------------

/// Distances from `from` to every permutation reachable by transpositions
/// of positions `i < j`, each costing `w(i) + ... + w(j - 1)`.
pub fn transposition_distances(from: &Permutation, w: &[f64]) -> HashMap<Vec<usize>, f64> {
    let n = from.n();
    let mut dist: HashMap<Vec<usize>, f64> = HashMap::new();
    // Costs are compared as integers after scaling, so the heap stays Ord.
    let scale = 1e9;
    let mut heap = BinaryHeap::new();
    dist.insert(from.values().to_vec(), 0.0);
    heap.push(Reverse((0u64, from.values().to_vec())));
    while let Some(Reverse((d, v))) = heap.pop() {
        let dv = d as f64 / scale;
        if dv > dist[&v] + 1e-9 {
            continue;
        }
        for i in 0..n {
            let mut cost = 0.0;
            for j in i + 1..n {
                cost += w[j - 1];
                let mut u = v.clone();
                u.swap(i, j);
                let nd = dv + cost;
                if dist.get(&u).is_none_or(|&old| nd < old - 1e-12) {
                    dist.insert(u.clone(), nd);
                    heap.push(Reverse(((nd * scale).round() as u64, u)));
                }
            }
        }
    }
    dist
}
