//! Displacement potentials, contraction rates and bound formulas.
//!
//! All heights here are in unscaled units. Coordinates are centered, so a
//! path of length `n` lives on `x = -n/2, ..., n/2`.

use std::f64::consts::{LN_2, PI};

use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::lattice::{hex_extremes, HeightFunction, HexRouting, LatticePath, Permutation};

pub fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=PI).contains(&beta) {
        Ok(())
    } else {
        Err(Error::BetaOutOfRange(beta))
    }
}

/// `beta = pi - 1/ln(max(n, 3))`, the schedule used by the upper bounds.
pub fn beta_schedule(n: usize) -> f64 {
    PI - 1.0 / (n.max(3) as f64).ln()
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

/// `sum_x h(x) cos(beta x / n)`.
pub fn phi_path(h: &HeightFunction, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let n = h.n() as f64;
    Ok((0..h.scaled().len()).map(|x| h.value(x) * (beta * h.coordinate(x) / n).cos()).sum())
}

/// `Phi(hi - lo)` for two paths of the same shape.
pub fn phi_path_gap(hi: &LatticePath, lo: &LatticePath, beta: f64) -> Result<f64> {
    Ok(phi_path(&hi.heights(), beta)? - phi_path(&lo.heights(), beta)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBounds {
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `1 - (1 - cos(beta/n))/(n - 1)` with the quadratic sandwich around it.
/// Rounding residue below `1e-15` is snapped to 0, so `n = 2` gives 0.
pub fn lambda_path(n: usize, beta: f64) -> LambdaBounds {
    let nf = n as f64;
    let lambda = 1.0 - (1.0 - (beta / nf).cos()) / (nf - 1.0);
    LambdaBounds {
        lambda: if lambda.abs() < 1e-15 { 0.0 } else { lambda },
        lower: 1.0 - beta * beta / (2.0 * nf * nf * (nf - 1.0)),
        upper: 1.0 - beta * beta / (2.0 * nf * nf * nf),
    }
}

/// Bound on `E[(dPhi)^2]` for the path chain at `beta = pi`.
pub fn path_lower_r(a: usize, b: usize) -> f64 {
    a.min(b) as f64 / (a + b - 1) as f64
}

// ---------------------------------------------------------------------------
// Hexagons
// ---------------------------------------------------------------------------

/// `sum_i sum_x h_i(x) cos(beta x / w)`.
pub fn phi_hex(r: &HexRouting, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let w = r.w();
    let weights: Vec<f64> = (0..=w).map(|x| (beta * (x as f64 - w as f64 / 2.0) / w as f64).cos()).collect();
    Ok(r.doubled_heights()
        .chunks(w + 1)
        .map(|row| row.iter().zip(&weights).map(|(&d, c)| d as f64 / 2.0 * c).sum::<f64>())
        .sum())
}

/// Uniform mean of `phi_hex(., pi)`.
///
/// Only the fixed endpoints enter, through the Laplacian at the first and
/// last interior columns.
pub fn hex_phi_mean(a: usize, b: usize, c: usize) -> f64 {
    let w = (a + b) as f64;
    let ends: f64 = (1..=c).map(|i| 2.0 * i as f64 + (b as f64 - a as f64) / 2.0).sum();
    (PI / w).sin() / (2.0 * (1.0 - (PI / w).cos())) * ends
}

/// `Phi(top) - E[Phi]` at `beta = pi`.
pub fn hex_phi_top(a: usize, b: usize, c: usize) -> f64 {
    let w = (a + b) as f64;
    c as f64 / 2.0 * (PI * a as f64 / w).sin() / (1.0 - (PI / w).cos())
}

/// Variance of `Phi` under the uniform distribution.
pub fn hex_var_phi(a: usize, b: usize, c: usize) -> f64 {
    let (af, bf, cf) = (a as f64, b as f64, c as f64);
    let w = af + bf;
    af * bf * cf * (af + bf + cf) / (4.0 * (1.0 - (PI / w).cos()) * (w * w - 1.0))
}

/// `Cov(S_i, S_j)` of the column sums, `-a < i <= j < b`.
pub fn hex_covariance(i: i64, j: i64, a: usize, b: usize, c: usize) -> Result<f64> {
    let (ai, bi) = (a as i64, b as i64);
    if !(-ai < i && i <= j && j < bi) {
        return Err(Error::InvalidParameter(format!("need -{a} < i <= j < {b}, got i = {i}, j = {j}")));
    }
    let (af, bf, cf) = (a as f64, b as f64, c as f64);
    let w = af + bf;
    Ok((ai + i) as f64 * (bi - j) as f64 * af * bf * cf * (af + bf + cf) / (w * w * (w * w - 1.0)))
}

pub fn hex_lambda(a: usize, b: usize, c: usize) -> f64 {
    1.0 - spectral_gap(GapFamily::Hexagon { a, b, c })
}

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

/// `f_i(sigma) = cos(pi (pos(i) - 1/2) / n)` for card `i`.
pub fn card_eigenfunction(perm: &Permutation, card: usize) -> f64 {
    let n = perm.n() as f64;
    let pos = perm.values().iter().position(|&v| v == card).expect("card in deck") + 1;
    (PI * (pos as f64 - 0.5) / n).cos()
}

/// All `f_i`, indexed by `card - 1`.
pub fn card_eigenfunctions(perm: &Permutation) -> Vec<f64> {
    let n = perm.n() as f64;
    perm.positions().iter().map(|&p| (PI * (p as f64 - 0.5) / n).cos()).collect()
}

/// `sum_i f_i(top) f_i(sigma)`, where the top state is the reversed deck.
pub fn phi_perm(perm: &Permutation) -> f64 {
    let top = card_eigenfunctions(&Permutation::reversed(perm.n()));
    card_eigenfunctions(perm).iter().zip(&top).map(|(f, g)| f * g).sum()
}

// ---------------------------------------------------------------------------
// Spectral gaps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapFamily {
    Path { n: usize },
    Permutation { n: usize },
    Hexagon { a: usize, b: usize, c: usize },
    /// Lower bound on the gap for uniform site frequencies.
    KarzanovKhachiyan { n: usize },
    /// A region of width `w` with `sites` places where a path may move.
    Tiling { w: usize, sites: usize },
}

pub fn spectral_gap(family: GapFamily) -> f64 {
    let g = |w: usize, p: usize| (1.0 - (PI / w as f64).cos()) / p as f64;
    match family {
        GapFamily::Path { n } | GapFamily::Permutation { n } | GapFamily::KarzanovKhachiyan { n } => g(n, n - 1),
        GapFamily::Hexagon { a, b, c } => g(a + b, c * (a + b - 1)),
        GapFamily::Tiling { w, sites } => g(w, sites),
    }
}

// ---------------------------------------------------------------------------
// Second-moment lower bounds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub phi_max: f64,
    pub gamma: f64,
    /// Bound on `E[(dPhi)^2]` per step.
    pub r: f64,
    pub epsilon: f64,
}

/// Largest `t` at which the chain is provably still `1 - epsilon` far from
/// stationarity. With `odd_only` the condition `gamma <= 2 - sqrt(2)` is
/// relaxed and the largest odd admissible `t` is returned.
pub fn anticonverge_time(inp: &BoundInputs, odd_only: bool) -> Result<u64> {
    let BoundInputs { phi_max, gamma, r, epsilon } = *inp;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside (0, 1]")));
    }
    if gamma > 2.0 - 2f64.sqrt() && !odd_only {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || !(r > 0.0) || !(phi_max > 0.0) {
        return Err(Error::InvalidParameter("need phi_max > 0, R > 0 and 0 < epsilon < 1".into()));
    }
    let num = phi_max.ln() + 0.5 * (gamma * epsilon / (4.0 * r)).ln();
    if num <= 0.0 || gamma == 1.0 {
        return Ok(0);
    }
    let t = (num / -(1.0 - gamma).ln()).floor() as u64;
    if odd_only && t % 2 == 0 {
        return Ok(t.saturating_sub(1));
    }
    Ok(t)
}

fn second_moment_time(inp: BoundInputs) -> Result<u64> {
    anticonverge_time(&inp, inp.gamma > 2.0 - 2f64.sqrt())
}

/// Inputs for the path lower bound at `beta = pi`.
pub fn path_lower_inputs(a: usize, b: usize, epsilon: f64) -> BoundInputs {
    let n = a + b;
    let top = LatticePath::top(a, b);
    BoundInputs {
        phi_max: phi_path(&top.heights(), PI).unwrap(),
        gamma: spectral_gap(GapFamily::Path { n }),
        r: path_lower_r(a, b),
        epsilon,
    }
}

pub fn path_lower_time(a: usize, b: usize, epsilon: f64) -> Result<u64> {
    second_moment_time(path_lower_inputs(a, b, epsilon))
}

/// Inputs for the hexagon lower bound: the centered top potential, the
/// exact gap and `R = c`, the tallest possible tower.
pub fn hex_lower_inputs(a: usize, b: usize, c: usize, epsilon: f64) -> BoundInputs {
    BoundInputs {
        phi_max: hex_phi_top(a, b, c),
        gamma: spectral_gap(GapFamily::Hexagon { a, b, c }),
        r: c as f64,
        epsilon,
    }
}

pub fn hex_lower_time(a: usize, b: usize, c: usize, epsilon: f64) -> Result<u64> {
    second_moment_time(hex_lower_inputs(a, b, c, epsilon))
}

// ---------------------------------------------------------------------------
// Coupling upper bounds
// ---------------------------------------------------------------------------

/// `t` after which the top and bottom paths have coalesced except with
/// probability `epsilon`: `ln(Phi_0 / (Phi_min eps)) / gamma_beta`.
pub fn path_upper_time(a: usize, b: usize, epsilon: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let n = (a + b) as f64;
    let phi0 = phi_path_gap(&LatticePath::top(a, b), &LatticePath::bottom(a, b), beta)?;
    let phi_min = (beta * (n / 2.0 - 1.0) / n).cos();
    let gamma = (1.0 - (beta / n).cos()) / (n - 1.0);
    Ok(((phi0 / (phi_min * epsilon)).ln() / gamma).max(0.0))
}

/// Union bound over the threshold rows of a deck of `n` cards.
pub fn perm_upper_time(n: usize, epsilon: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let nf = n as f64;
    let mut phi0 = 0.0;
    for i in 1..n {
        phi0 += phi_path_gap(&LatticePath::top(n - i, i), &LatticePath::bottom(n - i, i), beta)?;
    }
    let phi_min = (beta * (nf / 2.0 - 1.0) / nf).cos();
    let gamma = (1.0 - (beta / nf).cos()) / (nf - 1.0);
    Ok(((phi0 / (phi_min * epsilon)).ln() / gamma).max(0.0))
}

/// Tiling coupling bound `ln(m / (Phi_min eps)) / gamma_beta` with
/// `gamma_beta = (1 - cos(beta/w))/p` and `Phi_min = cos(beta (w/2 - 1)/w)`.
pub fn lozenge_upper_time(p: usize, w: usize, m: u64, epsilon: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if p == 0 || w == 0 || m == 0 {
        return Err(Error::InvalidParameter("p, w and m must be positive".into()));
    }
    let wf = w as f64;
    let gamma = (1.0 - (beta / wf).cos()) / p as f64;
    let phi_min = (beta * (wf / 2.0 - 1.0) / wf).cos().max((beta / 2.0).cos());
    Ok(((m as f64 / (phi_min * epsilon)).ln() / gamma).max(0.0))
}

/// Hexagon instance of [`lozenge_upper_time`], with `p = c (w - 1)` and `m`
/// the number of local moves between the extreme routings.
pub fn hex_upper_time(a: usize, b: usize, c: usize, epsilon: f64) -> Result<f64> {
    let (lo, hi) = hex_extremes(a, b, c);
    let m = crate::lattice::local_moves_between(&lo, &hi);
    let w = a + b;
    let n = a * b + b * c + c * a;
    lozenge_upper_time(c * (w - 1), w, m, epsilon, beta_schedule(n))
}

/// Pairwise coupling bound `ln(10 n / eps) / gamma`.
pub fn pairwise_upper_time(n: usize, epsilon: f64) -> f64 {
    (10.0 * n as f64 / epsilon).ln() / spectral_gap(GapFamily::Permutation { n })
}

// ---------------------------------------------------------------------------
// Linear extensions
// ---------------------------------------------------------------------------

/// `w(i) = cos(beta (i/n - 1/2))` for sites `i = 1..n-1`.
pub fn sinusoidal_weights(n: usize, beta: f64) -> Vec<f64> {
    (1..n).map(|i| (beta * (i as f64 / n as f64 - 0.5)).cos()).collect()
}

/// `f(i) = i (n - i) / K` with `K = (n^3 - n)/6`.
pub fn parabola_frequencies(n: usize) -> Vec<f64> {
    let k = (n * n * n - n) as f64 / 6.0;
    (1..n).map(|i| (i * (n - i)) as f64 / k).collect()
}

/// `gamma_{i,j}` for sites `1 <= i < j <= n`; `f` and `w` are indexed by
/// site - 1 and vanish at sites `0` and `n`.
pub fn kk_gamma(f: &[f64], w: &[f64], i: usize, j: usize) -> Result<f64> {
    let n = f.len() + 1;
    if w.len() != f.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), got: w.len() });
    }
    if !(1 <= i && i < j && j <= n) {
        return Err(Error::InvalidParameter(format!("need 1 <= i < j <= {n}")));
    }
    let fw = |k: usize| if k == 0 || k == n { 0.0 } else { f[k - 1] * w[k - 1] };
    let den: f64 = (i..j).map(|k| w[k - 1]).sum();
    if den <= 0.0 {
        return Err(Error::InvalidParameter("zero total weight".into()));
    }
    Ok(0.5 * (-fw(i - 1) + fw(i) + fw(j - 1) - fw(j)) / den)
}

/// Minimum of `gamma_{i,j}` over all site pairs.
pub fn kk_gamma_min(f: &[f64], w: &[f64]) -> Result<f64> {
    let n = f.len() + 1;
    let mut best = f64::INFINITY;
    for i in 1..n {
        for j in i + 1..=n {
            best = best.min(kk_gamma(f, w, i, j)?);
        }
    }
    Ok(best)
}

/// Weighted footrule: half the total weighted displacement of the items,
/// measuring position `p` by `W(p) = w(1) + ... + w(p - 1)`.
pub fn weighted_footrule(x: &Permutation, y: &Permutation, w: &[f64]) -> f64 {
    let mut cum = vec![0.0; x.n() + 1];
    for p in 1..x.n() {
        cum[p] = cum[p - 1] + w[p - 1];
    }
    let (px, py) = (x.positions(), y.positions());
    0.5 * px.iter().zip(&py).map(|(&a, &b)| (cum[a - 1] - cum[b - 1]).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KkBound {
    pub time: f64,
    pub beta: f64,
    pub gamma_min: f64,
    /// Largest over smallest positive weighted distance.
    pub d_ratio: f64,
}

/// `ln(D/eps) / gamma_min` for uniform frequencies and sinusoidal weights.
pub fn kk_upper_time(n: usize, epsilon: f64) -> Result<KkBound> {
    if n < 2 {
        return Err(Error::InvalidParameter("need n >= 2".into()));
    }
    let beta = beta_schedule(n);
    let w = sinusoidal_weights(n, beta);
    let f = vec![1.0 / (n - 1) as f64; n - 1];
    let gamma_min = kk_gamma_min(&f, &w)?;
    // The reversal attains the maximum: every cut k is crossed by
    // min(k, n - k) items each way.
    let dmax: f64 = w.iter().enumerate().map(|(k, wk)| wk * (k + 1).min(n - k - 1) as f64).sum();
    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_ratio = dmax / wmin;
    Ok(KkBound { time: (d_ratio / epsilon).ln() / gamma_min, beta, gamma_min, d_ratio })
}

// ---------------------------------------------------------------------------
// Two-coordinate absorbed walk
// ---------------------------------------------------------------------------

/// Grid points `(x, y)` with `x < y < n`, in lexicographic order. Point `k`
/// stands for the coordinate `k + 1/2`.
pub fn triangle_states(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect()
}

/// `f_{j,k}` on [`triangle_states`] and its eigenvalue
/// `1 + alpha (2 cos(j pi/n) + 2 cos(k pi/n) - 4)`.
pub fn triangle_eigenfunction(j: usize, k: usize, n: usize, alpha: f64) -> Result<(Vec<f64>, f64)> {
    if !(j < k && k < n) {
        return Err(Error::InvalidParameter(format!("need 0 <= j < k < n, got j = {j}, k = {k}, n = {n}")));
    }
    let nf = n as f64;
    let c = |m: usize, x: usize| (m as f64 * PI * (x as f64 + 0.5) / nf).cos();
    let f = triangle_states(n).into_iter().map(|(x, y)| c(j, x) * c(k, y) - c(j, y) * c(k, x)).collect();
    let lambda = 1.0 + alpha * (2.0 * (j as f64 * PI / nf).cos() + 2.0 * (k as f64 * PI / nf).cos() - 4.0);
    Ok((f, lambda))
}

/// `M_n v`: each coordinate steps by one in either direction with
/// probability `alpha` each, stays put at the boundary of the grid, and
/// is killed on reaching the diagonal.
pub fn triangle_apply(v: &[f64], n: usize, alpha: f64) -> Vec<f64> {
    let idx = |x: usize, y: usize| x * n - x * (x + 1) / 2 + (y - x - 1);
    let mut out = vec![0.0; v.len()];
    for x in 0..n {
        for y in x + 1..n {
            let here = v[idx(x, y)];
            let mut acc = 0.0;
            let mut stay = 1.0 - 4.0 * alpha;
            // Moves of x.
            if x == 0 {
                stay += alpha;
            } else {
                acc += alpha * v[idx(x - 1, y)];
            }
            if x + 1 < y {
                acc += alpha * v[idx(x + 1, y)];
            }
            // Moves of y.
            if y + 1 == n {
                stay += alpha;
            } else {
                acc += alpha * v[idx(x, y + 1)];
            }
            if y - 1 > x {
                acc += alpha * v[idx(x, y - 1)];
            }
            out[idx(x, y)] = acc + stay * here;
        }
    }
    out
}

/// `10 exp(-T (1 - cos(pi/n))/(n - 1))`.
pub fn triangle_tail_bound(t: u64, n: usize) -> f64 {
    10.0 * (-(t as f64) * spectral_gap(GapFamily::Permutation { n })).exp()
}

/// Largest survival probability over all starting points, for each
/// `T = 0..=t_max`, with `alpha = 1/(2(n - 1))`.
pub fn triangle_survival(n: usize, t_max: u64) -> Vec<f64> {
    let alpha = 1.0 / (2.0 * (n - 1) as f64);
    let mut v = vec![1.0; n * (n - 1) / 2];
    let mut out = Vec::with_capacity(t_max as usize + 1);
    out.push(if v.is_empty() { 0.0 } else { 1.0 });
    for _ in 0..t_max {
        v = triangle_apply(&v, n, alpha);
        out.push(v.iter().cloned().fold(0.0, f64::max));
    }
    out
}

// ---------------------------------------------------------------------------
// Interchange processes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterchangeFamily {
    Hypercube { d: usize },
    Grid { l: usize, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterchangeBound {
    pub inputs: BoundInputs,
    pub time: u64,
    /// Leading-order asymptotic form of the same bound.
    pub asymptote: f64,
}

/// `cos(pi (i - 1/2)/l)` on the vertex `(i, j)` of an `l x m` grid,
/// `i = 1..l`, numbered as in [`crate::kernels::Graph::grid`].
pub fn grid_eigenvector(l: usize, m: usize) -> Vec<f64> {
    (0..l * m).map(|v| (PI * (v / m) as f64 / l as f64 + PI * 0.5 / l as f64).cos()).collect()
}

/// `(-1)^{x_1}` on the hypercube.
pub fn hypercube_eigenvector(d: usize) -> Vec<f64> {
    (0..1usize << d).map(|v| if v & 1 == 0 { 1.0 } else { -1.0 }).collect()
}

/// `sum_x v(x) g(config[x])`.
pub fn phi_occupation(config: &[usize], v: &[f64], g: impl Fn(usize) -> f64) -> f64 {
    config.iter().zip(v).map(|(&p, vx)| vx * g(p)).sum()
}

pub fn interchange_lower_bound(family: InterchangeFamily, alpha: f64, epsilon: f64) -> Result<InterchangeBound> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1]")));
    }
    let (inputs, asymptote) = match family {
        InterchangeFamily::Hypercube { d } => {
            if d == 0 {
                return Err(Error::InvalidParameter("need d >= 1".into()));
            }
            let df = d as f64;
            let inputs = BoundInputs {
                phi_max: 2f64.powi(d as i32 - 1),
                gamma: alpha / (df * 2f64.powi(d as i32 - 2)),
                r: 4.0 * alpha,
                epsilon,
            };
            (inputs, LN_2 / (8.0 * alpha) * df * df * 2f64.powi(d as i32))
        }
        InterchangeFamily::Grid { l, m } => {
            if l < 2 || m < 1 {
                return Err(Error::InvalidParameter("need l >= 2 and m >= 1".into()));
            }
            let e = (l * (m - 1) + m * (l - 1)) as f64;
            let v = grid_eigenvector(l, m);
            let g = crate::kernels::Graph::grid(l, m);
            let r = alpha / e * g.edges().iter().map(|&(x, y)| (v[x] - v[y]).powi(2)).sum::<f64>();
            let mut sorted = v.clone();
            sorted.sort_by(|p, q| q.partial_cmp(p).unwrap());
            let phi_max = sorted[..l * m / 2].iter().sum::<f64>();
            let inputs = BoundInputs {
                phi_max,
                gamma: 2.0 * alpha * (1.0 - (PI / l as f64).cos()) / e,
                r,
                epsilon,
            };
            let (lf, mf) = (l as f64, m as f64);
            (inputs, lf * lf * (lf - 0.5) * (mf - 0.5) / (alpha * PI * PI) * (lf * mf).ln())
        }
    };
    Ok(InterchangeBound { inputs, time: second_moment_time(inputs)?, asymptote })
}

// ---------------------------------------------------------------------------
// Threshold shape heuristics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeuristicFamily {
    /// Treated as the hexagon with `c = 1`.
    Path { a: usize, b: usize },
    Hexagon { a: usize, b: usize, c: usize },
    Permutation { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heuristics {
    /// Separation amplitude.
    pub a_s: f64,
    /// Variation amplitude under the Gaussian approximation.
    pub a_d: f64,
    pub lambda: f64,
}

pub const A_D_LABEL: &str = "Gaussian-heuristic approximation";

pub fn heuristic_constants(family: HeuristicFamily) -> Heuristics {
    let (a_s, lambda) = match family {
        HeuristicFamily::Path { a, b } => hex_as(a, b, 1),
        HeuristicFamily::Hexagon { a, b, c } => hex_as(a, b, c),
        HeuristicFamily::Permutation { n } => ((n - 1) as f64, 1.0 - spectral_gap(GapFamily::Permutation { n })),
    };
    Heuristics { a_s, a_d: (a_s / (2.0 * PI)).sqrt(), lambda }
}

fn hex_as(a: usize, b: usize, c: usize) -> (f64, f64) {
    let top = hex_phi_top(a, b, c);
    (top * top / hex_var_phi(a, b, c), hex_lambda(a, b, c))
}

/// `(s, d, dbar)` curves `1 - exp(-A_s x)`, `erf(sqrt(pi)/2 A_d x)` and
/// `erf(sqrt(pi) A_d x)` at `x = lambda^t`, clamped to `[0, 1]`.
pub fn threshold_curves(a_s: f64, a_d: f64, lambda: f64, t: f64) -> (f64, f64, f64) {
    let x = lambda.powf(t);
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    let sp = PI.sqrt();
    (
        clamp(1.0 - (-a_s * x).exp()),
        clamp(erf(sp / 2.0 * a_d * x)),
        clamp(erf(sp * a_d * x)),
    )
}
