//! Single-step dynamics.
//!
//! Every chain exposes two faces: a grand-coupling update driven by an
//! explicit [`Randomness`] value, and the full list of successors with
//! their probabilities.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::lattice::{
    count_paths, count_tilings, enumerate_linear_extensions, enumerate_paths, enumerate_permutations,
    enumerate_routings, hex_extremes, HexRouting, LatticePath, LinearExtension, Permutation, Poset,
    DEFAULT_EXTENSION_GUARD,
};
use crate::stream::{below, unit, Stream};

/// The randomness consumed by one single-site step.
///
/// `site` is 1-based. For sort-type chains `coin == true` sorts the pair
/// (pushes the path down) and `false` reverse-sorts it. `aux` is only read
/// by tower moves and by the interchange firing test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Randomness {
    pub site: usize,
    pub coin: bool,
    pub aux: f64,
}

impl Randomness {
    pub fn new(site: usize, coin: bool) -> Self {
        Randomness { site, coin, aux: 0.0 }
    }

    pub fn with_aux(site: usize, coin: bool, aux: f64) -> Self {
        Randomness { site, coin, aux }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<S> {
    pub state: S,
    pub probability: f64,
}

/// Merge duplicate successors and sort them.
pub(crate) fn aggregate<S: Ord>(mut v: Vec<(S, f64)>) -> Vec<Transition<S>> {
    v.sort_by(|x, y| x.0.cmp(&y.0));
    let mut out: Vec<Transition<S>> = Vec::with_capacity(v.len());
    for (s, p) in v {
        match out.last_mut() {
            Some(t) if t.state == s => t.probability += p,
            _ => out.push(Transition { state: s, probability: p }),
        }
    }
    out
}

pub trait Kernel: Send + Sync {
    type State: Clone + Eq + Hash + Ord + Send + Sync + Debug;

    /// Size of the state space, when known without enumerating it.
    fn state_count(&self) -> Option<BigUint>;

    /// Every state, in canonical order.
    fn states(&self) -> Result<Vec<Self::State>>;

    /// All successors of `s`, duplicates merged, probabilities summing to 1.
    fn transitions(&self, s: &Self::State) -> Vec<Transition<Self::State>>;

    /// One random step.
    fn sample(&self, s: &mut Self::State, rng: &mut Stream);
}

/// A chain whose steps are a deterministic function of a [`Randomness`].
pub trait SiteKernel: Kernel {
    /// Number of 64-bit draws consumed by [`SiteKernel::draw`].
    const DRAWS: u64 = 3;

    fn sites(&self) -> usize;

    fn site_from(&self, u: u64) -> usize {
        1 + below(u, self.sites())
    }

    fn draw(&self, rng: &mut Stream) -> Randomness {
        let site = self.site_from(rng.next_u64());
        let coin = rng.next_u64() >> 63 == 1;
        let aux = rng.uniform();
        Randomness { site, coin, aux }
    }

    /// Apply `r` in place. `r.site` must be in range.
    fn apply(&self, s: &mut Self::State, r: &Randomness);

    fn step(&self, s: &Self::State, r: &Randomness) -> Result<Self::State> {
        if r.site == 0 || r.site > self.sites() {
            return Err(Error::SiteOutOfRange { site: r.site, sites: self.sites() });
        }
        let mut t = s.clone();
        self.apply(&mut t, r);
        Ok(t)
    }
}

/// A site kernel whose grand coupling preserves a partial order with a
/// least and a greatest element.
pub trait Monotone: SiteKernel {
    fn bottom(&self) -> Self::State;
    fn top(&self) -> Self::State;
    fn precedes(&self, x: &Self::State, y: &Self::State) -> bool;
    /// Number of differing cells between `x` and `y`.
    fn mismatch(&self, x: &Self::State, y: &Self::State) -> usize;
    /// Number of differing cells among those a step with `r` may change.
    fn local_mismatch(&self, x: &Self::State, y: &Self::State, r: &Randomness) -> usize;
}

fn sort_pair<T: Ord>(v: &mut [T], i: usize, sort: bool) {
    if (v[i] > v[i + 1]) == sort {
        v.swap(i, i + 1);
    }
}

// ---------------------------------------------------------------------------
// Lattice paths
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PathKernel {
    pub a: usize,
    pub b: usize,
}

impl PathKernel {
    pub fn new(a: usize, b: usize) -> Self {
        PathKernel { a, b }
    }

    pub fn n(&self) -> usize {
        self.a + self.b
    }
}

impl Kernel for PathKernel {
    type State = LatticePath;

    fn state_count(&self) -> Option<BigUint> {
        Some(count_paths(self.a, self.b))
    }

    fn states(&self) -> Result<Vec<LatticePath>> {
        Ok(enumerate_paths(self.a, self.b))
    }

    fn transitions(&self, s: &LatticePath) -> Vec<Transition<LatticePath>> {
        site_transitions(self, s)
    }

    fn sample(&self, s: &mut LatticePath, rng: &mut Stream) {
        let r = self.draw(rng);
        self.apply(s, &r)
    }
}

impl SiteKernel for PathKernel {
    fn sites(&self) -> usize {
        self.n().saturating_sub(1)
    }

    #[inline]
    fn apply(&self, s: &mut LatticePath, r: &Randomness) {
        sort_pair(s.steps_mut(), r.site - 1, r.coin)
    }
}

impl Monotone for PathKernel {
    fn bottom(&self) -> LatticePath {
        LatticePath::bottom(self.a, self.b)
    }

    fn top(&self) -> LatticePath {
        LatticePath::top(self.a, self.b)
    }

    fn precedes(&self, x: &LatticePath, y: &LatticePath) -> bool {
        x.dominated_by(y)
    }

    fn mismatch(&self, x: &LatticePath, y: &LatticePath) -> usize {
        x.steps().iter().zip(y.steps()).filter(|(p, q)| p != q).count()
    }

    #[inline]
    fn local_mismatch(&self, x: &LatticePath, y: &LatticePath, r: &Randomness) -> usize {
        let i = r.site - 1;
        let (x, y) = (x.steps(), y.steps());
        (x[i] != y[i]) as usize + (x[i + 1] != y[i + 1]) as usize
    }
}

/// Sort (`coin`) or reverse-sort the letters at `site, site + 1`.
pub fn path_step(path: &LatticePath, r: &Randomness) -> Result<LatticePath> {
    PathKernel::new(path.a(), path.b()).step(path, r)
}

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PermKernel {
    pub n: usize,
}

impl PermKernel {
    pub fn new(n: usize) -> Self {
        PermKernel { n }
    }
}

impl Kernel for PermKernel {
    type State = Permutation;

    fn state_count(&self) -> Option<BigUint> {
        Some((1..=self.n).map(BigUint::from).product())
    }

    fn states(&self) -> Result<Vec<Permutation>> {
        Ok(enumerate_permutations(self.n))
    }

    fn transitions(&self, s: &Permutation) -> Vec<Transition<Permutation>> {
        site_transitions(self, s)
    }

    fn sample(&self, s: &mut Permutation, rng: &mut Stream) {
        let r = self.draw(rng);
        self.apply(s, &r)
    }
}

impl SiteKernel for PermKernel {
    fn sites(&self) -> usize {
        self.n.saturating_sub(1)
    }

    #[inline]
    fn apply(&self, s: &mut Permutation, r: &Randomness) {
        sort_pair(s.values_mut(), r.site - 1, r.coin)
    }
}

impl Monotone for PermKernel {
    fn bottom(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn top(&self) -> Permutation {
        Permutation::reversed(self.n)
    }

    fn precedes(&self, x: &Permutation, y: &Permutation) -> bool {
        x.dominated_by(y)
    }

    fn mismatch(&self, x: &Permutation, y: &Permutation) -> usize {
        x.values().iter().zip(y.values()).filter(|(p, q)| p != q).count()
    }

    #[inline]
    fn local_mismatch(&self, x: &Permutation, y: &Permutation, r: &Randomness) -> usize {
        let i = r.site - 1;
        let (x, y) = (x.values(), y.values());
        (x[i] != y[i]) as usize + (x[i + 1] != y[i + 1]) as usize
    }
}

pub fn perm_step(perm: &Permutation, r: &Randomness) -> Result<Permutation> {
    PermKernel::new(perm.n()).step(perm, r)
}

// ---------------------------------------------------------------------------
// Hexagon routings with tower moves
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct HexKernel {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl HexKernel {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        HexKernel { a, b, c }
    }

    pub fn w(&self) -> usize {
        self.a + self.b
    }

    /// `(path row, column)` of a 1-based site; the row is 0-based and the
    /// column runs over the interior `1..w`.
    pub fn decode_site(&self, site: usize) -> (usize, usize) {
        let inner = self.w() - 1;
        ((site - 1) / inner, (site - 1) % inner + 1)
    }

    pub fn encode_site(&self, row: usize, x: usize) -> usize {
        row * (self.w() - 1) + x
    }

    /// Paths that move together if `row` is pushed at column `x`, as the
    /// range of rows, or `None` if the point is not a local extremum in that
    /// direction.
    pub fn tower(&self, s: &HexRouting, row: usize, x: usize, up: bool) -> Option<(usize, usize)> {
        let w1 = self.w() + 1;
        let d = s.doubled_heights();
        let v = d[row * w1 + x];
        let dir = if up { 1 } else { -1 };
        if d[row * w1 + x - 1] != v + dir || d[row * w1 + x + 1] != v + dir {
            return None;
        }
        let mut k = 0;
        if up {
            while row + k + 1 < self.c && d[(row + k + 1) * w1 + x] == v + 2 * (k as i32 + 1) {
                k += 1;
            }
            Some((row, row + k))
        } else {
            while k < row && d[(row - k - 1) * w1 + x] == v - 2 * (k as i32 + 1) {
                k += 1;
            }
            Some((row - k, row))
        }
    }

    /// Valid configurations of column `x` given its neighbours, as maximal
    /// runs `(first row, length)` of free points that constrain each other.
    fn column_runs(&self, s: &HexRouting, x: usize) -> Vec<(usize, usize)> {
        let w1 = self.w() + 1;
        let d = s.doubled_heights();
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut prev: Option<(usize, i32)> = None;
        for row in 0..self.c {
            let (l, r) = (d[row * w1 + x - 1], d[row * w1 + x + 1]);
            if l != r {
                prev = None;
                continue;
            }
            match (prev, runs.last_mut()) {
                (Some((pr, pv)), Some(run)) if pr + 1 == row && pv + 2 == l => run.1 += 1,
                _ => runs.push((row, 1)),
            }
            prev = Some((row, l));
        }
        runs
    }

    /// Set a run so that its lowest `downs` points sit below their
    /// neighbours and the rest above.
    fn set_run(&self, s: &mut HexRouting, x: usize, run: (usize, usize), downs: usize) {
        let w1 = self.w() + 1;
        let d = s.flat_mut();
        for k in 0..run.1 {
            let row = run.0 + k;
            let v = d[row * w1 + x - 1];
            d[row * w1 + x] = if k < downs { v - 1 } else { v + 1 };
        }
    }
}

impl Kernel for HexKernel {
    type State = HexRouting;

    fn state_count(&self) -> Option<BigUint> {
        Some(count_tilings(self.a, self.b, self.c))
    }

    fn states(&self) -> Result<Vec<HexRouting>> {
        Ok(enumerate_routings(self.a, self.b, self.c))
    }

    fn transitions(&self, s: &HexRouting) -> Vec<Transition<HexRouting>> {
        let p = self.sites();
        let base = 1.0 / (2.0 * p as f64);
        let mut out = Vec::with_capacity(2 * p + 1);
        let mut stay = 0.0;
        let w1 = self.w() + 1;
        for site in 1..=p {
            let (row, x) = self.decode_site(site);
            for up in [true, false] {
                match self.tower(s, row, x, up) {
                    None => stay += base,
                    Some((lo, hi)) => {
                        let k = (hi - lo) as f64;
                        let mut t = s.clone();
                        let d = t.flat_mut();
                        for r in lo..=hi {
                            d[r * w1 + x] += if up { 2 } else { -2 };
                        }
                        out.push((t, base / (k + 1.0)));
                        stay += base * k / (k + 1.0);
                    }
                }
            }
        }
        if stay > 0.0 {
            out.push((s.clone(), stay));
        }
        aggregate(out)
    }

    fn sample(&self, s: &mut HexRouting, rng: &mut Stream) {
        let r = self.draw(rng);
        self.apply(s, &r)
    }
}

impl SiteKernel for HexKernel {
    fn sites(&self) -> usize {
        self.c * (self.w() - 1)
    }

    /// `coin == true` pushes down, `false` pushes up. A tower of `k + 1`
    /// paths moves iff `aux < 1/(k + 1)`.
    fn apply(&self, s: &mut HexRouting, r: &Randomness) {
        let (row, x) = self.decode_site(r.site);
        let up = !r.coin;
        if let Some((lo, hi)) = self.tower(s, row, x, up) {
            if r.aux * ((hi - lo + 1) as f64) < 1.0 {
                let w1 = self.w() + 1;
                let d = s.flat_mut();
                for k in lo..=hi {
                    d[k * w1 + x] += if up { 2 } else { -2 };
                }
            }
        }
    }
}

impl Monotone for HexKernel {
    fn bottom(&self) -> HexRouting {
        hex_extremes(self.a, self.b, self.c).0
    }

    fn top(&self) -> HexRouting {
        hex_extremes(self.a, self.b, self.c).1
    }

    fn precedes(&self, x: &HexRouting, y: &HexRouting) -> bool {
        x.dominated_by(y)
    }

    fn mismatch(&self, x: &HexRouting, y: &HexRouting) -> usize {
        x.doubled_heights().iter().zip(y.doubled_heights()).filter(|(p, q)| p != q).count()
    }

    fn local_mismatch(&self, x: &HexRouting, y: &HexRouting, r: &Randomness) -> usize {
        let (_, col) = self.decode_site(r.site);
        let w1 = self.w() + 1;
        let (x, y) = (x.doubled_heights(), y.doubled_heights());
        (0..self.c).filter(|row| x[row * w1 + col] != y[row * w1 + col]).count()
    }
}

pub fn hex_step(routing: &HexRouting, r: &Randomness) -> Result<HexRouting> {
    HexKernel::new(routing.a(), routing.b(), routing.c()).step(routing, r)
}

// ---------------------------------------------------------------------------
// Linear extensions
// ---------------------------------------------------------------------------

/// Adjacent transpositions of a linear extension, site `i` chosen with
/// probability `freq[i - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KkKernel {
    poset: Poset,
    freq: Vec<f64>,
    cum: Vec<f64>,
}

impl KkKernel {
    pub fn new(poset: Poset, freq: Vec<f64>) -> Result<Self> {
        let n = poset.n();
        if n < 2 {
            return Err(Error::InvalidParameter("a poset needs at least 2 elements".into()));
        }
        if freq.len() != n - 1 {
            return Err(Error::DimensionMismatch { expected: n - 1, got: freq.len() });
        }
        if freq.iter().any(|&f| !(f >= 0.0)) || (freq.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("site frequencies must be nonnegative and sum to 1".into()));
        }
        let mut acc = 0.0;
        let cum = freq
            .iter()
            .map(|f| {
                acc += f;
                acc
            })
            .collect();
        Ok(KkKernel { poset, freq, cum })
    }

    /// Every site equally likely.
    pub fn uniform(poset: Poset) -> Result<Self> {
        let n = poset.n();
        let f = vec![1.0 / (n.max(2) - 1) as f64; n.saturating_sub(1)];
        Self::new(poset, f)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn freq(&self) -> &[f64] {
        &self.freq
    }
}

impl Kernel for KkKernel {
    type State = LinearExtension;

    fn state_count(&self) -> Option<BigUint> {
        None
    }

    fn states(&self) -> Result<Vec<LinearExtension>> {
        enumerate_linear_extensions(&self.poset, DEFAULT_EXTENSION_GUARD)
    }

    fn transitions(&self, s: &LinearExtension) -> Vec<Transition<LinearExtension>> {
        let mut out = Vec::with_capacity(2 * self.freq.len());
        for (i, &f) in self.freq.iter().enumerate() {
            if f == 0.0 {
                continue;
            }
            for coin in [true, false] {
                let mut t = s.clone();
                self.apply(&mut t, &Randomness::new(i + 1, coin));
                out.push((t, f / 2.0));
            }
        }
        aggregate(out)
    }

    fn sample(&self, s: &mut LinearExtension, rng: &mut Stream) {
        let r = self.draw(rng);
        self.apply(s, &r)
    }
}

impl SiteKernel for KkKernel {
    fn sites(&self) -> usize {
        self.freq.len()
    }

    fn site_from(&self, u: u64) -> usize {
        let x = unit(u);
        let i = self.cum.partition_point(|&c| c <= x);
        // Guard against the cumulative sum ending a hair below 1.
        let i = i.min(self.freq.len() - 1);
        // Skip zero-frequency sites the search may land on at a boundary.
        let i = (i..self.freq.len()).find(|&j| self.freq[j] > 0.0).unwrap_or(i);
        i + 1
    }

    /// Swap the items at `site, site + 1` iff `coin` and they are
    /// incomparable.
    fn apply(&self, s: &mut LinearExtension, r: &Randomness) {
        let v = s.perm_mut().values_mut();
        let i = r.site - 1;
        if r.coin && !self.poset.comparable(v[i], v[i + 1]) {
            v.swap(i, i + 1);
        }
    }
}

pub fn kk_step(ext: &LinearExtension, poset: &Poset, r: &Randomness) -> Result<LinearExtension> {
    let n = poset.n();
    if r.site == 0 || r.site >= n {
        return Err(Error::SiteOutOfRange { site: r.site, sites: n.saturating_sub(1) });
    }
    let mut t = ext.clone();
    let v = t.perm_mut().values_mut();
    let i = r.site - 1;
    if r.coin && !poset.comparable(v[i], v[i + 1]) {
        v.swap(i, i + 1);
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Interchange processes
// ---------------------------------------------------------------------------

/// An undirected graph with positive edge weights on vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, weights: Vec<f64>) -> Result<Self> {
        if edges.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: edges.len(), got: weights.len() });
        }
        if edges.is_empty() {
            return Err(Error::InvalidParameter("graph has no edges".into()));
        }
        for &(x, y) in &edges {
            if x >= n || y >= n || x == y {
                return Err(Error::InvalidParameter(format!("bad edge ({x}, {y})")));
            }
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidParameter("edge weights must be positive".into()));
        }
        Ok(Graph { n, edges, weights })
    }

    pub fn unweighted(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let m = edges.len();
        Self::new(n, edges, vec![1.0; m])
    }

    pub fn path(n: usize) -> Self {
        Self::unweighted(n, (0..n - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    /// Vertices are bit strings of length `d`.
    pub fn hypercube(d: usize) -> Self {
        let n = 1usize << d;
        let edges = (0..n)
            .flat_map(|v| (0..d).map(move |k| (v, v ^ (1 << k))))
            .filter(|&(x, y)| x < y)
            .collect();
        Self::unweighted(n, edges).unwrap()
    }

    /// Vertex `(i, j)` with `i < l`, `j < m` is `i * m + j`.
    pub fn grid(l: usize, m: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..l {
            for j in 0..m {
                if i + 1 < l {
                    edges.push((i * m + j, (i + 1) * m + j));
                }
                if j + 1 < m {
                    edges.push((i * m + j, i * m + j + 1));
                }
            }
        }
        Self::unweighted(l * m, edges).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Q_e = alpha * weight_e / total weight`.
    pub fn edge_probabilities(&self, alpha: f64) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| alpha * w / total).collect()
    }

    /// One-particle transition matrix, row-major.
    pub fn walk_matrix(&self, alpha: f64) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for (&(x, y), q) in self.edges.iter().zip(self.edge_probabilities(alpha)) {
            m[x * n + y] += q;
            m[y * n + x] += q;
            m[x * n + x] -= q;
            m[y * n + y] -= q;
        }
        for x in 0..n {
            m[x * n + x] += 1.0;
        }
        m
    }
}

/// Particles on the vertices of a graph; `config[v]` is the type of the
/// particle at `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterchangeKernel {
    graph: Graph,
    alpha: f64,
    particles: Vec<usize>,
    cum: Vec<f64>,
}

impl InterchangeKernel {
    /// `particles` is any configuration; its multiset fixes the state space.
    pub fn new(graph: Graph, alpha: f64, particles: Vec<usize>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1]")));
        }
        if particles.len() != graph.n() {
            return Err(Error::DimensionMismatch { expected: graph.n(), got: particles.len() });
        }
        let total: f64 = graph.weights().iter().sum();
        let mut acc = 0.0;
        let cum = graph
            .weights()
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        let mut particles = particles;
        particles.sort_unstable();
        Ok(InterchangeKernel { graph, alpha, particles, cum })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Exchange the particles at the ends of `edge` (1-based) if `fire`.
    pub fn interchange_step(&self, config: &[usize], edge: usize, fire: bool) -> Result<Vec<usize>> {
        if edge == 0 || edge > self.graph.edges().len() {
            return Err(Error::SiteOutOfRange { site: edge, sites: self.graph.edges().len() });
        }
        let mut c = config.to_vec();
        if fire {
            let (x, y) = self.graph.edges()[edge - 1];
            c.swap(x, y);
        }
        Ok(c)
    }
}

impl Kernel for InterchangeKernel {
    type State = Vec<usize>;

    fn state_count(&self) -> Option<BigUint> {
        let mut count: BigUint = (1..=self.particles.len()).map(BigUint::from).product();
        let mut i = 0;
        while i < self.particles.len() {
            let j = self.particles[i..].iter().take_while(|&&p| p == self.particles[i]).count();
            count /= (1..=j).map(BigUint::from).product::<BigUint>();
            i += j;
        }
        Some(count)
    }

    fn states(&self) -> Result<Vec<Vec<usize>>> {
        let mut cur = self.particles.clone();
        let mut out = vec![cur.clone()];
        let n = cur.len();
        loop {
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return Ok(out);
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(cur.clone());
        }
    }

    fn transitions(&self, s: &Vec<usize>) -> Vec<Transition<Vec<usize>>> {
        let q = self.graph.edge_probabilities(self.alpha);
        let mut out = Vec::with_capacity(q.len() + 1);
        let mut stay = 1.0 - self.alpha;
        for (&(x, y), p) in self.graph.edges().iter().zip(q) {
            if s[x] == s[y] {
                stay += p;
            } else {
                let mut t = s.clone();
                t.swap(x, y);
                out.push((t, p));
            }
        }
        if stay > 0.0 {
            out.push((s.clone(), stay));
        }
        aggregate(out)
    }

    fn sample(&self, s: &mut Vec<usize>, rng: &mut Stream) {
        let r = self.draw(rng);
        self.apply(s, &r)
    }
}

impl SiteKernel for InterchangeKernel {
    fn sites(&self) -> usize {
        self.graph.edges().len()
    }

    fn site_from(&self, u: u64) -> usize {
        let x = unit(u);
        self.cum.partition_point(|&c| c <= x).min(self.cum.len() - 1) + 1
    }

    /// Fires iff `aux < alpha`; the coin is not used.
    fn apply(&self, s: &mut Vec<usize>, r: &Randomness) {
        if r.aux < self.alpha {
            let (x, y) = self.graph.edges()[r.site - 1];
            s.swap(x, y);
        }
    }
}

// ---------------------------------------------------------------------------
// Generic successor enumeration and sweeps
// ---------------------------------------------------------------------------

/// Successors of a uniform-site, fair-coin kernel.
fn site_transitions<K: SiteKernel>(k: &K, s: &K::State) -> Vec<Transition<K::State>> {
    let p = k.sites();
    let pr = 1.0 / (2.0 * p as f64);
    let mut out = Vec::with_capacity(2 * p);
    for site in 1..=p {
        for coin in [true, false] {
            let mut t = s.clone();
            k.apply(&mut t, &Randomness::new(site, coin));
            out.push((t, pr));
        }
    }
    aggregate(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// Sites 1, 3, 5, ...: the pairs (1,2), (3,4), ...
    Even,
    /// Sites 2, 4, 6, ...
    Odd,
}

impl Parity {
    pub fn sites(self, sites: usize) -> impl Iterator<Item = usize> {
        let start = match self {
            Parity::Even => 1,
            Parity::Odd => 2,
        };
        (start..=sites).step_by(2)
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Simultaneous update of every site of one parity.
pub trait Sweep: Kernel {
    fn sweep(&self, s: &mut Self::State, parity: Parity, rng: &mut Stream);
    fn sweep_transitions(&self, s: &Self::State, parity: Parity) -> Vec<Transition<Self::State>>;
}

fn pair_sweep<K: SiteKernel>(k: &K, s: &mut K::State, parity: Parity, rng: &mut Stream) {
    for site in parity.sites(k.sites()) {
        let coin = rng.coin();
        k.apply(s, &Randomness::new(site, coin));
    }
}

fn pair_sweep_transitions<K: SiteKernel>(k: &K, s: &K::State, parity: Parity) -> Vec<Transition<K::State>> {
    let mut cur = vec![Transition { state: s.clone(), probability: 1.0 }];
    for site in parity.sites(k.sites()) {
        let mut next = Vec::with_capacity(2 * cur.len());
        for t in &cur {
            for coin in [true, false] {
                let mut u = t.state.clone();
                k.apply(&mut u, &Randomness::new(site, coin));
                next.push((u, t.probability / 2.0));
            }
        }
        cur = aggregate(next);
    }
    cur
}

macro_rules! pair_sweeps {
    ($($k:ty),*) => {$(
        impl Sweep for $k {
            fn sweep(&self, s: &mut Self::State, parity: Parity, rng: &mut Stream) {
                pair_sweep(self, s, parity, rng)
            }

            fn sweep_transitions(&self, s: &Self::State, parity: Parity) -> Vec<Transition<Self::State>> {
                pair_sweep_transitions(self, s, parity)
            }
        }
    )*};
}

pair_sweeps!(PathKernel, PermKernel, KkKernel);

/// For routings a sweep resamples every interior column of the given
/// parity from its exact conditional law given the neighbouring columns.
impl Sweep for HexKernel {
    fn sweep(&self, s: &mut HexRouting, parity: Parity, rng: &mut Stream) {
        for x in parity.sites(self.w() - 1) {
            for run in self.column_runs(s, x) {
                let ups = below(rng.next_u64(), run.1 + 1);
                self.set_run(s, x, run, run.1 - ups);
            }
        }
    }

    fn sweep_transitions(&self, s: &HexRouting, parity: Parity) -> Vec<Transition<HexRouting>> {
        let mut cur = vec![Transition { state: s.clone(), probability: 1.0 }];
        for x in parity.sites(self.w() - 1) {
            // Runs depend only on the neighbouring columns, which this sweep
            // leaves alone.
            for run in self.column_runs(s, x) {
                let pr = 1.0 / (run.1 + 1) as f64;
                let mut next = Vec::with_capacity(cur.len() * (run.1 + 1));
                for t in &cur {
                    for downs in 0..=run.1 {
                        let mut u = t.state.clone();
                        self.set_run(&mut u, x, run, downs);
                        next.push((u, t.probability * pr));
                    }
                }
                cur = aggregate(next);
            }
        }
        cur
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepSchedule {
    /// Each step sweeps a uniformly random parity.
    RandomParity,
    /// Each step is an even sweep followed by an odd sweep.
    Alternating,
}

/// A sweep dynamics viewed as a time-homogeneous chain.
#[derive(Debug, Clone)]
pub struct SweepKernel<K> {
    pub inner: K,
    pub schedule: SweepSchedule,
}

impl<K: Sweep> Kernel for SweepKernel<K> {
    type State = K::State;

    fn state_count(&self) -> Option<BigUint> {
        self.inner.state_count()
    }

    fn states(&self) -> Result<Vec<K::State>> {
        self.inner.states()
    }

    fn transitions(&self, s: &K::State) -> Vec<Transition<K::State>> {
        match self.schedule {
            SweepSchedule::RandomParity => {
                let mut v: Vec<(K::State, f64)> = Vec::new();
                for parity in [Parity::Even, Parity::Odd] {
                    for t in self.inner.sweep_transitions(s, parity) {
                        v.push((t.state, t.probability / 2.0));
                    }
                }
                aggregate(v)
            }
            SweepSchedule::Alternating => {
                let mut v: Vec<(K::State, f64)> = Vec::new();
                for t in self.inner.sweep_transitions(s, Parity::Even) {
                    for u in self.inner.sweep_transitions(&t.state, Parity::Odd) {
                        v.push((u.state, t.probability * u.probability));
                    }
                }
                aggregate(v)
            }
        }
    }

    fn sample(&self, s: &mut K::State, rng: &mut Stream) {
        match self.schedule {
            SweepSchedule::RandomParity => {
                let parity = if rng.coin() { Parity::Odd } else { Parity::Even };
                self.inner.sweep(s, parity, rng)
            }
            SweepSchedule::Alternating => {
                self.inner.sweep(s, Parity::Even, rng);
                self.inner.sweep(s, Parity::Odd, rng);
            }
        }
    }
}

/// Sweep a permutation or path given explicit coins, one per site of the
/// parity, in increasing site order.
pub fn sweep_with_coins<K: SiteKernel>(k: &K, s: &K::State, parity: Parity, coins: &[bool]) -> K::State {
    let mut t = s.clone();
    for (site, &coin) in parity.sites(k.sites()).zip(coins) {
        k.apply(&mut t, &Randomness::new(site, coin));
    }
    t
}

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Path { a: usize, b: usize },
    Permutation { n: usize },
    Hexagon { a: usize, b: usize, c: usize },
    KarzanovKhachiyan { poset: Poset, freq: Vec<f64> },
    Interchange { graph: Graph, particles: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    SingleSite,
    Sweep(SweepSchedule),
}

/// Family, parameters and update rule of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub family: Family,
    pub mode: UpdateMode,
    pub alpha: f64,
}

impl KernelSpec {
    pub fn new(family: Family) -> Self {
        KernelSpec { family, mode: UpdateMode::SingleSite, alpha: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {} outside (0, 1]", self.alpha)));
        }
        if self.alpha != 1.0 && !matches!(self.family, Family::Interchange { .. }) {
            return Err(Error::InvalidParameter("alpha only applies to interchange processes".into()));
        }
        match &self.family {
            Family::Path { a, b } if a + b < 2 => Err(Error::InvalidParameter("a path chain needs a + b >= 2".into())),
            Family::Permutation { n } if *n < 2 => Err(Error::InvalidParameter("a shuffle needs n >= 2".into())),
            Family::Hexagon { a, b, c } if *a == 0 || *b == 0 || *c == 0 => {
                Err(Error::InvalidParameter("hexagon sides must be positive".into()))
            }
            Family::KarzanovKhachiyan { poset, freq } => KkKernel::new(poset.clone(), freq.clone()).map(|_| ()),
            Family::Interchange { graph, particles } => {
                if self.mode != UpdateMode::SingleSite {
                    return Err(Error::InvalidParameter("interchange processes have no sweep mode".into()));
                }
                InterchangeKernel::new(graph.clone(), self.alpha, particles.clone()).map(|_| ())
            }
            _ => Ok(()),
        }
    }
}
