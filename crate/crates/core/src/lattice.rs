//! State types for the five chain families, with enumeration, counting and
//! text encodings.
//!
//! Heights are kept as exact integers: a lattice path of length `n` stores
//! `n * h(x)`, a routing stores `2 * h_i(x)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest poset that [`enumerate_linear_extensions`] accepts by default.
pub const DEFAULT_EXTENSION_GUARD: usize = 10;

// ---------------------------------------------------------------------------
// Lattice paths
// ---------------------------------------------------------------------------

/// A string of `a` down-steps (`0`) and `b` up-steps (`1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePath {
    a: usize,
    b: usize,
    steps: Vec<u8>,
}

impl LatticePath {
    pub fn new(steps: Vec<u8>) -> Result<Self> {
        if let Some(&s) = steps.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidState(format!("step value {s} is not 0 or 1")));
        }
        let b = steps.iter().filter(|&&s| s == 1).count();
        Ok(LatticePath { a: steps.len() - b, b, steps })
    }

    pub fn with_counts(a: usize, b: usize, steps: Vec<u8>) -> Result<Self> {
        let p = Self::new(steps)?;
        if p.a != a || p.b != b {
            return Err(Error::InvalidState(format!(
                "expected {a} down and {b} up steps, found {} and {}",
                p.a, p.b
            )));
        }
        Ok(p)
    }

    /// `0^a 1^b`, the lowest path.
    pub fn bottom(a: usize, b: usize) -> Self {
        let mut steps = vec![0; a];
        steps.resize(a + b, 1);
        LatticePath { a, b, steps }
    }

    /// `1^b 0^a`, the highest path.
    pub fn top(a: usize, b: usize) -> Self {
        let mut steps = vec![1; b];
        steps.resize(a + b, 0);
        LatticePath { a, b, steps }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[u8] {
        &self.steps
    }

    pub(crate) fn steps_mut(&mut self) -> &mut [u8] {
        &mut self.steps
    }

    pub fn heights(&self) -> HeightFunction {
        path_heights(self)
    }

    /// Pointwise comparison of height profiles.
    pub fn dominated_by(&self, other: &LatticePath) -> bool {
        if self.len() != other.len() || self.b != other.b {
            return false;
        }
        let (mut x, mut y) = (0usize, 0usize);
        for (s, t) in self.steps.iter().zip(&other.steps) {
            x += *s as usize;
            y += *t as usize;
            if x > y {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for LatticePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("unexpected character {c:?} in path"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        LatticePath::new(steps)
    }
}

/// Height profile of a path, scaled by `n` so that every entry is an integer.
///
/// `scaled[x]` is `n * h` at centered coordinate `x - n/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HeightFunction {
    a: usize,
    b: usize,
    scaled: Vec<i64>,
}

impl HeightFunction {
    pub fn n(&self) -> usize {
        self.a + self.b
    }

    pub fn scaled(&self) -> &[i64] {
        &self.scaled
    }

    /// Unscaled height at array index `x`.
    pub fn value(&self, x: usize) -> f64 {
        self.scaled[x] as f64 / self.n() as f64
    }

    /// Centered coordinate of array index `x`.
    pub fn coordinate(&self, x: usize) -> f64 {
        x as f64 - self.n() as f64 / 2.0
    }

    /// Recover the path. Fails if some increment is neither `+a` nor `-b`.
    pub fn to_path(&self) -> Result<LatticePath> {
        let (a, b) = (self.a as i64, self.b as i64);
        let steps = self
            .scaled
            .windows(2)
            .map(|w| match w[1] - w[0] {
                d if d == a && b > 0 => Ok(1),
                d if d == -b && a > 0 => Ok(0),
                d => Err(Error::InvalidState(format!("height increment {d}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        LatticePath::with_counts(self.a, self.b, steps)
    }
}

pub fn path_heights(path: &LatticePath) -> HeightFunction {
    let (a, b) = (path.a as i64, path.b as i64);
    let mut scaled = Vec::with_capacity(path.len() + 1);
    let mut h = 0i64;
    scaled.push(h);
    for &s in &path.steps {
        h += if s == 1 { a } else { -b };
        scaled.push(h);
    }
    HeightFunction { a: path.a, b: path.b, scaled }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of paths with `a` down-steps and `b` up-steps.
pub fn count_paths(a: usize, b: usize) -> BigUint {
    binomial(a + b, b)
}

/// All paths with the given step counts, in lexicographic order of their
/// bit strings.
pub fn enumerate_paths(a: usize, b: usize) -> Vec<LatticePath> {
    fn rec(a: usize, b: usize, prefix: &mut Vec<u8>, out: &mut Vec<LatticePath>, a0: usize, b0: usize) {
        if a == 0 && b == 0 {
            out.push(LatticePath { a: a0, b: b0, steps: prefix.clone() });
            return;
        }
        if a > 0 {
            prefix.push(0);
            rec(a - 1, b, prefix, out, a0, b0);
            prefix.pop();
        }
        if b > 0 {
            prefix.push(1);
            rec(a, b - 1, prefix, out, a0, b0);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(a, b, &mut Vec::with_capacity(a + b), &mut out, a, b);
    out
}

// ---------------------------------------------------------------------------
// Permutations and threshold families
// ---------------------------------------------------------------------------

/// A deck of `n` cards; `values()[p]` is the card at position `p + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidState(format!("{values:?} is not a permutation of 1..={n}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { values })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { values: (1..=n).collect() }
    }

    pub fn reversed(n: usize) -> Self {
        Permutation { values: (1..=n).rev().collect() }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [usize] {
        &mut self.values
    }

    /// `positions()[card - 1]` is the 1-based position of `card`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.n()];
        for (p, &v) in self.values.iter().enumerate() {
            pos[v - 1] = p + 1;
        }
        pos
    }

    /// Order induced by the threshold functions: every row of `self` lies
    /// below the corresponding row of `other`.
    pub fn dominated_by(&self, other: &Permutation) -> bool {
        let n = self.n();
        if other.n() != n {
            return false;
        }
        // Row i compares prefix counts of cards > n - i.
        for i in 1..n {
            let (mut x, mut y) = (0usize, 0usize);
            for p in 0..n {
                x += (self.values[p] > n - i) as usize;
                y += (other.values[p] > n - i) as usize;
                if x > y {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.values {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(values)
    }
}

/// All permutations of `1..=n` in lexicographic order.
pub fn enumerate_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<usize> = (1..=n).collect();
    let mut out = vec![Permutation { values: cur.clone() }];
    // Standard next-permutation.
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Permutation { values: cur.clone() });
    }
}

/// The `n + 1` threshold rows of a permutation. Row `i` marks the positions
/// of the `i` largest cards.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThresholdFamily {
    n: usize,
    rows: Vec<Vec<u8>>,
}

impl ThresholdFamily {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let n = rows.len().checked_sub(1).ok_or_else(|| Error::InvalidState("no rows".into()))?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidState(format!("row {i} has length {}", row.len())));
            }
            if row.iter().any(|&x| x > 1) {
                return Err(Error::InvalidState(format!("row {i} is not binary")));
            }
            let w = row.iter().filter(|&&x| x == 1).count();
            if w != i {
                return Err(Error::InvalidState(format!("row {i} has weight {w}")));
            }
            if i > 0 && rows[i - 1].iter().zip(row).any(|(lo, hi)| lo > hi) {
                return Err(Error::InvalidState(format!("rows {} and {i} are not nested", i - 1)));
            }
        }
        Ok(ThresholdFamily { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Row `i` viewed as a lattice path with `n - i` down-steps.
    pub fn row_path(&self, i: usize) -> LatticePath {
        LatticePath { a: self.n - i, b: i, steps: self.rows[i].clone() }
    }
}

pub fn threshold_family(perm: &Permutation) -> ThresholdFamily {
    let n = perm.n();
    let rows = (0..=n)
        .map(|i| perm.values.iter().map(|&v| (v > n - i) as u8).collect())
        .collect();
    ThresholdFamily { n, rows }
}

/// Inverse of [`threshold_family`]: the card at each position is the number
/// of rows marking it.
pub fn reconstruct_permutation(tf: &ThresholdFamily) -> Result<Permutation> {
    let tf = ThresholdFamily::new(tf.rows.clone())?;
    let mut values = vec![0usize; tf.n];
    for row in &tf.rows {
        for (v, &bit) in values.iter_mut().zip(row) {
            *v += bit as usize;
        }
    }
    Permutation::new(values)
}

// ---------------------------------------------------------------------------
// Hexagon routings
// ---------------------------------------------------------------------------

/// `c` nonintersecting paths across a hexagon with sides `a, b, c`.
///
/// Heights are doubled. Path `i` (1-based) starts at `2i` and ends at
/// `2i + b - a`; the array is stored row-major, `c` rows of `w + 1` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HexRouting {
    a: usize,
    b: usize,
    c: usize,
    d: Vec<i32>,
}

impl HexRouting {
    pub fn new(a: usize, b: usize, c: usize, rows: Vec<Vec<i32>>) -> Result<Self> {
        if rows.len() != c {
            return Err(Error::InvalidState(format!("expected {c} paths, got {}", rows.len())));
        }
        let d: Vec<i32> = rows.into_iter().flatten().collect();
        let r = HexRouting { a, b, c, d };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.w();
        if self.d.len() != self.c * (w + 1) {
            return Err(Error::InvalidState(format!("expected {} heights", self.c * (w + 1))));
        }
        for i in 0..self.c {
            let row = self.row(i);
            let start = 2 * (i as i32 + 1);
            if row[0] != start || row[w] != start + self.b as i32 - self.a as i32 {
                return Err(Error::InvalidState(format!("path {} has wrong endpoints", i + 1)));
            }
            if row.windows(2).any(|p| (p[1] - p[0]).abs() != 1) {
                return Err(Error::InvalidState(format!("path {} takes a non-unit step", i + 1)));
            }
            if i > 0 {
                let below = self.row(i - 1);
                if row.iter().zip(below).any(|(hi, lo)| *hi < lo + 2) {
                    return Err(Error::InvalidState(format!("paths {} and {} touch", i, i + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn w(&self) -> usize {
        self.a + self.b
    }

    /// Doubled heights of path `i` (0-based row).
    pub fn row(&self, i: usize) -> &[i32] {
        let w1 = self.w() + 1;
        &self.d[i * w1..(i + 1) * w1]
    }

    pub fn doubled_heights(&self) -> &[i32] {
        &self.d
    }

    pub(crate) fn flat_mut(&mut self) -> &mut [i32] {
        &mut self.d
    }

    pub fn rows(&self) -> Vec<Vec<i32>> {
        (0..self.c).map(|i| self.row(i).to_vec()).collect()
    }

    /// Coordinatewise comparison of doubled heights.
    pub fn dominated_by(&self, other: &HexRouting) -> bool {
        self.d.len() == other.d.len() && self.d.iter().zip(&other.d).all(|(x, y)| x <= y)
    }

    /// Total height `S` of each column, in undoubled units; index `x` runs
    /// over `0..=w`, i.e. column `x - a` in the `{-a, ..., b}` labelling.
    pub fn column_sums(&self) -> Vec<f64> {
        let w1 = self.w() + 1;
        (0..w1)
            .map(|x| (0..self.c).map(|i| self.d[i * w1 + x] as f64).sum::<f64>() / 2.0)
            .collect()
    }

    /// The path steps of row `i`, 1 = up.
    pub fn row_path(&self, i: usize) -> LatticePath {
        let steps = self.row(i).windows(2).map(|p| (p[1] > p[0]) as u8).collect();
        LatticePath { a: self.a, b: self.b, steps }
    }

    /// Lozenges of the tiling encoded by this routing.
    ///
    /// Vertices are in lattice coordinates `(x, y)`: `x` is the column and
    /// `y` the undoubled height. Map `x` to `x * sqrt(3)/2` for equilateral
    /// rhombi.
    pub fn lozenges(&self) -> Vec<Lozenge> {
        let (c, w) = (self.c as f64, self.w());
        let mut out = Vec::with_capacity(self.a * self.b + self.b * self.c + self.c * self.a);
        for i in 0..self.c {
            let row = self.row(i);
            for x in 0..w {
                let (y0, y1) = (row[x] as f64 / 2.0, row[x + 1] as f64 / 2.0);
                let (xf, xg) = (x as f64, x as f64 + 1.0);
                let kind = if y1 > y0 { LozengeKind::Up } else { LozengeKind::Down };
                out.push(Lozenge {
                    kind,
                    vertices: [(xf, y0 - 0.5), (xf, y0 + 0.5), (xg, y1 + 0.5), (xg, y1 - 0.5)],
                });
            }
        }
        // Flat lozenges fill what the path edges leave of each internal column.
        for x in 1..w {
            let xf = x as f64;
            let bottom = 0.5 - (x.min(self.a) as f64) * 0.5 + (x.saturating_sub(self.a) as f64) * 0.5;
            let top = c + 0.5 + (x.min(self.b) as f64) * 0.5 - (x.saturating_sub(self.b) as f64) * 0.5;
            let mut edges: Vec<f64> = (0..self.c).map(|i| self.row(i)[x] as f64 / 2.0).collect();
            edges.sort_by(|p, q| p.partial_cmp(q).unwrap());
            let mut y = bottom;
            let mut k = 0;
            while y + 0.5 < top {
                if k < edges.len() && (edges[k] - 0.5 - y).abs() < 1e-9 {
                    y += 1.0;
                    k += 1;
                    continue;
                }
                let mid = y + 0.5;
                out.push(Lozenge {
                    kind: LozengeKind::Flat,
                    vertices: [(xf - 1.0, mid), (xf, mid + 0.5), (xf + 1.0, mid), (xf, mid - 0.5)],
                });
                y += 1.0;
            }
        }
        out
    }
}

impl fmt::Display for HexRouting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.c {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl HexRouting {
    /// Parse `c` lines of doubled heights. Side lengths are inferred from the
    /// first row.
    pub fn parse(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<i32>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                    .collect::<Result<Vec<i32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let first = rows.first().ok_or_else(|| Error::Parse("empty routing".into()))?;
        let w = first.len().checked_sub(1).ok_or_else(|| Error::Parse("empty row".into()))?;
        let ups = first.windows(2).filter(|p| p[1] > p[0]).count();
        HexRouting::new(w - ups, ups, rows.len(), rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LozengeKind {
    /// Crossed by an up-step of a path.
    Up,
    /// Crossed by a down-step of a path.
    Down,
    /// Not crossed by any path.
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lozenge {
    pub kind: LozengeKind,
    pub vertices: [(f64, f64); 4],
}

/// Lowest and highest routings: every path goes all the way down first, or
/// all the way up first.
pub fn hex_extremes(a: usize, b: usize, c: usize) -> (HexRouting, HexRouting) {
    let build = |p: &LatticePath| {
        let mut d = Vec::with_capacity(c * (a + b + 1));
        for i in 1..=c as i32 {
            let mut h = 2 * i;
            d.push(h);
            for &s in p.steps() {
                h += if s == 1 { 1 } else { -1 };
                d.push(h);
            }
        }
        HexRouting { a, b, c, d }
    };
    (build(&LatticePath::bottom(a, b)), build(&LatticePath::top(a, b)))
}

/// Number of single-site moves separating two ordered routings.
pub fn local_moves_between(lo: &HexRouting, hi: &HexRouting) -> u64 {
    lo.d.iter().zip(&hi.d).map(|(l, h)| ((h - l) / 2) as u64).sum()
}

/// Number of lozenge tilings of the `a, b, c` hexagon, from the
/// boxed-plane-partition product.
pub fn count_tilings(a: usize, b: usize, c: usize) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 1..=a {
        for j in 1..=b {
            num *= i + j + c - 1;
            den *= i + j - 1;
        }
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// All routings in lexicographic order of their doubled-height arrays.
pub fn enumerate_routings(a: usize, b: usize, c: usize) -> Vec<HexRouting> {
    let base: Vec<Vec<i32>> = enumerate_paths(a, b)
        .iter()
        .map(|p| {
            let mut h = 0;
            let mut v = vec![0];
            for &s in p.steps() {
                h += if s == 1 { 1 } else { -1 };
                v.push(h);
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    let mut acc: Vec<i32> = Vec::with_capacity(c * (a + b + 1));
    fn rec(i: usize, c: usize, base: &[Vec<i32>], acc: &mut Vec<i32>, out: &mut Vec<HexRouting>, a: usize, b: usize) {
        if i == c {
            out.push(HexRouting { a, b, c, d: acc.clone() });
            return;
        }
        let w1 = a + b + 1;
        let off = 2 * (i as i32 + 1);
        for p in base {
            if i > 0 {
                let below = &acc[(i - 1) * w1..i * w1];
                if p.iter().zip(below).any(|(h, lo)| h + off < lo + 2) {
                    continue;
                }
            }
            acc.extend(p.iter().map(|h| h + off));
            rec(i + 1, c, base, acc, out, a, b);
            acc.truncate(i * w1);
        }
    }
    rec(0, c, &base, &mut acc, &mut out, a, b);
    out
}

// ---------------------------------------------------------------------------
// Posets and linear extensions
// ---------------------------------------------------------------------------

/// A partial order on elements `1..=n`, stored as its reflexive transitive
/// closure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    leq: Vec<bool>,
}

impl Poset {
    /// Build from strict relations `u < v` on 1-based labels.
    pub fn from_relations(n: usize, rel: &[(usize, usize)]) -> Result<Self> {
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(u, v) in rel {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::InvalidParameter(format!("relation {u} < {v} outside 1..={n}")));
            }
            leq[(u - 1) * n + (v - 1)] = true;
        }
        // Floyd-Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::InvalidParameter(format!("relations form a cycle through {} and {}", i + 1, j + 1)));
                }
            }
        }
        Ok(Poset { n, leq })
    }

    pub fn antichain(n: usize) -> Self {
        Poset::from_relations(n, &[]).unwrap()
    }

    pub fn chain(n: usize) -> Self {
        let rel: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Poset::from_relations(n, &rel).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `u <= v` for 1-based labels.
    pub fn leq(&self, u: usize, v: usize) -> bool {
        self.leq[(u - 1) * self.n + (v - 1)]
    }

    pub fn comparable(&self, u: usize, v: usize) -> bool {
        self.leq(u, v) || self.leq(v, u)
    }

    /// Strict cover relations `u < v`, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for u in 1..=n {
            for v in 1..=n {
                if u != v && self.leq(u, v) && !(1..=n).any(|z| z != u && z != v && self.leq(u, z) && self.leq(z, v)) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_extension(&self, perm: &Permutation) -> bool {
        if perm.n() != self.n {
            return false;
        }
        let v = perm.values();
        (0..self.n).all(|i| (i + 1..self.n).all(|j| !(v[j] != v[i] && self.leq(v[j], v[i]))))
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (u, v) in self.covers() {
            writeln!(f, "{u} < {v}")?;
        }
        Ok(())
    }
}

impl FromStr for Poset {
    type Err = Error;

    /// Lines of `u < v`; an optional `n N` line fixes the element count,
    /// otherwise it is the largest label seen. `#` starts a comment.
    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut rel = Vec::new();
        for line in s.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('n') {
                let v = rest.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{line:?}: {e}")))?;
                n = Some(v);
                continue;
            }
            let (u, v) = line
                .split_once('<')
                .ok_or_else(|| Error::Parse(format!("expected `u < v`, got {line:?}")))?;
            let u = u.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{line:?}: {e}")))?;
            let v = v.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{line:?}: {e}")))?;
            rel.push((u, v));
        }
        let n = n.unwrap_or_else(|| rel.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0));
        Poset::from_relations(n, &rel)
    }
}

/// An ordering of the poset's elements that respects the order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearExtension {
    perm: Permutation,
}

impl LinearExtension {
    pub fn new(poset: &Poset, perm: Permutation) -> Result<Self> {
        if !poset.is_extension(&perm) {
            return Err(Error::InvalidState(format!("{perm} violates the partial order")));
        }
        Ok(LinearExtension { perm })
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub(crate) fn perm_mut(&mut self) -> &mut Permutation {
        &mut self.perm
    }
}

impl fmt::Display for LinearExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.perm.fmt(f)
    }
}

/// Every linear extension, in lexicographic order. Fails above `guard`
/// elements.
pub fn enumerate_linear_extensions(poset: &Poset, guard: usize) -> Result<Vec<LinearExtension>> {
    let n = poset.n();
    if n > guard {
        return Err(Error::TooLarge { size: format!("{n} elements"), cap: guard });
    }
    fn rec(poset: &Poset, used: &mut [bool], prefix: &mut Vec<usize>, out: &mut Vec<LinearExtension>) {
        let n = poset.n();
        if prefix.len() == n {
            out.push(LinearExtension { perm: Permutation { values: prefix.clone() } });
            return;
        }
        for v in 1..=n {
            if used[v - 1] {
                continue;
            }
            // v is available once all its predecessors are placed.
            if (1..=n).any(|u| u != v && !used[u - 1] && poset.leq(u, v)) {
                continue;
            }
            used[v - 1] = true;
            prefix.push(v);
            rec(poset, used, prefix, out);
            prefix.pop();
            used[v - 1] = false;
        }
    }
    let mut out = Vec::new();
    rec(poset, &mut vec![false; n], &mut Vec::with_capacity(n), &mut out);
    Ok(out)
}
