//! Affine permutations and the combinatorial structures equivalent to the
//! bounded ones: juggling-state sequences, cyclic rank matrices, decorated
//! permutations, siteswaps.
//!
//! An affine permutation is a bijection `f: Z -> Z` with `f(i+n) = f(i) + n`,
//! stored through its window `[f(1), ..., f(n)]`.  It is *bounded* when
//! `i <= f(i) <= i + n`; the bounded ones with ball number
//! `k = (1/n) sum (f(i) - i)` form the graded poset `Bound(k, n)` under
//! affine Bruhat order, which this module compares through rank-matrix
//! dominance.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perms::{KSubset, Permutation};

/// An affine permutation, stored by its window `[f(1), ..., f(n)]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePermutation {
    window: Vec<i64>,
}

/// A juggling state with `k` balls at positions inside `[n]`: the set of
/// future landing times of the airborne balls, relative to the current time.
/// The full state is this set together with all nonpositive integers.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct JugglingState {
    balls: KSubset,
}

/// A periodic sequence of juggling states `(J_1, ..., J_n)` in relative
/// coordinates: `J_{i+1}` can follow `J_i`, cyclically.
#[derive(Clone, PartialEq, Eq)]
pub struct JugglingSequence {
    states: Vec<KSubset>,
}

/// The fundamental domain of a periodic rank array: for each `i in [n]` the
/// entries `(r_{i,i}, ..., r_{i,i+n-1})`.  Entries off the stored band are
/// determined by `r_{ij} = j - i + 1` for `j < i` and `r_{ij} = k` for
/// `j >= i + n - 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct CyclicRankMatrix {
    n: usize,
    k: usize,
    rows: Vec<Vec<i64>>,
}

/// A permutation of `[n]` with each fixed point colored `+1` or `-1`,
/// recording whether the underlying affine permutation sends `i` to `i + n`
/// or to `i`.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct DecoratedPermutation {
    base: Permutation,
    colors: BTreeMap<usize, i8>,
}

impl AffinePermutation {
    pub fn new(window: Vec<i64>) -> Result<Self> {
        let n = window.len();
        if n == 0 {
            return Err(Error::BadAffinePermutation("empty window".into()));
        }
        let mut seen = vec![false; n];
        let mut sum = 0i64;
        for (i, &v) in window.iter().enumerate() {
            let r = (v - 1).rem_euclid(n as i64) as usize;
            if seen[r] {
                return Err(Error::BadAffinePermutation(format!(
                    "window {:?}: residues mod {} are not distinct",
                    window, n
                )));
            }
            seen[r] = true;
            sum += v - (i as i64 + 1);
        }
        if sum.rem_euclid(n as i64) != 0 {
            return Err(Error::BadAffinePermutation(format!(
                "window {:?}: average shift {}/{} is not an integer",
                window, sum, n
            )));
        }
        Ok(AffinePermutation { window })
    }

    /// The minimum of `Bound(k, n)`: `f(i) = i + k`.
    pub fn ground(k: usize, n: usize) -> Self {
        AffinePermutation {
            window: (1..=n as i64).map(|i| i + k as i64).collect(),
        }
    }

    /// The translation element `t_mu`, `t_mu(i) = i + n * mu_i` for `i in [n]`.
    pub fn translation(mu: &[i64]) -> Self {
        let n = mu.len() as i64;
        AffinePermutation {
            window: mu.iter().enumerate().map(|(i, &m)| i as i64 + 1 + n * m).collect(),
        }
    }

    /// `t_{omega_k}`: window `[n+1, ..., n+k, k+1, ..., n]`.
    pub fn translation_omega(k: usize, n: usize) -> Self {
        let mut mu = vec![0; n];
        for m in mu.iter_mut().take(k) {
            *m = 1;
        }
        AffinePermutation::translation(&mu)
    }

    /// Periodic extension of a finite permutation.
    pub fn from_permutation(w: &Permutation) -> Self {
        AffinePermutation {
            window: w.window().iter().map(|&v| v as i64).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> &[i64] {
        &self.window
    }

    /// `f(i)` for any integer `i`, by periodicity.
    pub fn apply(&self, i: i64) -> i64 {
        let n = self.n() as i64;
        let q = (i - 1).div_euclid(n);
        let r = (i - 1).rem_euclid(n) as usize;
        self.window[r] + q * n
    }

    /// Ball number `av(f) = (1/n) sum_i (f(i) - i)`.
    pub fn ball_number(&self) -> i64 {
        let n = self.n() as i64;
        let sum: i64 = self.window.iter().enumerate().map(|(i, &v)| v - (i as i64 + 1)).sum();
        sum / n
    }

    pub fn is_identity(&self) -> bool {
        self.window.iter().enumerate().all(|(i, &v)| v == i as i64 + 1)
    }

    /// `(f * g)(i) = f(g(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n());
        AffinePermutation {
            window: (1..=self.n() as i64).map(|i| self.apply(other.apply(i))).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n() as i64;
        let mut window = vec![0i64; self.n()];
        for i in 1..=n {
            // f(i) = v, so writing v = r + qn with r in [1, n] gives
            // f^{-1}(r) = i - qn by periodicity.
            let v = self.apply(i);
            let r = (v - 1).rem_euclid(n) as usize;
            let q = (v - 1).div_euclid(n);
            window[r] = i - q * n;
        }
        AffinePermutation { window }
    }

    /// Whether `i <= f(i) <= i + n` for all `i`.
    pub fn is_bounded(&self) -> bool {
        self.window
            .iter()
            .enumerate()
            .all(|(i, &v)| i as i64 + 1 <= v && v <= i as i64 + 1 + self.n() as i64)
    }

    fn ensure_bounded(&self) -> Result<()> {
        if self.is_bounded() {
            Ok(())
        } else {
            Err(Error::Unbounded(format!("{}", self)))
        }
    }

    /// Number of inversion classes `(i, j)`, `i < j`, `f(i) > f(j)`, counted
    /// once per translation class.
    pub fn length(&self) -> usize {
        let n = self.n() as i64;
        let mut count = 0i64;
        for a in 1..=n {
            for b in 1..=n {
                if a == b {
                    continue;
                }
                // positions j = b + rn > a with f(b) + rn < f(a)
                let r_min = div_ceil(a + 1 - b, n);
                let r_max = div_floor(self.apply(a) - 1 - self.apply(b), n);
                if r_max >= r_min {
                    count += r_max - r_min + 1;
                }
            }
        }
        count as usize
    }

    /// The juggling state at time `t`: `{f(i) - t : i <= t}` intersected
    /// with `[n]`, in relative coordinates.  Requires boundedness, which
    /// makes the full state equal to that set together with `-N`.
    pub fn state_at(&self, t: i64) -> Result<JugglingState> {
        self.ensure_bounded()?;
        let n = self.n() as i64;
        let mut elements = Vec::new();
        for i in (t - 2 * n)..=t {
            let v = self.apply(i) - t;
            if v >= 1 && v <= n {
                elements.push(v as usize);
            }
        }
        elements.sort_unstable();
        let balls = KSubset::new(self.n(), &elements)?;
        debug_assert_eq!(balls.k() as i64, self.ball_number());
        Ok(JugglingState { balls })
    }

    /// The state sequence `(st(f,0) cap [n], ..., st(f,n-1) cap [n])`.
    pub fn juggling_states(&self) -> Result<JugglingSequence> {
        let states = (0..self.n() as i64)
            .map(|t| self.state_at(t).map(|s| s.balls))
            .collect::<Result<Vec<_>>>()?;
        Ok(JugglingSequence { states })
    }

    /// Inverse of [`juggling_states`](Self::juggling_states).
    pub fn from_juggling_states(seq: &JugglingSequence) -> Result<Self> {
        let n = seq.n();
        let mut window = Vec::with_capacity(n);
        for i in 0..n {
            let s1 = seq.state(i + 1);
            let s2 = seq.state(if i + 1 == n { 1 } else { i + 2 });
            let t = s1.can_follow(&s2).ok_or_else(|| {
                Error::BadNecklace(format!("state {} cannot follow state {}", s2, s1))
            })?;
            window.push((i as i64 + 1) + t as i64);
        }
        let f = AffinePermutation::new(window)?;
        f.ensure_bounded()?;
        Ok(f)
    }

    /// The siteswap: throws `(t_0, t_1, ..., t_{n-1})` with `t_i = f(i) - i`.
    pub fn siteswap(&self) -> Vec<i64> {
        let n = self.n() as i64;
        (0..n).map(|i| self.apply(i) - i).collect()
    }

    /// Rebuild from a siteswap `(t_0, ..., t_{n-1})`.
    pub fn from_siteswap(throws: &[i64]) -> Result<Self> {
        let n = throws.len();
        if n == 0 {
            return Err(Error::Parse("empty siteswap".into()));
        }
        let window: Vec<i64> = (1..=n as i64)
            .map(|i| {
                let t = throws[(i as usize) % n];
                i + t
            })
            .collect();
        AffinePermutation::new(window)
    }

    /// The cyclic rank matrix, with `r_{ij}` equal to `k` minus the number of
    /// state elements exceeding `j - i + 1` in the state at time `i - 1`.
    pub fn cyclic_rank_matrix(&self) -> Result<CyclicRankMatrix> {
        let seq = self.juggling_states()?;
        let n = self.n();
        let k = self.ball_number() as usize;
        let rows = (0..n)
            .map(|i| {
                let state = seq.states[i];
                (0..n)
                    .map(|d| k as i64 - state.elements().iter().filter(|&&b| b as i64 > d as i64 + 1).count() as i64)
                    .collect()
            })
            .collect();
        Ok(CyclicRankMatrix { n, k, rows })
    }

    /// Affine Bruhat order restricted to `Bound(k, n)`, via entrywise
    /// dominance of cyclic rank matrices.
    pub fn bruhat_leq(&self, other: &Self) -> Result<bool> {
        if self.n() != other.n() || self.ball_number() != other.ball_number() {
            return Err(Error::Mismatch(format!(
                "bruhat_leq: (k,n) = ({},{}) vs ({},{})",
                self.ball_number(),
                self.n(),
                other.ball_number(),
                other.n()
            )));
        }
        let r = self.cyclic_rank_matrix()?;
        let s = other.cyclic_rank_matrix()?;
        Ok(r.dominates(&s))
    }

    /// Bruhat covers of `self` from below inside the affine symmetric group:
    /// swap an inversion's values and lose exactly one length.
    pub fn covers_down(&self) -> Vec<AffinePermutation> {
        let n = self.n() as i64;
        let len = self.length();
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i + 1..=i + 2 * n {
                if self.apply(i) > self.apply(j) {
                    let g = self.swap_positions(i, j);
                    if g.length() + 1 == len {
                        out.push(g);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Swap the values at positions `i + rn` and `j + rn` for every `r`.
    fn swap_positions(&self, i: i64, j: i64) -> AffinePermutation {
        let n = self.n() as i64;
        let mut window = self.window.clone();
        let ri = (i - 1).rem_euclid(n) as usize;
        let rj = (j - 1).rem_euclid(n) as usize;
        // window slot ri holds f at position ri + 1 = i - shift_i * n
        let shift_i = (i - 1).div_euclid(n);
        let shift_j = (j - 1).div_euclid(n);
        window[ri] = self.apply(j) - shift_i * n;
        window[rj] = self.apply(i) - shift_j * n;
        AffinePermutation { window }
    }

    /// Reduce modulo `n` and color the fixed points: `-1` if `f(i) = i`,
    /// `+1` if `f(i) = i + n`.
    pub fn to_decorated(&self) -> Result<DecoratedPermutation> {
        self.ensure_bounded()?;
        let n = self.n() as i64;
        let window: Vec<usize> = self.window.iter().map(|&v| ((v - 1).rem_euclid(n) + 1) as usize).collect();
        let base = Permutation::new(window)?;
        let mut colors = BTreeMap::new();
        for i in 1..=self.n() {
            if base.apply(i) == i {
                colors.insert(i, if self.apply(i as i64) == i as i64 { -1 } else { 1 });
            }
        }
        Ok(DecoratedPermutation { base, colors })
    }

    /// Inverse of [`to_decorated`](Self::to_decorated); fails if the colors
    /// do not produce ball number `k`.
    pub fn from_decorated(dp: &DecoratedPermutation, k: usize) -> Result<Self> {
        let n = dp.base.n() as i64;
        let window: Vec<i64> = (1..=dp.base.n())
            .map(|i| {
                let b = dp.base.apply(i) as i64;
                if b == i as i64 {
                    if dp.colors[&i] == 1 {
                        b + n
                    } else {
                        b
                    }
                } else if b > i as i64 {
                    b
                } else {
                    b + n
                }
            })
            .collect();
        let f = AffinePermutation::new(window)?;
        if f.ball_number() != k as i64 {
            return Err(Error::BadDecorated(format!(
                "colors give ball number {}, expected {}",
                f.ball_number(),
                k
            )));
        }
        Ok(f)
    }

    /// All of `Bound(k, n)` in lexicographic window order.
    pub fn enumerate_bound(k: usize, n: usize) -> Result<Vec<AffinePermutation>> {
        if n == 0 || n > 12 || k > n {
            return Err(Error::OutOfRange(format!("enumerate_bound({}, {})", k, n)));
        }
        let mut out = Vec::new();
        let mut window = Vec::with_capacity(n);
        let target: i64 = (k * n) as i64;
        fn rec(
            window: &mut Vec<i64>,
            used: &mut [bool],
            excess: i64,
            target: i64,
            n: usize,
            out: &mut Vec<AffinePermutation>,
        ) {
            let i = window.len();
            if i == n {
                if excess == target {
                    out.push(AffinePermutation {
                        window: window.clone(),
                    });
                }
                return;
            }
            let remaining = (n - i - 1) as i64;
            for v in (i as i64 + 1)..=(i as i64 + 1 + n as i64) {
                let r = (v - 1).rem_euclid(n as i64) as usize;
                if used[r] {
                    continue;
                }
                let e = excess + v - (i as i64 + 1);
                // each later position adds between 0 and n
                if e > target || e + remaining * (n as i64) < target {
                    continue;
                }
                used[r] = true;
                window.push(v);
                rec(window, used, e, target, n, out);
                window.pop();
                used[r] = false;
            }
        }
        rec(&mut window, &mut vec![false; n], 0, target, n, &mut out);
        Ok(out)
    }

    /// Moebius function of the interval `[self, other]` in `Bound(k, n)`.
    pub fn mobius(&self, other: &Self) -> Result<i64> {
        if !self.bruhat_leq(other)? {
            return Err(Error::Incomparable(format!("{} vs {}", self, other)));
        }
        let k = self.ball_number() as usize;
        let all = AffinePermutation::enumerate_bound(k, self.n())?;
        let mut interval: Vec<&AffinePermutation> = all
            .iter()
            .filter(|h| self.bruhat_leq(h).unwrap() && h.bruhat_leq(other).unwrap())
            .collect();
        interval.sort_by_key(|h| h.length());
        let mut mu: Vec<i64> = vec![0; interval.len()];
        for (idx, h) in interval.iter().enumerate() {
            if *h == self {
                mu[idx] = 1;
            } else {
                let mut s = 0;
                for (jdx, g) in interval.iter().enumerate().take(idx) {
                    if g.bruhat_leq(h).unwrap() && g != h {
                        s += mu[jdx];
                    }
                }
                mu[idx] = -s;
            }
        }
        Ok(mu[interval.len() - 1])
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl fmt::Debug for AffinePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AffinePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.window.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl FromStr for AffinePermutation {
    type Err = Error;

    /// Comma-separated window, with optional surrounding brackets.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let window: Vec<i64> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad entry {:?}: {}", t, e)))
            })
            .collect::<Result<_>>()?;
        AffinePermutation::new(window)
    }
}

#[derive(Serialize, Deserialize)]
struct AffineRepr {
    n: usize,
    window: Vec<i64>,
}

impl Serialize for AffinePermutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AffineRepr {
            n: self.n(),
            window: self.window.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffinePermutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = AffineRepr::deserialize(d)?;
        if repr.window.len() != repr.n {
            return Err(D::Error::custom("window length does not match n"));
        }
        AffinePermutation::new(repr.window).map_err(D::Error::custom)
    }
}

impl JugglingState {
    pub fn new(balls: KSubset) -> Self {
        JugglingState { balls }
    }

    pub fn n(&self) -> usize {
        self.balls.n()
    }

    pub fn k(&self) -> usize {
        self.balls.k()
    }

    pub fn balls(&self) -> KSubset {
        self.balls
    }

    /// Height of the full state (the set of balls together with `-N`):
    /// the sum of the positive landing times.
    pub fn height(&self) -> i64 {
        self.balls.elements().iter().map(|&b| b as i64).sum()
    }

    /// The throw `t >= 0` taking this state to `other`, when one exists:
    /// shift down by one, then land one ball at `t` (with `t = 0` meaning no
    /// ball was in hand).
    pub fn can_follow(&self, other: &JugglingState) -> Option<usize> {
        if self.n() != other.n() || self.k() != other.k() {
            return None;
        }
        let shifted: Vec<usize> = self
            .balls
            .elements()
            .iter()
            .filter(|&&b| b > 1)
            .map(|&b| b - 1)
            .collect();
        let shifted = KSubset::new(self.n(), &shifted).expect("shift keeps elements in range");
        if !self.balls.contains(1) {
            // empty hand: forced 0-throw
            if other.balls == shifted {
                return Some(0);
            }
            return None;
        }
        let diff = other.balls.mask() & !shifted.mask();
        if other.balls.mask() & shifted.mask() == shifted.mask() && diff.count_ones() == 1 {
            Some(diff.trailing_zeros() as usize + 1)
        } else {
            None
        }
    }
}

impl fmt::Debug for JugglingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.balls)
    }
}

impl fmt::Display for JugglingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.balls)
    }
}

impl JugglingSequence {
    pub fn new(states: Vec<KSubset>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::BadNecklace("empty state sequence".into()));
        }
        let n = states.len();
        let k = states[0].k();
        for s in &states {
            if s.n() != n || s.k() != k {
                return Err(Error::BadNecklace(format!(
                    "state {} does not have {} balls in [{}]",
                    s, k, n
                )));
            }
        }
        let seq = JugglingSequence { states };
        for i in 0..n {
            let s1 = seq.state(i + 1);
            let s2 = seq.state(if i + 1 == n { 1 } else { i + 2 });
            if s1.can_follow(&s2).is_none() {
                return Err(Error::BadNecklace(format!(
                    "state {} cannot follow state {}",
                    s2, s1
                )));
            }
        }
        Ok(seq)
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn k(&self) -> usize {
        self.states[0].k()
    }

    /// The `i`-th state, 1-indexed.
    pub fn state(&self, i: usize) -> JugglingState {
        JugglingState {
            balls: self.states[i - 1],
        }
    }

    pub fn states(&self) -> &[KSubset] {
        &self.states
    }
}

impl fmt::Debug for JugglingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for JugglingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.states.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

impl CyclicRankMatrix {
    /// Validate the band `rows[i-1] = (r_{i,i}, ..., r_{i,i+n-1})` against
    /// the step, periodicity and no-forbidden-square conditions.
    pub fn new(k: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadRankMatrix("expected an n x n band".into()));
        }
        let m = CyclicRankMatrix { n, k, rows };
        for i in 1..=n as i64 {
            if m.entry(i, i + n as i64 - 1) != k as i64 {
                return Err(Error::BadRankMatrix(format!(
                    "row {} does not reach rank k = {}",
                    i, k
                )));
            }
            for j in i - 1..=i + n as i64 {
                let horiz = m.entry(i, j) - m.entry(i, j - 1);
                let vert = m.entry(i, j) - m.entry(i + 1, j);
                if horiz != 0 && horiz != 1 {
                    return Err(Error::BadRankMatrix(format!(
                        "entries at ({}, {}) break the unit horizontal step",
                        i, j
                    )));
                }
                if vert != 0 && vert != 1 {
                    return Err(Error::BadRankMatrix(format!(
                        "entries at ({}, {}) break the unit vertical step",
                        i, j
                    )));
                }
                if m.entry(i + 1, j - 1) == m.entry(i + 1, j)
                    && m.entry(i + 1, j - 1) == m.entry(i, j - 1)
                    && m.entry(i, j) != m.entry(i + 1, j - 1)
                {
                    return Err(Error::BadRankMatrix(format!(
                        "forbidden 2x2 configuration at ({}, {})",
                        i, j
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// `r_{ij}` for any integers, using the off-band conventions and
    /// periodicity `r_{(i+n)(j+n)} = r_{ij}`.
    pub fn entry(&self, i: i64, j: i64) -> i64 {
        let n = self.n as i64;
        let d = j - i;
        if d < 0 {
            return d + 1;
        }
        if d >= n - 1 {
            return self.k as i64;
        }
        let r = (i - 1).rem_euclid(n) as usize;
        self.rows[r][d as usize]
    }

    pub fn dominates(&self, other: &CyclicRankMatrix) -> bool {
        self.n == other.n
            && self
                .rows
                .iter()
                .zip(other.rows.iter())
                .all(|(a, b)| a.iter().zip(b.iter()).all(|(x, y)| x >= y))
    }

    /// Recover the affine permutation from the special entries:
    /// `f(i) = j` exactly when `r_{ij} = r_{(i+1)j} = r_{i(j-1)} > r_{(i+1)(j-1)}`.
    pub fn affine_permutation(&self) -> Result<AffinePermutation> {
        let n = self.n as i64;
        let mut window = Vec::with_capacity(self.n);
        for i in 1..=n {
            let mut found = None;
            for j in i..=i + n {
                if self.entry(i, j) == self.entry(i + 1, j)
                    && self.entry(i, j) == self.entry(i, j - 1)
                    && self.entry(i, j) > self.entry(i + 1, j - 1)
                {
                    if found.is_some() {
                        return Err(Error::BadRankMatrix(format!(
                            "row {} has more than one special entry",
                            i
                        )));
                    }
                    found = Some(j);
                }
            }
            match found {
                Some(j) => window.push(j),
                None => {
                    return Err(Error::BadRankMatrix(format!(
                        "row {} has no special entry",
                        i
                    )))
                }
            }
        }
        AffinePermutation::new(window)
    }
}

impl fmt::Debug for CyclicRankMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{:?}", r)?;
        }
        Ok(())
    }
}

impl Serialize for CyclicRankMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(s)
    }
}

impl DecoratedPermutation {
    pub fn new(base: Permutation, colors: BTreeMap<usize, i8>) -> Result<Self> {
        for (&i, &c) in &colors {
            if i == 0 || i > base.n() || base.apply(i) != i {
                return Err(Error::BadDecorated(format!("{} is not a fixed point", i)));
            }
            if c != 1 && c != -1 {
                return Err(Error::BadDecorated(format!("color {} is not +1 or -1", c)));
            }
        }
        for i in 1..=base.n() {
            if base.apply(i) == i && !colors.contains_key(&i) {
                return Err(Error::BadDecorated(format!("fixed point {} is uncolored", i)));
            }
        }
        Ok(DecoratedPermutation { base, colors })
    }

    pub fn base(&self) -> &Permutation {
        &self.base
    }

    pub fn colors(&self) -> &BTreeMap<usize, i8> {
        &self.colors
    }

    /// Anti-exceedance count: the ball number of any matching affine lift.
    pub fn anti_exceedances(&self) -> usize {
        (1..=self.base.n())
            .filter(|&i| {
                let b = self.base.apply(i);
                b < i || (b == i && self.colors[&i] == 1)
            })
            .count()
    }
}

impl fmt::Debug for DecoratedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for DecoratedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=self.base.n())
            .map(|i| {
                let b = self.base.apply(i);
                match self.colors.get(&i) {
                    Some(1) => format!("{}+", b),
                    Some(_) => format!("{}-", b),
                    None => b.to_string(),
                }
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for DecoratedPermutation {
    type Err = Error;

    /// Comma-separated window with `+`/`-` suffixes on fixed points,
    /// e.g. `"1+,2-,4,3"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut window = Vec::new();
        let mut colors = BTreeMap::new();
        for (idx, tok) in s.trim().split(',').enumerate() {
            let tok = tok.trim();
            let (num, color) = if let Some(stripped) = tok.strip_suffix('+') {
                (stripped, Some(1))
            } else if let Some(stripped) = tok.strip_suffix('-') {
                (stripped, Some(-1))
            } else {
                (tok, None)
            };
            let v: usize = num
                .parse()
                .map_err(|e| Error::Parse(format!("bad entry {:?}: {}", tok, e)))?;
            if let Some(c) = color {
                colors.insert(idx + 1, c);
            }
            window.push(v);
        }
        DecoratedPermutation::new(Permutation::new(window)?, colors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn af(s: &str) -> AffinePermutation {
        s.parse().unwrap()
    }

    fn ks(n: usize, elems: &[usize]) -> KSubset {
        KSubset::new(n, elems).unwrap()
    }

    #[test]
    fn window_validation() {
        assert!(AffinePermutation::new(vec![2, 3, 5, 8]).is_ok());
        // repeated residue mod 4
        assert!(AffinePermutation::new(vec![1, 5, 3, 4]).is_err());
        // non-integer average
        assert!(AffinePermutation::new(vec![2, 1, 3, 5]).is_err());
    }

    #[test]
    fn boundedness() {
        assert!(af("2,3,5,8").is_bounded());
        assert!(af("5,2,7,4").is_bounded());
        assert!(!af("0,1,2,3,4").is_bounded() || af("0,1,2,3,4").ball_number() >= 0);
        let down = AffinePermutation::new((1..=4).map(|i| i - 1).collect::<Vec<i64>>());
        assert!(down.is_err() || !down.unwrap().is_bounded());
        // f(i) = i - 1 shifted consistently: window [0, 1, 2, 3]
        let f = AffinePermutation::new(vec![0, 1, 2, 3]).unwrap();
        assert!(!f.is_bounded());
    }

    #[test]
    fn states_of_worked_example() {
        let f = af("2,3,5,8");
        assert_eq!(f.ball_number(), 2);
        assert_eq!(f.state_at(0).unwrap().balls(), ks(4, &[1, 4]));
        assert_eq!(f.state_at(1).unwrap().balls(), ks(4, &[1, 3]));
        assert_eq!(f.state_at(2).unwrap().balls(), ks(4, &[1, 2]));
        assert_eq!(f.state_at(3).unwrap().balls(), ks(4, &[1, 2]));
        // periodicity
        assert_eq!(f.state_at(4).unwrap().balls(), f.state_at(0).unwrap().balls());
        assert_eq!(f.juggling_states().unwrap().to_string(), "14 13 12 12");
    }

    #[test]
    fn ground_pattern_states() {
        let f = AffinePermutation::ground(2, 5);
        for t in 0..5 {
            assert_eq!(f.state_at(t).unwrap().balls(), ks(5, &[1, 2]));
        }
    }

    #[test]
    fn heights() {
        let s = JugglingState::new(ks(4, &[]));
        assert_eq!(s.height(), 0);
        let s = JugglingState::new(ks(5, &[1, 2, 3]));
        assert_eq!(s.height(), 6);
    }

    #[test]
    fn height_average_identity() {
        // sum_{i=a+1}^{b} (f(i) - i) = (b-a) av(f) + ht(st(f,b)) - ht(st(f,a))
        for f in [af("2,3,5,8"), af("5,2,7,4"), af("4,3,5,6,7")] {
            let av = f.ball_number();
            let n = f.n() as i64;
            for a in 0..2 * n {
                for b in a + 1..=2 * n {
                    let lhs: i64 = (a + 1..=b).map(|i| f.apply(i) - i).sum();
                    let rhs = (b - a) * av + f.state_at(b).unwrap().height()
                        - f.state_at(a).unwrap().height();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn ball_number_is_homomorphism() {
        use rand::prelude::*;
        let mut rng = StdRng::seed_from_u64(7);
        for n in 2..=6usize {
            for _ in 0..20 {
                let mut w: Vec<usize> = (1..=n).collect();
                w.shuffle(&mut rng);
                let mut v: Vec<usize> = (1..=n).collect();
                v.shuffle(&mut rng);
                let mu: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                let nu: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                let f = AffinePermutation::from_permutation(&Permutation::new(w).unwrap())
                    .compose(&AffinePermutation::translation(&mu));
                let g = AffinePermutation::from_permutation(&Permutation::new(v).unwrap())
                    .compose(&AffinePermutation::translation(&nu));
                assert_eq!(
                    f.compose(&g).ball_number(),
                    f.ball_number() + g.ball_number()
                );
                assert!(f.compose(&f.inverse()).is_identity());
            }
        }
    }

    #[test]
    fn can_follow_examples() {
        // ground state k-throw
        let s = JugglingState::new(ks(4, &[1, 2]));
        assert_eq!(s.can_follow(&s), Some(2));
        // {1,4} -> {1,3} comes from throw f(1) - 1 = 1 in [2,3,5,8]
        let a = JugglingState::new(ks(4, &[1, 4]));
        let b = JugglingState::new(ks(4, &[1, 3]));
        assert_eq!(a.can_follow(&b), Some(1));
        // {2} -> {2} for (k,n) = (1,2): impossible
        let c = JugglingState::new(ks(2, &[2]));
        assert_eq!(c.can_follow(&c), None);
        // exhaustive uniqueness: the returned throw is the only one that works
        for m1 in KSubset::enumerate(4, 2) {
            for m2 in KSubset::enumerate(4, 2) {
                let s1 = JugglingState::new(m1);
                let s2 = JugglingState::new(m2);
                let witness = s1.can_follow(&s2);
                // brute check over all t in 0..=n
                let mut found = Vec::new();
                for t in 0..=4usize {
                    let mut next: Vec<usize> =
                        m1.elements().iter().filter(|&&b| b > 1).map(|&b| b - 1).collect();
                    if m1.contains(1) {
                        if t == 0 || next.contains(&t) {
                            continue;
                        }
                        next.push(t);
                    } else if t != 0 {
                        continue;
                    }
                    next.sort_unstable();
                    if KSubset::new(4, &next).unwrap() == m2 {
                        found.push(t);
                    }
                }
                assert_eq!(witness.map(|t| vec![t]).unwrap_or_default(), found);
            }
        }
    }

    #[test]
    fn siteswap_round_trip() {
        let f = af("2,3,5,8");
        assert_eq!(f.siteswap(), vec![4, 1, 1, 2]);
        assert_eq!(AffinePermutation::from_siteswap(&[4, 1, 1, 2]).unwrap(), f);
        let g = af("4,3,5,6,7");
        assert_eq!(g.siteswap(), vec![2, 3, 1, 2, 2]);
        assert_eq!(AffinePermutation::from_siteswap(&g.siteswap()).unwrap(), g);
    }

    #[test]
    fn length_examples() {
        assert_eq!(AffinePermutation::ground(3, 5).length(), 0);
        assert_eq!(af("4,3,5,6,7").length(), 1);
        for (k, n) in [(1usize, 4usize), (2, 4), (2, 5), (3, 6)] {
            let t = AffinePermutation::translation_omega(k, n);
            assert_eq!(t.length(), k * (n - k), "t_omega for ({}, {})", k, n);
        }
    }

    #[test]
    fn rank_matrix_of_worked_example() {
        let f = af("2,3,5,8");
        let m = f.cyclic_rank_matrix().unwrap();
        assert_eq!(m.rows()[0], vec![1, 1, 1, 2]);
        assert_eq!(m.rows()[1], vec![1, 1, 2, 2]);
        assert_eq!(m.rows()[2], vec![1, 2, 2, 2]);
        assert_eq!(m.rows()[3], vec![1, 2, 2, 2]);
        // displayed band includes j = i + n: entry (1, 5) = 2 etc.
        assert_eq!(m.entry(1, 5), 2);
        // special entries recover f
        assert_eq!(m.affine_permutation().unwrap(), f);
        // special positions are exactly (i, f(i))
        for i in 1..=4i64 {
            let j = f.apply(i);
            assert_eq!(m.entry(i, j), m.entry(i + 1, j));
            assert_eq!(m.entry(i, j), m.entry(i, j - 1));
            assert!(m.entry(i, j) > m.entry(i + 1, j - 1));
        }
    }

    #[test]
    fn rank_matrix_of_point_stratum() {
        let f = AffinePermutation::translation_omega(2, 4);
        let m = f.cyclic_rank_matrix().unwrap();
        // r_{ij} = |{1..k} cap [i, j]| truncated to the periodic band
        for i in 1..=4i64 {
            for d in 0..4i64 {
                let j = i + d;
                let expect = (i..=j)
                    .filter(|&c| {
                        let r = (c - 1).rem_euclid(4) + 1;
                        r <= 2
                    })
                    .count() as i64;
                assert_eq!(m.entry(i, j), expect.min(2), "i={} j={}", i, j);
            }
        }
    }

    #[test]
    fn rank_matrix_validation() {
        let f = af("2,3,5,8");
        let m = f.cyclic_rank_matrix().unwrap();
        let rebuilt = CyclicRankMatrix::new(2, m.rows().to_vec()).unwrap();
        assert_eq!(rebuilt, m);
        // corrupt an entry: validation must fail
        let mut rows = m.rows().to_vec();
        rows[0][1] = 0;
        assert!(CyclicRankMatrix::new(2, rows).is_err());
    }

    #[test]
    fn enumerate_bound_counts() {
        assert_eq!(AffinePermutation::enumerate_bound(2, 4).unwrap().len(), 33);
        let zero = AffinePermutation::enumerate_bound(0, 3).unwrap();
        assert_eq!(zero.len(), 1);
        assert!(zero[0].is_identity());
        // brute force over all windows for (1,3)
        let mut brute = 0;
        for a in 1..=4i64 {
            for b in 2..=5i64 {
                for c in 3..=6i64 {
                    if let Ok(f) = AffinePermutation::new(vec![a, b, c]) {
                        if f.is_bounded() && f.ball_number() == 1 {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(AffinePermutation::enumerate_bound(1, 3).unwrap().len(), brute);
        // deterministic lexicographic order
        let all = AffinePermutation::enumerate_bound(2, 4).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn bound_is_lower_order_ideal() {
        for (k, n) in [(2usize, 4usize), (2, 5)] {
            let all = AffinePermutation::enumerate_bound(k, n).unwrap();
            for f in &all {
                for g in f.covers_down() {
                    assert!(g.is_bounded(), "cover below {} left Bound({},{})", f, k, n);
                    assert!(g.bruhat_leq(f).unwrap());
                }
            }
        }
    }

    #[test]
    fn bruhat_leq_examples() {
        let all = AffinePermutation::enumerate_bound(2, 4).unwrap();
        let ground = AffinePermutation::ground(2, 4);
        for f in &all {
            assert!(f.bruhat_leq(f).unwrap());
            assert!(ground.bruhat_leq(f).unwrap());
        }
    }

    #[test]
    fn bruhat_leq_matches_gale_order_on_states() {
        let all = AffinePermutation::enumerate_bound(2, 4).unwrap();
        for f in &all {
            let jf = f.juggling_states().unwrap();
            for g in &all {
                let jg = g.juggling_states().unwrap();
                let gale = jf
                    .states()
                    .iter()
                    .zip(jg.states().iter())
                    .all(|(a, b)| a.gale_leq(b));
                assert_eq!(f.bruhat_leq(g).unwrap(), gale, "f={} g={}", f, g);
            }
        }
    }

    #[test]
    fn bruhat_length_grading() {
        // covers move the length by one; leq implies length comparison
        let all = AffinePermutation::enumerate_bound(2, 4).unwrap();
        for f in &all {
            for g in &all {
                if f.bruhat_leq(g).unwrap() && f != g {
                    assert!(f.length() < g.length());
                }
            }
        }
    }

    #[test]
    fn decorated_round_trip() {
        let f = af("3,4,5,6");
        let dp = f.to_decorated().unwrap();
        assert_eq!(dp.base(), &"3412".parse::<Permutation>().unwrap());
        assert!(dp.colors().is_empty());
        assert_eq!(AffinePermutation::from_decorated(&dp, 2).unwrap(), f);

        let id_low = AffinePermutation::new(vec![1, 2, 3]).unwrap();
        let dp = id_low.to_decorated().unwrap();
        assert!(dp.colors().values().all(|&c| c == -1));
        assert_eq!(dp.anti_exceedances(), 0);

        let id_high = AffinePermutation::new(vec![4, 5, 6]).unwrap();
        let dp = id_high.to_decorated().unwrap();
        assert!(dp.colors().values().all(|&c| c == 1));
        assert_eq!(dp.anti_exceedances(), 3);
        assert_eq!(AffinePermutation::from_decorated(&dp, 3).unwrap(), id_high);
        assert!(AffinePermutation::from_decorated(&dp, 2).is_err());
    }

    #[test]
    fn decorated_text_round_trip() {
        let dp: DecoratedPermutation = "1+,2-,4,3".parse().unwrap();
        assert_eq!(dp.to_string(), "1+,2-,4,3");
        assert!("1,2,3".parse::<DecoratedPermutation>().is_err());
    }

    #[test]
    fn all_bijections_round_trip() {
        for (k, n) in [(1usize, 4usize), (2, 4), (2, 5), (3, 6)] {
            for f in AffinePermutation::enumerate_bound(k, n).unwrap() {
                let states = f.juggling_states().unwrap();
                assert_eq!(AffinePermutation::from_juggling_states(&states).unwrap(), f);
                let m = f.cyclic_rank_matrix().unwrap();
                assert_eq!(m.affine_permutation().unwrap(), f);
                assert_eq!(CyclicRankMatrix::new(k, m.rows().to_vec()).unwrap(), m);
                let dp = f.to_decorated().unwrap();
                assert_eq!(AffinePermutation::from_decorated(&dp, k).unwrap(), f);
                assert_eq!(AffinePermutation::from_siteswap(&f.siteswap()).unwrap(), f);
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let all = AffinePermutation::enumerate_bound(2, 4).unwrap();
        for f in &all {
            assert_eq!(f.mobius(f).unwrap(), 1);
            for g in &all {
                if f.bruhat_leq(g).unwrap() {
                    match g.length() - f.length() {
                        1 => assert_eq!(f.mobius(g).unwrap(), -1),
                        2 => assert_eq!(f.mobius(g).unwrap(), 1),
                        _ => {}
                    }
                }
            }
        }
        let f = AffinePermutation::ground(2, 4);
        let g = AffinePermutation::translation_omega(2, 4);
        assert!(f.mobius(&g).is_ok());
        assert!(g.mobius(&f).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = af("2,3,5,8");
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(js, r#"{"n":4,"window":[2,3,5,8]}"#);
        assert_eq!(serde_json::from_str::<AffinePermutation>(&js).unwrap(), f);
    }
}
