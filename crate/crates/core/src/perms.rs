//! The finite symmetric group `S_n`: one-line permutations, Bruhat and
//! k-Bruhat order, Grassmannian coset factorizations, and the Demazure
//! product.
//!
//! Permutations compose right-to-left: `(u * w)(i) = u(w(i))`, so
//! multiplication on the left acts on values and on the right on positions.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation of `[n] = {1, ..., n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    window: Vec<usize>,
}

/// A k-element subset of `[n]`, kept as a bitmask; elements are reported as
/// an increasing list of integers in `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSubset {
    n: usize,
    mask: u32,
}

impl Permutation {
    pub fn new(window: Vec<usize>) -> Result<Self> {
        let n = window.len();
        if n == 0 {
            return Err(Error::BadPermutation("empty window".into()));
        }
        let mut seen = vec![false; n + 1];
        for &v in &window {
            if v == 0 || v > n || seen[v] {
                return Err(Error::BadPermutation(format!(
                    "window {:?} is not a rearrangement of 1..{}",
                    window, n
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { window })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            window: (1..=n).collect(),
        }
    }

    /// The longest element `[n, n-1, ..., 1]`.
    pub fn longest(n: usize) -> Self {
        Permutation {
            window: (1..=n).rev().collect(),
        }
    }

    /// The simple transposition `s_i` swapping `i` and `i+1`, for `1 <= i < n`.
    pub fn simple(i: usize, n: usize) -> Self {
        let mut w = Permutation::identity(n);
        w.window.swap(i - 1, i);
        w
    }

    /// The transposition `(a b)` as an element of `S_n`.
    pub fn transposition(a: usize, b: usize, n: usize) -> Self {
        let mut w = Permutation::identity(n);
        w.window.swap(a - 1, b - 1);
        w
    }

    pub fn n(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> &[usize] {
        &self.window
    }

    /// `w(i)` for `1 <= i <= n`.
    pub fn apply(&self, i: usize) -> usize {
        self.window[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.window.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    pub fn inverse(&self) -> Self {
        let mut window = vec![0; self.n()];
        for (i, &v) in self.window.iter().enumerate() {
            window[v - 1] = i + 1;
        }
        Permutation { window }
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n(), "composing permutations of different n");
        Permutation {
            window: other.window.iter().map(|&v| self.window[v - 1]).collect(),
        }
    }

    /// Number of inversions `#{(i,j) : i < j, w(i) > w(j)}`.
    pub fn length(&self) -> usize {
        let w = &self.window;
        let mut inv = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    inv += 1;
                }
            }
        }
        inv
    }

    /// The set `w([k])` as a sorted k-subset.
    pub fn sigma_k(&self, k: usize) -> KSubset {
        let mut mask = 0u32;
        for &v in &self.window[..k] {
            mask |= 1 << (v - 1);
        }
        KSubset::from_mask(self.n(), mask)
    }

    /// Bruhat order: `u <= w` iff `u([j]) <= w([j])` in Gale order for all j.
    pub fn bruhat_leq(&self, other: &Self) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::Mismatch(format!(
                "bruhat_leq: n = {} vs {}",
                self.n(),
                other.n()
            )));
        }
        // Running Gale comparison of sorted prefixes, done directly on
        // indicator counts: u([j]) <= w([j]) iff for every value threshold v,
        // #(u([j]) cap [v]) >= #(w([j]) cap [v]).
        let n = self.n();
        let mut cu = vec![0i32; n + 1];
        let mut cw = vec![0i32; n + 1];
        for j in 0..n {
            for v in self.window[j]..=n {
                cu[v] += 1;
            }
            for v in other.window[j]..=n {
                cw[v] += 1;
            }
            if (1..=n).any(|v| cu[v] < cw[v]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// k-Bruhat order, by the two-condition comparison criterion:
    /// (1) `u(a) <= w(a)` for `a <= k` and `u(b) >= w(b)` for `b > k`;
    /// (2) every pair that `u` orders ascending and `w` descending straddles
    ///     position k.
    pub fn k_bruhat_leq(&self, other: &Self, k: usize) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::Mismatch(format!(
                "k_bruhat_leq: n = {} vs {}",
                self.n(),
                other.n()
            )));
        }
        let n = self.n();
        let (u, w) = (&self.window, &other.window);
        for a in 0..n {
            if a < k {
                if u[a] > w[a] {
                    return Ok(false);
                }
            } else if u[a] < w[a] {
                return Ok(false);
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if u[a] < u[b] && w[a] > w[b] && !(a < k && k <= b) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Bruhat covers of `self` from above: all `w(a b)` with
    /// `l(w(a b)) = l(w) + 1`.
    pub fn covers_up(&self) -> Vec<Permutation> {
        let n = self.n();
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                if self.apply(a) < self.apply(b)
                    && (a + 1..b).all(|c| self.apply(c) < self.apply(a) || self.apply(c) > self.apply(b))
                {
                    let mut v = self.clone();
                    v.window.swap(a - 1, b - 1);
                    out.push(v);
                }
            }
        }
        out
    }

    /// k-Bruhat covers from above: Bruhat covers `w(a b)` with `a <= k < b`.
    pub fn k_covers_up(&self, k: usize) -> Vec<Permutation> {
        let n = self.n();
        let mut out = Vec::new();
        for a in 1..=k {
            for b in k + 1..=n {
                if self.apply(a) < self.apply(b)
                    && (a + 1..b).all(|c| self.apply(c) < self.apply(a) || self.apply(c) > self.apply(b))
                {
                    let mut v = self.clone();
                    v.window.swap(a - 1, b - 1);
                    out.push(v);
                }
            }
        }
        out
    }

    /// Whether the window is increasing on `1..=k` and on `k+1..=n`, i.e.
    /// the permutation is of minimal length in its coset `w (S_k x S_{n-k})`.
    pub fn is_grassmannian(&self, k: usize) -> bool {
        let w = &self.window;
        w[..k].windows(2).all(|p| p[0] < p[1]) && w[k..].windows(2).all(|p| p[0] < p[1])
    }

    /// Whether `self` preserves both blocks `[k]` and `[k+1, n]`.
    pub fn in_parabolic(&self, k: usize) -> bool {
        self.window[..k].iter().all(|&v| v <= k)
    }

    /// Length-additive coset factorization `w = w' * w''` with
    /// `w'' in S_k x S_{n-k}` and `w'` of minimal (or with `max`, maximal)
    /// length in `w (S_k x S_{n-k})`.
    pub fn grassmannian_factor(&self, k: usize, max: bool) -> (Permutation, Permutation) {
        let mut first: Vec<usize> = self.window[..k].to_vec();
        let mut last: Vec<usize> = self.window[k..].to_vec();
        first.sort_unstable();
        last.sort_unstable();
        if max {
            first.reverse();
            last.reverse();
        }
        first.extend_from_slice(&last);
        let rep = Permutation { window: first };
        let part = rep.inverse().compose(self);
        debug_assert!(part.in_parabolic(k));
        if max {
            debug_assert_eq!(rep.length(), self.length() + part.length());
        } else {
            debug_assert_eq!(self.length(), rep.length() + part.length());
        }
        (rep, part)
    }

    /// A reduced word for `self`, as a list of simple-reflection indices.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut x = self.clone();
        let n = self.n();
        let mut rev = Vec::new();
        loop {
            let mut descent = None;
            for i in 1..n {
                if x.apply(i) > x.apply(i + 1) {
                    descent = Some(i);
                    break;
                }
            }
            match descent {
                Some(i) => {
                    // x s_i < x; record and strip.
                    x.window.swap(i - 1, i);
                    rev.push(i);
                }
                None => break,
            }
        }
        // self = s_{rev[m-1]} ... s_{rev[0]}  (as products), i.e. the word
        // read left-to-right is rev reversed.
        rev.reverse();
        rev
    }

    /// Demazure (Hecke) product of `self` and `other`, computed along a
    /// reduced word of `other`: descents saturate instead of cancelling.
    pub fn demazure_product(&self, other: &Self) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::Mismatch(format!(
                "demazure_product: n = {} vs {}",
                self.n(),
                other.n()
            )));
        }
        let mut w = self.clone();
        for i in other.reduced_word() {
            if w.apply(i) < w.apply(i + 1) {
                w.window.swap(i - 1, i);
            }
        }
        Ok(w)
    }

    /// All of `S_n` in lexicographic window order.
    pub fn enumerate(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut window: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation {
                window: window.clone(),
            });
            // next lexicographic window
            let mut i = n.wrapping_sub(1);
            while i > 0 && window[i - 1] >= window[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while window[j] <= window[i - 1] {
                j -= 1;
            }
            window.swap(i - 1, j);
            window[i..].reverse();
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for &v in &self.window {
                write!(f, "{}", v)?;
            }
            Ok(())
        } else {
            let s: Vec<String> = self.window.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", s.join(","))
        }
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts the one-line digit form `"21345"` for `n <= 9` and the
    /// comma-separated form `"2,1,3,4,5"` otherwise.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let window: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad entry {:?}: {}", t, e)))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Parse(format!("bad digit {:?}", c)))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(window)
    }
}

#[derive(Serialize, Deserialize)]
struct PermutationRepr {
    n: usize,
    window: Vec<usize>,
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PermutationRepr {
            n: self.n(),
            window: self.window.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PermutationRepr::deserialize(d)?;
        if repr.window.len() != repr.n {
            return Err(D::Error::custom("window length does not match n"));
        }
        Permutation::new(repr.window).map_err(D::Error::custom)
    }
}

impl KSubset {
    pub fn new(n: usize, elements: &[usize]) -> Result<Self> {
        if n > 31 {
            return Err(Error::OutOfRange(format!("n = {} exceeds the bitmask cap 31", n)));
        }
        let mut mask = 0u32;
        let mut prev = 0usize;
        for &e in elements {
            if e == 0 || e > n {
                return Err(Error::BadPermutation(format!("element {} outside [1,{}]", e, n)));
            }
            if e <= prev {
                return Err(Error::BadPermutation(format!(
                    "elements {:?} not strictly increasing",
                    elements
                )));
            }
            prev = e;
            mask |= 1 << (e - 1);
        }
        Ok(KSubset { n, mask })
    }

    pub fn from_mask(n: usize, mask: u32) -> Self {
        debug_assert!(n <= 31 && mask < (1 << n));
        KSubset { n, mask }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn contains(&self, e: usize) -> bool {
        e >= 1 && e <= self.n && self.mask & (1 << (e - 1)) != 0
    }

    pub fn elements(&self) -> Vec<usize> {
        (1..=self.n).filter(|&e| self.contains(e)).collect()
    }

    pub fn complement(&self) -> KSubset {
        KSubset {
            n: self.n,
            mask: !self.mask & ((1 << self.n) - 1),
        }
    }

    /// Cyclic shift: add `j` to every element modulo `n` (values stay in `[1,n]`).
    pub fn rotate(&self, j: i64) -> KSubset {
        let n = self.n as i64;
        let mut mask = 0u32;
        for e in self.elements() {
            let e2 = (e as i64 - 1 + j).rem_euclid(n) as usize;
            mask |= 1 << e2;
        }
        KSubset { n: self.n, mask }
    }

    /// Gale order: `self <= other` iff the r-th smallest element of `self`
    /// is at most the r-th smallest of `other`, for every r.
    pub fn gale_leq(&self, other: &KSubset) -> bool {
        debug_assert_eq!(self.n, other.n);
        debug_assert_eq!(self.k(), other.k());
        let a = self.elements();
        let b = other.elements();
        a.iter().zip(b.iter()).all(|(x, y)| x <= y)
    }

    /// Gale order shifted to start at `r`: compares after relabelling so
    /// that `r < r+1 < ... < r-1`.
    pub fn gale_leq_shifted(&self, other: &KSubset, r: usize) -> bool {
        self.rotate(1 - r as i64).gale_leq(&other.rotate(1 - r as i64))
    }

    /// All k-subsets of `[n]`, in increasing mask order.
    pub fn enumerate(n: usize, k: usize) -> Vec<KSubset> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| KSubset::from_mask(n, m))
            .collect()
    }
}

impl fmt::Debug for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 9 {
            for e in self.elements() {
                write!(f, "{}", e)?;
            }
            Ok(())
        } else {
            let s: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
            write!(f, "{{{}}}", s.join(","))
        }
    }
}

impl Serialize for KSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements().serialize(s)
    }
}
