//! Combinatorics of positroid strata in the Grassmannian.
//!
//! The central object is the bounded affine permutation: a bijection
//! `f: Z -> Z` with `f(i+n) = f(i) + n` and `i <= f(i) <= i+n`, recording a
//! periodic juggling pattern with `k` balls.  The same data can be presented
//! as a sequence of juggling states, a cyclic rank matrix, a decorated
//! permutation, a Grassmann necklace, or an equivalence class of k-Bruhat
//! intervals in the symmetric group, and this crate implements all of those
//! presentations together with the conversions and partial orders relating
//! them.
//!
//! On top of the indexing layer sit three computational layers:
//!
//! * [`positroid`]: matroids on `[n]` given by their bases, Grassmann
//!   necklaces, positroid envelopes, and extraction of all of these from an
//!   exact rational matrix.
//! * [`complexes`]: the projected order complex of a k-Bruhat interval, its
//!   lexicographic shelling, ridge classification and Hilbert-series
//!   counting.
//! * [`symfunc`] and [`quantum`]: affine Stanley symmetric functions, the
//!   induced cohomology class of a positroid stratum, and Gromov-Witten
//!   invariants of the Grassmannian computed through that class.

pub mod affine;
pub mod error;
pub mod perms;

pub use affine::{AffinePermutation, CyclicRankMatrix, DecoratedPermutation, JugglingSequence, JugglingState};
pub use error::{Error, Result};
pub use perms::{KSubset, Permutation};
