//! Folded two-step crystal operators for affine type A.
//!
//! For `e = 2l` the pair of residues `(i, i + l)` is treated as a single
//! color of `sl_l`: the operators `f_i f_{i+l}` and `e_i e_{i+l}` act on
//! `B(infinity)` of `sl_{2l}` and on the level-two crystal
//! `B(Lambda_0 + Lambda_l)`, and the sets they generate are crystals of
//! type `A_{l-1}^{(1)}`. The crate builds both unfolded models, the folded
//! layer on top of them, explicit truncated crystal graphs, and a harness of
//! named checks comparing the folded crystals against `B(infinity)` and
//! `B(Lambda_0)` of `sl_l`.

pub mod binf;
pub mod cartan;
pub mod characters;
pub mod error;
pub mod graphs;
pub mod harness;
pub mod hat;
pub mod hwcrystal;
pub mod model;

pub use cartan::{FoldedIndex, Folding, IndexSet, Residue, Weight};
pub use error::{CrystalError, GraphError, HarnessError};
pub use model::Crystal;
