//! Algorithmic complexity estimation for cellular automata.
//!
//! The crate simulates elementary cellular automata and Game of Life
//! ([`ca`]), builds Coding Theorem Method tables by enumerating small Turing
//! machines ([`ctm`]), scores arrays with the Block Decomposition Method
//! ([`bdm`]) and compares the result with LZW and entropy baselines
//! ([`baselines`]). [`perturbation`] and [`collision`] run the single-flip and
//! colliding-automata experiments; [`output`] writes their CSV and PGM files.

pub mod baselines;
pub mod bdm;
pub mod ca;
pub mod collision;
pub mod ctm;
pub mod error;
pub mod output;
pub mod perturbation;
pub mod rng;

pub use bdm::{bdm_1d, bdm_2d, BdmValue, BlockPartition};
pub use ca::{Alphabet, Cell, Configuration, EcaRule, Spacetime};
pub use ctm::{CtmTable, TuringMachine};
pub use error::{Error, Result};
