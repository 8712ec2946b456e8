//! Numerical evaluation of reverse Cauchy-Schwarz inequalities for sesquilinear
//! forms taking values in the matrix algebra `M_d(C)`.
//!
//! The crate is organized bottom-up: [`matalg`] provides the dense Hermitian
//! toolkit, [`forms`] the form instances and their hypotheses, [`bounds`] one
//! evaluator per inequality, and [`harness`] randomized instance generation and
//! fuzzing. [`instance`] reads and writes the JSON instance format.

pub mod bounds;
pub mod compare;
pub mod forms;
pub mod harness;
pub mod instance;
pub mod matalg;
pub mod rng;
