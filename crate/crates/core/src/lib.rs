//! Harmonic and pseudo-harmonic cochains on the Bruhat-Tits tree of
//! `PGL_2(F_q((1/T)))`, their Fourier expansions, Hecke and Atkin-Lehner
//! operators, Eisenstein series and cuspidal divisor lattices.

pub mod arith;
pub mod cli;
pub mod cochain;
pub mod cusp;
pub mod eisenstein;
pub mod error;
pub mod level;
pub mod sample;
pub mod snf;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
