//! Numerical core for the matrix-cube relaxation constant ϑ(d).
//!
//! The crate is `no_std` + `alloc`. It covers
//!
//! * [`specfun`]: log-gamma, the regularized incomplete beta function and its inverse;
//! * [`betastats`]: equipoints, medians and the bounds relating them to the mean;
//! * [`theta`]: the α/β/κ quantities of sign-diagonal matrices, σ<sub>s,t</sub>, and ϑ(d);
//! * [`sphere_oracle`]: a Monte-Carlo evaluation of the sphere integrals behind the closed forms;
//! * [`pencil`]: monic linear pencils, free-spectrahedron membership and the cube relaxation;
//! * [`dilation`]: spin systems, ball membership and explicit commuting dilations.
//!
//! With the default `std` feature the heavier scans run on rayon. Results never depend on
//! the number of worker threads.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod betastats;
pub mod dilation;
mod error;
pub mod linalg;
mod par;
pub mod pencil;
pub mod rng;
pub mod roots;
pub mod specfun;
pub mod sphere_oracle;
pub mod theta;

pub use error::{Error, ErrorKind, Result};
