//! Exact symbolic engine for connections, curvature and Codazzi-type
//! structures on three-dimensional Lorentzian Lie algebras.

pub mod classify;
pub mod cli;
pub mod connection;
pub mod liealg;
pub mod poly;
pub mod reference;
pub mod tensorcalc;
