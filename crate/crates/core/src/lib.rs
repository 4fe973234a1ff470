//! LP decoding of LDPC codes under bit flips: the first-order relaxation and
//! its cutting-plane solver, dual-witness / hyperflow / (p,q)-matching
//! certificates of decoding success, the asymptotic rate functions that turn
//! those certificates into a correctable-fraction threshold, and a Monte
//! Carlo harness that cross-checks all of them.

pub mod channel;
pub mod exponents;
pub mod factor_graph;
pub mod gf2;
pub mod harness;
pub mod lp_decoder;
pub mod matching;
pub mod scalar;
pub mod simplex;
pub mod witness;

pub use num_rational::BigRational as Rational;

pub use channel::{gamma_from_flips, sample_flips, FlipMode, FlipPattern, Gamma};
pub use factor_graph::{EnsembleParams, FactorGraph};
pub use lp_decoder::{decode_lp, DecodeConfig, DecodeMode, DecodeResult, DecodeStatus};
pub use scalar::{ExponentFloat, Scalar};
pub use simplex::{ExactSimplex, FloatSimplex};

pub type ExponentParams = exponents::ExponentParams<f64>;
pub type ExponentReport = exponents::ExponentReport<f64>;
