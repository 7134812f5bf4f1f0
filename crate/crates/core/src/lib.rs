//! Exact-arithmetic construction and certification of endpoint-rigid
//! smooth fans.
//!
//! A smooth fan is presented as an upper semi-continuous function `φ` on a
//! symbolically indexed Cantor set `C ⊂ [0,1]`: the fan is the hypograph
//! `L₀^φ` with `C × {0}` collapsed to the vertex, and its endpoints are the
//! points `⟨x, φ(x)⟩` with `φ(x) > 0`.
//!
//! - [`seqindex`]: finite sequences `s ∈ ω^{<ω}` and the bijection `θ`.
//! - [`cantor`]: the points `x_s` and intervals `I_s`.
//! - [`kfamily`]: the distinguishing family `𝒦 = {K_n}`.
//! - [`fanmodel`]: truncated 𝒦-fans in three variants, sums of fans.
//! - [`analysis`]: leg traces, 𝒦-fan certificates, endpoint-space probes,
//!   endpoint-free boxes.
//! - [`zerodim`]: the locator of a point of zero-dimensionality.

pub mod analysis;
pub mod cantor;
pub mod config;
pub mod error;
pub mod fanmodel;
pub mod format;
pub mod kfamily;
pub mod rat;
pub mod render;
pub mod report;
pub mod seqindex;
pub mod zerodim;

pub use error::{FanError, Result};
pub use rat::Rat;
pub use seqindex::{SeqIndex, TruncationBounds};
