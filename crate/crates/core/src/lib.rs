//! Wave atom domain spread-spectrum watermarking for 8-bit grayscale
//! images.
//!
//! The pipeline: [`wave_atom::forward`] turns a square image into scale
//! bands, [`watermark::embed`] spreads each message bit over one keyed
//! scale-4 block, [`attacks`] degrades the result, and
//! [`watermark::extract`] recovers the bits blindly by correlation.
//! [`metrics`] and the [`cli`] sweep driver report BER, MSE, PSNR and NC.

pub mod attacks;
pub mod cli;

mod dct;
pub mod error;
pub mod image_io;
pub mod keystream;
pub mod metrics;
pub mod synth;
pub mod watermark;
pub mod wave_atom;

pub use error::{Error, Result};
pub use image_io::{Image, RealField};
pub use keystream::WatermarkKey;
pub use watermark::{EmbedParams, Message};
pub use wave_atom::{BlockAddress, CoefficientSet};
