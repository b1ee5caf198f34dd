//! Loss modelling and resonance fitting for superconducting coplanar-waveguide
//! resonators.
//!
//! The crate is `no_std` (with `alloc`) and holds every numerical piece of the
//! analysis chain:
//!
//! - [`special`]: modified Bessel functions `K0`, `I0` (and first order) and the
//!   complete elliptic integral of the first kind.
//! - [`mbcore`]: BCS gap, Mattis-Bardeen low-temperature complex conductivity.
//! - [`oracle`]: the full Mattis-Bardeen integrals by adaptive quadrature, used
//!   to check the closed forms.
//! - [`impedance`]: surface impedance, CPW geometric inductance and the
//!   quasiparticle loss tangent of a line.
//! - [`lossmodel`]: TLS loss, internal quality factor composition and
//!   quasiparticle densities.
//! - [`resfit`]: notch-type `S21` model, calibration, circle and phase fits,
//!   Levenberg-Marquardt refinement and synthetic traces.
//! - [`photon`]: drive-power budget and average photon number.
//!
//! Units are SI, with energies in eV. Frequencies enter the public API in Hz
//! where noted and are converted to angular frequency once.

#![no_std]
#![cfg_attr(docsrs, feature(doc_cfg))]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod consts;
mod error;
pub mod impedance;
pub mod lossmodel;
pub mod mbcore;
pub mod oracle;
pub mod photon;
pub mod quad;
pub mod resfit;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
