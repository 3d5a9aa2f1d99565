//! Continuous-variable teleportation in the characteristic-function picture.
//!
//! Inputs are one-mode states given by their Wigner characteristic functions;
//! the Squeezed Bell-like resource enters only through its transfer function
//! `τ(ξ)`, so the teleported state is `χ_out(ξ) = τ(ξ) χ_in(g ξ)`. On top of
//! that the crate extracts moments and cumulants, photon-number statistics,
//! overlap-based distances, and optimizes the resource parameter `Δ`.

pub mod channel;
pub mod cli;
pub mod error;
pub mod moments;
pub mod numerics;
pub mod optimize;
pub mod phasespace;
pub mod photonstats;
pub mod states;

pub use channel::{teleport, OutputState};
pub use error::{Error, Result};
pub use phasespace::{convert_ordering, eval_at, CharFn, Ordering, PhasePoint};
pub use states::{input_charfn, transfer_fn, Channel, InputState, SqueezedBellResource};
