//! Steady-state scattering, output entanglement and stability of a
//! three-mode nonreciprocal loop (NRL) and its two-mode-squeezer baseline.
//!
//! All matrices live in the quadrature basis `(X1, P1, X2, P2, X3, P3)` with
//! vacuum variance 1/2. Rates are in arbitrary common units; at resonance
//! every result depends only on the cooperativities and the loop phase.

pub mod circuits;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod model;
pub mod pumpplan;
pub mod scattering;

pub use error::{Error, Result};
pub use linalg::{ComplexMat, RealMat};
pub use model::{LinearNetwork, LoopParams, ModePair, ModeParams, TmsParams};

