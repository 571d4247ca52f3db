//! Desk-scale simulation of three boson-sampling models and exact checks of
//! the identities that connect them.
//!
//! * **Twofold scattershot** ([`tsbs`]): M two-mode squeezed vacua, one leg of
//!   each sent through `U_A`, the other through `U_B`, photon counting on both
//!   sides. With equal squeezing the conditional output distribution equals
//!   standard boson sampling through the time-unfolded circuit.
//! * **Squeezed vacuum input** ([`tsbs::squeezed_joint_probability`]): the
//!   same setup built from 2M single-mode squeezed vacua and beam splitters.
//! * **Gaussian measurements** ([`homodyne`]): single photons through `U_G`
//!   followed by eight-port homodyne detection, i.e. projection onto displaced
//!   squeezed states.
//!
//! Everything runs in fixed photon-number sectors of the Fock space
//! ([`fock`]), on top of dense complex matrices ([`matrix`]) and Ryser
//! permanents ([`permanent`]). [`sampling`] provides exact samplers and the
//! statistical validators used to check them.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod haar;
pub mod homodyne;
pub mod matrix;
pub mod permanent;
pub mod quadrature;
pub mod sampling;
pub mod table;
pub mod tsbs;

pub use error::{Error, Result};
pub use fock::{OccupationPattern, SectorBasis, SectorState};
pub use haar::RandomSeed;
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
