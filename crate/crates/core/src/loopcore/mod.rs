//! The σ-twisted toroidal Lie algebra and the map ψ into it.

mod kahler;
mod lie;
mod psi;
mod toroidal;

pub use kahler::{kahler_reduce, KahlerBasis, KahlerElement, KahlerError};
pub use lie::{LieVector, SimpleLieAlgebra};
pub use psi::{
    check_grading, check_pairing_table, check_psi_homomorphism, expected_pairing, highest_root,
    Part, PsiMap, PsiReading,
};
pub use toroidal::{toroidal_bracket, LoopElement, ToroidalElement};
