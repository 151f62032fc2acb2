//! Exact arithmetic for the total power operation on the K(1)-localized
//! height-2 Morava E-theory ring `W((h))^p`, together with the symmetric-group
//! rank counts governing its module structure.
//!
//! The pipeline: construct the degree-(p+1) model polynomial `w(h, a)`
//! presenting the ring of degree-p subgroups ([`wpoly`]), solve for its unique
//! root `a*` in the Laurent ring by the exact fixed-point recursion with a
//! Hensel-Newton cross-check ([`solver`]), assemble the power operation from
//! the composition-sum coefficients `d_{i,tau}` and specialize it along the
//! root ([`power`]). Everything runs over fixed-precision p-adic residues
//! ([`padic`]) and windowed Laurent series ([`laurent`]); sublattice and
//! orbit-class counts live in [`ranks`].
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the whole crate is safe to use from multiple threads.

pub mod check;
mod error;
pub mod laurent;
pub mod output;
pub mod padic;
pub mod power;
pub mod ranks;
pub mod solver;
pub mod wpoly;

pub use error::{Error, Result};
pub use laurent::{HLaurentSeries, MinExpPolicy, SeriesPrecision};
pub use padic::{is_prime, PadicContext, PadicInt};
pub use power::{
    assemble_power_sum, d_coefficient, d_coefficient_oracle, frobenius_check, psi_e, psi_f,
    psi_f_with, specialize_alpha, CompositionSpec, FrobeniusCheck, PsiEPolynomial,
};
pub use ranks::{
    sublattice_count_bruteforce, sublattice_count_closed, zpn_set_count, RankIndex, RankQuery,
    RankResult,
};
pub use solver::{
    default_window, eq12_closed_forms, solve_alpha_fixed_point, solve_alpha_newton, SolveMethod,
    SolveReport,
};
pub use wpoly::{w_coefficients, w_expand_oracle, w_polynomial, AlphaPolynomial, HPolynomial};
