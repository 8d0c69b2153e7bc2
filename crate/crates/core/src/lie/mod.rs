//! Lie brackets, Lie polynomials and the symmetrised Lyndon basis.

mod bracket;
mod pbw;
mod polynomial;

pub use bracket::{br, bracket_expand, leaf, standard_bracketing, BracketTerm};
pub use pbw::{is_lie_element, pbw_coordinates, pbw_expand, PbwCoordinates, PbwKey};
pub use polynomial::{symmetrised_product, symmetrised_product_lie, LiePolynomial};
