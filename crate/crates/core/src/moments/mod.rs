//! Exact moment polynomials of the plain and modified GUE/Wishart ensembles,
//! and the limit laws they converge to.

mod exact;
mod limits;
mod polynomial;

pub use exact::{
    gamma_modified_moment_leading, gue_modified_moment, gue_modified_moment_of_order,
    gue_plain_moment, gue_plain_moment_of_order, gue_word_moment, gue_word_normalized_limit,
    second_moment_poly, wishart_modified_moment, wishart_plain_moment, Balance, LeadingTerm,
    MomentCaps,
};
pub use limits::{mp_moment, sc_moment, LimitLaw};
pub use polynomial::MomentPolynomial;
