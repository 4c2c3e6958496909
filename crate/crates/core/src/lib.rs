// Negated float comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bump;
pub mod dispersion;
pub mod evolve;
pub mod numerics;
pub mod oscquad;
pub mod polynewton;
pub mod decayfit;
