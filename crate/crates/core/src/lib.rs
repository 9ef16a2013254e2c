//! Exact linear algebra for weakly triangularizable matrix spaces over
//! small fields: field arithmetic, characteristic polynomials and their
//! splitting, canonical subspaces of `Mat_n(F)`, structural tools and
//! exhaustive searches for the maximal dimension `t_n(F)`.

mod fpoly;

pub mod cli;
pub mod construct;
pub mod field;
pub mod matspace;
pub mod poly;
pub mod search;
pub mod spaces;
pub mod structure;
