//! An exact computer-algebra kernel for calculus with nilpotent
//! infinitesimals over the rationals.
//!
//! The kernel computes in finite-dimensional quotient algebras
//! `Q[X1..Xn]/(X1^m1, ..., Xn^mn, f1, ..., fk)`, represents infinitesimal
//! spaces by those algebras, decides quasi-colimit diagrams by exact linear
//! algebra, and builds differential-geometric operations (tangent sums,
//! strong differences, Lie brackets of vector fields) on top of the unique
//! extension solver. Everything is exact: identities are decided, never
//! approximated.

pub mod calculus;
pub mod inftype;
pub mod linalg;
pub mod microlinear;
pub mod parse;
pub mod poly;
pub mod quasicolim;
pub mod vectorfield;
pub mod verify;
pub mod weil;
