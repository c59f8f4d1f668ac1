//! Exact computer algebra for subgroup-indexed diagrams of rational
//! commutative differential graded algebras over finite abelian groups.

pub mod abelian;
pub mod cdga;
pub mod exact;
pub mod orbit;
pub mod constructions;
pub mod structures;
