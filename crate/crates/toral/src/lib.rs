//! Exact homological algebra for the abelian category of quasi-coherent
//! extended sheaves over the space of closed subgroups of a torus.

pub mod adams;
pub mod cells;
pub mod corpus;
pub mod graded;
pub mod lattice;
pub mod ofmod;
pub mod resolve;
pub mod selfcheck;
pub mod sheaf;
