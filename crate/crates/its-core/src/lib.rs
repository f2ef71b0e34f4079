//! Independent transversal blow-ups in multipartite graphs.
//!
//! An instance is a graph whose vertices are partitioned into blocks with
//! all edges crossing between blocks. An independent transversal blow-up of
//! size s (ITS) picks s vertices from every block so that the union is an
//! independent set. This crate provides the data model, exact reference
//! search, randomized solvers driven by degree statistics, reductions, and
//! instance generators, all fully deterministic under fixed seeds.

pub mod aux;
pub mod factor;
pub mod gen;
pub mod graph;
pub mod io;
pub mod lll;
pub mod math;
pub mod nibble;
pub mod oracle;
