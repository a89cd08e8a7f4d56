//! Exact kinematic analysis of geared mechanisms.
//!
//! A mechanism is described as a directed graph whose nodes are links, whose
//! spanning-tree edges are turning pairs (revolute joints) and whose co-tree
//! edges are gear meshes. From that description the crate derives the
//! input-to-output angular-velocity relation (the transfer matrix) by two
//! independent routes:
//!
//! * [`matroid`] — builds the incidence / path / cycle-basis matrices of the
//!   digraph, attaches a screw to every joint axis and solves the cycle
//!   moment equations exactly;
//! * [`tt`] — detects the carrier (transfer vertex) of every gear pair on the
//!   oriented tree, writes one terminal equation per mesh plus the f-circuit
//!   decompositions, and solves the resulting system over the gear-ratio
//!   symbols.
//!
//! All arithmetic is exact: entries are rationals or rational functions in
//! the declared symbols ([`algebra`]). The two solvers, together with a
//! deliberately independent brute-force [`oracle`], cross-validate each other
//! ([`crosscheck`]).

pub mod algebra;
pub mod crosscheck;
pub mod digraph;
pub mod matroid;
pub mod mechanism;
pub mod oracle;
pub mod sample;
pub mod tt;
