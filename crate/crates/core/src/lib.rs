//! Workbench for the bimodal logic `S4.1 ∗ S4 + <>1 []2 (<>1 p -> []1 p)`:
//! formulas, Kripke and bitopological semantics, frame correspondence,
//! filtration, bounded decision, proof checking and the tree and path-space
//! constructions at finite truncation.

pub mod correspond;
pub mod decision;
pub mod formula;
pub mod kripke;
pub mod pmorph;
pub mod random;
pub mod topo;
pub mod trees;
