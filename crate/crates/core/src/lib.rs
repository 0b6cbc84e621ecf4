//! Graph difference operators, their closed-form Green's matrices, and the
//! analysis/synthesis union-of-subspaces models they induce.

pub mod circulant;
pub mod cli;
pub mod figures;
pub mod graph;
pub mod greens;
pub mod matrix;
pub mod oracle;
pub mod parallel;
pub mod signals;
pub mod subspace;
pub mod uos;
pub mod verify;
