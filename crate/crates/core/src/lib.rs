//! Exact simulation of reflection-based adiabatic state preparation on
//! random MAX-2SAT instances, with a closed-form Grover baseline and the
//! harness that compares the two by time to solution.

pub mod cli;
pub mod dynamics;
pub mod eigensolve;
pub mod grover;
pub mod hamiltonian;
pub mod instance;
pub mod linalg;
pub mod schedule;
pub mod seed;
pub mod study;
