//! Compiles a library of constraint-solver components and a problem
//! meta-component into a finite-domain configuration problem, then solves
//! or enumerates it. Each solution names one implementation for every
//! active requirement, i.e. one valid solver architecture.

pub mod adl;
pub mod encoder;
pub mod configuration;
pub mod csp;
pub mod oracle;
pub mod emit;
pub mod cli;

pub use configuration::Configuration;
