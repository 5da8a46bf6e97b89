pub mod engine;
pub mod error;
pub mod gaussian;
pub mod graph;
pub mod pde;
pub mod sensing;
pub mod superposition;
pub mod walk;
