//! Exact cone-constrained transports between finitely supported measures.

pub mod geometry;
pub mod instance;
pub mod linalg;
pub mod oracle;
pub mod paving;
pub mod polar;
pub mod poussin;
pub mod ratlp;
pub mod rational;
pub mod transport;
