pub mod basis;
pub mod binary;
pub mod cli;
pub mod cv;
pub mod error;
pub mod gprior;
pub mod linalg;
pub mod model_space;
pub mod quadrature;
pub mod selector;
pub mod simulation;
pub mod special;
pub mod transform;
