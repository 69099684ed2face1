//! Generalized polarization tensors of planar domains: forward computation via
//! a Nyström discretization of the Neumann-Poincaré operator, and shape
//! recovery from the tensor's numerical kernel (boundary polynomial, level-set
//! tracing, arc-graph enumeration, candidate ranking).

pub mod export;
pub mod geometry;
pub mod inversion;
pub mod levelset;
pub mod pipeline;
pub mod topology;
pub mod nptensor;
pub mod poly2d;
