//! Exterior algebra, G2 geometry and the Fueter condition on projectable
//! 3-planes, with the homogeneous example models and the analytic PDE and
//! gauge-theory checks built on top of them.

pub mod exterior;
pub mod g2;
pub mod rng;
pub mod splitting;
pub mod fueter;
pub mod models;
pub mod pde;
pub mod fm;
pub mod report;
