//! Sublinear approximate k-clique counting for graphs of bounded arboricity,
//! in the degree / neighbor / pair query model.
//!
//! The randomized estimator lives in [`estimator`]; [`exact`] and
//! [`reference`] compute the quantities it approximates so that each
//! component can be checked on small graphs.

pub mod estimator;
pub mod exact;
pub mod exec;
pub mod generators;
pub mod graph;
pub mod reference;
pub mod rng;
pub mod sampler;
