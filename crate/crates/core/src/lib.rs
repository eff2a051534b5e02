pub mod bench;
pub mod cfl;
pub mod config;
pub mod error;
pub mod mood;
pub mod rkdesign;
pub mod solver;
pub mod spectral;
