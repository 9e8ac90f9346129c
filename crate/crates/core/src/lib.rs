pub mod cli;
pub mod error;
pub mod harness;
pub mod limits;
pub mod markov;
pub mod numeric;
pub mod params;
pub mod spectral;
