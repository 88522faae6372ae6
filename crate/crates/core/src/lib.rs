pub mod jet;
pub mod geometry;
pub mod symbol;
pub mod projection;
pub mod asymmetry;
pub mod gauge;
pub mod kernel;
pub mod cli;
