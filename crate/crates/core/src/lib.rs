pub mod cli;
pub mod domains;
pub mod error;
pub mod geometry;
pub mod io;
pub mod loops;
pub mod operad;
pub mod rational;
pub mod render;
pub mod schedule;
pub mod shuffle;

pub use error::{Error, Result};
pub use rational::Rational;
