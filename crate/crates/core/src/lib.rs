pub mod cechgysin;
pub mod chain;
pub mod cli;
pub mod corner;
pub mod filt;
pub mod fixtures;
pub mod gf2;
pub mod simp;
pub mod torus;
pub mod weight;
