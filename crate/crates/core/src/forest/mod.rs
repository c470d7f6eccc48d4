//! Graphs of forests: slide moves, paths, cycle decomposition and the
//! size-changing maps between forest modules.

mod labelled;
mod permutograph;

pub use labelled::*;
pub use permutograph::*;

#[cfg(test)]
mod tests;
