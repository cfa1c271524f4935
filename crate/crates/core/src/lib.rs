//! Explicit surjective polynomial maps from affine `n`-space onto the
//! complement of an algebraic set `Z = F x W`, with exact emptiness
//! certificates on `Z` and numeric preimage witnesses off it.

pub mod algebra;
pub mod roots;
pub mod construct;
pub mod solver;
pub mod text;
pub mod io;
pub mod verify;
pub mod cli;
