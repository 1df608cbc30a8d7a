pub mod abelian;
pub mod config;
pub mod error;
pub mod factorization;
pub mod predict;
pub mod primary;
pub mod ratio;
pub mod tblock;
pub mod verify;

pub use abelian::{FiniteAbelianGroup, GSequence, GroupElement};
pub use error::{Error, Result};
pub use primary::{PrimaryElement, PrimaryMonoidSpec};
pub use tblock::{AmbientElement, BElement, BlockTable, Component, Coords, InstanceSpec};
