pub mod algebra;
pub mod cli;
pub mod conjugacy;
pub mod enumerate;
pub mod error;
pub mod fc;
pub mod group;
pub mod length;
pub mod operator;
pub mod presets;
pub mod rd;
pub mod traces;

pub use error::{Error, Result};
pub use group::{BackendId, BackendSpec, Generator, GroupBackend, GroupElement, KindTag, NormalForm};
