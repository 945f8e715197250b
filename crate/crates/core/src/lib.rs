pub mod cli;
pub mod constructors;
pub mod enumerate;
pub mod error;
pub mod family;
pub mod format;
pub mod iso;
pub mod solver;
pub mod verify;
pub mod workers;

pub use error::{Error, ParseError, Result};
pub use family::{Block, DegreeProfile, SetFamily, Vertex, Violation};
