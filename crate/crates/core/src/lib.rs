pub mod cli;
pub mod error;
pub mod hyper;
pub mod kvol;
pub mod optim;
pub mod origami;
pub mod saddle;
pub mod slope;
pub mod veech;
pub mod verify;

pub use error::{Error, Result};
