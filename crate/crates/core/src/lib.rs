pub mod cancel;
pub mod cli;
pub mod error;
pub mod exactla;
pub mod groups;
pub mod io;
pub mod lowerbound;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
