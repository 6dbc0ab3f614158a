//! A finite-model workbench for deciding which tasks on classical and
//! quantum substrates are possible, and for checking the information
//! theory built on top of that notion.

pub mod algebra;
pub mod commands;
pub mod error;
pub mod info;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod principles;
pub mod sim;
pub mod superinfo;

pub use error::{KitError, KitResult};
