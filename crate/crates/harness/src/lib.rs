//! Configuration, initial data, run orchestration, persistence, plots and
//! the acceptance checks behind the `sqg` command line.

pub mod config;
pub mod error;
pub mod plots;
pub mod recipe;
pub mod run;
pub mod selfcheck;
pub mod store;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use recipe::{generate, DataRecipe, RecipeKind};
