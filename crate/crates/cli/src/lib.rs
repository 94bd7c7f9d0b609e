pub mod audit;
pub mod cli;
pub mod experiment;
pub mod families;
pub mod verify;

pub use cli::run_cli;
