//! Library side of the `isochron` command: the JSON system format, the
//! subcommand implementations and the benchmark harness.

pub mod bench;
pub mod commands;
pub mod system_file;

pub use commands::{CliError, ExitKind};
pub use system_file::SystemFile;
