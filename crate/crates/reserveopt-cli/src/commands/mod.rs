//! The five subcommands. Each module owns its argument struct and a
//! `run(cli, args)` entry point returning a [`CmdResult`](crate::CmdResult).

pub mod calibrate;
pub mod simulate;
pub mod sweep;
pub mod value;
pub mod verify;

use clap::ValueEnum;

/// Whether a command works with the single-option problem or the
/// lifetime (renewal) problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Single,
    Lifetime,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Lifetime => "lifetime",
        }
    }
}
