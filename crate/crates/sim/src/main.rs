use std::process::ExitCode;

use clap::Parser;
use descriptor_sim::config::TOLERANCE_ENV;
use descriptor_sim::{main_with, Cli};

fn main() -> ExitCode {
    let env = std::env::var(TOLERANCE_ENV).ok();
    main_with(Cli::parse(), env.as_deref())
}
