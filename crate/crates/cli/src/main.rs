use std::process::ExitCode;

use nocollapse::config::OUT_DIR_ENV;

fn main() -> ExitCode {
    let env_out_dir = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(Into::into);
    ExitCode::from(nocollapse::main_with_args(std::env::args_os(), env_out_dir))
}
