//! Helpers for the end-to-end acceptance battery in `tests/`.

use std::path::PathBuf;

/// Path of the `qsep` binary built alongside the running test.
///
/// Test executables live in `target/<profile>/deps`; the binary sits one level
/// up. `cargo test --workspace` builds it before any test runs. A lone
/// `cargo test -p qsep-e2e` does not, so build `qsep-cli` first in that case.
pub fn qsep_binary() -> Result<PathBuf, String> {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let dir = exe
        .parent()
        .and_then(|deps| deps.parent())
        .ok_or_else(|| format!("unexpected test location {}", exe.display()))?;
    let bin = dir.join(format!("qsep{}", std::env::consts::EXE_SUFFIX));
    if bin.is_file() {
        Ok(bin)
    } else {
        Err(format!("{} not found; run `cargo build -p qsep-cli` first", bin.display()))
    }
}
