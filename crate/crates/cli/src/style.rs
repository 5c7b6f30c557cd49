use std::io::IsTerminal;

/// ANSI is used only on a terminal and when `TRF_NO_COLOR` is unset.
pub fn color_enabled() -> bool {
    std::env::var_os("TRF_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

pub fn status(passed: bool) -> String {
    let word = if passed { "PASS" } else { "FAIL" };
    if !color_enabled() {
        return word.to_string();
    }
    let code = if passed { 32 } else { 31 };
    format!("\x1b[{code}m{word}\x1b[0m")
}
