//! Small I/O and formatting helpers shared by the writers.

use std::io::{self, Write};
use std::path::Path;

/// Writes `bytes` to a temporary file in the target directory and renames it
/// into place, so readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Formats a float with six significant digits, trimming trailing zeros.
/// Non-finite values print as `inf`, `-inf` or `NaN`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    // The exponent is taken after rounding, which can carry into the next
    // decade (999999.5 -> 1e6).
    let rounded = format!("{:.5e}", x);
    let (mantissa, e) = rounded.split_once('e').expect("exponent form");
    let e: i32 = e.parse().expect("exponent");
    if !(-5..6).contains(&e) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{e}");
    }
    let decimals = (5 - e).max(0) as usize;
    let fixed = format!("{:.*}", decimals, x);
    let out = trim_zeros(&fixed);
    if out == "-0" {
        "0".into()
    } else {
        out
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
