//! Deterministic output plumbing: fixed float formatting, CSV and JSON
//! assembly, atomic file writes, and a bounded thread pool for grids.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Fixed 17-significant-digit scientific formatting for all emitted floats.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text from a header and pre-formatted rows.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Result envelope with raw (already formatted) numeric tokens in `data`.
pub fn json_envelope(
    family: &str,
    params: &str,
    method: &str,
    columns: &[&str],
    rows: &[Vec<String>],
) -> String {
    let cols = columns
        .iter()
        .map(|c| format!("\"{c}\""))
        .collect::<Vec<_>>()
        .join(",");
    let data = rows
        .iter()
        .map(|row| format!("[{}]", row.join(",")))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{{\"family\":{},\"params\":{},\"method\":{},\"columns\":[{}],\"data\":[{}]}}\n",
        json_string(family),
        json_string(params),
        json_string(method),
        cols,
        data
    )
}

/// JSON string literal with escaping.
pub fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

/// Writes to stdout, or atomically (temp file + rename) to `path`.
pub fn write_out(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        None => io::stdout().write_all(content.as_bytes()),
        Some(p) => {
            let tmp = sibling_temp(p);
            fs::write(&tmp, content)?;
            fs::rename(&tmp, p).inspect_err(|_| {
                let _ = fs::remove_file(&tmp);
            })
        }
    }
}

fn sibling_temp(p: &Path) -> PathBuf {
    let name = p
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    p.with_file_name(format!(".{name}.tmp{}", std::process::id()))
}

/// Thread budget: `CTQW_THREADS` when set, otherwise the machine's
/// available parallelism.
pub fn thread_count() -> usize {
    std::env::var("CTQW_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Order-preserving parallel map over `0..n` with contiguous chunks.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = thread_count().min(n.max(1));
    if threads <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let mut out = Vec::with_capacity(n);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let f = &f;
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(n);
                scope.spawn(move || (lo..hi).map(f).collect::<Vec<T>>())
            })
            .collect();
        for h in handles {
            out.extend(h.join().expect("worker panicked"));
        }
    });
    out
}
