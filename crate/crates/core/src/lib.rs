//! Build weighted coauthorship networks from publication records, detect
//! communities, score their structural segregation via the dominant eigenpair
//! of row-normalized submatrices, locate them with k-core decomposition, and
//! compare segregation categories with citation metrics and nonparametric
//! statistics.

pub mod citations;
pub mod community;
pub mod cores;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod segregation;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};

/// Cap the global worker pool used for per-community and per-researcher
/// parallelism. Effective once per process; later calls report failure.
pub fn set_thread_cap(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_ok()
}

/// Quote a CSV field when it contains a delimiter, quote, or newline.
/// Researcher ids are opaque strings and may contain anything.
pub fn csv_escape(field: &str) -> std::borrow::Cow<'_, str> {
    if field.contains([',', '"', '\n', '\r']) {
        std::borrow::Cow::Owned(format!("\"{}\"", field.replace('"', "\"\"")))
    } else {
        std::borrow::Cow::Borrowed(field)
    }
}

/// Format a float with 12 significant digits, decimal where compact and
/// scientific otherwise. Used for all CSV output so reruns compare bytewise.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}
