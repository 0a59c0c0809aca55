//! CSV and JSON writers. Every float is written with `{:e}` (shortest
//! round-trip scientific), which is locale-independent and byte-stable.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use moldeflect::histogram::{Histogram, SampleSummary};

pub fn fmt(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_histogram_csv(
    path: &Path,
    header_value: &str,
    h: &Histogram,
    extra: Option<(&str, &dyn Fn(f64) -> f64)>,
) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    match extra {
        Some((name, _)) => writeln!(
            f,
            "bin_lo_{header_value},bin_hi_{header_value},mass,density,{name}"
        )?,
        None => writeln!(
            f,
            "bin_lo_{header_value},bin_hi_{header_value},mass,density"
        )?,
    }
    let w = h.bin_width();
    for i in 0..h.bins() {
        let lo = h.lo + i as f64 * w;
        let hi = lo + w;
        match extra {
            Some((_, func)) => writeln!(
                f,
                "{},{},{},{},{}",
                fmt(lo),
                fmt(hi),
                fmt(h.masses[i]),
                fmt(h.density(i)),
                fmt(func(h.bin_center(i)))
            )?,
            None => writeln!(
                f,
                "{},{},{},{}",
                fmt(lo),
                fmt(hi),
                fmt(h.masses[i]),
                fmt(h.density(i))
            )?,
        }
    }
    f.flush()
}

pub fn write_lines_csv(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for row in rows {
        writeln!(f, "{}", row.join(","))?;
    }
    f.flush()
}

pub fn summary_json(s: &SampleSummary) -> serde_json::Value {
    serde_json::json!({
        "n": s.n,
        "mean": s.mean,
        "std": s.std,
        "min": s.min,
        "max": s.max,
        "quantiles": s.quantiles.iter().map(|(p, v)| serde_json::json!({"p": p, "value": v})).collect::<Vec<_>>(),
    })
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{}", serde_json::to_string_pretty(value)?)?;
    f.flush()
}

/// Writes the run manifest next to the data files.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    echo: &serde_json::Value,
    seed: u64,
    started: Instant,
    failures: serde_json::Value,
    outputs: &[&str],
) -> std::io::Result<()> {
    let manifest = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "wall_clock_s": started.elapsed().as_secs_f64(),
        "config": echo,
        "failures": failures,
        "outputs": outputs,
    });
    write_json(&dir.join("manifest.json"), &manifest)
}
