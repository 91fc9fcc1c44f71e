use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn config_hash(value: &impl Serialize) -> anyhow::Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// CSV with a leading `# qsl <version> seed=<seed> config=<hash>` line.
pub fn write_csv(path: &Path, seed: u64, hash: &str, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "# qsl {VERSION} seed={seed} config={hash}")?;
    qsl_core::table::write_csv(&mut buf, header, rows)?;
    fs::write(path, buf).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Pretty JSON on standard output.
pub fn print_json(value: &impl Serialize) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_hex() {
        let h = config_hash(&serde_json::json!({"a": 1})).unwrap();
        assert_eq!(h.len(), 64);
        assert_eq!(h, config_hash(&serde_json::json!({"a": 1})).unwrap());
        assert_ne!(h, config_hash(&serde_json::json!({"a": 2})).unwrap());
    }
}
