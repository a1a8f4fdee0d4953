//! Hash-stamped artifacts: JSON reports and CSV tables with metadata sidecars.
//!
//! Every artifact embeds the SHA-256 of its canonicalized configuration, so a
//! file can later prove which run produced it.  CSV data gets a companion
//! `<file>.meta.json` sidecar carrying the config envelope plus a content
//! hash of the CSV bytes; [`verify_artifact`] re-derives both kinds of hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// SHA-256 (hex) of the canonical rendering of a JSON configuration.
///
/// `serde_json::Value` keeps object keys in sorted order, so the compact
/// string form is canonical: it does not depend on struct field order or
/// insertion history.
pub fn config_hash(config: &Value) -> String {
    hex(&Sha256::digest(config.to_string().as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// The envelope every artifact carries: version, config, hash, payload.
pub fn envelope(config: &Value, results: Value) -> Value {
    json!({
        "code_version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "config_hash": config_hash(config),
        "results": results,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::FileAccess {
        path: path.to_owned(),
        source,
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::FileAccess {
        path: path.to_owned(),
        source,
    })
}

/// Write a JSON artifact embedding the config hash.
pub fn write_json(path: &Path, config: &Value, results: Value) -> Result<()> {
    write_bytes(path, format!("{:#}\n", envelope(config, results)).as_bytes())
}

/// Sidecar path for a CSV artifact: `table.csv` → `table.csv.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Write a CSV table (RFC-4180 quoting) plus its metadata sidecar.
///
/// The sidecar embeds the config hash and the SHA-256 of the CSV bytes, so
/// verification covers the table content itself.
pub fn write_csv(
    path: &Path,
    config: &Value,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().expect("in-memory CSV writer");
    write_bytes(path, &bytes)?;
    let meta = envelope(
        config,
        json!({
            "data_file": path.file_name().and_then(|n| n.to_str()),
            "data_sha256": sha256_hex(&bytes),
            "rows": rows.len(),
        }),
    );
    write_bytes(&sidecar_path(path), format!("{meta:#}\n").as_bytes())
}

/// Re-derive the hashes embedded in an artifact and compare.
///
/// Accepts a JSON report, a `.meta.json` sidecar, or a CSV table (resolved
/// through its sidecar).  Returns a human-readable confirmation; a mismatch
/// is [`Error::VerificationFailed`].
pub fn verify_artifact(path: &Path) -> Result<String> {
    if path.extension().is_some_and(|e| e == "csv") {
        let summary = verify_envelope(&sidecar_path(path))?;
        return Ok(format!("{summary} (via sidecar)"));
    }
    verify_envelope(path)
}

fn verify_envelope(path: &Path) -> Result<String> {
    let doc: Value = serde_json::from_slice(&read_bytes(path)?)?;
    let (Some(config), Some(stored)) = (doc.get("config"), doc.get("config_hash")) else {
        return Err(Error::VerificationFailed {
            detail: format!("{}: no embedded config/config_hash", path.display()),
        });
    };
    let stored = stored.as_str().unwrap_or_default();
    let recomputed = config_hash(config);
    if recomputed != stored {
        return Err(Error::VerificationFailed {
            detail: format!(
                "{}: config hash mismatch (stored {stored}, recomputed {recomputed})",
                path.display()
            ),
        });
    }
    let mut summary = format!("{}: config hash ok ({recomputed})", path.display());
    // A sidecar also pins the bytes of the data file next to it.
    if let (Some(file), Some(want)) = (
        doc.pointer("/results/data_file").and_then(Value::as_str),
        doc.pointer("/results/data_sha256").and_then(Value::as_str),
    ) {
        let data_path = path.parent().unwrap_or(Path::new(".")).join(file);
        let got = sha256_hex(&read_bytes(&data_path)?);
        if got != want {
            return Err(Error::VerificationFailed {
                detail: format!(
                    "{}: data hash mismatch (stored {want}, recomputed {got})",
                    data_path.display()
                ),
            });
        }
        summary.push_str(", data hash ok");
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_key_insertion_order() {
        let a: Value = serde_json::from_str(r#"{"u": 0.3, "measure": "cilleruelo"}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"measure": "cilleruelo", "u": 0.3}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        let c: Value = serde_json::from_str(r#"{"measure": "cilleruelo", "u": 0.4}"#).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn json_artifact_roundtrips_through_verification() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let config = json!({"command": "moments", "seed": 7});
        write_json(&path, &config, json!({"mean": 2.25})).unwrap();
        let summary = verify_artifact(&path).unwrap();
        assert!(summary.contains("config hash ok"));

        // Tamper with the embedded config: the hash no longer matches.
        let mut doc: Value =
            serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
        doc["config"]["seed"] = json!(8);
        fs::write(&path, doc.to_string()).unwrap();
        assert!(matches!(
            verify_artifact(&path),
            Err(Error::VerificationFailed { .. })
        ));
    }

    #[test]
    fn csv_sidecar_pins_the_table_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let config = json!({"command": "persistence"});
        let rows = vec![
            vec!["10".to_string(), "0.2929".to_string()],
            vec!["20".to_string(), "0.29,29".to_string()], // needs quoting
        ];
        write_csv(&path, &config, &["L", "persistence"], &rows).unwrap();

        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("L,persistence\n"));
        assert!(text.contains("\"0.29,29\""), "RFC-4180 quoting: {text}");

        let summary = verify_artifact(&path).unwrap();
        assert!(summary.contains("data hash ok"));

        fs::write(&path, "L,persistence\n10,0.3\n").unwrap();
        assert!(matches!(
            verify_artifact(&path),
            Err(Error::VerificationFailed { .. })
        ));
    }

    #[test]
    fn missing_files_surface_their_path() {
        let err = verify_artifact(Path::new("/nonexistent/run.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/run.json"));
    }
}
