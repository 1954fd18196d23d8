//! CSV and JSON emission. Every CSV row ends with the master seed, the
//! replica count and a provenance tag; JSON documents carry the same in a
//! `provenance` object. Files are opened write-once.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Identifies the run that produced an output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub replicas: u64,
    /// `scenerywalk-<version>+cfg.<12 hex digits of the config digest>`.
    pub tag: String,
}

impl Provenance {
    pub fn new(seed: u64, replicas: u64, config: &impl Serialize) -> Self {
        let json = serde_json::to_vec(config).expect("config serializes");
        Provenance {
            seed,
            replicas,
            tag: format!("scenerywalk-{}+cfg.{}", env!("CARGO_PKG_VERSION"), digest12(&json)),
        }
    }
}

/// First 12 hex digits of the SHA-256 of `bytes`.
pub fn digest12(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// A named tolerance, reported so readers can tell tuned slack from results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub name: String,
    pub value: f64,
    pub source: String,
}

impl Tolerance {
    pub fn new(name: &str, value: f64, source: &str) -> Self {
        Tolerance {
            name: name.into(),
            value,
            source: source.into(),
        }
    }
}

/// Rows of strings under a fixed header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal; empty for a missing value.
pub fn fmt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

pub const PROVENANCE_COLUMNS: [&str; 3] = ["seed", "replicas", "provenance"];

/// Writes `table` with the provenance columns appended to every row.
pub fn write_csv<W: Write>(out: W, table: &Table, prov: &Provenance) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut header = table.header.clone();
    header.extend(PROVENANCE_COLUMNS.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(csv_err)?;
    for row in &table.rows {
        let mut r = row.clone();
        r.push(prov.seed.to_string());
        r.push(prov.replicas.to_string());
        r.push(prov.tag.clone());
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    provenance: &'a Provenance,
    tolerances: &'a [Tolerance],
    data: &'a T,
}

/// Pretty-printed JSON `{provenance, tolerances, data}` with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(
    mut out: W,
    data: &T,
    prov: &Provenance,
    tolerances: &[Tolerance],
) -> Result<()> {
    let doc = Document {
        provenance: prov,
        tolerances,
        data,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Opens `path` for writing, refusing to overwrite an existing file.
pub fn create_new(path: &Path) -> Result<File> {
    OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(path)
        .map_err(|e| {
            if e.kind() == std::io::ErrorKind::AlreadyExists {
                Error::Io(format!("{} already exists; outputs are write-once", path.display()))
            } else {
                e.into()
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_carry_provenance() {
        let prov = Provenance::new(7, 100, &("cfg", 1));
        let mut t = Table::new(&["alpha", "value"]);
        t.push(vec![fmt_f64(Some(1.0)), fmt_f64(None)]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &t, &prov).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "alpha,value,seed,replicas,provenance");
        assert_eq!(lines.next().unwrap(), format!("1,,7,100,{}", prov.tag));
        assert_eq!(prov.tag.rsplit('.').next().unwrap().len(), 12);
    }

    #[test]
    fn digest_depends_on_config() {
        let a = Provenance::new(1, 1, &1);
        let b = Provenance::new(1, 1, &2);
        assert_ne!(a.tag, b.tag);
        assert_eq!(a, Provenance::new(1, 1, &1));
    }

    #[test]
    fn json_is_stable() {
        let prov = Provenance::new(3, 4, &"x");
        let mut a = Vec::new();
        let mut b = Vec::new();
        let tol = [Tolerance::new("eps", 0.1, "pilot")];
        write_json(&mut a, &vec![1.5, 2.0], &prov, &tol).unwrap();
        write_json(&mut b, &vec![1.5, 2.0], &prov, &tol).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(v["provenance"]["seed"], 3);
        assert_eq!(v["data"][0], 1.5);
    }

    #[test]
    fn files_are_write_once() {
        let dir = std::env::temp_dir().join(format!("sw-out-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("a.csv");
        let _ = std::fs::remove_file(&p);
        create_new(&p).unwrap();
        assert!(create_new(&p).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
