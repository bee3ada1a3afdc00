use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Certificate, CertifyError, SampleRecord};
use crate::sampling::SpecConfig;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CertifyError {
    CertifyError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Ids may contain path separators in principle; keep file names flat.
fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

pub fn certificate_file_name(spec: &SpecConfig) -> String {
    format!("cert_{}_{}.json", sanitize(spec.pivot.as_str()), spec.kind.as_str())
}

pub fn sample_log_file_name(spec: &SpecConfig) -> String {
    format!("samples_{}_{}.jsonl", sanitize(spec.pivot.as_str()), spec.kind.as_str())
}

/// Writes via a temporary sibling and a rename, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CertifyError> {
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn write_certificate(path: &Path, cert: &Certificate) -> Result<(), CertifyError> {
    let mut bytes = serde_json::to_vec_pretty(cert).expect("certificates serialize");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_sample_log(path: &Path, records: &[SampleRecord]) -> Result<(), CertifyError> {
    let mut buf = BufWriter::new(Vec::new());
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("records serialize");
        buf.write_all(b"\n").expect("writing to memory");
    }
    write_atomic(path, &buf.into_inner().expect("in-memory buffer"))
}

pub fn read_certificate(path: &Path) -> Result<Certificate, CertifyError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| io_err(path, e))
}

/// Every `cert_*.json` directly under `dir`, in file-name order.
pub fn read_certificates(dir: &Path) -> Result<Vec<Certificate>, CertifyError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("cert_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    paths.iter().map(|p| read_certificate(p)).collect()
}

/// Reads a per-sample log back.
pub fn read_sample_log(path: &Path) -> Result<Vec<SampleRecord>, CertifyError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    BufReader::new(file)
        .lines()
        .map(|l| {
            let l = l.map_err(|e| io_err(path, e))?;
            serde_json::from_str(&l).map_err(|e| io_err(path, e))
        })
        .collect()
}
