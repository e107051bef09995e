use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use mcmr_core::Error;

/// Version stamped into every CSV row and JSON document.
pub const FORMAT_VERSION: u32 = 1;

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    /// Bad input or an unmet precondition.
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    /// A result that breaks an invariant the library promises.
    pub fn invariant(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unreachable { .. } => Failure::invariant(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

pub type CmdResult<T = ()> = std::result::Result<T, Failure>;

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> CmdResult<PathBuf> {
    let io = |what: &str, e: std::io::Error| Failure::input(format!("{what} {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(|e| io("cannot create", e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io("cannot write in", e))?;
    tmp.write_all(contents).map_err(|e| io("cannot write in", e))?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| io("cannot persist into", e.error))?;
    Ok(path)
}

/// Prints `contents` and, when an output directory is configured, also
/// saves it there.
pub fn emit(out_dir: Option<&Path>, name: &str, contents: &str) -> CmdResult {
    print!("{contents}");
    if let Some(dir) = out_dir {
        let path = write_atomic(dir, name, contents.as_bytes())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub fn csv_string<R: serde::Serialize>(header: &[&str], rows: &[R]) -> CmdResult<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::invariant(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.serialize(r).map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::invariant(format!("csv encoding failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::invariant(e.to_string()))
}
