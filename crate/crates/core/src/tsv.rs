//! Minimal TSV reading shared by the file formats.
//!
//! Lines starting with `#` are metadata and skipped, as are blank lines. The
//! first remaining line must equal the expected header exactly.

use std::path::Path;

use crate::{Error, Result};

pub(crate) struct Record<'a> {
    pub line: usize,
    pub fields: Vec<&'a str>,
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn parse<'a>(source: &str, text: &'a str, header: &[&str]) -> Result<Vec<Record<'a>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (hline, found) = lines.next().ok_or_else(|| Error::Parse {
        path: source.to_string(),
        line: 0,
        msg: format!("missing header `{}`", header.join("\\t")),
    })?;
    let found: Vec<&str> = found.split('\t').map(str::trim).collect();
    if found != header {
        return Err(Error::Parse {
            path: source.to_string(),
            line: hline,
            msg: format!("expected header `{}`", header.join("\\t")),
        });
    }
    let mut out = Vec::new();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() != header.len() {
            return Err(Error::Parse {
                path: source.to_string(),
                line,
                msg: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
        out.push(Record { line, fields });
    }
    Ok(out)
}

pub(crate) fn field<T: std::str::FromStr>(source: &str, rec: &Record<'_>, idx: usize, name: &str) -> Result<T> {
    rec.fields[idx].trim().parse().map_err(|_| Error::Parse {
        path: source.to_string(),
        line: rec.line,
        msg: format!("cannot parse {name} from `{}`", rec.fields[idx]),
    })
}
