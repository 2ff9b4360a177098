//! Text file formats for fields and connections.
//!
//! ```text
//! format = epfield-field        (or epfield-connection)
//! version = 1
//! n = 3
//! width = 16
//! height = 16
//! ---
//! <one n×n matrix per line, row-major, whitespace separated>
//! ```
//!
//! Field files list vertex values in row-major vertex order; connection files
//! list East-edge values then North-edge values, each in row-major order of
//! the base vertex. Numbers are written in shortest round-trip form, so
//! write→read is bit-exact.

use std::fmt::Write as _;

use epfield::connection::{DiscreteField, ReducedField};
use epfield::lie::GroupElement;
use epfield::mesh::Mesh;
use nalgebra::DMatrix;
use thiserror::Error;

pub const VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("missing header field '{0}'")]
    MissingField(&'static str),
    #[error("header field '{field}' has invalid value '{value}'")]
    BadValue { field: String, value: String },
    #[error("unknown header field '{0}'")]
    UnknownField(String),
    #[error("header line {line} is not of the form 'key = value'")]
    BadHeaderLine { line: usize },
    #[error("header field 'version' is {0}; only version {VERSION} is supported")]
    UnsupportedVersion(u32),
    #[error("missing '---' separator after the header")]
    MissingSeparator,
    #[error("expected {expected} matrices, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("matrix {index} (line {line}): {reason}")]
    BadMatrix { index: usize, line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Field,
    Connection,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Field => "epfield-field",
            Kind::Connection => "epfield-connection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub kind: Kind,
    pub n: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Field(DiscreteField),
    Connection(ReducedField),
}

fn write_header(out: &mut String, h: Header) {
    let _ = write!(
        out,
        "format = {}\nversion = {VERSION}\nn = {}\nwidth = {}\nheight = {}\n---\n",
        h.kind.tag(),
        h.n,
        h.width,
        h.height
    );
}

fn write_matrix(out: &mut String, m: &DMatrix<f64>) {
    let mut first = true;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{:?}", m[(r, c)]);
        }
    }
    out.push('\n');
}

pub fn write_field(field: &DiscreteField) -> String {
    let mesh = field.mesh();
    let mut out = String::new();
    write_header(&mut out, Header { kind: Kind::Field, n: field.dim(), width: mesh.width(), height: mesh.height() });
    for g in field.values() {
        write_matrix(&mut out, g.matrix());
    }
    out
}

pub fn write_connection(omega: &ReducedField) -> String {
    let mesh = omega.mesh();
    let mut out = String::new();
    write_header(&mut out, Header { kind: Kind::Connection, n: omega.dim(), width: mesh.width(), height: mesh.height() });
    for g in omega.east_values().iter().chain(omega.north_values()) {
        write_matrix(&mut out, g.matrix());
    }
    out
}

fn parse_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<Header, FormatError> {
    let (mut kind, mut version, mut n, mut width, mut height) = (None, None, None, None, None);
    let mut separated = false;
    for (line, text) in lines.by_ref() {
        let text = text.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if text == "---" {
            separated = true;
            break;
        }
        let (key, value) = text.split_once('=').ok_or(FormatError::BadHeaderLine { line })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || FormatError::BadValue { field: key.to_string(), value: value.to_string() };
        let at_least = |min: usize| match value.parse::<usize>() {
            Ok(x) if x >= min => Ok(Some(x)),
            _ => Err(bad()),
        };
        match key {
            "format" => {
                kind = Some(match value {
                    "epfield-field" => Kind::Field,
                    "epfield-connection" => Kind::Connection,
                    _ => return Err(bad()),
                })
            }
            "version" => version = Some(value.parse::<u32>().map_err(|_| bad())?),
            "n" => n = at_least(1)?,
            "width" => width = at_least(2)?,
            "height" => height = at_least(2)?,
            other => return Err(FormatError::UnknownField(other.to_string())),
        }
    }
    let kind = kind.ok_or(FormatError::MissingField("format"))?;
    let version = version.ok_or(FormatError::MissingField("version"))?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let header = Header {
        kind,
        n: n.ok_or(FormatError::MissingField("n"))?,
        width: width.ok_or(FormatError::MissingField("width"))?,
        height: height.ok_or(FormatError::MissingField("height"))?,
    };
    if !separated {
        return Err(FormatError::MissingSeparator);
    }
    Ok(header)
}

fn parse_matrix(n: usize, index: usize, line: usize, text: &str) -> Result<GroupElement, FormatError> {
    let bad = |reason: String| FormatError::BadMatrix { index, line, reason };
    let values = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| bad(format!("'{t}' is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != n * n {
        return Err(bad(format!("expected {} entries, found {}", n * n, values.len())));
    }
    GroupElement::new(DMatrix::from_row_slice(n, n, &values)).map_err(|e| bad(e.to_string()))
}

/// Parses either file kind.
pub fn parse(text: &str) -> Result<Payload, FormatError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let header = parse_header(&mut lines)?;
    let mesh = Mesh::new(header.width, header.height).expect("dimensions checked");
    let expected = match header.kind {
        Kind::Field => mesh.grid().vertex_count(),
        Kind::Connection => mesh.grid().edge_count(),
    };
    let body: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
    if body.len() != expected {
        return Err(FormatError::WrongCount { expected, found: body.len() });
    }
    let values = body
        .iter()
        .enumerate()
        .map(|(k, (line, text))| parse_matrix(header.n, k, *line, text))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match header.kind {
        Kind::Field => Payload::Field(DiscreteField::new(mesh, values).expect("counts checked")),
        Kind::Connection => {
            let mut east = values;
            let north = east.split_off(mesh.grid().east_count());
            Payload::Connection(ReducedField::new(mesh, east, north).expect("counts checked"))
        }
    })
}
