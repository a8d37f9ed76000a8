//! `DEPNN1` model files: a plain-text manifest followed by a raw
//! little-endian row-major payload.
//!
//! ```text
//! DEPNN1
//! meta <count>
//! <key>=<value>
//! vocab <name> <count>
//! <entry>
//! tensors <count>
//! <name>\t<shape>\t<f64|f32>\t<byte offset>
//! <payload>
//! ```
//!
//! Keys, values, vocabulary entries and tensor names are percent-escaped;
//! shapes are written `RxC` for matrices and `N` for vectors. Offsets are
//! relative to the first payload byte.

use std::fmt;
use std::str::FromStr;

use super::tensor::{Shape, Tensor};
use super::NumericsError;
use crate::text::{escape, unescape};

pub const MAGIC: &str = "DEPNN1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dtype {
    #[default]
    F64,
    F32,
}

impl Dtype {
    fn width(self) -> usize {
        match self {
            Dtype::F64 => 8,
            Dtype::F32 => 4,
        }
    }
}

impl fmt::Display for Dtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dtype::F64 => "f64",
            Dtype::F32 => "f32",
        })
    }
}

impl FromStr for Dtype {
    type Err = NumericsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" => Ok(Dtype::F64),
            "f32" => Ok(Dtype::F32),
            other => Err(NumericsError::Format(format!("unknown dtype {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelFile {
    pub meta: Vec<(String, String)>,
    pub vocabs: Vec<(String, Vec<String>)>,
    pub tensors: Vec<(String, Tensor)>,
}

impl ModelFile {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn vocab(&self, name: &str) -> Option<&[String]> {
        self.vocabs.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn to_bytes(&self, dtype: Dtype) -> Vec<u8> {
        let mut head = format!("{MAGIC}\nmeta {}\n", self.meta.len());
        for (k, v) in &self.meta {
            head.push_str(&format!("{}={}\n", escape(k), escape(v)));
        }
        for (name, entries) in &self.vocabs {
            head.push_str(&format!("vocab {} {}\n", escape(name), entries.len()));
            for e in entries {
                head.push_str(&escape(e));
                head.push('\n');
            }
        }
        head.push_str(&format!("tensors {}\n", self.tensors.len()));
        let mut offset = 0usize;
        for (name, t) in &self.tensors {
            head.push_str(&format!("{}\t{}\t{dtype}\t{offset}\n", escape(name), t.shape()));
            offset += t.shape().len() * dtype.width();
        }

        let mut out = head.into_bytes();
        out.reserve(offset);
        for (_, t) in &self.tensors {
            for &x in t.data() {
                match dtype {
                    Dtype::F64 => out.extend_from_slice(&x.to_le_bytes()),
                    Dtype::F32 => out.extend_from_slice(&(x as f32).to_le_bytes()),
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NumericsError> {
        let mut cursor = Lines { bytes, pos: 0 };
        let bad = |what: &str| NumericsError::Format(what.to_string());

        if cursor.next_line()? != MAGIC {
            return Err(bad("missing DEPNN1 header"));
        }
        let mut file = ModelFile::default();

        let meta_count = parse_count(cursor.next_line()?, "meta")?;
        for _ in 0..meta_count {
            let line = cursor.next_line()?;
            let (k, v) = line.split_once('=').ok_or_else(|| bad("meta line without '='"))?;
            file.meta.push((unesc(k)?, unesc(v)?));
        }

        let tensor_count = loop {
            let line = cursor.next_line()?;
            let mut parts = line.split(' ');
            match parts.next() {
                Some("vocab") => {
                    let name = unesc(parts.next().ok_or_else(|| bad("vocab without name"))?)?;
                    let n: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad("vocab without count"))?;
                    let mut entries = Vec::with_capacity(n);
                    for _ in 0..n {
                        entries.push(unesc(cursor.next_line()?)?);
                    }
                    file.vocabs.push((name, entries));
                }
                Some("tensors") => break parse_count(line, "tensors")?,
                _ => return Err(bad(&format!("unexpected manifest line {line:?}"))),
            }
        };

        let mut manifest = Vec::with_capacity(tensor_count);
        for _ in 0..tensor_count {
            let line = cursor.next_line()?;
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(bad(&format!("bad tensor line {line:?}")));
            }
            let shape = parse_shape(f[1])?;
            let dtype: Dtype = f[2].parse()?;
            let offset: usize = f[3].parse().map_err(|_| bad("bad offset"))?;
            manifest.push((unesc(f[0])?, shape, dtype, offset));
        }

        let payload = &bytes[cursor.pos..];
        for (name, shape, dtype, offset) in manifest {
            let w = dtype.width();
            let end = offset + shape.len() * w;
            let raw = payload
                .get(offset..end)
                .ok_or_else(|| bad(&format!("payload truncated in tensor {name}")))?;
            let data = raw
                .chunks_exact(w)
                .map(|c| match dtype {
                    Dtype::F64 => f64::from_le_bytes(c.try_into().unwrap()),
                    Dtype::F32 => f32::from_le_bytes(c.try_into().unwrap()) as f64,
                })
                .collect();
            file.tensors.push((name, Tensor::from_vec(shape, data)?));
        }
        Ok(file)
    }
}

struct Lines<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<&'a str, NumericsError> {
        let rest = &self.bytes[self.pos..];
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| NumericsError::Format("unexpected end of manifest".into()))?;
        self.pos += nl + 1;
        std::str::from_utf8(&rest[..nl]).map_err(|_| NumericsError::Format("manifest is not UTF-8".into()))
    }
}

fn unesc(s: &str) -> Result<String, NumericsError> {
    unescape(s).ok_or_else(|| NumericsError::Format(format!("bad escape in {s:?}")))
}

fn parse_count(line: &str, keyword: &str) -> Result<usize, NumericsError> {
    line.strip_prefix(keyword)
        .and_then(|r| r.strip_prefix(' '))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| NumericsError::Format(format!("expected '{keyword} <count>', got {line:?}")))
}

fn parse_shape(s: &str) -> Result<Shape, NumericsError> {
    let bad = || NumericsError::Format(format!("bad shape {s:?}"));
    match s.split_once('x') {
        Some((r, c)) => Ok(Shape::Matrix(
            r.parse().map_err(|_| bad())?,
            c.parse().map_err(|_| bad())?,
        )),
        None => Ok(Shape::Vector(s.parse().map_err(|_| bad())?)),
    }
}
