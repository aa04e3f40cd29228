//! Channel specification files.
//!
//! ```json
//! {
//!   "input_size": 2,
//!   "output_size": 2,
//!   "W": [[0.89, 0.11], [0.11, 0.89]],
//!   "P_X": [0.5, 0.5],
//!   "prefix": { "P_XU": [[1.0, 0.0], [0.3, 0.7]], "P_U": [0.5, 0.5] }
//! }
//! ```
//!
//! Matrices are row-major, either nested (one array per input) or flat.
//! With a prefix, `P_XU` has one row per auxiliary symbol `u` over the
//! `input_size` symbols of `X`, and every command works on the effective
//! channel `U -> Z` with input law `P_U`.

use std::fmt::Write as _;

use secexp::prob::compose_prefix;
use secexp::{Channel, Distribution};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Matrix {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl Matrix {
    fn rows(self, inputs: usize, outputs: usize, name: &str) -> Result<Vec<Vec<f64>>, CliError> {
        let rows = match self {
            Matrix::Nested(rows) => rows,
            Matrix::Flat(flat) => {
                if outputs == 0 || flat.len() != inputs * outputs {
                    return Err(CliError::Spec(format!(
                        "{name} has {} entries, expected {inputs} x {outputs}",
                        flat.len()
                    )));
                }
                flat.chunks(outputs).map(<[f64]>::to_vec).collect()
            }
        };
        if rows.len() != inputs || rows.iter().any(|r| r.len() != outputs) {
            return Err(CliError::Spec(format!("{name} must be {inputs} x {outputs}")));
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrefix {
    #[serde(rename = "P_XU")]
    p_xu: Matrix,
    #[serde(rename = "P_U")]
    p_u: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    input_size: usize,
    output_size: usize,
    #[serde(rename = "W")]
    w: Matrix,
    #[serde(rename = "P_X")]
    p_x: Vec<f64>,
    #[serde(default)]
    prefix: Option<RawPrefix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prefix {
    pub p_xu: Channel,
    pub p_u: Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub w: Channel,
    pub p_x: Distribution,
    pub prefix: Option<Prefix>,
    /// SHA-256 of the bytes the spec was parsed from.
    pub sha256: String,
}

impl ChannelSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
        let w = Channel::new(raw.w.rows(raw.input_size, raw.output_size, "W")?)?;
        if raw.p_x.len() != raw.input_size {
            return Err(CliError::Spec(format!("P_X must have {} entries", raw.input_size)));
        }
        let p_x = Distribution::new(raw.p_x)?;
        let prefix = match raw.prefix {
            None => None,
            Some(pre) => {
                let nu = pre.p_u.len();
                let p_xu = Channel::new(pre.p_xu.rows(nu, raw.input_size, "P_XU")?)?;
                Some(Prefix {
                    p_xu,
                    p_u: Distribution::new(pre.p_u)?,
                })
            }
        };
        let spec = ChannelSpec {
            w,
            p_x,
            prefix,
            sha256: hex(&Sha256::digest(text.as_bytes())),
        };
        spec.effective_channel()?.check_outputs_reachable()?;
        Ok(spec)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The channel every command works on: `W`, or `P_XU` followed by `W`.
    pub fn effective_channel(&self) -> Result<Channel, CliError> {
        Ok(match &self.prefix {
            None => self.w.clone(),
            Some(pre) => compose_prefix(&pre.p_xu, &self.w)?,
        })
    }

    pub fn effective_input(&self) -> Distribution {
        match &self.prefix {
            None => self.p_x.clone(),
            Some(pre) => pre.p_u.clone(),
        }
    }

    /// Canonical JSON with every number at 17 significant digits, so a
    /// re-parse reproduces the matrices bit for bit.
    pub fn normalized(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"input_size\": {},", self.w.inputs());
        let _ = writeln!(out, "  \"output_size\": {},", self.w.outputs());
        let _ = writeln!(out, "  \"W\": {},", matrix(&self.w, "  "));
        match &self.prefix {
            None => {
                let _ = writeln!(out, "  \"P_X\": {}", vector(self.p_x.masses()));
            }
            Some(pre) => {
                let _ = writeln!(out, "  \"P_X\": {},", vector(self.p_x.masses()));
                let _ = writeln!(out, "  \"prefix\": {{");
                let _ = writeln!(out, "    \"P_XU\": {},", matrix(&pre.p_xu, "    "));
                let _ = writeln!(out, "    \"P_U\": {}", vector(pre.p_u.masses()));
                let _ = writeln!(out, "  }}");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn vector(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| number(x)).collect();
    format!("[{}]", items.join(", "))
}

fn matrix(c: &Channel, indent: &str) -> String {
    let rows: Vec<String> = c.rows().map(|r| format!("{indent}  {}", vector(r))).collect();
    format!("[\n{}\n{indent}]", rows.join(",\n"))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
