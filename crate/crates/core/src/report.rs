//! Output formatting shared by the CLI and the web demo.
//!
//! Floats are written with 17 significant digits so that identical runs
//! produce byte-identical artifacts.

use std::io;
use std::str::FromStr;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::Result;

/// Unit used when reporting entropies and capacities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Converts a value in nats into this unit.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }

    /// `"{stem}_{suffix}"`, e.g. `min_entropy_nats`.
    pub fn field(self, stem: &str) -> String {
        format!("{stem}_{}", self.suffix())
    }
}

impl FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(format!("unknown unit {other:?}")),
        }
    }
}

/// Formats a float with 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // Keeps `-0` and `0` identical.
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as compact JSON with fixed-width floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
