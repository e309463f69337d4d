use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automata::{dfa_from_dot, dfa_from_json, dfa_to_dot, dfa_to_json, Dfa};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelFormat {
    Dot,
    Json,
}

impl FromStr for ModelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(Self::Dot),
            "json" => Ok(Self::Json),
            _ => Err(Error::InvalidParameter(format!("unknown model format `{s}`"))),
        }
    }
}

impl fmt::Display for ModelFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dot => "dot",
            Self::Json => "json",
        })
    }
}

pub fn export_model(model: &Dfa, format: ModelFormat) -> String {
    match format {
        ModelFormat::Dot => dfa_to_dot(model),
        ModelFormat::Json => dfa_to_json(model),
    }
}

pub fn import_model(text: &str, format: ModelFormat) -> Result<Dfa> {
    match format {
        ModelFormat::Dot => dfa_from_dot(text),
        ModelFormat::Json => dfa_from_json(text),
    }
}
