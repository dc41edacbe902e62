//! `$rscram$v=1$g=<g>,l=<lambda>$<salt>$<digest>` with unpadded standard
//! base64 for salt and digest.

use std::fmt;

use base64::engine::general_purpose::STANDARD_NO_PAD;
use base64::Engine as _;

use crate::error::{Error, Result};
use crate::hashfn::Digest;

pub const IDENTIFIER: &str = "rscram";

/// Decoded fields of an encoded hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhcParts {
    pub version: u32,
    pub g: u32,
    pub lambda: u32,
    pub salt: Vec<u8>,
    pub digest: Digest,
}

/// An encoded password hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhcString(String);

impl PhcString {
    pub fn encode(parts: &PhcParts) -> PhcString {
        PhcString(format!(
            "${IDENTIFIER}$v={}$g={},l={}${}${}",
            parts.version,
            parts.g,
            parts.lambda,
            STANDARD_NO_PAD.encode(&parts.salt),
            STANDARD_NO_PAD.encode(parts.digest.as_bytes()),
        ))
    }

    pub fn decode(s: &str) -> Result<PhcParts> {
        let fields: Vec<&str> = s.split('$').collect();
        let [empty, id, version, costs, salt, digest] = fields.as_slice() else {
            return Err(bad(format!("expected 5 '$'-separated fields, got {}", fields.len().saturating_sub(1))));
        };
        if !empty.is_empty() {
            return Err(bad("missing leading '$'"));
        }
        if *id != IDENTIFIER {
            return Err(bad(format!("unknown algorithm identifier {id:?}")));
        }
        let version = version
            .strip_prefix("v=")
            .ok_or_else(|| bad("missing v= field"))
            .and_then(parse_uint)?;
        if version != 1 {
            return Err(bad(format!("unsupported version {version}")));
        }
        let (g, lambda) = costs
            .split_once(',')
            .ok_or_else(|| bad("cost field must be g=<int>,l=<int>"))?;
        let g = g.strip_prefix("g=").ok_or_else(|| bad("missing g="))
            .and_then(parse_uint)?;
        let lambda = lambda.strip_prefix("l=").ok_or_else(|| bad("missing l="))
            .and_then(parse_uint)?;
        let salt = STANDARD_NO_PAD
            .decode(salt)
            .map_err(|e| bad(format!("salt: {e}")))?;
        let digest_bytes = STANDARD_NO_PAD
            .decode(digest)
            .map_err(|e| bad(format!("digest: {e}")))?;
        let digest = Digest::from_slice(&digest_bytes)
            .ok_or_else(|| bad(format!("digest has {} bytes, expected 32", digest_bytes.len())))?;
        Ok(PhcParts {
            version,
            g,
            lambda,
            salt,
            digest,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for PhcString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Decode(msg.into())
}

/// Canonical decimal: digits only, no sign, no leading zeros.
fn parse_uint(s: &str) -> Result<u32> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit())
        && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(bad(format!("invalid integer {s:?}")));
    }
    s.parse().map_err(|_| bad(format!("integer {s:?} out of range")))
}
