//! 128-bit state digests over a canonical byte encoding.
//!
//! Callers feed state through [`CanonicalWriter`] in a sorted order; every
//! variable-length item is length-prefixed so distinct states never share an
//! encoding. The hash is XXH3-128 and the digest prints as 32 hex digits.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use xxhash_rust::xxh3::xxh3_128;

use crate::domain::canonical_bits;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest([u8; 16]);

impl Digest {
    pub fn of_bytes(bytes: &[u8]) -> Self {
        Digest(xxh3_128(bytes).to_be_bytes())
    }

    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        Some(Digest(bytes.try_into().ok()?))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Digest::from_hex(&s).ok_or_else(|| serde::de::Error::custom("expected 32 hex digits"))
    }
}

#[derive(Debug, Default)]
pub struct CanonicalWriter {
    buf: Vec<u8>,
}

impl CanonicalWriter {
    pub fn new(domain: &str) -> Self {
        let mut w = Self::default();
        w.str(domain);
        w
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(canonical_bits(v))
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.u64(s.len() as u64);
        self.buf.extend_from_slice(s.as_bytes());
        self
    }

    pub fn f64s(&mut self, vs: &[f64]) -> &mut Self {
        self.u64(vs.len() as u64);
        for v in vs {
            self.f64(*v);
        }
        self
    }

    pub fn finish(&self) -> Digest {
        Digest::of_bytes(&self.buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_prefix_separates_items() {
        let a = CanonicalWriter::new("t").str("ab").str("c").finish();
        let b = CanonicalWriter::new("t").str("a").str("bc").finish();
        assert_ne!(a, b);
    }

    #[test]
    fn hex_round_trip() {
        let d = CanonicalWriter::new("x").f64s(&[0.25, -1.0]).finish();
        assert_eq!(Digest::from_hex(&d.to_hex()), Some(d));
        let json = serde_json::to_string(&d).unwrap();
        let back: Digest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(Digest::from_hex("abc").is_none());
    }

    #[test]
    fn signed_zero_hashes_equal() {
        let a = CanonicalWriter::new("z").f64(0.0).finish();
        let b = CanonicalWriter::new("z").f64(-0.0).finish();
        assert_eq!(a, b);
    }
}
