//! Independently checkable synchronization certificates.

use serde::{Deserialize, Serialize};

use crate::automaton::Dfa;
use crate::error::{Error, Result};
use crate::word::{eval_word, format_word, parse_word, CompressedWord};

/// A word claimed to send every state to `sink`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncCertificate {
    pub word: CompressedWord,
    pub sink: usize,
    pub length: u64,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    word: String,
    length: u64,
    sink: usize,
}

impl SyncCertificate {
    pub fn new(word: CompressedWord, sink: usize) -> Self {
        let length = word.len();
        Self { word, sink, length }
    }

    /// JSON object with fields `word` (text form), `length` and `sink`.
    pub fn to_json(&self) -> Result<String> {
        let json = CertificateJson {
            word: format_word(&self.word)?,
            length: self.length,
            sink: self.sink,
        };
        Ok(serde_json::to_string(&json).expect("plain struct serializes"))
    }

    /// Parses the JSON form. The stored length is kept as given, so a
    /// tampered length is caught by [`verify_certificate`].
    pub fn from_json(text: &str) -> Result<Self> {
        let json: CertificateJson = serde_json::from_str(text).map_err(|e| Error::Format {
            line: e.line(),
            message: e.to_string(),
        })?;
        Ok(Self {
            word: parse_word(&json.word)?,
            sink: json.sink,
            length: json.length,
        })
    }
}

/// True iff the word acts on `dfa` as the constant map to `cert.sink` and
/// the recorded length matches.
pub fn verify_certificate(dfa: &Dfa, cert: &SyncCertificate) -> bool {
    if cert.length != cert.word.len() || cert.sink >= dfa.n() {
        return false;
    }
    match eval_word(dfa, &cert.word) {
        Ok(m) => m.constant_value() == Some(cert.sink),
        Err(_) => false,
    }
}
