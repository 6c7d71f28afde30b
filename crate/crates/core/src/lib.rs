//! Synchronizing words for random deterministic automata.
//!
//! The fast path ([`fastsync::synchronize`]) shrinks the state set with the
//! structured words `u = a^α`, `v = u(bu)^β` and `w = v(bbv)^γ`, then merges
//! the few surviving states pairwise with words of the form `b^j w`. Every
//! result is a [`SyncCertificate`] that [`verify_certificate`] checks from
//! scratch. The [`oracle`] module provides exact and greedy baselines and
//! [`stats`] the Monte Carlo experiments.

pub mod automaton;
pub mod certificate;
pub mod error;
pub mod fastsync;
pub mod funcgraph;
pub mod mapping;
pub mod oracle;
pub mod randgen;
pub mod stats;
pub mod textio;
pub mod word;

pub use automaton::{Dfa, PartialDfa, LETTER_A, LETTER_B};
pub use certificate::{verify_certificate, SyncCertificate};
pub use error::{Error, Result};
pub use fastsync::{synchronize, StageReport, SyncOutcome, Thresholds};
pub use funcgraph::{decompose, CycleDecomposition, SubMapping};
pub use mapping::{compose, image, mapping_power, StateMapping};
pub use randgen::Rng;
pub use word::{eval_word, format_word, parse_word, word_length, CompressedWord};
