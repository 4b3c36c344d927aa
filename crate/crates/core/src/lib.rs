//! Core pipeline for answering programming queries with synthesized snippets.
//!
//! The offline side mines structured call sequences and variable names from a
//! MiniLang corpus ([`extract`]) and trains a query-word-to-API translation
//! model from clickthrough data ([`align`]). The online side expands a query
//! into an API posterior, retrieves matching call-sequence groups by sparse
//! cosine similarity ([`rank`]) and synthesizes ranked snippets from them
//! ([`synth`]).

pub mod align;
pub mod extract;
pub mod minilang;
pub mod rank;
pub mod registry;
pub mod scs;
pub mod synth;
