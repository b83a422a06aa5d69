//! Document file I/O and reporting.
//!
//! Documents live in a YAML 1.2 subset (see [`yaml`]) with a strict schema
//! (see [`schema`]): required keys, closed enums, unknown keys rejected with
//! their path. Serialization is canonical — stable key order, block
//! collections, shortest round-tripping numbers — so `serialize` is a
//! fixpoint on parsed output and documents diff cleanly under version
//! control. [`render_report`] turns a document into the consolidated
//! Markdown report.

pub mod report;
pub mod schema;
pub mod yaml;

pub use report::{format_percent, render_report};
pub use schema::SchemaError;
pub use yaml::{SyntaxError, Value};

use thiserror::Error;

use crate::htd::HtdDocument;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseDocumentError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// Parses document text into a structurally valid [`HtdDocument`].
/// Cross-reference rules are not checked here — that is
/// [`crate::htd::validate_document`]'s job on the parsed value.
pub fn parse_document(text: &str) -> Result<HtdDocument, ParseDocumentError> {
    let value = yaml::parse(text)?;
    Ok(schema::decode_document(&value)?)
}

/// Serializes a document to its canonical text form. Guarantees
/// `parse_document(serialize_document(doc)) == doc` and byte-stable output.
pub fn serialize_document(doc: &HtdDocument) -> String {
    yaml::emit(&schema::encode_document(doc))
}
