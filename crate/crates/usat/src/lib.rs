//! Uncertainty structure analysis for holistic test descriptions (HTD).
//!
//! This crate replaces spreadsheet-based uncertainty bookkeeping for complex
//! energy-system experiments with a single machine-checkable document and a
//! set of analysis engines on top of it:
//!
//! - [`htd`] — the typed document model (test case, qualification strategy,
//!   test/experiment specification, purposes of investigation, parameters)
//!   and its semantic validation rules.
//! - [`uncertainty`] — parameter uncertainty representations (points,
//!   intervals, distributions, empirical data, p-boxes), seeded sampling, a
//!   small arithmetic-expression language for metric formulas, and two
//!   propagation methods (interval arithmetic and Monte Carlo).
//! - [`sbd`] — the system-breakdown tree of the system configuration, DOT
//!   export, and coverage checks for the component-by-component factor walk.
//! - [`screening`] — one-at-a-time (OAT) screening designs, execution against
//!   an external model runner, elementary effects, and factor ranking.
//! - [`delay`] — empirical characterization of recorded loop-delay logs:
//!   even-width binning, relative probabilities, and summary statistics.
//! - [`docio`] — the YAML document format (parse / canonical serialize) and
//!   the consolidated Markdown report.
//! - [`cli`] — the `usat` command-line workflow tying it all together.
//!
//! Start with the runnable examples (`cargo run --example full_workflow`) or
//! the fixture documents under `fixtures/`.

pub mod cli;
pub mod delay;
pub mod docio;
pub mod htd;
pub mod sbd;
pub mod screening;
pub mod uncertainty;
