//! One module per subcommand; each resolves settings, computes, and
//! writes a report, machine tables, and a run manifest.

pub mod analyze;
pub mod estimate;
pub mod oracle;
pub mod panel;
pub mod premium;
pub mod scenario;
pub mod simulate;
