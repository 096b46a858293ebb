//! Instance formats, a seeded generator, a brute-force oracle and the
//! benchmark harness behind the `lcsp` binary.

pub mod format;
pub mod dataset;
pub mod oracle;
pub mod generate;
pub mod bench;
