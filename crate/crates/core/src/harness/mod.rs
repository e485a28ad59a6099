//! Benchmark corpus, brute-force oracle, reports and the command line.

pub mod bench;
pub mod cli;
pub mod corpus;
pub mod oracle;
