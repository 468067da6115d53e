//! Configuration, material files, scans, reports and verification suites.

pub mod config;
pub mod kvfile;
pub mod matfile;
pub mod report;
pub mod scan;
pub mod verify;
