//! Report types for the `frontsheaf` binary.

pub mod report;
