//! Headless analysis of Java sources on top of a lossless concrete syntax
//! tree: Javadoc mining, per-class metrics, Feature Envy detection with an
//! automated Move Method refactoring, and license text recognition.

pub mod cli;
pub mod docminer;
pub mod envy;
pub mod license;
pub mod metrics;
pub mod model;
pub mod movemethod;
pub mod report;
pub mod syntax;
