pub mod config;
pub mod report;
pub mod suites;

pub use config::{Grid, Lcg, Suite, SuiteConfig};
pub use report::{Case, Report, ReportHeader, Skip};
pub use suites::{run_suite, SuiteOutput};
