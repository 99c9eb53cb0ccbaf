pub mod abstract_run;
pub mod metrics;
pub mod mix;
pub mod parse;
pub mod smatch;
