//! Shared plumbing for the `qubopath` binary and its HTTP service.
//!
//! Both front ends call into [`pipeline`], which renders every response body,
//! so the CLI's `--json` output and the service's bodies are byte-identical.

pub mod pipeline;
pub mod service;
