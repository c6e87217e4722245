//! Workbench around the supercharacter-theory core: job specs,
//! JSON/CSV serialization, and a content-addressed artifact cache.

pub mod cache;
pub mod export;
pub mod job;
