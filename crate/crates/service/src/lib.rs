//! Live planning service and command-line front end for [`nextpm`].
//!
//! [`engine::Engine`] holds the persisted rescheduling loop, [`api`]
//! exposes it over HTTP and [`cli`] wraps the batch tools.

pub mod api;
pub mod cli;
pub mod engine;
pub mod error;
pub mod store;

pub use engine::Engine;
pub use error::{Result, ServiceError};
