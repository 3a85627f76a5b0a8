//! Service layer for the worksheet pipeline.
//!
//! Wires the pure core to the outside world: chat-completion providers
//! ([`gateway`]), the four agents ([`agents`]), file persistence
//! ([`store`]), external export toolchains ([`render`]), the session
//! lifecycle ([`orchestrator`]), configuration ([`config`]), the REST
//! surface ([`api`]) and the command line ([`cli`]).

pub mod agents;
pub mod api;
pub mod cli;
pub mod config;
pub mod gateway;
pub mod orchestrator;
pub mod render;
pub mod store;

pub use sheetsmith_core as core;
