//! HTTP API and command line front ends for the ontology file manager.

pub mod api;
pub mod cli;
pub mod config;
pub mod error;
pub mod service;
pub mod snapshot;
