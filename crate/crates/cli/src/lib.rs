pub mod bundle;
pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod suite;
pub mod svg;
