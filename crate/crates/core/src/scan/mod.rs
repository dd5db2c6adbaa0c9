//! Grid scans, figure data and verification sweeps.

pub mod commands;
pub mod config;
pub mod ensemble;
pub mod figures;
pub mod output;
pub mod verify;
