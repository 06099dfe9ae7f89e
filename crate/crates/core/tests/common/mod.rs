#![allow(dead_code)]

use std::sync::Arc;

use reparam_lab::config::{Config, DEFAULT_CONFIG};
use reparam_lab::fuchsian::{InvariantObservable, Surface};

pub fn default_config() -> Config {
    Config::parse(DEFAULT_CONFIG).expect("default config")
}

pub fn surface() -> Arc<Surface> {
    Surface::octagon().expect("octagon surface")
}

/// The default time change.
pub fn psi() -> InvariantObservable {
    let config = default_config();
    config.observable(&config.surface().unwrap()).unwrap()
}
