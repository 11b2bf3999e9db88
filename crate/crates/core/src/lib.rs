//! Stream processors as residual comodels of the input theory.
//!
//! The crate covers free term trees and the normal forms of three effect
//! theories (input, non-empty choice, probability), comodels and their
//! behaviours, residual comodels (stream processors, transition systems,
//! generative systems), tensor composition, and the copower normal form
//! used to make processors maximally lazy.

pub mod alphabet;
pub mod cli;
pub mod comodel;
pub mod error;
pub mod extensional;
pub mod format;
pub mod residual;
pub mod sample;
pub mod tensor;
pub mod theory;

pub use error::{Error, Result};
