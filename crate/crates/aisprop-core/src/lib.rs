//! Core algorithms for Atom-in-SMILES molecular property prediction.
//!
//! This crate is `no_std` (with `alloc`) and carries no I/O: SMILES parsing
//! into molecular graphs, AIS tokenization, vocabulary construction,
//! molecular weight, evaluation metrics, the sequence regressors with manual
//! reverse-mode gradients, and the stacked bagging ensemble. File formats,
//! CSV ingestion, and the command-line pipeline live in the companion
//! `aisprop-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod ais;
pub mod data;
pub mod descriptors;
pub mod elements;
pub mod ensemble;
pub mod metrics;
pub mod mol;
pub mod nn;
pub mod rng;
pub mod vocab;
