//! Private information retrieval from MDS-coded storage with colluding,
//! Byzantine and nonresponsive servers, built on star products of
//! generalized Reed–Solomon codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`] : GF(p) arithmetic, dense matrices, Kronecker/Khatri–Rao products.
//! * [`codes`] : linear and GRS codes, duals, star products, decoding.
//! * [`storage`] : files and the coded storage `Y = X·G`.
//! * [`scheme`] : query generation, linear responses, decoders, masking,
//!   and the full support-rank checker.
//! * [`netsim`] : an in-process `n`-server network with adversaries.
//! * [`audit`] : privacy audits and exhaustive/statistical oracles.
//! * [`capacity`] : exact capacity, bound and download-cost formulas.
//! * [`fixtures`] : worked query realizations that are not of full support-rank.

pub mod audit;
pub mod capacity;
pub mod codes;
pub mod field;
pub mod fixtures;
pub mod netsim;
pub mod poly;
pub mod rng;
pub mod scheme;
pub mod storage;
