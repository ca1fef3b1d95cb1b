//! Core kernel for planning modular photobioreactor facade walls and
//! monitoring the algae cultivated inside them.
//!
//! The crate is organised around the life cycle of a brick wall:
//!
//! - [`geom`] — the parametric polyhedral cell family (twist-hull cells,
//!   platonic reference solids, duality, symmetry predicates, OBJ export).
//! - [`assembly`] — tessellating cells into rows, stacking rows into walls,
//!   bills of materials and the magnetic connection model.
//! - [`piping`] — embedded pipe ports, rotation-dependent couplings and
//!   single-pump reachability over an assembled wall.
//! - [`vision`] — nine-grid Gaussian colour sampling of camera frames,
//!   calibrated against a pure-green control patch.
//! - [`similarity`] — the ten colour similarity/distance measures and the
//!   signed-difference convention used downstream.
//! - [`regression`] — polynomial fits of difference-vs-days, age estimation
//!   and replacement alerts.
//! - [`config`] — strict JSON configuration shared by all tools.

pub mod assembly;
pub mod config;
pub mod geom;
pub mod piping;
pub mod regression;
pub mod similarity;
pub mod vision;
