//! Reduced representation rings of amalgamated products of finite groups.

#![allow(clippy::needless_range_loop)]

pub mod amalgam;
pub mod characters;
pub mod cli;
pub mod cyclotomic;
pub mod group;
pub mod ktheory;
pub mod linalg;
pub mod modp;
pub mod presentation;
pub mod rational;
pub mod repring;
