//! Exact symbolic toolkit for split Lie 2-algebroids, their representations
//! up to homotopy, adjoint and coadjoint modules, Weil algebras and degree-2
//! Poisson structures.

#![allow(clippy::needless_range_loop)]

pub mod adjoint;
pub mod cli;
pub mod algebroid;
pub mod bundles;
pub mod dgmod;
pub mod gca;
pub mod io;
pub mod lie2;
pub mod poisson;
pub mod linalg;
pub mod report;
pub mod scalars;
pub mod weil;
