//! Estimation of the axial rotation angle between two views of an object
//! turning about a fixed vertical axis, from 2D point correspondences.
//!
//! The motion has a single degree of freedom, so one correspondence already
//! determines the angle in closed form. That closed form drives a one-point
//! RANSAC estimator with least-squares refinement, alongside histogram and
//! median baselines, a synthetic scene generator, and a deterministic batch
//! experiment harness.

pub mod estimators;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod synthetic;

pub mod seeds;
