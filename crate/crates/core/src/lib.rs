pub mod geometry;
pub mod sim;
pub mod spline;
pub mod perception;
pub mod planning;
pub mod control;
pub mod ftg;
pub mod harness;
