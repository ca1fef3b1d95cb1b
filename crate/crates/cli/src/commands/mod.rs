pub mod detect;
pub mod geometry;
pub mod report;
pub mod wall;
