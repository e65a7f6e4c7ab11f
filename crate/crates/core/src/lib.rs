pub mod group;
pub mod padic;
pub mod graded;
pub mod dist;
pub mod mahler;
pub mod format;
pub mod verify;
pub mod cli;
