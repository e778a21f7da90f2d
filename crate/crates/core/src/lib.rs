pub mod error;
pub mod graph;
pub mod linalg;
pub mod numfmt;
pub mod spectral;
pub mod zoo;
pub mod morse;
pub mod partition;
pub mod verify;
