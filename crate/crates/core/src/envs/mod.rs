//! Concrete parameterized environments.

pub mod cabinet;
pub mod lava;
pub mod windy;

pub use cabinet::canonical_cabinet_game;
pub use lava::{load_map, GridMap, LavaWorld};
pub use windy::WindyWalk;
