pub mod builtins;
pub mod criteria;
pub mod extension;
pub mod format;
pub mod gf2;
pub mod gf256;
pub mod pipeline;
pub mod semifield;
