pub mod algdep;
pub mod algebra;
pub mod driver;
pub mod engine;
pub mod frontend;
pub mod groebner;
pub mod recurrence;
