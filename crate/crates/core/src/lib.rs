//! Reversible-arithmetic networks for modular exponentiation, their cost
//! accounting, and small simulators to check them.

pub mod arith;
mod emit;
pub mod ir;
pub mod machine;
pub mod minimal;
pub mod sim;
pub mod cost;
pub mod shor;
