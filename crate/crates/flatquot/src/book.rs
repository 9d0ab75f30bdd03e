//! Doc-test bridge for the guide in `book/`: every Rust snippet in the
//! chapters compiles and runs under `cargo test --doc`, so the book cannot
//! drift from the crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/exact-arithmetic.md")]
pub mod exact_arithmetic {}

#[doc = include_str!("../../../book/src/polynomials.md")]
pub mod polynomials {}

#[doc = include_str!("../../../book/src/matrices.md")]
pub mod matrices {}

#[doc = include_str!("../../../book/src/finite-groups.md")]
pub mod finite_groups {}

#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}

#[doc = include_str!("../../../book/src/flatness.md")]
pub mod flatness {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
