//! The chapters of `book/` compiled as rustdoc so `cargo test` runs every
//! code listing, and the README's example with them. One module per
//! chapter keeps failures attributable.

#[doc = include_str!("../../../README.md")]
pub mod readme {}

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/control.md")]
pub mod control {}

#[doc = include_str!("../../../book/src/kolmogorov.md")]
pub mod kolmogorov {}

#[doc = include_str!("../../../book/src/counterexample.md")]
pub mod counterexample {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
