//! The guide's chapters double as documentation tests: every fenced Rust
//! block in `book/src/*.md` compiles and runs against the current crate on
//! `cargo test`, keeping the book and the code in lockstep.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[doc = include_str!("../../../book/src/trees.md")]
mod trees {}

#[doc = include_str!("../../../book/src/time-and-tense.md")]
mod time_and_tense {}

#[doc = include_str!("../../../book/src/adverbs.md")]
mod adverbs {}

#[doc = include_str!("../../../book/src/aspect.md")]
mod aspect {}

#[doc = include_str!("../../../book/src/prover.md")]
mod prover_chapter {}

#[doc = include_str!("../../../book/src/suite-and-cli.md")]
mod suite_and_cli {}
