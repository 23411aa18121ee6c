//! Runs the guide's code snippets as doc-tests, keeping `book/` honest.

#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}

#[doc = include_str!("../../../book/src/pricing.md")]
pub mod pricing {}

#[doc = include_str!("../../../book/src/null-sets.md")]
pub mod null_sets {}

#[doc = include_str!("../../../book/src/martingales.md")]
pub mod martingales {}

#[doc = include_str!("../../../book/src/worked-examples.md")]
pub mod worked_examples {}
