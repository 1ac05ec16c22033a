//! Guide chapters compiled as doc-tests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/field.md")]
pub mod field {}
#[doc = include_str!("../../../book/src/dangers.md")]
pub mod dangers {}
#[doc = include_str!("../../../book/src/uniform.md")]
pub mod uniform {}
#[doc = include_str!("../../../book/src/adaptive.md")]
pub mod adaptive {}
#[doc = include_str!("../../../book/src/distsim.md")]
pub mod distsim {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
