//! Compiles the guide under `book/` as doctests.

#[cfg(doctest)]
mod chapters {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/streams.md")]
    mod streams {}
    #[doc = include_str!("../../../book/src/sigma00.md")]
    mod sigma00 {}
    #[doc = include_str!("../../../book/src/setfn.md")]
    mod setfn {}
    #[doc = include_str!("../../../book/src/fipp.md")]
    mod fipp {}
    #[doc = include_str!("../../../book/src/fan.md")]
    mod fan {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
