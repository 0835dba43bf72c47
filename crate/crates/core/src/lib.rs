pub mod analytics;
pub mod annotate;
pub mod matcher;
pub mod statement;
pub mod store;
pub mod taxonomy;
pub mod text;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/taxonomy.md")]
    mod taxonomy {}
    #[doc = include_str!("../../../book/src/annotating.md")]
    mod annotating {}
    #[doc = include_str!("../../../book/src/statements.md")]
    mod statements {}
    #[doc = include_str!("../../../book/src/store.md")]
    mod store {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
    #[doc = include_str!("../../../book/src/interfaces.md")]
    mod interfaces {}
}
