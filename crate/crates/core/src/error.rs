use thiserror::Error;

/// Errors raised while evaluating brackets, products and coproducts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("mode arithmetic overflowed")]
    ModeOverflow,

    #[error("mode-indexed parameter `{name}` has no entry for index {index}")]
    MissingIndexedEntry { name: String, index: i64 },

    #[error("parameter `{0}` is mode-indexed and needs an index")]
    IndexedWithoutIndex(String),

    #[error("parameter `{0}` is a scalar and cannot be indexed")]
    ScalarIndexed(String),

    #[error("infinite tail: [Omega, x (x) 1] has infinite support for x = {0}")]
    InfiniteTail(String),

    #[error("division by zero")]
    DivisionByZero,
}

pub type Result<T, E = KernelError> = std::result::Result<T, E>;
