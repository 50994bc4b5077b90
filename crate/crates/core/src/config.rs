/// Resource limits shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of terms in any polynomial and of stored nonzeros in any matrix.
    pub term_cap: usize,
    /// Maximum dimension q^n of a bracket quotient.
    pub dim_cap: u64,
    /// Blocks up to this size are ranked by dense elimination.
    pub dense_threshold: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            term_cap: 1 << 26,
            dim_cap: 1 << 24,
            dense_threshold: 4096,
        }
    }
}
