/// Tolerances shared by every numerical routine in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Determinant / disc-form / unit-norm tolerance applied at construction.
    pub construction: f64,
    /// Tolerance for identities derived through several operations.
    pub derived: f64,
    /// Interior points with `1 - |w|` below this are rejected.
    pub boundary_margin: f64,
    /// `|cz + d|` below this is treated as a pole.
    pub pole: f64,
    /// Group-file determinant check, applied before renormalization.
    pub file_determinant: f64,
}

pub const POLICY: NumericPolicy = NumericPolicy {
    construction: 1e-9,
    derived: 1e-7,
    boundary_margin: 1e-14,
    pole: 1e-14,
    file_determinant: 1e-6,
};

impl Default for NumericPolicy {
    fn default() -> Self {
        POLICY
    }
}
