//! Constants measured once on pinned seeds and frozen as regression bounds.

/// `⟨1̃_{Q±(K)}, H_J^ν⟩_ν` divided by the sequence-table case formula.
pub const QPM_HNU_C0: f64 = std::f64::consts::SQRT_2;

/// Direct forward testing divided by its closed-form expansion.
pub const FORWARD_SCALE: f64 = std::f64::consts::SQRT_2;

/// Measurement set for the three bounds below: random pairs `0..100` (complex normal,
/// `γ = 0.75`) at depths `2..=8`, plus `b = d = log` at depths `2..=10`.
/// Each bound is the measured extreme times [`HEADROOM`], rounded up.
pub const HEADROOM: f64 = 1.25;

/// Bound on `max r / min r` for `r = op_norm / (A + B + C)`. Measured: 2.9086.
pub const RATIO_WINDOW: f64 = 3.64;

/// Bound on `(A + B + C) / (‖b‖_BMO ‖d‖_BMO)`. Measured: 0.71428.
pub const KAPPA: f64 = 0.893;

/// Bound on the Carleson difference ratio `lhs / rhs`. Measured: 0.67144.
pub const KAPPA_PRIME: f64 = 0.84;
