//! Default tolerances for named checks. Identities that reduce to exact
//! polynomial cancellation get `TIGHT`; anything that passes through matrix
//! inversion or least squares gets `STANDARD`.

pub const TIGHT: f64 = 1e-9;
pub const STANDARD: f64 = 1e-8;
pub const HIGHER_DIM: f64 = 1e-7;
/// Relative error of finite-difference jets (step `FD_STEP`).
pub const FINITE_DIFFERENCE: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-5;
pub const FD_STEP_SECOND: f64 = 1e-4;
/// Lower bound a residual must exceed for a negative control to count.
pub const CONTROL_FLOOR: f64 = 1e-3;
/// Minimum distance to a singular denominator for an admissible sample point.
pub const SINGULAR_MARGIN: f64 = 1e-3;
