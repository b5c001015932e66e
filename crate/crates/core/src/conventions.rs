//! Normalisations fixed once, on the flat model, before anything else is
//! measured.
//!
//! Three constants are pinned:
//! * `kappa` is the weight of `Sym[d xi (x) dx]` in the lifted metric.
//! * `curvature_sign` is the sign applied to the Riemann tensor of the
//!   total-space metric.
//! * `orientation` multiplies `sqrt|det g| eps_abcd` in the Hodge star.
//!
//! They are chosen so that the flat lift has scalar curvature `-24 L` and
//! `dx^1 ^ dx^2` is anti-self-dual.

use std::sync::OnceLock;

use serde::Serialize;

use crate::lift::einstein_lift_with;
use crate::projective::Connection;
use crate::pseudoriemann::{hodge_matrix, metric_jet, suite_with, PAIRS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conventions {
    pub kappa: f64,
    pub curvature_sign: f64,
    pub orientation: f64,
}

pub const TARGET_SCALAR: f64 = -24.0;
const PROBE: [f64; 4] = [0.3, -0.2, 0.5, 0.4];

static CONVENTIONS: OnceLock<Conventions> = OnceLock::new();

pub fn conventions() -> &'static Conventions {
    CONVENTIONS.get_or_init(calibrate)
}

/// Search the candidate normalisations on the flat lift at `L = 1`.
pub fn calibrate() -> Conventions {
    let flat = Connection::flat(&["x1", "x2"]);
    for kappa in [1.0, 0.5, 2.0] {
        let g = einstein_lift_with(kappa, &flat, 1.0).expect("flat lift");
        let jet = metric_jet(&g, &PROBE).expect("flat lift is regular at the probe");
        let raw = suite_with(&jet, 1.0).expect("flat lift is non-degenerate").scalar;
        for sign in [1.0, -1.0] {
            if (sign * raw - TARGET_SCALAR).abs() < 1e-9 {
                let star = hodge_matrix(&jet.g, 1.0).expect("non-degenerate");
                let base = PAIRS.iter().position(|&p| p == (0, 1)).unwrap();
                let self_dual = (star[(base, base)] - 1.0).abs() < 1e-9;
                return Conventions {
                    kappa,
                    curvature_sign: sign,
                    orientation: if self_dual { -1.0 } else { 1.0 },
                };
            }
        }
    }
    panic!("no candidate normalisation gives scalar curvature {TARGET_SCALAR} on the flat lift");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_is_frozen() {
        let c = calibrate();
        assert_eq!(c.kappa, 0.5);
        assert_eq!(c.curvature_sign, -1.0);
        assert_eq!(c.orientation, -1.0);
        assert_eq!(&c, conventions());
    }
}
