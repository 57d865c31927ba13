//! Scalar abstractions shared by the optimisation code.
//!
//! Branching costs are generic: the same Edmonds solver runs on integer
//! ranks, on the `{-1, 0, +1}` popularity weights, on exact rationals and on
//! floats.

use std::fmt::Debug;

use num_traits::{Num, ToPrimitive};

/// A value usable as an edge cost in the optimum branching solver.
pub trait Cost: Num + Clone + PartialOrd + Debug {}

impl<T> Cost for T where T: Num + Clone + PartialOrd + Debug {}

/// Lossy conversion used only for rendering (CSV, summaries).
pub fn to_f64<T: ToPrimitive>(x: &T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Renders a value with six significant digits, trimming trailing zeros.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}
