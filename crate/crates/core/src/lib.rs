//! Lommel functions of the first kind `s_{mu,nu}(z)`, the even entire
//! functions `phi_k(z) = 1F2(1; (mu-k+2)/2, (mu-k+3)/2; -z^2/4)`, their
//! positive zeros, and the Turan/Laguerre-type inequality expressions built
//! from them.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is a pure function of
//! its arguments; grid scans accept a [`grid::GridMap`] so a caller with
//! threads can parallelize them without changing the results.
//!
//! Series are summed with compensated arithmetic at `f64` and re-evaluated in
//! extended binary precision when the cancellation between terms would eat
//! the working precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod extended;
mod math;
mod series;

pub mod grid;

pub mod inequality;
pub mod lommel;
pub mod quadrature;
pub mod scan;
pub mod zeros;

pub use error::{Error, Result};
pub use lommel::{
    closed_form_half, hyp1f2_unit, lommel_s, lommel_s_derivative, phi, pochhammer,
    residual_diff, residual_lemma2, residual_recurrence_b, residual_shift_two, ClosedForm, Residual,
    DerivativeOrder, Evaluation, Evaluator, LommelParams, Method, PhiParams, Precision,
};
