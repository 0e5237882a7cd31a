//! Truncated Fock-space linear algebra.

pub mod apply;
pub mod linalg;
mod operator;
mod ops;
mod space;
mod state;

pub use operator::{max_abs, Operator};
pub use ops::{
    coherent_ket, commutator_deficit, displacement, fidelity, fock_ket, ket_fidelity, ladder,
    number_function, number_function_complex, ordered_power_identity, partial_trace, squeeze,
    tensor, Ordering,
};
pub use space::{strides, CompositeSpace, FockSpace, DEFAULT_DIM, DEFAULT_GUARD, LEAKAGE_TOL};
pub use state::{trace_product, State};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// `C64` from a real number.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
