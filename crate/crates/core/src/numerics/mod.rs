//! Small dense complex linear algebra and the scalar utilities the rest of the
//! crate is built on: principal arguments, periodic quadrature, central
//! difference stencils and log-log order fits.

mod linalg;
mod phase;
mod quadrature;
pub mod stencil;

pub use linalg::{hermitian_eig, EigDecomposition, HermitianMatrix, HERMITIAN_TOL};
pub use phase::{principal_arg, wrap_phase};
pub use quadrature::{fit_order, periodic_trapezoid};

/// Complex amplitude.
pub type Cplx = num_complex::Complex64;

/// ⟨a|b⟩ with the conjugate on the left.
pub fn inner(a: &[Cplx], b: &[Cplx]) -> Cplx {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Cplx]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn scale(a: &[Cplx], s: Cplx) -> Vec<Cplx> {
    a.iter().map(|x| x * s).collect()
}
