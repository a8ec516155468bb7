//! Cumulants from an operator `Ô` with `∂χH = i[H, Ô]`.
//!
//! In the eigenbasis of `H` the commutator fixes the off-diagonal elements,
//! `O_jk = −i (∂χH)_jk / (E_j − E_k)`, and leaves the diagonal free. First-order
//! perturbation theory then gives `∂χ|Ψ₀⟩ = −i(Ô − ⟨Ô⟩)|Ψ₀⟩`, so the
//! generator of translations along the curve, `−i∂χ`, acts as `−Ô` up to a
//! constant. The cycle cumulants are therefore `C_n = ∫ κ_n(−Ô) dχ =
//! (−1)ⁿ ∫ κ_n(Ô) dχ` for `n ≥ 2`. The first moment is only determined up to
//! the phase convention of the states and is reported on its own.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bargmann::{CumulantSet, GridMeta, ParamGrid, Route};
use crate::models::{HamiltonianFamily, GAP_FLOOR};
use crate::numerics::{hermitian_eig, inner, norm, periodic_trapezoid, Cplx, EigDecomposition, HermitianMatrix};
use crate::{Error, Result};

const COMMUTATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalPolicy {
    Zero,
    UserSupplied,
}

/// Solution of `∂χH = i[H, Ô]`, stored in the eigenbasis of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorOperator {
    pub matrix: HermitianMatrix,
    pub basis: EigDecomposition,
    pub diagonal_policy: DiagonalPolicy,
}

impl CommutatorOperator {
    pub fn in_original_basis(&self) -> HermitianMatrix {
        self.matrix.from_basis(&self.basis)
    }
}

pub fn solve_commutator(h: &HermitianMatrix, dh: &HermitianMatrix, diagonal: Option<&[f64]>) -> Result<CommutatorOperator> {
    let d = h.dim();
    if dh.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: dh.dim() });
    }
    if let Some(diag) = diagonal {
        if diag.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: diag.len() });
        }
    }
    let basis = hermitian_eig(h)?;
    let gap = basis.min_gap();
    if gap <= GAP_FLOOR {
        return Err(Error::Degenerate { gap });
    }
    let dh_eig = dh.in_basis(&basis);
    let max_diagonal = (0..d).map(|j| dh_eig.get(j, j).re.abs()).fold(0.0, f64::max);
    if max_diagonal > COMMUTATOR_TOL * dh.max_abs().max(1.0) {
        return Err(Error::NoCommutatorSolution { max_diagonal });
    }
    let e = &basis.eigenvalues;
    let matrix = HermitianMatrix::from_fn(d, |j, k| {
        if j == k {
            Cplx::new(diagonal.map_or(0.0, |v| v[j]), 0.0)
        } else {
            Cplx::new(0.0, -1.0) * dh_eig.get(j, k) / (e[j] - e[k])
        }
    })?;
    Ok(CommutatorOperator {
        matrix,
        basis,
        diagonal_policy: if diagonal.is_some() { DiagonalPolicy::UserSupplied } else { DiagonalPolicy::Zero },
    })
}

/// `(κ₁, κ₂, κ₃, κ₄)` of `Ô` in the state `ψ`.
///
/// Computed from central moments `μ_n = ⟨(Ô − κ₁)ⁿ⟩`:
/// `κ₂ = μ₂`, `κ₃ = μ₃`, `κ₄ = μ₄ − 3μ₂²`, which equal the raw-moment forms
/// `m₂ − m₁²`, `m₃ − 3m₂m₁ + 2m₁³`, `m₄ − 3m₂² − 4m₃m₁ + 12m₁²m₂ − 6m₁⁴`
/// without their cancellation.
pub fn operator_cumulants(o: &HermitianMatrix, psi: &[Cplx]) -> Result<[f64; 4]> {
    if psi.len() != o.dim() {
        return Err(Error::DimensionMismatch { expected: o.dim(), found: psi.len() });
    }
    let n = norm(psi);
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { index: 0, norm: n });
    }
    let o_psi = o.apply(psi);
    let mean = inner(psi, &o_psi).re;
    // (Ô − mean)ψ and its square
    let v1: Vec<Cplx> = o_psi.iter().zip(psi).map(|(a, p)| a - p * mean).collect();
    let o_v1 = o.apply(&v1);
    let v2: Vec<Cplx> = o_v1.iter().zip(&v1).map(|(a, p)| a - p * mean).collect();
    let mu2 = inner(&v1, &v1).re;
    let mu3 = inner(&v1, &v2).re;
    let mu4 = inner(&v2, &v2).re;
    Ok([mean, mu2, mu3, mu4 - 3.0 * mu2 * mu2])
}

type OperatorFn = Arc<dyn Fn(f64) -> HermitianMatrix + Send + Sync>;

/// Where the operator at each grid point comes from.
#[derive(Clone)]
pub enum OperatorProvider {
    /// A known operator in the original basis.
    ClosedForm(OperatorFn),
    /// Solve the commutator at every point, with the given eigenbasis
    /// diagonal (zero when absent).
    Commutator { diagonal: Option<Vec<f64>> },
}

impl fmt::Debug for OperatorProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorProvider::ClosedForm(_) => f.write_str("ClosedForm(..)"),
            OperatorProvider::Commutator { diagonal } => f.debug_struct("Commutator").field("diagonal", diagonal).finish(),
        }
    }
}

impl OperatorProvider {
    pub fn closed_form(o: impl Fn(f64) -> HermitianMatrix + Send + Sync + 'static) -> Self {
        OperatorProvider::ClosedForm(Arc::new(o))
    }

    /// `σ_z/2`, the commutator operator of the precessing spin.
    pub fn spin_sigma_z_half() -> Self {
        let o = HermitianMatrix::pauli_z().scaled(0.5);
        Self::closed_form(move |_| o.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorCycleCumulants {
    /// C2..C4 with `c1` absent.
    pub cumulants: CumulantSet,
    /// `∫ ⟨Ô⟩ dχ`, the first moment of the operator itself.
    pub first_moment: f64,
}

/// Integrates the operator cumulants of the selected band over the cycle.
pub fn cycle_cumulants_operator(
    family: &HamiltonianFamily,
    grid: &ParamGrid,
    provider: &OperatorProvider,
) -> Result<OperatorCycleCumulants> {
    let band = family.band_index();
    let mut kappas: [Vec<f64>; 4] = Default::default();
    for chi in grid.points() {
        let h = family.evaluate(chi);
        let k = match provider {
            OperatorProvider::ClosedForm(o) => {
                let eig = hermitian_eig(&h)?;
                let gap = eig.gap_around(band);
                if gap < GAP_FLOOR {
                    return Err(Error::GapClosed { chi, gap });
                }
                operator_cumulants(&o(chi), &eig.eigenvectors[band])?
            }
            OperatorProvider::Commutator { diagonal } => {
                let sol = solve_commutator(&h, &family.derivative(chi), diagonal.as_deref())?;
                let mut e = vec![Cplx::new(0.0, 0.0); h.dim()];
                e[band] = Cplx::new(1.0, 0.0);
                operator_cumulants(&sol.matrix, &e)?
            }
        };
        for (store, v) in kappas.iter_mut().zip(k) {
            store.push(v);
        }
    }
    let period = grid.period();
    let first_moment = periodic_trapezoid(&kappas[0], period)?;
    let c2 = periodic_trapezoid(&kappas[1], period)?;
    let c3 = -periodic_trapezoid(&kappas[2], period)?;
    let c4 = periodic_trapezoid(&kappas[3], period)?;
    Ok(OperatorCycleCumulants {
        cumulants: CumulantSet { c1: None, c2, c3, c4, route: Route::Operator, grid: GridMeta::from(grid) },
        first_moment,
    })
}

/// `C2 = ∫ Σ_{j≠0} |⟨Ψ_j|∂χH|Ψ₀⟩|² / (E_j − E₀)² dχ`, the variance form that
/// first-order perturbation theory gives for the spread.
pub fn c2_perturbation(family: &HamiltonianFamily, grid: &ParamGrid) -> Result<f64> {
    let band = family.band_index();
    let mut samples = Vec::with_capacity(grid.len());
    for chi in grid.points() {
        let eig = hermitian_eig(&family.evaluate(chi))?;
        let gap = eig.gap_around(band);
        if gap <= GAP_FLOOR {
            return Err(Error::Degenerate { gap });
        }
        let dpsi = family.derivative(chi).apply(&eig.eigenvectors[band]);
        let e0 = eig.eigenvalues[band];
        let s: f64 = (0..eig.dim())
            .filter(|&j| j != band)
            .map(|j| inner(&eig.eigenvectors[j], &dpsi).norm_sqr() / (eig.eigenvalues[j] - e0).powi(2))
            .sum();
        samples.push(s);
    }
    periodic_trapezoid(&samples, grid.period())
}
