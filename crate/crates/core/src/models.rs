//! Parametrized Hamiltonian families driven around a closed curve.
//!
//! Two concrete families ship with the crate: a spin-½ in a magnetic field
//! precessing at fixed polar angle, and a two-band Rice–Mele chain in
//! periodic Bloch convention (both orbitals at the cell origin, so that
//! `H(k + 2π/L) = H(k)` and Zak phases are quoted in that convention).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::numerics::{hermitian_eig, Cplx, HermitianMatrix};
use crate::{Error, Result};

/// Minimum spectral gap around the selected band; below it the adiabatic
/// state is considered ill-defined.
pub const GAP_FLOOR: f64 = 1e-8;

type MatrixFn = Arc<dyn Fn(f64) -> HermitianMatrix + Send + Sync>;
type StateFn = Arc<dyn Fn(f64) -> Vec<Cplx> + Send + Sync>;

/// A Hamiltonian `H(χ)` on a closed curve of length `period`, together with
/// the band whose eigenstate is transported around it.
#[derive(Clone)]
pub struct HamiltonianFamily {
    name: String,
    dim: usize,
    period: f64,
    band_index: usize,
    evaluate: MatrixFn,
    derivative: Option<MatrixFn>,
    phase_reference: Option<StateFn>,
    warnings: Vec<String>,
}

impl fmt::Debug for HamiltonianFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianFamily")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("period", &self.period)
            .field("band_index", &self.band_index)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("phase_reference", &self.phase_reference.is_some())
            .field("warnings", &self.warnings)
            .finish()
    }
}

impl HamiltonianFamily {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        period: f64,
        band_index: usize,
        evaluate: impl Fn(f64) -> HermitianMatrix + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
        }
        if band_index >= dim {
            return Err(Error::InvalidParameter(format!("band {band_index} out of range for dimension {dim}")));
        }
        Ok(Self {
            name: name.into(),
            dim,
            period,
            band_index,
            evaluate: Arc::new(evaluate),
            derivative: None,
            phase_reference: None,
            warnings: Vec::new(),
        })
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> HermitianMatrix + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    /// Phase convention for sampled eigenstates: each eigenvector is rephased
    /// so that its overlap with `reference(χ)` is real and positive. This
    /// fixes the branch of the accumulated phase to the one the reference
    /// gauge winds through.
    pub fn with_phase_reference(mut self, reference: impl Fn(f64) -> Vec<Cplx> + Send + Sync + 'static) -> Self {
        self.phase_reference = Some(Arc::new(reference));
        self
    }

    pub fn with_band_index(mut self, band: usize) -> Result<Self> {
        if band >= self.dim {
            return Err(Error::InvalidParameter(format!("band {band} out of range for dimension {}", self.dim)));
        }
        self.band_index = band;
        Ok(self)
    }

    pub fn without_phase_reference(mut self) -> Self {
        self.phase_reference = None;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn band_index(&self) -> usize {
        self.band_index
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn evaluate(&self, chi: f64) -> HermitianMatrix {
        (self.evaluate)(chi)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// `∂χH`, analytic when supplied, otherwise a fourth-order central
    /// difference with step `1e-3·Λ`.
    pub fn derivative(&self, chi: f64) -> HermitianMatrix {
        if let Some(d) = &self.derivative {
            return d(chi);
        }
        let h = 1e-3 * self.period;
        let e = |x: f64| self.evaluate(x);
        HermitianMatrix::combine(&[
            (1.0 / (12.0 * h), &e(chi - 2.0 * h)),
            (-8.0 / (12.0 * h), &e(chi - h)),
            (8.0 / (12.0 * h), &e(chi + h)),
            (-1.0 / (12.0 * h), &e(chi + 2.0 * h)),
        ])
    }

    pub fn phase_reference(&self, chi: f64) -> Option<Vec<Cplx>> {
        self.phase_reference.as_ref().map(|r| r(chi))
    }

    /// Smallest gap around the selected band over `points`, with its location.
    pub fn min_gap(&self, points: impl IntoIterator<Item = f64>) -> Result<(f64, f64)> {
        let mut worst = (f64::INFINITY, f64::NAN);
        for chi in points {
            let gap = hermitian_eig(&self.evaluate(chi))?.gap_around(self.band_index);
            if gap < worst.0 {
                worst = (gap, chi);
            }
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinModelParams {
    /// Polar angle of the field, radians in [0, π].
    pub theta: f64,
    /// Coupling; cumulants do not depend on it.
    #[serde(default = "default_mu")]
    pub mu: f64,
}

fn default_mu() -> f64 {
    1.0
}

impl SpinModelParams {
    pub fn new(theta: f64) -> Self {
        Self { theta, mu: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta.is_finite() && (0.0..=PI).contains(&self.theta)) {
            return Err(Error::InvalidParameter(format!("theta must lie in [0, π], got {}", self.theta)));
        }
        if !self.mu.is_finite() || self.mu == 0.0 {
            return Err(Error::InvalidParameter(format!("mu must be finite and nonzero, got {}", self.mu)));
        }
        Ok(())
    }
}

/// `H(φ) = −μ B(φ)·σ` with `B = (sinθ cosφ, sinθ sinφ, cosθ)`, `Λ = 2π`.
///
/// The transported state is the one continuously connected to
/// `(−sin(θ/2), e^{iφ} cos(θ/2))`, which sits in the upper band for `μ > 0`.
/// Eigenvectors are phased against that state.
pub fn spin_family(params: SpinModelParams) -> Result<HamiltonianFamily> {
    params.validate()?;
    let SpinModelParams { theta, mu } = params;
    let (sx, sy, sz) = (HermitianMatrix::pauli_x(), HermitianMatrix::pauli_y(), HermitianMatrix::pauli_z());
    let (dx, dy) = (sx.clone(), sy.clone());
    let band = if mu > 0.0 { 1 } else { 0 };
    let family = HamiltonianFamily::new(format!("spin(theta={theta})"), 2, 2.0 * PI, band, move |phi| {
        HermitianMatrix::combine(&[
            (-mu * theta.sin() * phi.cos(), &sx),
            (-mu * theta.sin() * phi.sin(), &sy),
            (-mu * theta.cos(), &sz),
        ])
    })?
    .with_derivative(move |phi| {
        HermitianMatrix::combine(&[(mu * theta.sin() * phi.sin(), &dx), (-mu * theta.sin() * phi.cos(), &dy)])
    })
    .with_phase_reference(move |phi| spin_state_analytic(theta, phi));
    Ok(family)
}

/// `(−sin(θ/2), e^{iφ} cos(θ/2))`, the eigenvector of `B·σ` with eigenvalue −1.
pub fn spin_state_analytic(theta: f64, phi: f64) -> Vec<Cplx> {
    let half = 0.5 * theta;
    vec![Cplx::new(-half.sin(), 0.0), Cplx::from_polar(half.cos(), phi)]
}

/// Two-band 1D Bloch model
/// `H(k) = (t1 + t2 cos kL) σx + t2 sin kL σy + Δ σz`.
///
/// `Δ = 0` is the SSH chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochModel {
    pub t1: f64,
    pub t2: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_lattice_constant")]
    pub lattice_constant: f64,
}

fn default_lattice_constant() -> f64 {
    1.0
}

impl BlochModel {
    pub fn new(t1: f64, t2: f64, delta: f64) -> Self {
        Self { t1, t2, delta, lattice_constant: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.t1, self.t2, self.delta, self.lattice_constant].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("Bloch model parameters must be finite".into()));
        }
        if self.lattice_constant <= 0.0 {
            return Err(Error::InvalidParameter("lattice constant must be positive".into()));
        }
        if self.t1 == 0.0 && self.t2 == 0.0 && self.delta == 0.0 {
            return Err(Error::InvalidParameter("t1, t2 and delta are all zero".into()));
        }
        Ok(())
    }

    /// Length of the Brillouin zone, `2π/L`.
    pub fn zone_length(&self) -> f64 {
        2.0 * PI / self.lattice_constant
    }

    pub fn hamiltonian(&self, k: f64) -> HermitianMatrix {
        let kl = k * self.lattice_constant;
        HermitianMatrix::combine(&[
            (self.t1 + self.t2 * kl.cos(), &HermitianMatrix::pauli_x()),
            (self.t2 * kl.sin(), &HermitianMatrix::pauli_y()),
            (self.delta, &HermitianMatrix::pauli_z()),
        ])
    }
}

/// Grid on which [`rice_mele_family`] screens for gap closings.
pub const GAP_SCREEN_POINTS: usize = 512;

/// Rice–Mele family over the Brillouin zone, lower band by default.
///
/// A gap closing on a [`GAP_SCREEN_POINTS`]-point zone grid is not an error
/// here; it is recorded in [`HamiltonianFamily::warnings`] and turns into an
/// error once a path is sampled across it.
pub fn rice_mele_family(model: BlochModel) -> Result<HamiltonianFamily> {
    model.validate()?;
    let l = model.lattice_constant;
    let (t2, sx, sy) = (model.t2, HermitianMatrix::pauli_x(), HermitianMatrix::pauli_y());
    let mut family = HamiltonianFamily::new(
        format!("rice_mele(t1={}, t2={}, delta={}, L={})", model.t1, model.t2, model.delta, l),
        2,
        model.zone_length(),
        0,
        move |k| model.hamiltonian(k),
    )?
    .with_derivative(move |k| {
        let kl = k * l;
        HermitianMatrix::combine(&[(-t2 * l * kl.sin(), &sx), (t2 * l * kl.cos(), &sy)])
    });
    let dk = model.zone_length() / GAP_SCREEN_POINTS as f64;
    let (gap, at) = family.min_gap((0..GAP_SCREEN_POINTS).map(|i| -PI / l + i as f64 * dk))?;
    if gap < GAP_FLOOR {
        family.warnings.push(format!("band gap {gap:.3e} below floor at k = {at}; ground band ill-defined there"));
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{inner, norm};
    use rand::{Rng, SeedableRng};

    fn max_diff(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
        a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn spin_special_points() {
        let f = spin_family(SpinModelParams::new(0.0)).unwrap();
        for phi in [0.0, 1.0, 4.0] {
            assert!(max_diff(&f.evaluate(phi), &HermitianMatrix::pauli_z().scaled(-1.0)) < 1e-15);
        }
        let f = spin_family(SpinModelParams::new(PI / 2.0)).unwrap();
        assert!(max_diff(&f.evaluate(0.0), &HermitianMatrix::pauli_x().scaled(-1.0)) < 1e-15);
        assert!(max_diff(&f.evaluate(PI / 2.0), &HermitianMatrix::pauli_y().scaled(-1.0)) < 1e-15);
    }

    #[test]
    fn spin_param_validation() {
        assert!(spin_family(SpinModelParams::new(-0.1)).is_err());
        assert!(spin_family(SpinModelParams::new(3.2)).is_err());
        assert!(spin_family(SpinModelParams { theta: 1.0, mu: 0.0 }).is_err());
        assert_eq!(spin_family(SpinModelParams { theta: 1.0, mu: -2.0 }).unwrap().band_index(), 0);
    }

    #[test]
    fn analytic_state_values() {
        let s = spin_state_analytic(0.0, 0.0);
        assert!((s[0] - Cplx::new(0.0, 0.0)).norm() < 1e-16 && (s[1] - Cplx::new(1.0, 0.0)).norm() < 1e-16);
        for phi in [0.0, 2.0] {
            let s = spin_state_analytic(PI, phi);
            assert!((s[0] + 1.0).norm() < 1e-16 && s[1].norm() < 1e-16);
        }
    }

    #[test]
    fn analytic_state_is_eigenvector() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let theta = rng.gen_range(0.0..PI);
            let phi = rng.gen_range(0.0..2.0 * PI);
            let mu = rng.gen_range(0.5..2.0);
            let f = spin_family(SpinModelParams { theta, mu }).unwrap();
            let v = spin_state_analytic(theta, phi);
            assert!((norm(&v) - 1.0).abs() < 1e-15);
            let hv = f.evaluate(phi).apply(&v);
            // energy +μ
            let r = hv.iter().zip(&v).map(|(a, b)| (a - b * mu).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-14, "residual {r}");
        }
    }

    #[test]
    fn spin_state_is_selected_band() {
        let f = spin_family(SpinModelParams::new(1.0)).unwrap();
        let eig = hermitian_eig(&f.evaluate(0.3)).unwrap();
        let v = spin_state_analytic(1.0, 0.3);
        assert!((inner(&v, &eig.eigenvectors[f.band_index()]).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn periodicity_and_derivatives() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let fams = [
            spin_family(SpinModelParams { theta: 0.7, mu: 1.3 }).unwrap(),
            rice_mele_family(BlochModel::new(1.0, 0.5, 0.3)).unwrap(),
            rice_mele_family(BlochModel { t1: 0.4, t2: 1.1, delta: -0.2, lattice_constant: 2.5 }).unwrap(),
        ];
        for f in &fams {
            for _ in 0..100 {
                let chi = rng.gen_range(-10.0..10.0);
                assert!(max_diff(&f.evaluate(chi), &f.evaluate(chi + f.period())) <= 1e-12);
                let d = 1e-5;
                let fd = HermitianMatrix::combine(&[
                    (0.5 / d, &f.evaluate(chi + d)),
                    (-0.5 / d, &f.evaluate(chi - d)),
                ]);
                let scale = f.evaluate(chi).max_abs().max(1.0);
                assert!(max_diff(&fd, &f.derivative(chi)) <= 1e-7 * scale);
            }
        }
    }

    #[test]
    fn numeric_derivative_fallback() {
        let f = spin_family(SpinModelParams::new(1.2)).unwrap();
        let g = HamiltonianFamily::new("copy", 2, f.period(), 1, {
            let f = f.clone();
            move |x| f.evaluate(x)
        })
        .unwrap();
        assert!(!g.has_analytic_derivative());
        assert!(max_diff(&g.derivative(0.4), &f.derivative(0.4)) < 1e-9);
    }

    #[test]
    fn rice_mele_special_cases() {
        let flat = rice_mele_family(BlochModel::new(0.8, 0.0, 0.3)).unwrap();
        let h0 = flat.evaluate(0.0);
        for k in [0.5, 1.7, -2.0] {
            assert!(max_diff(&flat.evaluate(k), &h0) < 1e-15);
        }
        let closed = rice_mele_family(BlochModel::new(1.0, 1.0, 0.0)).unwrap();
        assert!(closed.evaluate(PI).max_abs() < 1e-15);
        assert_eq!(closed.warnings().len(), 1);
        let h = rice_mele_family(BlochModel::new(1.0, 0.5, 0.0)).unwrap().evaluate(0.0);
        assert!(max_diff(&h, &HermitianMatrix::pauli_x().scaled(1.5)) < 1e-15);
        assert!(rice_mele_family(BlochModel::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn ssh_gap_formula() {
        let f = rice_mele_family(BlochModel::new(0.5, 1.0, 0.0)).unwrap();
        assert!(f.warnings().is_empty());
        let (gap, at) = f.min_gap((0..64).map(|i| -PI + i as f64 * 2.0 * PI / 64.0)).unwrap();
        assert!((gap - 1.0).abs() < 1e-12);
        assert!((at.abs() - PI).abs() < 1e-12);
    }
}
