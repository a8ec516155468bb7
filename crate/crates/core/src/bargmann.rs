//! Cyclic overlap products and the cumulants they encode.
//!
//! For a closed path sampled at spacing `h`, the product of nearest-neighbour
//! overlaps obeys
//!
//! ```text
//! ln Π(h) = (1/h) Σₙ (i h)ⁿ/n! Cₙ
//!         = i C1 − (h/2) C2 − i (h²/6) C3 + (h³/24) C4 + O(h⁴)
//! ```
//!
//! Evaluating the product at `h` and at `2h` (the latter as the geometric
//! mean of the odd and even sub-products) gives two complex equations, i.e.
//! four real ones, for C1..C4.

use serde::{Deserialize, Serialize};

use crate::models::{HamiltonianFamily, GAP_FLOOR};
use crate::numerics::{hermitian_eig, inner, norm, principal_arg, scale, wrap_phase, Cplx};
use crate::{Error, Result};

/// Links whose overlap modulus falls below this are rejected.
pub const OVERLAP_FLOOR: f64 = 0.1;

const NORM_TOL: f64 = 1e-12;

/// Uniform cyclic grid `χ_I = origin + I·Λ/M`, `I = 0..M`, with `χ_M ≡ χ_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    period: f64,
    points: usize,
    origin: f64,
}

impl ParamGrid {
    pub fn new(period: f64, points: usize) -> Result<Self> {
        Self::with_origin(period, points, 0.0)
    }

    pub fn with_origin(period: f64, points: usize, origin: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("point count must be even and at least 8, got {points}")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self { period, points, origin })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.points as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.point(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeTag {
    Raw,
    ParallelTransport,
    PeriodicSmooth,
}

impl GaugeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            GaugeTag::Raw => "raw",
            GaugeTag::ParallelTransport => "parallel_transport",
            GaugeTag::PeriodicSmooth => "periodic_smooth",
        }
    }
}

/// Normalized states on a cyclic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePath {
    grid: ParamGrid,
    states: Vec<Vec<Cplx>>,
    gauge: GaugeTag,
}

impl StatePath {
    pub fn new(grid: ParamGrid, states: Vec<Vec<Cplx>>, gauge: GaugeTag) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: states.len() });
        }
        let dim = states[0].len();
        for (index, s) in states.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.len() });
            }
            let n = norm(s);
            if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized { index, norm: n });
            }
        }
        Ok(Self { grid, states, gauge })
    }

    pub fn grid(&self) -> &ParamGrid {
        &self.grid
    }

    pub fn states(&self) -> &[Vec<Cplx>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[Cplx] {
        &self.states[i % self.states.len()]
    }

    pub fn gauge(&self) -> GaugeTag {
        self.gauge
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    /// `⟨Ψ_i|Ψ_j⟩` with cyclic indices.
    pub fn overlap(&self, i: usize, j: usize) -> Cplx {
        inner(self.state(i), self.state(j))
    }

    /// Multiplies state `I` by `phases[I]` (unit modulus).
    pub fn rephased(&self, phases: &[Cplx], gauge: GaugeTag) -> StatePath {
        assert_eq!(phases.len(), self.len());
        let states = self.states.iter().zip(phases).map(|(s, p)| scale(s, *p)).collect();
        StatePath { grid: self.grid, states, gauge }
    }
}

/// Samples the family's selected band on the grid.
///
/// Eigenvector phases are those produced by the eigensolver, unless the
/// family declares a phase reference, in which case each state is rephased
/// against it.
pub fn build_state_path(family: &HamiltonianFamily, grid: &ParamGrid) -> Result<StatePath> {
    let band = family.band_index();
    let mut states = Vec::with_capacity(grid.len());
    for chi in grid.points() {
        let h = family.evaluate(chi);
        if h.dim() != family.dim() {
            return Err(Error::DimensionMismatch { expected: family.dim(), found: h.dim() });
        }
        let eig = hermitian_eig(&h)?;
        let gap = eig.gap_around(band);
        if gap < GAP_FLOOR {
            return Err(Error::GapClosed { chi, gap });
        }
        let mut v = eig.eigenvectors[band].clone();
        if let Some(reference) = family.phase_reference(chi) {
            let z = inner(&reference, &v);
            if z.norm() > 1e-8 {
                v = scale(&v, z.conj() / z.norm());
            }
        }
        states.push(v);
    }
    StatePath::new(*grid, states, GaugeTag::Raw)
}

/// A cyclic overlap product kept in logarithmic form.
///
/// The phase is accumulated link by link from principal arguments rather
/// than taken from the multiplied-out product, so totals beyond ±π survive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapProduct {
    /// `Σ ln|z_I|`.
    pub log_modulus: f64,
    /// `Σ arg z_I`, each in (−π, π].
    pub accumulated_phase: f64,
    pub factor_count: usize,
}

impl OverlapProduct {
    pub fn ln(&self) -> Cplx {
        Cplx::new(self.log_modulus, self.accumulated_phase)
    }

    pub fn value(&self) -> Cplx {
        self.ln().exp()
    }
}

fn chain(path: &StatePath, start: usize, stride: usize) -> Result<OverlapProduct> {
    let m = path.len();
    let count = m / stride;
    let mut log_modulus = 0.0;
    let mut accumulated_phase = 0.0;
    for link in 0..count {
        let from = start + link * stride;
        let to = from + stride;
        let z = path.overlap(from, to);
        let modulus = z.norm();
        if !(modulus > OVERLAP_FLOOR) {
            return Err(Error::OverlapBelowFloor { from: from % m, to: to % m, modulus });
        }
        // dividing by the norms keeps unit-level roundoff in ⟨Ψ|Ψ⟩ out of Re ln Π
        log_modulus += modulus.ln() - 0.5 * (path.overlap(from, from).re.ln() + path.overlap(to, to).re.ln());
        accumulated_phase += principal_arg(z)?;
    }
    Ok(OverlapProduct { log_modulus, accumulated_phase, factor_count: count })
}

/// `Π = ∏_{I=0}^{M−1} ⟨Ψ(χ_I)|Ψ(χ_{I+1})⟩`, closing with `Ψ(χ_M) = Ψ(χ_0)`.
pub fn bargmann_product(path: &StatePath) -> Result<OverlapProduct> {
    chain(path, 0, 1)
}

/// `(Π⁽ᵒ⁾, Π⁽ᵉ⁾)`: the products over odd points `χ_1, χ_3, …` and even
/// points `χ_0, χ_2, …`, each at spacing `2Δχ` with `M/2` factors.
pub fn subsampled_products(path: &StatePath) -> Result<(OverlapProduct, OverlapProduct)> {
    if path.len() % 2 != 0 {
        return Err(Error::InvalidGrid(format!("sub-products need an even grid, got {}", path.len())));
    }
    Ok((chain(path, 1, 2)?, chain(path, 0, 2)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Product,
    Continuum,
    Operator,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Product => "product",
            Route::Continuum => "continuum",
            Route::Operator => "operator",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub points: usize,
    pub spacing: f64,
    pub period: f64,
}

impl From<&ParamGrid> for GridMeta {
    fn from(g: &ParamGrid) -> Self {
        GridMeta { points: g.len(), spacing: g.spacing(), period: g.period() }
    }
}

/// Per-cycle cumulants C1..C4.
///
/// `c1` is absent for the operator route: the Berry phase itself has no
/// operator expression, only a shifted first moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet {
    pub c1: Option<f64>,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub route: Route,
    pub grid: GridMeta,
}

impl CumulantSet {
    pub fn as_array(&self) -> [Option<f64>; 4] {
        [self.c1, Some(self.c2), Some(self.c3), Some(self.c4)]
    }

    /// `C_n / Λ`.
    pub fn per_length(&self) -> [Option<f64>; 4] {
        self.as_array().map(|c| c.map(|v| v / self.grid.period))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMethod {
    /// Solve the truncated expansion at spacings `Δχ` and `2Δχ` for all four
    /// cumulants (C1 and C2 come out Richardson-corrected).
    #[default]
    TwoResolution,
    /// Leading-order C1, C2 from `Π` alone; C3, C4 from the closed-form
    /// sub-product estimators.
    ClosedForm,
}

/// `ln[(Π⁽ᵒ⁾Π⁽ᵉ⁾)^p / Π]`.
///
/// The phases of the sub-products are taken relative to that of `Π` and
/// wrapped, so the result does not depend on how each product's phase was
/// lifted.
pub fn subsample_log_ratio(pi: &OverlapProduct, odd: &OverlapProduct, even: &OverlapProduct, p: f64) -> Cplx {
    let d_odd = wrap_phase(odd.accumulated_phase - pi.accumulated_phase);
    let d_even = wrap_phase(even.accumulated_phase - pi.accumulated_phase);
    let re = p * (odd.log_modulus + even.log_modulus) - pi.log_modulus;
    let im = (2.0 * p - 1.0) * pi.accumulated_phase + p * (d_odd + d_even);
    Cplx::new(re, im)
}

/// Skew estimator `C3 ≈ −(2/Δχ²)·Im ln[(Π⁽ᵒ⁾Π⁽ᵉ⁾)^{1/2}/Π]`, error `O(Δχ²)`.
pub fn skew_estimator(pi: &OverlapProduct, odd: &OverlapProduct, even: &OverlapProduct, spacing: f64) -> f64 {
    -2.0 / spacing.powi(2) * subsample_log_ratio(pi, odd, even, 0.5).im
}

/// Kurtosis estimator `C4 ≈ (8/Δχ³)·Re ln[(Π⁽ᵒ⁾Π⁽ᵉ⁾)^{1/4}/Π]`, error `O(Δχ²)`.
pub fn kurtosis_estimator(pi: &OverlapProduct, odd: &OverlapProduct, even: &OverlapProduct, spacing: f64) -> f64 {
    8.0 / spacing.powi(3) * subsample_log_ratio(pi, odd, even, 0.25).re
}

pub fn cumulants_from_products(
    pi: &OverlapProduct,
    odd: &OverlapProduct,
    even: &OverlapProduct,
    spacing: f64,
    method: ExtractionMethod,
) -> CumulantSet {
    let h = spacing;
    let (re1, im1) = (pi.log_modulus, pi.accumulated_phase);
    let c3 = skew_estimator(pi, odd, even, h);
    let c4 = kurtosis_estimator(pi, odd, even, h);
    let (c1, c2) = match method {
        ExtractionMethod::TwoResolution => {
            // coarse resolution, phase lifted consistently with the fine one
            let coarse = subsample_log_ratio(pi, odd, even, 0.5) + pi.ln();
            ((4.0 * im1 - coarse.im) / 3.0, -(8.0 * re1 - coarse.re) / (3.0 * h))
        }
        ExtractionMethod::ClosedForm => (im1, -2.0 * re1 / h),
    };
    CumulantSet {
        c1: Some(c1),
        c2,
        c3,
        c4,
        route: Route::Product,
        grid: GridMeta { points: pi.factor_count, spacing: h, period: h * pi.factor_count as f64 },
    }
}

/// Samples the path, forms all three products and extracts C1..C4.
pub fn product_cumulants(path: &StatePath, method: ExtractionMethod) -> Result<CumulantSet> {
    let pi = bargmann_product(path)?;
    let (odd, even) = subsampled_products(path)?;
    Ok(cumulants_from_products(&pi, &odd, &even, path.grid().spacing(), method))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerryPhase {
    /// `−Im ln Π` reduced to (−π, π].
    pub reduced: f64,
    /// `−Σ arg z_I`, i.e. `−C1` up to `O(Δχ²)`.
    pub unreduced: f64,
}

pub fn discrete_berry_phase(pi: &OverlapProduct) -> BerryPhase {
    let unreduced = -pi.accumulated_phase;
    BerryPhase { reduced: wrap_phase(unreduced), unreduced }
}
