//! Cumulants as integrals of the derivative expectations
//! `γ_i(χ) = ⟨Ψ(χ)|∂ⁱ_χ|Ψ(χ)⟩`, the smooth gauge they require, and the
//! gauge-invariance audit.
//!
//! ```text
//! C1 = −i ∫ γ1
//! C2 = −  ∫ (γ2 − γ1²)
//! C3 =  i ∫ (γ3 − 3γ2γ1 + 2γ1³)
//! C4 =    ∫ (γ4 − 3γ2² − 4γ3γ1 + 12γ1²γ2 − 6γ1⁴)
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bargmann::{bargmann_product, build_state_path, CumulantSet, GaugeTag, GridMeta, ParamGrid, Route, StatePath};
use crate::models::HamiltonianFamily;
use crate::numerics::{periodic_trapezoid, principal_arg, stencil, Cplx};
use crate::{Error, Result};

/// Largest imaginary part tolerated in a continuum cumulant.
pub const RESIDUE_TOL: f64 = 1e-8;

/// Stencil accuracy used by the gauge audit. A twist `e^{iβ}` adds harmonic
/// content that fourth-order stencils cannot resolve to 1e-6 in `C4`.
pub const AUDIT_STENCIL_ACCURACY: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeMode {
    /// Every link overlap except the closing one made real positive.
    ParallelTransport,
    /// Parallel transport, then the holonomy spread evenly over all links.
    PeriodicSmooth,
}

/// Rephases a path into a differentiable gauge.
///
/// Parallel transport leaves the whole holonomy `e^{iφ_tot}` on the closing
/// link. `PeriodicSmooth` then multiplies state `I` by `e^{iφ_tot·I/M}`, so
/// every link carries phase `φ_tot/M`. `φ_tot` is the link-accumulated phase
/// of the input path, which fixes the branch of C1 in the result.
pub fn fix_gauge(path: &StatePath, mode: GaugeMode) -> Result<StatePath> {
    let total = bargmann_product(path)?.accumulated_phase;
    let m = path.len();
    let mut phases = Vec::with_capacity(m);
    let mut acc = 0.0;
    phases.push(Cplx::new(1.0, 0.0));
    for i in 0..m - 1 {
        acc += principal_arg(path.overlap(i, i + 1))?;
        phases.push(Cplx::from_polar(1.0, -acc));
    }
    let tag = match mode {
        GaugeMode::ParallelTransport => GaugeTag::ParallelTransport,
        GaugeMode::PeriodicSmooth => {
            for (i, p) in phases.iter_mut().enumerate() {
                *p *= Cplx::from_polar(1.0, total * i as f64 / m as f64);
            }
            GaugeTag::PeriodicSmooth
        }
    };
    Ok(path.rephased(&phases, tag))
}

/// `γ_i` sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSamples {
    pub order: usize,
    pub spacing: f64,
    pub values: Vec<Cplx>,
}

fn require_smooth(path: &StatePath) -> Result<()> {
    if path.gauge() != GaugeTag::PeriodicSmooth {
        return Err(Error::WrongGauge { expected: GaugeTag::PeriodicSmooth.as_str(), found: path.gauge().as_str() });
    }
    Ok(())
}

/// Fourth-order central-difference `γ_i` on a `periodic_smooth` path.
pub fn gamma(path: &StatePath, order: usize) -> Result<GammaSamples> {
    require_smooth(path)?;
    gamma_in_gauge(path, order)
}

/// Same as [`gamma`] without the gauge-tag check, for paths known to be
/// smooth by construction (e.g. a smooth path with a smooth gauge twist).
pub fn gamma_in_gauge(path: &StatePath, order: usize) -> Result<GammaSamples> {
    gamma_with_stencil(path, &stencil::central(order)?)
}

pub fn gamma_with_stencil(path: &StatePath, st: &stencil::Stencil) -> Result<GammaSamples> {
    let order = st.order;
    let m = path.len();
    if st.width() * 4 >= m {
        return Err(Error::StencilTooWide { width: st.width(), points: m });
    }
    let h = path.grid().spacing();
    let inv = (st.denominator * h.powi(order as i32)).recip();
    let hw = st.half_width() as isize;
    let values = (0..m)
        .map(|i| {
            // weights sum to zero, so the diagonal overlap can be subtracted
            let diag = path.overlap(i, i);
            let acc: Cplx = st
                .weights
                .iter()
                .enumerate()
                .filter(|(k, w)| **w != 0.0 && *k as isize != hw)
                .map(|(k, w)| {
                    let j = (i as isize + k as isize - hw).rem_euclid(m as isize) as usize;
                    (path.overlap(i, j) - diag) * *w
                })
                .sum();
            acc * inv
        })
        .collect();
    Ok(GammaSamples { order, spacing: h, values })
}

/// The four cumulant integrals before discarding their imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumIntegrals {
    pub values: [Cplx; 4],
    pub grid: GridMeta,
}

impl ContinuumIntegrals {
    pub fn imaginary_residues(&self) -> [f64; 4] {
        self.values.map(|v| v.im.abs())
    }

    /// Real parts as a cumulant set, rejecting any residue above `tol`.
    pub fn into_cumulants(self, tol: f64) -> Result<CumulantSet> {
        for (n, r) in self.imaginary_residues().iter().enumerate() {
            if !(*r <= tol) {
                return Err(Error::ImaginaryResidue { order: n + 1, residue: *r });
            }
        }
        Ok(self.real_parts())
    }

    pub fn real_parts(&self) -> CumulantSet {
        CumulantSet {
            c1: Some(self.values[0].re),
            c2: self.values[1].re,
            c3: self.values[2].re,
            c4: self.values[3].re,
            route: Route::Continuum,
            grid: self.grid,
        }
    }
}

fn integrate(samples: &[Cplx], period: f64) -> Result<Cplx> {
    let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
    let im: Vec<f64> = samples.iter().map(|z| z.im).collect();
    Ok(Cplx::new(periodic_trapezoid(&re, period)?, periodic_trapezoid(&im, period)?))
}

/// Evaluates the four integrals in whatever gauge the path is in.
pub fn continuum_integrals(path: &StatePath) -> Result<ContinuumIntegrals> {
    continuum_integrals_with_accuracy(path, 4)
}

/// [`continuum_integrals`] with stencils of truncation order `accuracy`.
pub fn continuum_integrals_with_accuracy(path: &StatePath, accuracy: usize) -> Result<ContinuumIntegrals> {
    let g: Vec<GammaSamples> = (1..=4)
        .map(|n| gamma_with_stencil(path, &stencil::central_with_accuracy(n, accuracy)?))
        .collect::<Result<_>>()?;
    let (g1, g2, g3, g4) = (&g[0].values, &g[1].values, &g[2].values, &g[3].values);
    let m = path.len();
    let mut i1 = Vec::with_capacity(m);
    let mut i2 = Vec::with_capacity(m);
    let mut i3 = Vec::with_capacity(m);
    let mut i4 = Vec::with_capacity(m);
    for k in 0..m {
        let (a, b, c, d) = (g1[k], g2[k], g3[k], g4[k]);
        let a2 = a * a;
        i1.push(a);
        i2.push(b - a2);
        i3.push(c - b * a * 3.0 + a2 * a * 2.0);
        i4.push(d - b * b * 3.0 - c * a * 4.0 + a2 * b * 12.0 - a2 * a2 * 6.0);
    }
    let period = path.grid().period();
    let i = Cplx::new(0.0, 1.0);
    Ok(ContinuumIntegrals {
        values: [
            -i * integrate(&i1, period)?,
            -integrate(&i2, period)?,
            i * integrate(&i3, period)?,
            integrate(&i4, period)?,
        ],
        grid: GridMeta::from(path.grid()),
    })
}

/// C1..C4 from the derivative integrals on a `periodic_smooth` path.
pub fn cumulants_continuum(path: &StatePath) -> Result<CumulantSet> {
    require_smooth(path)?;
    continuum_integrals(path)?.into_cumulants(RESIDUE_TOL)
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub n: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Clone)]
enum GaugeKind {
    Harmonic { period: f64, terms: Vec<Harmonic> },
    Custom { derivatives: [RealFn; 4] },
}

/// A real phase function `β(χ)` with `β(Λ) − β(0) = 2πm`.
#[derive(Clone)]
pub struct GaugeFunction {
    winding: i64,
    kind: GaugeKind,
}

impl fmt::Debug for GaugeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("GaugeFunction");
        d.field("winding", &self.winding);
        match &self.kind {
            GaugeKind::Harmonic { period, terms } => d.field("period", period).field("terms", terms),
            GaugeKind::Custom { .. } => d.field("kind", &"custom"),
        };
        d.finish()
    }
}

impl GaugeFunction {
    /// `β(χ) = 2πmχ/Λ + Σ aₙ cos(2πnχ/Λ) + bₙ sin(2πnχ/Λ)`.
    pub fn harmonic(period: f64, winding: i64, terms: Vec<Harmonic>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGauge(format!("period must be positive, got {period}")));
        }
        if terms.iter().any(|t| !(t.cos.is_finite() && t.sin.is_finite())) {
            return Err(Error::InvalidGauge("harmonic coefficients must be finite".into()));
        }
        Ok(Self { winding, kind: GaugeKind::Harmonic { period, terms } })
    }

    pub fn constant(period: f64, value: f64) -> Result<Self> {
        Self::harmonic(period, 0, vec![Harmonic { n: 0, cos: value, sin: 0.0 }])
    }

    /// `β` with user-supplied derivatives `[β, β′, β″, β‴]`.
    pub fn custom(winding: i64, derivatives: [RealFn; 4]) -> Self {
        Self { winding, kind: GaugeKind::Custom { derivatives } }
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    /// `dᵏβ/dχᵏ` for `k` in 0..=3.
    pub fn derivative(&self, k: usize, chi: f64) -> f64 {
        assert!(k <= 3, "gauge derivatives are available up to third order");
        match &self.kind {
            GaugeKind::Custom { derivatives } => derivatives[k](chi),
            GaugeKind::Harmonic { period, terms } => {
                let w = 2.0 * PI / period;
                let mut v = match k {
                    0 => self.winding as f64 * w * chi,
                    1 => self.winding as f64 * w,
                    _ => 0.0,
                };
                for t in terms {
                    let q = w * t.n as f64;
                    let (s, c) = (q * chi).sin_cos();
                    // d/dχ cycles (cos, sin) → (−sin, cos)·q
                    let (dc, ds) = match k {
                        0 => (c, s),
                        1 => (-s * q, c * q),
                        2 => (-c * q * q, -s * q * q),
                        _ => (s * q.powi(3), -c * q.powi(3)),
                    };
                    v += t.cos * dc + t.sin * ds;
                }
                v
            }
        }
    }

    pub fn value(&self, chi: f64) -> f64 {
        self.derivative(0, chi)
    }

    /// Checks the boundary conditions the invariance argument needs:
    /// `β(χ₀+Λ) − β(χ₀) = 2πm` and periodic first through third derivatives,
    /// all to `1e-10` relative to the function's scale.
    pub fn validate(&self, grid: &ParamGrid) -> Result<()> {
        let (a, b) = (grid.origin(), grid.origin() + grid.period());
        let jump = self.value(b) - self.value(a) - 2.0 * PI * self.winding as f64;
        let scale = self.value(a).abs().max(self.value(b).abs()).max(1.0);
        if !(jump.abs() <= 1e-10 * scale) {
            return Err(Error::InvalidGauge(format!(
                "β(Λ) − β(0) differs from 2π·{} by {jump:.3e}",
                self.winding
            )));
        }
        for k in 1..=3 {
            let (x, y) = (self.derivative(k, a), self.derivative(k, b));
            if !((x - y).abs() <= 1e-10 * x.abs().max(y.abs()).max(1.0)) {
                return Err(Error::InvalidGauge(format!("derivative {k} is not periodic ({x} vs {y})")));
            }
        }
        Ok(())
    }
}

/// Multiplies state `I` by `e^{iβ(χ_I)}`; the result is tagged `raw`.
pub fn apply_gauge(path: &StatePath, g: &GaugeFunction) -> StatePath {
    let phases: Vec<Cplx> = path.grid().points().map(|chi| Cplx::from_polar(1.0, g.value(chi))).collect();
    path.rephased(&phases, GaugeTag::Raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeAudit {
    pub winding: i64,
    pub base: CumulantSet,
    pub twisted: CumulantSet,
    /// `C̃_n − C_n`.
    pub delta: [f64; 4],
    /// `(2πm, 0, 0, 0)`.
    pub expected: [f64; 4],
    pub residual: [f64; 4],
    /// Imaginary parts of the twisted-gauge integrals.
    pub twisted_imaginary: [f64; 4],
}

impl GaugeAudit {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }
}

/// Computes the continuum cumulants in the smooth gauge and again after the
/// twist `e^{iβ}`, evaluating the second set directly in the twisted gauge.
pub fn gauge_invariance_report(family: &HamiltonianFamily, grid: &ParamGrid, g: &GaugeFunction) -> Result<GaugeAudit> {
    g.validate(grid)?;
    let smooth = fix_gauge(&build_state_path(family, grid)?, GaugeMode::PeriodicSmooth)?;
    gauge_audit_on_path(&smooth, g)
}

/// Audit on an already smooth path.
pub fn gauge_audit_on_path(smooth: &StatePath, g: &GaugeFunction) -> Result<GaugeAudit> {
    require_smooth(smooth)?;
    let base = continuum_integrals_with_accuracy(smooth, AUDIT_STENCIL_ACCURACY)?.into_cumulants(RESIDUE_TOL)?;
    let twisted_integrals = continuum_integrals_with_accuracy(&apply_gauge(smooth, g), AUDIT_STENCIL_ACCURACY)?;
    let twisted = twisted_integrals.real_parts();
    let b = base.as_array();
    let t = twisted.as_array();
    let delta: [f64; 4] = std::array::from_fn(|n| t[n].unwrap_or(0.0) - b[n].unwrap_or(0.0));
    let expected = [2.0 * PI * g.winding() as f64, 0.0, 0.0, 0.0];
    let residual = std::array::from_fn(|n| (delta[n] - expected[n]).abs());
    Ok(GaugeAudit {
        winding: g.winding(),
        base,
        twisted,
        delta,
        expected,
        residual,
        twisted_imaginary: twisted_integrals.imaginary_residues(),
    })
}

/// `Re Σ Δχ γ1`, which vanishes for normalized states.
pub fn gamma1_real_sum(path: &StatePath) -> Result<f64> {
    let g1 = gamma(path, 1)?;
    Ok(g1.values.iter().map(|z| z.re).sum::<f64>() * g1.spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargmann::bargmann_product;
    use crate::models::{rice_mele_family, spin_family, spin_state_analytic, BlochModel, SpinModelParams};
    use crate::numerics::{norm, wrap_phase};

    fn smooth_spin(theta: f64, m: usize) -> StatePath {
        let f = spin_family(SpinModelParams::new(theta)).unwrap();
        let p = build_state_path(&f, &ParamGrid::new(2.0 * PI, m).unwrap()).unwrap();
        fix_gauge(&p, GaugeMode::PeriodicSmooth).unwrap()
    }

    fn analytic_spin_path(theta: f64, m: usize) -> StatePath {
        let grid = ParamGrid::new(2.0 * PI, m).unwrap();
        let states = grid.points().map(|phi| spin_state_analytic(theta, phi)).collect();
        StatePath::new(grid, states, GaugeTag::PeriodicSmooth).unwrap()
    }

    #[test]
    fn parallel_transport_links_are_real() {
        let p = analytic_spin_path(1.0, 64);
        let pt = fix_gauge(&p, GaugeMode::ParallelTransport).unwrap();
        assert_eq!(pt.gauge(), GaugeTag::ParallelTransport);
        for i in 0..63 {
            assert!(pt.overlap(i, i + 1).im.abs() < 1e-14);
            assert!(pt.overlap(i, i + 1).re > 0.0);
        }
    }

    #[test]
    fn smooth_gauge_closes_smoothly() {
        let theta = 1.3;
        let m = 128;
        let p = fix_gauge(&analytic_spin_path(theta, m), GaugeMode::PeriodicSmooth).unwrap();
        let h = p.grid().spacing();
        // all links share one phase, so states[M] and states[0] are one step apart
        let first = p.overlap(0, 1);
        for i in 0..m {
            assert!((p.overlap(i, i + 1) - first).norm() < 1e-13);
        }
        let d: Vec<Cplx> = p.state(m - 1).iter().zip(p.state(0)).map(|(a, b)| a - b).collect();
        let dpsi = (0.5 * theta).cos(); // ‖∂φ n₋‖
        assert!(norm(&d) <= 1.01 * h * dpsi);
    }

    #[test]
    fn gauge_fixing_keeps_product() {
        let f = rice_mele_family(BlochModel::new(1.0, 0.5, 0.3)).unwrap();
        let raw = build_state_path(&f, &ParamGrid::with_origin(2.0 * PI, 64, -PI).unwrap()).unwrap();
        let a = bargmann_product(&raw).unwrap();
        for mode in [GaugeMode::ParallelTransport, GaugeMode::PeriodicSmooth] {
            let b = bargmann_product(&fix_gauge(&raw, mode).unwrap()).unwrap();
            assert!((a.log_modulus - b.log_modulus).abs() < 1e-13);
            assert!(wrap_phase(a.accumulated_phase - b.accumulated_phase).abs() < 1e-13);
        }
    }

    #[test]
    fn gamma_requires_smooth_gauge() {
        let f = spin_family(SpinModelParams::new(1.0)).unwrap();
        let raw = build_state_path(&f, &ParamGrid::new(2.0 * PI, 64).unwrap()).unwrap();
        assert!(matches!(gamma(&raw, 1), Err(Error::WrongGauge { .. })));
        let small = smooth_spin(1.0, 16);
        assert!(matches!(gamma(&small, 1), Err(Error::StencilTooWide { .. })));
        assert!(matches!(gamma(&smooth_spin(1.0, 32), 5), Err(Error::UnsupportedOrder(5))));
    }

    #[test]
    fn gamma1_analytic_value() {
        // γ1 = ⟨n₋|∂φ n₋⟩ = i cos²(θ/2) in the analytic gauge
        let theta = PI / 2.0;
        let g = gamma(&analytic_spin_path(theta, 256), 1).unwrap();
        for v in &g.values {
            assert!((v - Cplx::new(0.0, 0.5)).norm() < 1e-8);
        }
    }

    #[test]
    fn gamma1_from_eigensolver_path() {
        let theta = 2.0;
        let c = (0.5_f64 * theta).cos().powi(2);
        let g = gamma(&smooth_spin(theta, 512), 1).unwrap();
        for v in &g.values {
            assert!(v.re.abs() <= 1e-8);
            assert!((v.im - c).abs() <= 1e-8);
        }
    }

    #[test]
    fn constant_path_is_zero() {
        let grid = ParamGrid::new(1.0, 64).unwrap();
        let s = vec![Cplx::new(0.6, 0.0), Cplx::new(0.0, 0.8)];
        let p = StatePath::new(grid, vec![s; 64], GaugeTag::PeriodicSmooth).unwrap();
        for n in 1..=4 {
            assert!(gamma(&p, n).unwrap().values.iter().all(|v| v.norm() < 1e-9));
        }
        let c = cumulants_continuum(&p).unwrap();
        for v in c.as_array() {
            assert!(v.unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn spin_third_value() {
        let c = cumulants_continuum(&smooth_spin(PI / 3.0, 512)).unwrap();
        let want = [0.75, 0.1875, -0.09375, -0.0234375];
        for (n, (g, w)) in c.per_length().iter().zip(want).enumerate() {
            assert!((g.unwrap() - w).abs() < 1e-6, "C{}: {:?} vs {w}", n + 1, g);
        }
    }

    #[test]
    fn spin_south_pole_all_zero() {
        let c = cumulants_continuum(&smooth_spin(PI, 512)).unwrap();
        for v in c.as_array() {
            assert!(v.unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn zero_gauge_is_identity() {
        let p = smooth_spin(0.8, 64);
        let g = GaugeFunction::harmonic(2.0 * PI, 0, vec![]).unwrap();
        let q = apply_gauge(&p, &g);
        assert_eq!(q.gauge(), GaugeTag::Raw);
        assert_eq!(q.states(), p.states());
    }

    #[test]
    fn winding_gauge_keeps_product() {
        let p = smooth_spin(0.8, 128);
        let g = GaugeFunction::harmonic(2.0 * PI, 1, vec![]).unwrap();
        let a = bargmann_product(&p).unwrap();
        let b = bargmann_product(&apply_gauge(&p, &g)).unwrap();
        assert!((a.log_modulus - b.log_modulus).abs() < 1e-13);
        assert!(wrap_phase(a.accumulated_phase - b.accumulated_phase).abs() < 1e-13);
    }

    #[test]
    fn sine_gauge_keeps_higher_cumulants() {
        let p = smooth_spin(1.0, 512);
        let g = GaugeFunction::harmonic(2.0 * PI, 0, vec![Harmonic { n: 1, cos: 0.0, sin: 0.3 }]).unwrap();
        let a = gauge_audit_on_path(&p, &g).unwrap();
        for n in 1..4 {
            assert!(a.delta[n].abs() < 1e-6, "ΔC{} = {}", n + 1, a.delta[n]);
        }
    }

    #[test]
    fn audit_examples() {
        let f = spin_family(SpinModelParams::new(1.0)).unwrap();
        let grid = ParamGrid::new(2.0 * PI, 512).unwrap();
        let linear = GaugeFunction::harmonic(2.0 * PI, 1, vec![]).unwrap();
        let a = gauge_invariance_report(&f, &grid, &linear).unwrap();
        assert!((a.delta[0] - 2.0 * PI).abs() < 1e-6);
        assert!(a.max_residual() < 1e-6, "{a:?}");

        let mixed = GaugeFunction::harmonic(
            2.0 * PI,
            0,
            vec![Harmonic { n: 2, cos: 0.0, sin: 0.5 }, Harmonic { n: 1, cos: 0.2, sin: 0.0 }],
        )
        .unwrap();
        let a = gauge_invariance_report(&f, &grid, &mixed).unwrap();
        assert!(a.max_residual() < 1e-6, "{a:?}");

        let constant = GaugeFunction::constant(2.0 * PI, 0.7).unwrap();
        let a = gauge_invariance_report(&f, &grid, &constant).unwrap();
        assert!(a.max_residual() < 1e-6, "{a:?}");
        assert!(a.delta[0].abs() < 1e-12);
    }

    #[test]
    fn gauge_validation() {
        let grid = ParamGrid::new(2.0 * PI, 64).unwrap();
        let bad = GaugeFunction::custom(
            0,
            [Arc::new(|x: f64| 0.1 * x), Arc::new(|_| 0.1), Arc::new(|_| 0.0), Arc::new(|_| 0.0)],
        );
        assert!(bad.validate(&grid).is_err());
        let kinked = GaugeFunction::custom(
            1,
            [Arc::new(|x: f64| x + 0.1 * x * x * (x - 2.0 * PI)), Arc::new(|_| 1.0), Arc::new(|_| 0.0), Arc::new(|x| x)],
        );
        assert!(kinked.validate(&grid).is_err());
        let ok = GaugeFunction::harmonic(2.0 * PI, -1, vec![Harmonic { n: 3, cos: 0.1, sin: -0.2 }]).unwrap();
        ok.validate(&grid).unwrap();
    }

    #[test]
    fn harmonic_derivatives_match_differences() {
        let g = GaugeFunction::harmonic(3.0, 2, vec![Harmonic { n: 1, cos: 0.3, sin: -0.1 }, Harmonic { n: 2, cos: 0.0, sin: 0.2 }])
            .unwrap();
        let d = 1e-4;
        for x in [0.0, 0.7, 2.1] {
            for k in 1..=3 {
                let fd = (g.derivative(k - 1, x + d) - g.derivative(k - 1, x - d)) / (2.0 * d);
                assert!((fd - g.derivative(k, x)).abs() < 1e-6 * g.derivative(k, x).abs().max(1.0));
            }
        }
    }
}
