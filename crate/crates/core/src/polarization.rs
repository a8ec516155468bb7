//! Polarization quantities of a 1D two-band Bloch model.
//!
//! The momentum-shift identity turns `⟨Ψ₀|e^{−iΔK X̂}|Ψ₀⟩^{N_k}` into the cyclic
//! overlap product over an evenly spaced zone grid, so the Bloch path is an
//! ordinary [`StatePath`] with `χ ≡ K` and `Λ ≡ 2π/L`. Positions are quoted in
//! the periodic convention with both orbitals at the cell origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bargmann::{bargmann_product, build_state_path, discrete_berry_phase, ParamGrid, StatePath};
use crate::continuum::{gamma, RESIDUE_TOL};
use crate::models::{rice_mele_family, BlochModel};
use crate::numerics::{periodic_trapezoid, principal_arg, wrap_phase};
use crate::{Error, Result};

/// `K_I = −π/L + I·ΔK`, `ΔK = 2π/(N_k L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BZGrid {
    pub n_k: usize,
    pub lattice_constant: f64,
}

impl BZGrid {
    pub fn new(n_k: usize, lattice_constant: f64) -> Result<Self> {
        let g = Self { n_k, lattice_constant };
        g.to_param_grid()?;
        Ok(g)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / (self.n_k as f64 * self.lattice_constant)
    }

    pub fn to_param_grid(&self) -> Result<ParamGrid> {
        if !(self.lattice_constant.is_finite() && self.lattice_constant > 0.0) {
            return Err(Error::InvalidGrid(format!("lattice constant must be positive, got {}", self.lattice_constant)));
        }
        let l = self.lattice_constant;
        ParamGrid::with_origin(2.0 * PI / l, self.n_k, -PI / l)
    }
}

/// Lower band when `band` is 0, upper when 1.
pub fn bloch_path(model: &BlochModel, grid: &BZGrid, band: usize) -> Result<StatePath> {
    if (model.lattice_constant - grid.lattice_constant).abs() > 1e-12 * model.lattice_constant {
        return Err(Error::InvalidParameter("model and grid disagree on the lattice constant".into()));
    }
    let family = rice_mele_family(*model)?.with_band_index(band)?;
    build_state_path(&family, &grid.to_param_grid()?)
}

/// Berry phase across the zone, `−Im ln Π` reduced to (−π, π].
pub fn zak_phase(model: &BlochModel, grid: &BZGrid, band: usize) -> Result<f64> {
    let path = bloch_path(model, grid, band)?;
    Ok(discrete_berry_phase(&bargmann_product(&path)?).reduced)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestaPosition {
    /// `−(1/ΔK)·arg⟨Ψ(K_I)|Ψ(K_{I+1})⟩` for each link.
    pub per_link: Vec<f64>,
    /// Mean over links before reduction.
    pub unreduced: f64,
    /// Mean reduced into [0, L).
    pub reduced: f64,
    pub lattice_constant: f64,
}

pub fn resta_position(path: &StatePath, delta_k: f64) -> Result<RestaPosition> {
    let n = path.len();
    let per_link = (0..n)
        .map(|i| principal_arg(path.overlap(i, i + 1)).map(|a| -a / delta_k))
        .collect::<Result<Vec<f64>>>()?;
    let unreduced = per_link.iter().sum::<f64>() / n as f64;
    let l = 2.0 * PI / path.grid().period();
    Ok(RestaPosition { per_link, unreduced, reduced: unreduced.rem_euclid(l), lattice_constant: l })
}

/// `σ²_X = −(2/(N_k ΔK²)) Σ_I Re ln⟨Ψ(K_I)|Ψ(K_{I+1})⟩`.
pub fn resta_spread_discrete(path: &StatePath, delta_k: f64) -> Result<f64> {
    let pi = bargmann_product(path)?;
    Ok(-2.0 * pi.log_modulus / (path.len() as f64 * delta_k * delta_k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadResult {
    /// `Re σ²_X(K_I)` with `σ²_X = −⟨Ψ|∂²_K Ψ⟩ + ⟨Ψ|∂_K Ψ⟩²`.
    pub per_k: Vec<f64>,
    /// Largest `|Im σ²_X(K_I)|`. The imaginary part is `−∂_K A(K)`, so it
    /// integrates to zero but is only `O(ΔK²)` pointwise in a discrete gauge.
    pub max_imaginary: f64,
    /// `(L/2π) ∫ dK σ²_X(K)`.
    pub average: f64,
    /// Same path through [`resta_spread_discrete`].
    pub discrete: f64,
    /// `Re Σ ΔK γ1`, the first-order term that drops out of the spread.
    pub first_order_real: f64,
}

/// Zone-averaged spread on a `periodic_smooth` Bloch path.
pub fn spread_bz_average(path: &StatePath) -> Result<SpreadResult> {
    let g1 = gamma(path, 1)?;
    let g2 = gamma(path, 2)?;
    let sigma: Vec<_> = g1.values.iter().zip(&g2.values).map(|(a, b)| -b + a * a).collect();
    let period = path.grid().period();
    let im: Vec<f64> = sigma.iter().map(|z| z.im).collect();
    let residue = (periodic_trapezoid(&im, period)? / period).abs();
    if !(residue <= RESIDUE_TOL) {
        return Err(Error::ImaginaryResidue { order: 2, residue });
    }
    let per_k: Vec<f64> = sigma.iter().map(|z| z.re).collect();
    let average = periodic_trapezoid(&per_k, period)? / period;
    let dk = path.grid().spacing();
    Ok(SpreadResult {
        max_imaginary: im.iter().fold(0.0, |m, v| m.max(v.abs())),
        per_k,
        average,
        discrete: resta_spread_discrete(path, dk)?,
        first_order_real: g1.values.iter().map(|z| z.re).sum::<f64>() * dk,
    })
}

/// Distance of `phase` from the nearest of {0, π} on the circle.
pub fn quantization_defect(phase: f64) -> f64 {
    let to_zero = wrap_phase(phase).abs();
    let to_pi = wrap_phase(phase - PI).abs();
    to_zero.min(to_pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargmann::{product_cumulants, ExtractionMethod, GaugeTag};
    use crate::continuum::{fix_gauge, GaugeMode};
    use crate::numerics::{inner, Cplx};
    use rand::{Rng, SeedableRng};

    const SSH_TOPO: BlochModel = BlochModel { t1: 0.5, t2: 1.0, delta: 0.0, lattice_constant: 1.0 };
    const SSH_TRIVIAL: BlochModel = BlochModel { t1: 1.0, t2: 0.5, delta: 0.0, lattice_constant: 1.0 };
    const RICE_MELE: BlochModel = BlochModel { t1: 1.0, t2: 0.5, delta: 0.3, lattice_constant: 1.0 };
    const FLAT: BlochModel = BlochModel { t1: 0.7, t2: 0.0, delta: 0.2, lattice_constant: 1.0 };

    fn smooth(model: &BlochModel, n_k: usize) -> StatePath {
        let grid = BZGrid::new(n_k, model.lattice_constant).unwrap();
        fix_gauge(&bloch_path(model, &grid, 0).unwrap(), GaugeMode::PeriodicSmooth).unwrap()
    }

    // Brute-force discrete Zak phase for an SSH chain straight from the
    // closed-form lower-band spinor (1, −e^{iϑ(k)})/√2, ϑ = arg(t1 + t2 e^{ikL}).
    fn ssh_zak_oracle(t1: f64, t2: f64, n_k: usize) -> f64 {
        let spinor = |k: f64| {
            let z = Cplx::new(t1 + t2 * k.cos(), t2 * k.sin());
            let ph = z / z.norm();
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![Cplx::new(s, 0.0), -ph * s]
        };
        let ks: Vec<f64> = (0..n_k).map(|i| -PI + i as f64 * 2.0 * PI / n_k as f64).collect();
        let mut prod = Cplx::new(1.0, 0.0);
        for i in 0..n_k {
            prod *= inner(&spinor(ks[i]), &spinor(ks[(i + 1) % n_k]));
        }
        wrap_phase(-prod.arg())
    }

    #[test]
    fn grid_checks() {
        assert!(BZGrid::new(9, 1.0).is_err());
        assert!(BZGrid::new(6, 1.0).is_err());
        assert!(BZGrid::new(8, 0.0).is_err());
        let g = BZGrid::new(8, 2.0).unwrap().to_param_grid().unwrap();
        assert!((g.point(0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn flat_model() {
        let grid = BZGrid::new(16, 1.0).unwrap();
        let p = bloch_path(&FLAT, &grid, 0).unwrap();
        for i in 0..16 {
            assert!((inner(p.state(0), p.state(i)).norm() - 1.0).abs() < 1e-14);
        }
        assert!(zak_phase(&FLAT, &grid, 0).unwrap().abs() < 1e-14);
        let x = resta_position(&p, grid.spacing()).unwrap();
        assert!(x.reduced.min(1.0 - x.reduced) < 1e-12);
        assert!(resta_spread_discrete(&p, grid.spacing()).unwrap().abs() < 1e-12);
        let s = spread_bz_average(&smooth(&FLAT, 64)).unwrap();
        assert!(s.per_k.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn ssh_zak_values() {
        let grid = BZGrid::new(256, 1.0).unwrap();
        let topo = zak_phase(&SSH_TOPO, &grid, 0).unwrap();
        let triv = zak_phase(&SSH_TRIVIAL, &grid, 0).unwrap();
        assert!(wrap_phase(topo - PI).abs() < 1e-6);
        assert!(triv.abs() < 1e-6);
        for n_k in [8, 16, 32] {
            let g = BZGrid::new(n_k, 1.0).unwrap();
            assert!(wrap_phase(zak_phase(&SSH_TOPO, &g, 0).unwrap() - ssh_zak_oracle(0.5, 1.0, n_k)).abs() < 1e-12);
            assert!(wrap_phase(zak_phase(&SSH_TRIVIAL, &g, 0).unwrap() - ssh_zak_oracle(1.0, 0.5, n_k)).abs() < 1e-12);
        }
    }

    #[test]
    fn ssh_gap_and_odd_grid() {
        let grid = BZGrid::new(64, 1.0).unwrap();
        assert!(bloch_path(&SSH_TOPO, &grid, 0).is_ok());
        assert!(BZGrid::new(63, 1.0).is_err());
        let closed = BlochModel::new(1.0, 1.0, 0.0);
        assert!(matches!(bloch_path(&closed, &grid, 0), Err(Error::GapClosed { .. })));
    }

    #[test]
    fn topological_position_is_half_cell() {
        for l in [1.0, 2.5] {
            let model = BlochModel { lattice_constant: l, ..SSH_TOPO };
            let grid = BZGrid::new(128, l).unwrap();
            let x = resta_position(&bloch_path(&model, &grid, 0).unwrap(), grid.spacing()).unwrap();
            assert!((x.reduced - l / 2.0).abs() < 1e-4, "{} vs {}", x.reduced, l / 2.0);
        }
    }

    #[test]
    fn position_total_is_gauge_invariant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let grid = BZGrid::new(64, 1.0).unwrap();
        let p = bloch_path(&RICE_MELE, &grid, 0).unwrap();
        let phases: Vec<Cplx> = (0..64).map(|_| Cplx::from_polar(1.0, rng.gen_range(-PI..PI))).collect();
        let q = p.rephased(&phases, GaugeTag::Raw);
        let a = resta_position(&p, grid.spacing()).unwrap();
        let b = resta_position(&q, grid.spacing()).unwrap();
        assert!(a.per_link.iter().zip(&b.per_link).any(|(x, y)| (x - y).abs() > 1e-3));
        let d = (a.reduced - b.reduced).rem_euclid(1.0);
        assert!(d.min(1.0 - d) < 1e-12);
    }

    #[test]
    fn spreads_agree() {
        let s = spread_bz_average(&smooth(&RICE_MELE, 256)).unwrap();
        assert!((s.average - s.discrete).abs() < 1e-3);
        assert!(s.per_k.iter().all(|v| *v >= -1e-10));
        assert!(s.first_order_real.abs() <= 1e-8);
        let fine = spread_bz_average(&smooth(&RICE_MELE, 1024)).unwrap();
        assert!(fine.max_imaginary < s.max_imaginary / 8.0);
        let ssh = spread_bz_average(&smooth(&SSH_TOPO, 256)).unwrap();
        assert!((ssh.average - ssh.discrete).abs() < 1e-3);
        let ssh = spread_bz_average(&smooth(&SSH_TOPO, 1024)).unwrap();
        assert!((ssh.average - ssh.discrete).abs() < 1e-5);
    }

    #[test]
    fn spread_is_c2_per_zone_length() {
        let p = smooth(&RICE_MELE, 1024);
        let c = product_cumulants(&p, ExtractionMethod::TwoResolution).unwrap();
        let spread = resta_spread_discrete(&p, p.grid().spacing()).unwrap();
        assert!((spread - c.c2 / p.grid().period()).abs() < 1e-4);
    }

    #[test]
    fn average_needs_smooth_gauge() {
        let grid = BZGrid::new(64, 1.0).unwrap();
        assert!(spread_bz_average(&bloch_path(&RICE_MELE, &grid, 0).unwrap()).is_err());
    }

    #[test]
    fn defect_on_circle() {
        assert!(quantization_defect(PI - 1e-9) < 2e-9);
        assert!(quantization_defect(-PI + 1e-9) < 2e-9);
        assert!((quantization_defect(PI / 2.0) - PI / 2.0).abs() < 1e-15);
    }
}
