use super::{inner, Cplx};
use crate::{Error, Result};

/// Absolute Hermiticity tolerance, scaled by `max(1, max|entry|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Dense `d×d` complex self-adjoint matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Cplx>,
}

impl HermitianMatrix {
    /// Validates Hermiticity and stores the exactly symmetrized matrix
    /// `(A + A†)/2`.
    pub fn new(dim: usize, entries: Vec<Cplx>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("HermitianMatrix entries"));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut max_asymmetry = 0.0f64;
        for j in 0..dim {
            for k in j..dim {
                let d = (entries[j * dim + k] - entries[k * dim + j].conj()).norm();
                max_asymmetry = max_asymmetry.max(d);
            }
        }
        if max_asymmetry > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        let mut sym = entries;
        for j in 0..dim {
            sym[j * dim + j] = Cplx::new(sym[j * dim + j].re, 0.0);
            for k in j + 1..dim {
                let avg = (sym[j * dim + k] + sym[k * dim + j].conj()) * 0.5;
                sym[j * dim + k] = avg;
                sym[k * dim + j] = avg.conj();
            }
        }
        Ok(Self { dim, entries: sym })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Cplx) -> Result<Self> {
        let entries = (0..dim * dim).map(|i| f(i / dim, i % dim)).collect();
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![Cplx::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m.entries[j * dim + j] = Cplx::new(1.0, 0.0);
        }
        m
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (Cplx::new(0.0, 0.0), Cplx::new(1.0, 0.0));
        Self { dim: 2, entries: vec![o, l, l, o] }
    }

    pub fn pauli_y() -> Self {
        let o = Cplx::new(0.0, 0.0);
        Self { dim: 2, entries: vec![o, Cplx::new(0.0, -1.0), Cplx::new(0.0, 1.0), o] }
    }

    pub fn pauli_z() -> Self {
        let o = Cplx::new(0.0, 0.0);
        Self { dim: 2, entries: vec![Cplx::new(1.0, 0.0), o, o, Cplx::new(-1.0, 0.0)] }
    }

    /// `Σ cᵢ·Aᵢ` for real coefficients; all terms must share a dimension.
    pub fn combine(terms: &[(f64, &HermitianMatrix)]) -> Self {
        let dim = terms.first().map_or(1, |(_, m)| m.dim);
        let mut out = Self::zeros(dim);
        for (c, m) in terms {
            assert_eq!(m.dim, dim, "dimension mismatch in HermitianMatrix::combine");
            for (o, e) in out.entries.iter_mut().zip(&m.entries) {
                *o += e * c;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Cplx] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    pub fn apply(&self, v: &[Cplx]) -> Vec<Cplx> {
        assert_eq!(v.len(), self.dim, "vector length does not match matrix dimension");
        (0..self.dim)
            .map(|j| self.entries[j * self.dim..(j + 1) * self.dim].iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Matrix elements `⟨vᵢ|A|vⱼ⟩` in the eigenvector basis of `basis`.
    pub fn in_basis(&self, basis: &EigDecomposition) -> HermitianMatrix {
        let d = self.dim;
        let applied: Vec<Vec<Cplx>> = basis.eigenvectors.iter().map(|v| self.apply(v)).collect();
        let mut entries = vec![Cplx::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[i * d + j] = inner(&basis.eigenvectors[i], &applied[j]);
            }
        }
        // symmetrize away rounding; the similarity transform is unitary
        Self::from_raw_symmetrized(d, entries)
    }

    /// `V·A·V†`: maps a matrix given in the eigenbasis back to the original basis.
    pub fn from_basis(&self, basis: &EigDecomposition) -> HermitianMatrix {
        let d = self.dim;
        let v = &basis.eigenvectors;
        let mut entries = vec![Cplx::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = Cplx::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        acc += v[i][r] * self.entries[i * d + j] * v[j][c].conj();
                    }
                }
                entries[r * d + c] = acc;
            }
        }
        Self::from_raw_symmetrized(d, entries)
    }

    fn from_raw_symmetrized(dim: usize, mut entries: Vec<Cplx>) -> Self {
        for j in 0..dim {
            entries[j * dim + j].im = 0.0;
            for k in j + 1..dim {
                let avg = (entries[j * dim + k] + entries[k * dim + j].conj()) * 0.5;
                entries[j * dim + k] = avg;
                entries[k * dim + j] = avg.conj();
            }
        }
        Self { dim, entries }
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors; `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<Cplx>>,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Distance from eigenvalue `i` to its nearest neighbour in the spectrum.
    pub fn gap_around(&self, i: usize) -> f64 {
        let e = &self.eigenvalues;
        let below = if i > 0 { e[i] - e[i - 1] } else { f64::INFINITY };
        let above = if i + 1 < e.len() { e[i + 1] - e[i] } else { f64::INFINITY };
        below.min(above)
    }

    /// Smallest spacing between any two consecutive eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// `V·diag(E)·V†`, row-major.
    pub fn reconstruct(&self) -> Vec<Cplx> {
        let d = self.dim();
        let mut out = vec![Cplx::new(0.0, 0.0); d * d];
        for (e, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for r in 0..d {
                for c in 0..d {
                    out[r * d + c] += v[r] * v[c].conj() * e;
                }
            }
        }
        out
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first rephases column `q` so that `a_pq` becomes real, then
/// applies the classical real Jacobi rotation in the `(p, q)` plane. Sweeps
/// continue until the off-diagonal Frobenius norm drops below
/// `1e-15·‖A‖_F`. Output is deterministic; eigenvector phases are whatever
/// the rotation sequence produces.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<EigDecomposition> {
    let d = h.dim;
    let mut a = h.entries.clone();
    let mut v = HermitianMatrix::identity(d).entries;

    let frob = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-15 * frob;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, d) <= target {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut a, &mut v, d, p, q, frob);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, d) > target {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i * d + i].re.total_cmp(&a[j * d + j].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[i * d + i].re).collect();
    let eigenvectors = order.iter().map(|&i| (0..d).map(|r| v[r * d + i]).collect()).collect();
    Ok(EigDecomposition { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &[Cplx], d: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..d {
        for k in 0..d {
            if j != k {
                s += a[j * d + k].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut [Cplx], v: &mut [Cplx], d: usize, p: usize, q: usize, frob: f64) {
    let apq = a[p * d + q];
    let r = apq.norm();
    if r <= 1e-300 || r <= 1e-18 * frob {
        a[p * d + q] = Cplx::new(0.0, 0.0);
        a[q * d + p] = Cplx::new(0.0, 0.0);
        return;
    }
    let phase = apq / r; // e^{iα}
    let app = a[p * d + p].re;
    let aqq = a[q * d + q].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U = diag(1, e^{-iα}) · [[c, s], [-s, c]] restricted to (p, q)
    let upp = Cplx::new(c, 0.0);
    let upq = Cplx::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    for k in 0..d {
        let x = a[k * d + p];
        let y = a[k * d + q];
        a[k * d + p] = x * upp + y * uqp;
        a[k * d + q] = x * upq + y * uqq;
    }
    for k in 0..d {
        let x = a[p * d + k];
        let y = a[q * d + k];
        a[p * d + k] = upp.conj() * x + uqp.conj() * y;
        a[q * d + k] = upq.conj() * x + uqq.conj() * y;
    }
    a[p * d + q] = Cplx::new(0.0, 0.0);
    a[q * d + p] = Cplx::new(0.0, 0.0);
    a[p * d + p].im = 0.0;
    a[q * d + q].im = 0.0;

    for k in 0..d {
        let x = v[k * d + p];
        let y = v[k * d + q];
        v[k * d + p] = x * upp + y * uqp;
        v[k * d + q] = x * upq + y * uqq;
    }
}
