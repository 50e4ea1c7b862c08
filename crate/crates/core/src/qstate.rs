//! Two-qubit states: validated density matrices, pure states, weighted
//! ensembles, the spin flip and PPT diagnostics.
//!
//! JSON forms: a density matrix is `{"matrix": [[re, im], ...]}` with the 16
//! entries in row-major order, a pure state is `{"amplitudes": [[re, im], ...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{
    hermitian_eig, partial_transpose, sigma_yy, tensor_vec, CVector, Mat4, Subsystem, Tolerances,
    Vec2, Vec4, C64,
};

const STATE_TOL: f64 = 1e-10;

/// Normalized two-qubit ket in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureStateRepr", into = "PureStateRepr")]
pub struct PureState {
    amplitudes: Vec4,
}

impl PureState {
    pub fn new(amplitudes: Vec4) -> Result<Self> {
        let n = amplitudes.norm_sqr();
        if !((n - 1.0).abs() <= STATE_TOL) {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `v`; fails on the zero vector.
    pub fn from_unnormalized(v: Vec4) -> Result<Self> {
        v.normalized()
            .map(|amplitudes| Self { amplitudes })
            .ok_or(Error::NotNormalized(v.norm_sqr()))
    }

    /// `|a⟩ ⊗ |b⟩` for unit single-qubit kets.
    pub fn product(a: &Vec2, b: &Vec2) -> Result<Self> {
        Self::new(tensor_vec(a, b))
    }

    pub fn amplitudes(&self) -> &Vec4 {
        &self.amplitudes
    }

    pub fn projector(&self) -> Mat4 {
        self.amplitudes.projector()
    }

    /// Pure-state concurrence `|⟨ψ|ψ̃⟩| = 2|ad - bc|`.
    pub fn concurrence(&self) -> f64 {
        spin_flip_overlap(&self.amplitudes).norm()
    }
}

/// `⟨v|ṽ⟩` with `|ṽ⟩ = (σ_y⊗σ_y)|v*⟩`. Its modulus is `⟨v|v⟩` times the
/// concurrence of the normalized state, so it vanishes exactly on products.
pub fn spin_flip_overlap(v: &Vec4) -> C64 {
    let a = v.0;
    // v^† Σ v^* with Σ = σ_y⊗σ_y = antidiag(-1, 1, 1, -1)
    (C64::new(2.0, 0.0) * (a[1] * a[2] - a[0] * a[3])).conj()
}

#[derive(Serialize, Deserialize)]
struct PureStateRepr {
    amplitudes: Vec<[f64; 2]>,
}

impl From<PureState> for PureStateRepr {
    fn from(s: PureState) -> Self {
        Self {
            amplitudes: s.amplitudes.0.iter().map(|x| [x.re, x.im]).collect(),
        }
    }
}

impl TryFrom<PureStateRepr> for PureState {
    type Error = Error;
    fn try_from(r: PureStateRepr) -> Result<Self> {
        if r.amplitudes.len() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: r.amplitudes.len(),
            });
        }
        PureState::new(CVector(std::array::from_fn(|k| {
            C64::new(r.amplitudes[k][0], r.amplitudes[k][1])
        })))
    }
}

/// Hermitian, unit-trace, positive semidefinite 4x4 operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct DensityMatrix {
    matrix: Mat4,
}

impl DensityMatrix {
    pub fn new(matrix: Mat4) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::InvalidDensity("non-finite entries".into()));
        }
        let herr = matrix.hermiticity_error();
        if herr > STATE_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min = hermitian_eig(&matrix)?.min_value();
        if min < -STATE_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Mat4::identity().scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (self.matrix * self.matrix).trace().re
    }
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    matrix: Vec<[f64; 2]>,
}

impl From<DensityMatrix> for DensityRepr {
    fn from(d: DensityMatrix) -> Self {
        Self {
            matrix: d.matrix.row_major().iter().map(|x| [x.re, x.im]).collect(),
        }
    }
}

impl TryFrom<DensityRepr> for DensityMatrix {
    type Error = Error;
    fn try_from(r: DensityRepr) -> Result<Self> {
        let entries: Vec<C64> = r.matrix.iter().map(|x| C64::new(x[0], x[1])).collect();
        DensityMatrix::new(Mat4::from_row_major(&entries)?)
    }
}

/// Pure states with nonnegative weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleRepr", into = "EnsembleRepr")]
pub struct WeightedEnsemble {
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl WeightedEnsemble {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "weight {w} is negative or not finite"
            )));
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_i |s_i⟩⟨s_i|` without any normalization requirement.
    pub fn operator(&self) -> Mat4 {
        self.weights
            .iter()
            .zip(&self.states)
            .fold(Mat4::zeros(), |acc, (w, s)| {
                acc + s.projector().scale_real(*w)
            })
    }

    /// Same states with every weight multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.weights.iter().map(|w| w * factor).collect(),
            self.states.clone(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct EnsembleRepr {
    weights: Vec<f64>,
    amplitudes: Vec<Vec<[f64; 2]>>,
}

impl From<WeightedEnsemble> for EnsembleRepr {
    fn from(e: WeightedEnsemble) -> Self {
        Self {
            weights: e.weights,
            amplitudes: e
                .states
                .into_iter()
                .map(|s| PureStateRepr::from(s).amplitudes)
                .collect(),
        }
    }
}

impl TryFrom<EnsembleRepr> for WeightedEnsemble {
    type Error = Error;
    fn try_from(r: EnsembleRepr) -> Result<Self> {
        let states = r
            .amplitudes
            .into_iter()
            .map(|amplitudes| PureState::try_from(PureStateRepr { amplitudes }))
            .collect::<Result<Vec<_>>>()?;
        WeightedEnsemble::new(r.weights, states)
    }
}

/// Mixes a normalized ensemble into a density matrix.
pub fn mix(ensemble: &WeightedEnsemble) -> Result<DensityMatrix> {
    let total = ensemble.total_weight();
    if (total - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    DensityMatrix::new(ensemble.operator())
}

/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Mat4 {
    spin_flip_operator(rho.matrix())
}

pub fn spin_flip_operator(m: &Mat4) -> Mat4 {
    let yy = sigma_yy();
    yy * m.conj() * yy
}

/// Smallest eigenvalue of the partial transpose over the second qubit.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> f64 {
    hermitian_eig(&partial_transpose(rho.matrix(), Subsystem::Second))
        .expect("partial transpose of a Hermitian matrix is Hermitian")
        .min_value()
}

/// Peres-Horodecki test; boundary states count as separable.
pub fn is_ppt_separable(rho: &DensityMatrix) -> bool {
    is_ppt_separable_with(rho, &Tolerances::default())
}

pub fn is_ppt_separable_with(rho: &DensityMatrix, tol: &Tolerances) -> bool {
    ppt_min_eigenvalue(rho) >= -tol.psd
}
