//! Concurrence and entanglement of formation for arbitrary two-qubit states,
//! together with the pieces of Wootters' construction: subnormalized
//! eigenvectors, the spin-flip overlap matrix τ, its Takagi factorization and
//! the x-vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{hermitian_eig, sigma_yy, CMatrix, CVector, Mat4, Vec4, C64, I};
use crate::qstate::{spin_flip_overlap, DensityMatrix};

/// Eigenvalues of ρ at or below this are treated as exact zeros.
pub const EIGEN_DROP: f64 = 1e-14;

/// Sign patterns combining four x-vectors into Wootters' z-vectors.
pub const HADAMARD_SIGNS: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceReport {
    /// Square roots of the eigenvalues of ρρ̃, descending.
    pub lambdas: [f64; 4],
    pub concurrence: f64,
    /// Entanglement of formation in ebits (base 2).
    pub eof: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

/// Unitary `u` with `u τ uᵀ = diag(lambdas)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TakagiResult {
    pub u: Mat4,
    pub lambdas: [f64; 4],
}

impl TakagiResult {
    /// Largest entry of `|u u^† - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        (self.u * self.u.adjoint()).max_abs_diff(&Mat4::identity())
    }

    /// Largest entry of `|u τ uᵀ - diag(lambdas)|`.
    pub fn diagonalization_residual(&self, tau: &Mat4) -> f64 {
        (self.u * *tau * self.u.transpose()).max_abs_diff(&Mat4::diag_real(self.lambdas))
    }
}

/// Subnormalized vectors; for eigenvector sets `⟨v_i|v_j⟩ = p_i δ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubnormalizedSet {
    pub vectors: Vec<Vec4>,
}

impl SubnormalizedSet {
    /// `Σ |v_i⟩⟨v_i|`.
    pub fn operator(&self) -> Mat4 {
        self.vectors
            .iter()
            .fold(Mat4::zeros(), |acc, v| acc + v.projector())
    }

    /// Vector `i`, or zero past the end.
    fn get(&self, i: usize) -> Vec4 {
        self.vectors.get(i).copied().unwrap_or_default()
    }
}

pub fn concurrence_general(rho: &DensityMatrix) -> ConcurrenceReport {
    let lambdas = wootters_lambdas(rho);
    let concurrence = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0);
    ConcurrenceReport {
        lambdas,
        concurrence,
        eof: eof_from_concurrence(concurrence, LogBase::Two).expect("concurrence is clamped"),
    }
}

/// λ_i as the Takagi values of the complex-symmetric `√ρ (σ_y⊗σ_y) √ρ*`,
/// whose squares are the eigenvalues of `√ρ ρ̃ √ρ`.
fn wootters_lambdas(rho: &DensityMatrix) -> [f64; 4] {
    let eig = hermitian_eig(rho.matrix()).expect("density matrices are Hermitian");
    let sqrt_rho = eig.map_values(|x| if x > EIGEN_DROP { x.sqrt() } else { 0.0 });
    let a = sqrt_rho * sigma_yy() * sqrt_rho.conj();
    takagi_values(&symmetrize(&a))
}

fn symmetrize(a: &Mat4) -> Mat4 {
    (*a + a.transpose()).scale_real(0.5)
}

pub fn eof_from_concurrence(c: f64, base: LogBase) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(Error::OutOfRange(c));
    }
    let c = c.clamp(0.0, 1.0);
    let x = 0.5 + 0.5 * (1.0 - c * c).sqrt();
    let h = |t: f64| if t <= 0.0 { 0.0 } else { -t * t.ln() };
    let nats = h(x) + h(1.0 - x);
    Ok(match base {
        LogBase::Two => nats / std::f64::consts::LN_2,
        LogBase::E => nats,
    })
}

/// `|v_i⟩ = √p_i |ψ_i⟩` from the spectral decomposition, zero modes dropped.
pub fn subnormalized_eigenvectors(rho: &DensityMatrix) -> SubnormalizedSet {
    let eig = hermitian_eig(rho.matrix()).expect("density matrices are Hermitian");
    SubnormalizedSet {
        vectors: eig
            .values
            .iter()
            .zip(eig.vectors.iter())
            .filter(|(p, _)| **p > EIGEN_DROP)
            .map(|(p, v)| v.scale_real(p.sqrt()))
            .collect(),
    }
}

/// `τ_ij = ⟨v_i|ṽ_j⟩`, the overlap of `v_i` with the spin-flipped `v_j`,
/// padded with zeros to 4x4 when fewer than four vectors are given.
pub fn tau_matrix(vset: &SubnormalizedSet) -> Mat4 {
    let yy = sigma_yy();
    let flipped: Vec<Vec4> = (0..4).map(|j| yy.mul_vec(&vset.get(j).conj())).collect();
    Mat4::from_fn(|i, j| vset.get(i).dot(&flipped[j]))
}

/// Takagi values (singular values) of a complex-symmetric matrix, descending.
pub fn takagi_values(tau: &Mat4) -> [f64; 4] {
    let e = hermitian_eig(&real_embedding(tau)).expect("embedding is real symmetric");
    std::array::from_fn(|k| e.values[k].max(0.0))
}

/// `[[Re τ, Im τ], [Im τ, -Re τ]]`; its spectrum is `±σ_k`, and the
/// eigenvector `(a; b)` for `+σ_k` gives the Takagi vector `a + i b`.
fn real_embedding(tau: &Mat4) -> CMatrix<8> {
    CMatrix::from_fn(|i, j| {
        let t = tau[(i % 4, j % 4)];
        let x = match (i < 4, j < 4) {
            (true, true) => t.re,
            (true, false) | (false, true) => t.im,
            (false, false) => -t.re,
        };
        C64::new(x, 0.0)
    })
}

/// Takagi factorization `u τ uᵀ = diag(λ)` with `λ` real, nonnegative and
/// descending.
pub fn takagi(tau: &Mat4) -> Result<TakagiResult> {
    let serr = tau.symmetry_error();
    if !(serr <= 1e-10) {
        return Err(Error::NotSymmetric(serr));
    }
    let tau = symmetrize(tau);
    let e = hermitian_eig(&real_embedding(&tau))?;
    let scale = e.values[0].abs().max(1.0);
    let zero_cut = 1e-10 * scale;

    // Columns of V with τ = V Σ Vᵀ; the zero-σ block is any orthonormal
    // completion, since it spans the kernel.
    let mut cols: Vec<Vec4> = Vec::with_capacity(4);
    for k in 0..4 {
        if e.values[k] <= zero_cut {
            break;
        }
        let ev = &e.vectors[k];
        cols.push(CVector(std::array::from_fn(|i| {
            C64::new(ev[i].re, 0.0) + I * ev[i + 4].re
        })));
    }
    let mut basis = gram_schmidt(&cols);
    for k in 0..4 {
        if basis.len() == 4 {
            break;
        }
        let mut cand = basis.clone();
        cand.push(Vec4::basis(k));
        let ortho = gram_schmidt(&cand);
        if ortho.len() > basis.len() {
            basis = ortho;
        }
    }

    let mut u = Mat4::from_fn(|i, j| basis[i][j].conj());
    let d = u * tau * u.transpose();
    for k in 0..4 {
        let dk = d[(k, k)];
        if dk.norm() > 0.0 {
            let fix = C64::from_polar(1.0, -0.5 * dk.arg());
            for j in 0..4 {
                u[(k, j)] *= fix;
            }
        }
    }
    let d = u * tau * u.transpose();
    let lambdas = std::array::from_fn(|k| d[(k, k)].re.max(0.0));
    Ok(TakagiResult { u, lambdas })
}

/// Modified Gram-Schmidt, silently dropping vectors that are (numerically)
/// dependent on earlier ones.
fn gram_schmidt(vs: &[Vec4]) -> Vec<Vec4> {
    let mut out: Vec<Vec4> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = *v;
        for _ in 0..2 {
            for q in &out {
                w = w - q.scale(q.dot(&w));
            }
        }
        if w.norm() > 1e-8 {
            out.push(w.scale_real(1.0 / w.norm()));
        }
    }
    out
}

/// `|x_i⟩ = Σ_j U*_ij |v_j⟩`, so that `⟨x_i|x̃_j⟩ = λ_i δ_ij`.
pub fn x_vectors(vset: &SubnormalizedSet, tk: &TakagiResult) -> SubnormalizedSet {
    SubnormalizedSet {
        vectors: (0..4)
            .map(|i| {
                (0..4).fold(Vec4::zeros(), |acc, j| {
                    acc + vset.get(j).scale(tk.u[(i, j)].conj())
                })
            })
            .collect(),
    }
}

/// Combines x-vectors into `|z_α⟩ = ½ Σ_j s_αj e^{iφ_j} |x_j⟩` with the
/// Hadamard sign patterns `s`.
pub fn phased_combinations(x: &SubnormalizedSet, phases: [f64; 4]) -> SubnormalizedSet {
    let ph: [C64; 4] = phases.map(|p| C64::from_polar(1.0, p));
    SubnormalizedSet {
        vectors: HADAMARD_SIGNS
            .iter()
            .map(|signs| {
                (0..4).fold(Vec4::zeros(), |acc, j| {
                    acc + x.get(j).scale(ph[j] * (0.5 * signs[j]))
                })
            })
            .collect(),
    }
}

/// Wootters' minimizing ensemble: z-vectors built from the x-vectors with
/// phases `(0, -π/2, -π/2, -π/2)`. When `λ1 ≥ λ2 + λ3 + λ4` every member has
/// `⟨z|z̃⟩ = C/4` and the average concurrence equals `C`.
pub fn wootters_ensemble(rho: &DensityMatrix) -> SubnormalizedSet {
    let v = subnormalized_eigenvectors(rho);
    let tk = takagi(&tau_matrix(&v)).expect("tau is symmetric by construction");
    let x = x_vectors(&v, &tk);
    let h = -std::f64::consts::FRAC_PI_2;
    phased_combinations(&x, [0.0, h, h, h])
}

/// `Σ_k ⟨w_k|w_k⟩ C(w_k/|w_k|) = Σ_k |⟨w_k|w̃_k⟩|` for subnormalized members.
pub fn average_concurrence(vectors: &[Vec4]) -> f64 {
    vectors.iter().map(|v| spin_flip_overlap(v).norm()).sum()
}

/// Concurrence of a subnormalized vector after normalization; zero for the
/// zero vector.
pub fn normalized_concurrence(v: &Vec4) -> f64 {
    let n = v.norm_sqr();
    if n == 0.0 {
        0.0
    } else {
        spin_flip_overlap(v).norm() / n
    }
}
