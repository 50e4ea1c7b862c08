//! Iso-concurrence decomposable (ICD) states: mixtures of four orthonormal
//! states that all share the concurrence `sin 2θ`.
//!
//! ```text
//! ψ1 = cosθ|↑↑⟩ + sinθ|↓↓⟩     ψ3 = cosθ|↑↓⟩ + sinθ|↓↑⟩
//! ψ2 = sinθ|↑↑⟩ − cosθ|↓↓⟩     ψ4 = sinθ|↑↓⟩ − cosθ|↓↑⟩
//! ```
//!
//! Labels 1..4 in the docs are indices 0..3 in code.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::concurrence::{SubnormalizedSet, TakagiResult};
use crate::error::{Error, Result};
use crate::qmat::{tensor, Mat2, Mat4, Vec4, C64, ZERO};
use crate::qstate::{DensityMatrix, PureState};

/// Inputs whose probabilities sum to within this of one are renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;
/// Smallest admissible `sin 2θ`.
pub const MIN_SIN_2THETA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ICDParams {
    p: [f64; 4],
    theta: f64,
}

#[derive(Deserialize)]
struct ICDParamsRepr {
    p: [f64; 4],
    theta: f64,
}

impl<'de> Deserialize<'de> for ICDParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ICDParamsRepr::deserialize(d)?;
        ICDParams::new(r.p, r.theta).map_err(serde::de::Error::custom)
    }
}

impl ICDParams {
    pub fn new(p: [f64; 4], theta: f64) -> Result<Self> {
        check_theta(theta)?;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProbabilities(format!(
                "non-finite entry in {p:?}"
            )));
        }
        if let Some(x) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidProbabilities(format!("{x} outside [0, 1]")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::InvalidProbabilities(format!("sum is {sum}")));
        }
        // leave clean inputs bit-exact; only visibly off sums are rescaled
        let p = if (sum - 1.0).abs() > 1e-12 {
            p.map(|x| x / sum)
        } else {
            p
        };
        Ok(Self { p, theta })
    }

    pub fn p(&self) -> [f64; 4] {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sin2t(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    pub fn cos2t(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    /// Same θ, probabilities permuted so that `q[i] = p[perm[i]]`.
    pub fn permuted(&self, perm: [usize; 4]) -> Self {
        Self {
            p: perm.map(|k| self.p[k]),
            theta: self.theta,
        }
    }

    /// The point at `π/2 − θ` with `p1 ↔ p2` and `p3 ↔ p4`, which is
    /// locally equivalent to `self`.
    pub fn mirrored(&self) -> Self {
        Self {
            p: [self.p[1], self.p[0], self.p[3], self.p[2]],
            theta: FRAC_PI_2 - self.theta,
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    if (2.0 * theta).sin() < MIN_SIN_2THETA {
        return Err(Error::ThetaBoundary(theta));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    Separable,
    Entangled1,
    Entangled2,
    Entangled3,
    Entangled4,
}

impl RegionKind {
    pub fn is_entangled(self) -> bool {
        self != RegionKind::Separable
    }

    fn entangled(k: usize) -> Self {
        [
            RegionKind::Entangled1,
            RegionKind::Entangled2,
            RegionKind::Entangled3,
            RegionKind::Entangled4,
        ][k]
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub kind: RegionKind,
    /// `lhs − rhs` of the binding inequality: positive by the violation
    /// amount when entangled, the largest (nonpositive) margin otherwise.
    pub slack: f64,
}

/// The four ψ_i at angle θ.
pub fn icd_basis(theta: f64) -> Result<[PureState; 4]> {
    check_theta(theta)?;
    Ok(basis_vectors(theta).map(|v| PureState::new(v).expect("unit norm by construction")))
}

fn basis_vectors(theta: f64) -> [Vec4; 4] {
    let (s, c) = theta.sin_cos();
    [
        Vec4::from_real([c, 0.0, 0.0, s]),
        Vec4::from_real([s, 0.0, 0.0, -c]),
        Vec4::from_real([0.0, c, s, 0.0]),
        Vec4::from_real([0.0, s, -c, 0.0]),
    ]
}

/// `Σ p_i |ψ_i⟩⟨ψ_i|`.
pub fn icd_density(params: &ICDParams) -> DensityMatrix {
    let (s, c) = params.theta.sin_cos();
    let [p1, p2, p3, p4] = params.p;
    let mut m = Mat4::zeros();
    let mut put = |i: usize, j: usize, x: f64| m[(i, j)] = C64::new(x, 0.0);
    put(0, 0, p1 * c * c + p2 * s * s);
    put(3, 3, p1 * s * s + p2 * c * c);
    put(0, 3, (p1 - p2) * c * s);
    put(3, 0, (p1 - p2) * c * s);
    put(1, 1, p3 * c * c + p4 * s * s);
    put(2, 2, p3 * s * s + p4 * c * c);
    put(1, 2, (p3 - p4) * c * s);
    put(2, 1, (p3 - p4) * c * s);
    DensityMatrix::new(m).expect("convex mixture of orthonormal projectors")
}

/// `√(4 pa pb + (pa − pb)² sin²2θ)`.
fn radical(pa: f64, pb: f64, s: f64) -> f64 {
    (4.0 * pa * pb + (pa - pb) * (pa - pb) * s * s).sqrt()
}

/// `lhs − rhs` of the four separability inequalities
/// `±(p1 − p2) sin2θ ≤ √(4p3p4 + (p3 − p4)² sin²2θ)` and
/// `±(p3 − p4) sin2θ ≤ √(4p1p2 + (p1 − p2)² sin²2θ)`.
pub fn region_margins(params: &ICDParams) -> [f64; 4] {
    margins_with(params, params.sin2t())
}

fn margins_with(params: &ICDParams, lhs_factor: f64) -> [f64; 4] {
    let s = params.sin2t();
    let [p1, p2, p3, p4] = params.p;
    let r12 = radical(p1, p2, s);
    let r34 = radical(p3, p4, s);
    [
        (p1 - p2) * lhs_factor - r34,
        (p2 - p1) * lhs_factor - r34,
        (p3 - p4) * lhs_factor - r12,
        (p4 - p3) * lhs_factor - r12,
    ]
}

fn label_from_margins(m: [f64; 4]) -> RegionLabel {
    let (k, slack) = m
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, x)| {
            if x > best.1 {
                (k, x)
            } else {
                best
            }
        });
    RegionLabel {
        kind: if slack > 0.0 {
            RegionKind::entangled(k)
        } else {
            RegionKind::Separable
        },
        slack,
    }
}

/// Separable exactly when the partial transpose is positive; otherwise the
/// single violated inequality names the region.
pub fn classify_region(params: &ICDParams) -> RegionLabel {
    label_from_margins(region_margins(params))
}

/// Classification with the inequalities read without the `sin 2θ` factor on
/// the left side. Kept only for comparison; it disagrees with the partial
/// transpose away from `θ = π/4`.
pub fn classify_region_literal(params: &ICDParams) -> RegionLabel {
    label_from_margins(margins_with(params, 1.0))
}

/// Closed-form concurrence, evaluated in the region-1 frame.
pub fn concurrence_icd(params: &ICDParams) -> f64 {
    let (q, _) = to_region1(params);
    let s = q.sin2t();
    let [p1, p2, p3, p4] = q.p;
    ((p1 - p2) * s - radical(p3, p4, s)).max(0.0)
}

/// λ_i in the labeling that pairs λ1, λ2 with ψ1, ψ2 and λ3, λ4 with ψ3, ψ4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaSpectrum {
    pub labeled: [f64; 4],
    pub sorted: [f64; 4],
}

impl LambdaSpectrum {
    /// `λ1 − λ2 − λ3 − λ4` in the labeled order.
    pub fn wootters_gap(&self) -> f64 {
        let l = self.labeled;
        l[0] - l[1] - l[2] - l[3]
    }
}

pub fn lambda_spectrum_icd(params: &ICDParams) -> LambdaSpectrum {
    let s = params.sin2t();
    let [p1, p2, p3, p4] = params.p;
    let r12 = radical(p1, p2, s);
    let r34 = radical(p3, p4, s);
    let labeled = [
        0.5 * ((p1 - p2) * s + r12),
        0.5 * ((p2 - p1) * s + r12),
        0.5 * ((p3 - p4) * s + r34),
        0.5 * ((p4 - p3) * s + r34),
    ];
    let mut sorted = labeled;
    sorted.sort_by(|a, b| b.total_cmp(a));
    LambdaSpectrum { labeled, sorted }
}

/// `|v_i⟩ = √p_i |ψ_i⟩` in label order; zero vectors are kept.
pub fn icd_subnormalized(params: &ICDParams) -> SubnormalizedSet {
    let psi = basis_vectors(params.theta);
    SubnormalizedSet {
        vectors: (0..4)
            .map(|i| psi[i].scale_real(params.p[i].sqrt()))
            .collect(),
    }
}

/// τ for the labeled v-vectors, in closed form:
///
/// ```text
/// [ −p1 S        √(p1p2) c                        ]
/// [ √(p1p2) c    p2 S                             ]
/// [                          p3 S        −√(p3p4) c ]
/// [                          −√(p3p4) c  −p4 S      ]
/// ```
/// with `S = sin 2θ`, `c = cos 2θ`.
pub fn tau_icd(params: &ICDParams) -> Mat4 {
    let (s, c) = (params.sin2t(), params.cos2t());
    let [p1, p2, p3, p4] = params.p;
    let a = (p1 * p2).sqrt() * c;
    let b = (p3 * p4).sqrt() * c;
    Mat4::from_real([
        [-p1 * s, a, 0.0, 0.0],
        [a, p2 * s, 0.0, 0.0],
        [0.0, 0.0, p3 * s, -b],
        [0.0, 0.0, -b, -p4 * s],
    ])
}

/// `α1..α4`: normalized eigenvector components of the two 2x2 blocks of τ.
pub fn alphas(params: &ICDParams) -> [f64; 4] {
    let (s, c) = (params.sin2t(), params.cos2t());
    let [p1, p2, p3, p4] = params.p;
    let pair = |pa: f64, pb: f64| -> (f64, f64) {
        let sum = pa + pb;
        let r = radical(pa, pb, s);
        let bracket = 4.0 * pa * pb * c * c + sum * sum * s * s + sum * s * r;
        if bracket <= f64::MIN_POSITIVE {
            return (1.0, 0.0);
        }
        let root = bracket.sqrt();
        (
            (sum * s + r) / (SQRT_2 * root),
            (2.0 * pa * pb).sqrt() * c / root,
        )
    };
    let (a1, a2) = pair(p1, p2);
    let (a3, a4) = pair(p3, p4);
    [a1, a2, a3, a4]
}

/// The block unitary
///
/// ```text
/// [ iα1  −iα2            ]
/// [  α2    α1            ]
/// [             α3   −α4 ]
/// [            iα4   iα3 ]
/// ```
/// with `U τ Uᵀ = diag(λ)` in the labeled order.
pub fn unitary_u_icd(params: &ICDParams) -> TakagiResult {
    let [a1, a2, a3, a4] = alphas(params);
    let r = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let u = Mat4::from_rows([
        [im(a1), im(-a2), ZERO, ZERO],
        [r(a2), r(a1), ZERO, ZERO],
        [ZERO, ZERO, r(a3), r(-a4)],
        [ZERO, ZERO, im(a4), im(a3)],
    ]);
    TakagiResult {
        u,
        lambdas: lambda_spectrum_icd(params).labeled,
    }
}

/// A local unitary `W = A ⊗ B` with `W ψ_i = ±ψ_perm[i]`, so that
/// `ρ(p) = W ρ(q) W†` for `q_i = p_perm[i]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionMap {
    pub kind: RegionKind,
    pub perm: [usize; 4],
    pub local: Mat4,
}

impl RegionMap {
    /// Takes an operator from the region-1 frame back to the original one.
    pub fn apply(&self, m: &Mat4) -> Mat4 {
        self.local * *m * self.local.adjoint()
    }

    pub fn apply_vec(&self, v: &Vec4) -> Vec4 {
        self.local.mul_vec(v)
    }
}

fn zx() -> Mat2 {
    Mat2::from_real([[0.0, 1.0], [-1.0, 0.0]])
}

fn x_gate() -> Mat2 {
    Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn region_map(kind: RegionKind) -> RegionMap {
    let id = Mat2::identity();
    let (perm, local) = match kind {
        RegionKind::Separable | RegionKind::Entangled1 => ([0, 1, 2, 3], Mat4::identity()),
        RegionKind::Entangled2 => ([1, 0, 3, 2], tensor(&zx(), &x_gate())),
        RegionKind::Entangled3 => ([2, 3, 0, 1], tensor(&id, &x_gate())),
        RegionKind::Entangled4 => ([3, 2, 1, 0], tensor(&zx(), &id)),
    };
    RegionMap { kind, perm, local }
}

/// Locally equivalent parameters in region 1 (or the input itself when it is
/// separable or already in region 1), with the map back.
pub fn to_region1(params: &ICDParams) -> (ICDParams, RegionMap) {
    let map = region_map(classify_region(params).kind);
    (params.permuted(map.perm), map)
}
