//! Lewenstein-Sanpera decomposition `ρ = λ ρ_s + (1 − λ)|ψ⟩⟨ψ|` of entangled
//! ICD states, the product ensemble of the separable part and a numerical
//! verifier of the maximality conditions that certify it.
//!
//! Everything is computed for region 1 (where ψ1 carries the largest weight)
//! and carried to the other regions by the local unitaries of
//! [`crate::icd::region_map`].

use serde::{Deserialize, Serialize};

use crate::concurrence::{
    normalized_concurrence, phased_combinations, x_vectors, SubnormalizedSet,
};
use crate::error::{Error, Result};
use crate::icd::{
    alphas, classify_region, icd_density, icd_subnormalized, lambda_spectrum_icd, region_map,
    to_region1, unitary_u_icd, ICDParams, RegionKind, RegionMap,
};
use crate::qmat::{
    gram_determinant, restricted_inverse, tensor_vec, CVector, Mat4, Vec2, Vec4, C64,
};
use crate::qstate::{ppt_min_eigenvalue, PureState, WeightedEnsemble};

/// Reconstruction and ensemble residual bound.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Bound on the concurrence of ensemble members and on boundary placement.
pub const PRODUCT_TOL: f64 = 1e-9;
/// Relative bound on the single and pair maximality residuals.
pub const MAXIMALITY_TOL: f64 = 1e-8;
/// A separable-part coordinate below this is an exact zero.
pub const ZERO_COORD: f64 = 1e-9;
/// Coordinates in `[ZERO_COORD, SEAM_COORD)` are checked in both branches.
pub const SEAM_COORD: f64 = 1e-6;
/// Normalized Gram determinants below this mark a dependent triple.
pub const DEPENDENT_GRAM: f64 = 1e-10;
/// Between `DEPENDENT_GRAM` and this, a pair is evaluated on both the two-
/// and the three-dimensional range and passes if either does.
pub const GRAY_GRAM: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LSDecomposition {
    /// The decomposed point.
    pub params: ICDParams,
    pub region: RegionKind,
    /// Weight of the separable part.
    pub lambda: f64,
    /// Coordinates of `ρ_s` in the ICD family at the same θ.
    pub sep_params: ICDParams,
    pub pure_part: PureState,
    /// Product states `z_α/|z_α|` with weights `Λ_α = λ⟨z_α|z_α⟩`, so that
    /// together with the pure part they form one normalized ensemble for ρ.
    pub bsa: WeightedEnsemble,
}

impl LSDecomposition {
    /// `ρ_s` itself.
    pub fn separable_part(&self) -> Mat4 {
        *icd_density(&self.sep_params).matrix()
    }

    /// `λ ρ_s + (1 − λ)|ψ⟩⟨ψ|`.
    pub fn reconstruct(&self) -> Mat4 {
        self.separable_part().scale_real(self.lambda)
            + self.pure_part.projector().scale_real(1.0 - self.lambda)
    }

    /// BSA weights normalized to sum to one (the ensemble for `ρ_s` alone).
    pub fn bsa_unit_weights(&self) -> Vec<f64> {
        if self.lambda > 0.0 {
            self.bsa.weights().iter().map(|w| w / self.lambda).collect()
        } else {
            self.bsa.weights().to_vec()
        }
    }
}

/// `√(4p3p4/sin²2θ + (p3 − p4)²)`.
fn boundary_radical(p3: f64, p4: f64, s: f64) -> f64 {
    (4.0 * p3 * p4 / (s * s) + (p3 - p4) * (p3 - p4)).sqrt()
}

/// Separable weight for a region-1 point.
fn lambda_region1(q: &ICDParams) -> f64 {
    let [_, p2, p3, p4] = q.p();
    // 1 − p1 written as p2 + p3 + p4 to keep λ accurate near the pure vertex
    (p2 + p3 + p4) + p2 + boundary_radical(p3, p4, q.sin2t())
}

/// Closed form for a point in region 1.
pub fn lsd_closed_form(params: &ICDParams) -> Result<LSDecomposition> {
    let label = classify_region(params);
    if label.kind != RegionKind::Entangled1 {
        return Err(Error::NotRegion1(label.kind.to_string()));
    }
    region1_decomposition(params, &region_map(RegionKind::Entangled1))
}

/// Decomposition of any entangled ICD point.
pub fn decompose(params: &ICDParams) -> Result<LSDecomposition> {
    let (q, map) = to_region1(params);
    if map.kind == RegionKind::Separable {
        return Err(Error::Separable);
    }
    region1_decomposition(&q, &map)
}

/// Decomposes the region-1 point `q` and carries the result back through
/// `map`.
fn region1_decomposition(q: &ICDParams, map: &RegionMap) -> Result<LSDecomposition> {
    let s = q.sin2t();
    if s < crate::icd::MIN_SIN_2THETA {
        return Err(Error::ThetaBoundary(q.theta()));
    }
    let lambda = lambda_region1(q);
    let [_, p2, p3, p4] = q.p();
    let sep_q = if lambda > 0.0 {
        let r = boundary_radical(p3, p4, s);
        ICDParams::new(
            [(p2 + r) / lambda, p2 / lambda, p3 / lambda, p4 / lambda],
            q.theta(),
        )?
    } else {
        pure_vertex_partner(q.theta())?
    };
    let psi1 = crate::icd::icd_basis(q.theta())?[0];

    let bsa = if lambda > 0.0 {
        bsa_region1(&sep_q)?.rescaled(lambda)?
    } else {
        WeightedEnsemble::new(vec![], vec![])?
    };
    let states = bsa
        .states()
        .iter()
        .map(|z| PureState::from_unnormalized(map.apply_vec(z.amplitudes())))
        .collect::<Result<Vec<_>>>()?;

    let params = q.permuted(map.perm);
    Ok(LSDecomposition {
        params,
        region: map.kind,
        lambda,
        sep_params: sep_q.permuted(map.perm),
        pure_part: PureState::from_unnormalized(map.apply_vec(psi1.amplitudes()))?,
        bsa: WeightedEnsemble::new(bsa.weights().to_vec(), states)?,
    })
}

/// Conventional separable partner of the pure vertex (λ = 0): the boundary
/// point `(1 − 3q, q, q, q)` with `q = sin2θ / (4 sin2θ + 2)`.
fn pure_vertex_partner(theta: f64) -> Result<ICDParams> {
    let s = (2.0 * theta).sin();
    let q = s / (4.0 * s + 2.0);
    ICDParams::new([1.0 - 3.0 * q, q, q, q], theta)
}

/// `(1 − λ) sin 2θ`.
pub fn average_concurrence(d: &LSDecomposition) -> f64 {
    (1.0 - d.lambda) * d.params.sin2t()
}

/// `Σ Λ_α C(z_α) + (1 − λ) C(ψ)` evaluated from the stored states.
pub fn ensemble_average_concurrence(d: &LSDecomposition) -> f64 {
    let bsa: f64 = d
        .bsa
        .weights()
        .iter()
        .zip(d.bsa.states())
        .map(|(w, s)| w * s.concurrence())
        .sum();
    bsa + (1.0 - d.lambda) * d.pure_part.concurrence()
}

/// Subnormalized z-vectors of a region-1-frame boundary point, with
/// `Σ |z_α⟩⟨z_α| = ρ_s`. Phases are `(0, −π/2, −π/2, −π/2)`, which makes
/// `⟨z_α|z̃_α⟩ = (λ1 − λ2 − λ3 − λ4)/4 = 0` on the boundary.
pub fn z_vectors(sep: &ICDParams) -> Result<SubnormalizedSet> {
    let gap = lambda_spectrum_icd(sep).wootters_gap();
    if gap.abs() > PRODUCT_TOL {
        return Err(Error::NotOnBoundary(gap));
    }
    let v = icd_subnormalized(sep);
    let x = x_vectors(&v, &unitary_u_icd(sep));
    let h = -std::f64::consts::FRAC_PI_2;
    Ok(phased_combinations(&x, [0.0, h, h, h]))
}

/// Product ensemble for the separable part of `d`, with weights scaled by λ.
pub fn bsa_ensemble(d: &LSDecomposition) -> Result<WeightedEnsemble> {
    let map = region_map(d.region);
    let sep_q = d.sep_params.permuted(map.perm);
    let e = bsa_region1(&sep_q)?.rescaled(d.lambda)?;
    let states = e
        .states()
        .iter()
        .map(|z| PureState::from_unnormalized(map.apply_vec(z.amplitudes())))
        .collect::<Result<Vec<_>>>()?;
    WeightedEnsemble::new(e.weights().to_vec(), states)
}

/// Product ensemble of a region-1-frame boundary point with unit total
/// weight. Rank-2 points keep only the two distinct members; for
/// `p2 = p3 = 0` they are the explicit products `(|↑⟩ ± i|↓⟩)/√2 ⊗
/// (cosθ|↑⟩ ∓ i sinθ|↓⟩)`.
fn bsa_region1(sep: &ICDParams) -> Result<WeightedEnsemble> {
    let p = sep.p();
    if p[1] < ZERO_COORD && p[2] < ZERO_COORD {
        let [a, b] = rank2_products(sep.theta());
        return WeightedEnsemble::new(vec![0.5, 0.5], vec![a, b]);
    }
    let z = z_vectors(sep)?;
    let mut weights: Vec<f64> = Vec::with_capacity(4);
    let mut states: Vec<PureState> = Vec::with_capacity(4);
    for v in &z.vectors {
        let w = v.norm_sqr();
        if w <= 1e-15 {
            continue;
        }
        let s = PureState::from_unnormalized(*v)?;
        match states
            .iter()
            .position(|t| t.amplitudes().dot(s.amplitudes()).norm() > 1.0 - 1e-9)
        {
            Some(k) => weights[k] += w,
            None => {
                weights.push(w);
                states.push(s);
            }
        }
    }
    WeightedEnsemble::new(weights, states)
}

/// `|e1 f1⟩, |e2 f2⟩` with `½(|ψ1⟩⟨ψ1| + |ψ4⟩⟨ψ4|) = ½ Σ |e_k f_k⟩⟨e_k f_k|`.
pub fn rank2_products(theta: f64) -> [PureState; 2] {
    let (s, c) = theta.sin_cos();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let make = |sign: f64| {
        let e = Vec2::from_real([h, 0.0]) + CVector([C64::new(0.0, 0.0), C64::new(0.0, sign * h)]);
        let f = CVector([C64::new(c, 0.0), C64::new(0.0, -sign * s)]);
        PureState::new(tensor_vec(&e, &f)).expect("product of unit vectors")
    };
    [make(1.0), make(-1.0)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    FullRank,
    P2Zero,
    P3Zero,
    P4Zero,
    Rank2,
    /// λ = 0: the state is the pure part itself.
    Pure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub residual: f64,
}

impl Check {
    fn at_most(residual: f64, tol: f64) -> Self {
        Check {
            passed: residual <= tol,
            residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RangeMode {
    /// Range spanned by both products and the pure part.
    Full,
    /// The pure part lies in the span of the products.
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleCheck {
    pub alpha: usize,
    /// `|Λ_α ⟨z_α|ρ_α⁻¹|z_α⟩ − 1|`.
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub alpha: usize,
    pub beta: usize,
    pub mode: RangeMode,
    /// Whether `⟨z_α|ρ_αβ⁻¹|z_β⟩ ≠ 0`, selecting the D-formula.
    pub coupled: bool,
    /// Largest relative deviation of the maximal pair from `(Λ_α, Λ_β)`.
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityVerdict {
    pub branch: Branch,
    /// `|λρ_s + (1 − λ)|ψ⟩⟨ψ| − ρ|` and `|Σ Λ_α P_α + (1 − λ)|ψ⟩⟨ψ| − ρ|`.
    pub reconstruction: Check,
    /// `|Σ Λ_α P_α − λ ρ_s|`.
    pub ensemble: Check,
    /// Largest concurrence among ensemble members.
    pub product_states: Check,
    /// Negative part of the PT spectrum of `ρ_s` together with its distance
    /// from the separable boundary.
    pub separable_part: Check,
    pub single_maximality: Vec<SingleCheck>,
    pub pair_maximality: Vec<PairCheck>,
    /// Branch-specific claims: dependence of pairs with the pure part,
    /// closed-form Γ expressions, and seam agreement.
    pub branch_checks: Vec<NamedCheck>,
    pub overall: bool,
}

/// Branch of a region-1-frame separable part, with coordinates in the seam
/// band.
fn branch_of(lambda: f64, sep: &ICDParams) -> (Branch, Vec<usize>) {
    if lambda <= 0.0 {
        return (Branch::Pure, vec![]);
    }
    let p = sep.p();
    let zeros: Vec<usize> = (1..4).filter(|&i| p[i] < ZERO_COORD).collect();
    let seam: Vec<usize> = (1..4)
        .filter(|&i| (ZERO_COORD..SEAM_COORD).contains(&p[i]))
        .collect();
    let branch = match zeros.as_slice() {
        [] => Branch::FullRank,
        [1] => Branch::P2Zero,
        [2] => Branch::P3Zero,
        [3] => Branch::P4Zero,
        _ => Branch::Rank2,
    };
    (branch, seam)
}

fn unit(v: &Vec4) -> Vec4 {
    v.scale_real(1.0 / v.norm())
}

fn normalized_gram(vs: &[Vec4]) -> f64 {
    gram_determinant(&vs.iter().map(unit).collect::<Vec<_>>())
}

/// `⟨a|m⁻¹|b⟩` for the inverse of `m` restricted to the span of `basis`.
fn inverse_elements(m: &Mat4, basis: &[Vec4], pairs: &[(Vec4, Vec4)]) -> Option<Vec<C64>> {
    let r = restricted_inverse(m, basis).ok()?;
    Some(pairs.iter().map(|(a, b)| r.sandwich(a, b)).collect())
}

/// Maximal pair weights for `ρ` and the projectors on `a`, `b` (unit
/// vectors) from `g_ij = ⟨i|ρ⁻¹|j⟩`: decoupled `1/g_ii`, or the D-formula.
fn maximal_pair(g11: f64, g22: f64, g12: f64) -> (bool, f64, f64) {
    if g12 <= 1e-8 * (g11 * g22).sqrt() {
        (false, 1.0 / g11, 1.0 / g22)
    } else {
        let d = g11 * g22 - g12 * g12;
        (true, (g22 - g12) / d, (g11 - g12) / d)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Pair residual on a given range basis.
fn pair_on(
    rho: &Mat4,
    basis: &[Vec4],
    za: &Vec4,
    zb: &Vec4,
    la: f64,
    lb: f64,
) -> Option<(bool, f64)> {
    let g = inverse_elements(rho, basis, &[(*za, *za), (*zb, *zb), (*za, *zb)])?;
    let (coupled, ma, mb) = maximal_pair(g[0].re, g[1].re, g[2].norm());
    let r = rel(ma, la).max(rel(mb, lb));
    r.is_finite().then_some((coupled, r))
}

pub fn verify_optimality(d: &LSDecomposition) -> OptimalityVerdict {
    let map = region_map(d.region);
    let back = map.local.adjoint();
    let rho = *icd_density(&d.params).matrix();
    let sep_q = d.sep_params.permuted(map.perm);
    let mu = 1.0 - d.lambda;
    let psi = back.mul_vec(d.pure_part.amplitudes());
    let p_psi = psi.projector().scale_real(mu);
    let zs: Vec<Vec4> = d
        .bsa
        .states()
        .iter()
        .map(|s| back.mul_vec(s.amplitudes()))
        .collect();
    let ws = d.bsa.weights().to_vec();

    let recon = (d.reconstruct().max_abs_diff(&rho))
        .max((d.bsa.operator() + d.pure_part.projector().scale_real(mu)).max_abs_diff(&rho));
    let ensemble = d
        .bsa
        .operator()
        .max_abs_diff(&d.separable_part().scale_real(d.lambda));
    let product = d
        .bsa
        .states()
        .iter()
        .map(|s| s.concurrence())
        .fold(0.0, f64::max);
    let sep_rho = icd_density(&d.sep_params);
    let sep_residual = (-ppt_min_eigenvalue(&sep_rho))
        .max(0.0)
        .max(lambda_spectrum_icd(&sep_q).wootters_gap().abs());

    let (branch, seam) = branch_of(d.lambda, &sep_q);

    let single_maximality: Vec<SingleCheck> = zs
        .iter()
        .zip(&ws)
        .enumerate()
        .map(|(a, (z, w))| {
            let m = z.projector().scale_real(*w) + p_psi;
            let basis = if normalized_gram(&[*z, psi]) > DEPENDENT_GRAM {
                vec![*z, psi]
            } else {
                vec![*z]
            };
            let residual = inverse_elements(&m, &basis, &[(*z, *z)])
                .map(|g| (w * g[0].re - 1.0).abs())
                .filter(|r| r.is_finite())
                .unwrap_or(f64::INFINITY);
            SingleCheck {
                alpha: a + 1,
                residual,
                passed: residual <= MAXIMALITY_TOL,
            }
        })
        .collect();

    let mut pair_maximality = Vec::new();
    for a in 0..zs.len() {
        for b in (a + 1)..zs.len() {
            let m =
                zs[a].projector().scale_real(ws[a]) + zs[b].projector().scale_real(ws[b]) + p_psi;
            let det = normalized_gram(&[zs[a], zs[b], psi]);
            let full = pair_on(&m, &[zs[a], zs[b], psi], &zs[a], &zs[b], ws[a], ws[b]);
            let reduced = pair_on(&m, &[zs[a], zs[b]], &zs[a], &zs[b], ws[a], ws[b]);
            let pick = |mode: RangeMode, r: Option<(bool, f64)>| {
                let (coupled, residual) = r.unwrap_or((false, f64::INFINITY));
                PairCheck {
                    alpha: a + 1,
                    beta: b + 1,
                    mode,
                    coupled,
                    residual,
                    passed: residual <= MAXIMALITY_TOL,
                }
            };
            let full = pick(RangeMode::Full, full);
            let reduced = pick(RangeMode::Reduced, reduced);
            let chosen = if det > GRAY_GRAM {
                full
            } else if det <= DEPENDENT_GRAM {
                reduced
            } else if full.passed || !reduced.passed {
                full
            } else {
                reduced
            };
            pair_maximality.push(chosen);
        }
    }

    let mut branch_checks = Vec::new();
    let p1_sep = sep_q.p()[0];
    let al = alphas(&sep_q);
    match branch {
        Branch::P2Zero => {
            for (a, b, sign) in [(0usize, 1usize, 1.0), (2, 3, -1.0)] {
                if b >= zs.len() {
                    continue;
                }
                let det = normalized_gram(&[zs[a], zs[b], psi]);
                branch_checks.push(NamedCheck {
                    name: format!("pair ({},{}) dependent with pure part", a + 1, b + 1),
                    passed: det <= DEPENDENT_GRAM,
                    residual: det,
                });
                let coef = (al[0] + sign * al[1]).powi(2) * p1_sep;
                branch_checks.push(gamma_check(
                    &format!("gamma ({},{})", a + 1, b + 1),
                    &zs,
                    &ws,
                    (a, b),
                    d.lambda,
                    mu,
                    &p_psi,
                    coef,
                    false,
                ));
            }
        }
        Branch::Rank2 if zs.len() == 2 => {
            branch_checks.push(gamma_check(
                "gamma (1,2)",
                &zs,
                &ws,
                (0, 1),
                d.lambda,
                mu,
                &p_psi,
                2.0,
                true,
            ));
        }
        _ => {}
    }
    for &i in &seam {
        // the degenerate branch treats the coordinate as zero: every pair is
        // evaluated on the two-dimensional range and must agree with the
        // full-range verdict to within the size of the coordinate
        let tol = MAXIMALITY_TOL.max(100.0 * sep_q.p()[i]);
        let mut worst: f64 = 0.0;
        for a in 0..zs.len() {
            for b in (a + 1)..zs.len() {
                let m = zs[a].projector().scale_real(ws[a])
                    + zs[b].projector().scale_real(ws[b])
                    + p_psi;
                let det = normalized_gram(&[zs[a], zs[b], psi]);
                if det > SEAM_COORD {
                    continue;
                }
                let r = pair_on(&m, &[zs[a], zs[b]], &zs[a], &zs[b], ws[a], ws[b])
                    .map(|x| x.1)
                    .unwrap_or(f64::INFINITY);
                worst = worst.max(r);
            }
        }
        branch_checks.push(NamedCheck {
            name: format!("seam p{} reduced-range agreement", i + 1),
            passed: worst <= tol,
            residual: worst,
        });
    }

    let reconstruction = Check::at_most(recon, RECONSTRUCTION_TOL);
    let ensemble = Check::at_most(ensemble, RECONSTRUCTION_TOL);
    let product_states = Check::at_most(product, PRODUCT_TOL);
    let separable_part = Check::at_most(sep_residual, PRODUCT_TOL);
    let overall = reconstruction.passed
        && ensemble.passed
        && product_states.passed
        && separable_part.passed
        && single_maximality.iter().all(|c| c.passed)
        && pair_maximality.iter().all(|c| c.passed)
        && branch_checks.iter().all(|c| c.passed);
    OptimalityVerdict {
        branch,
        reconstruction,
        ensemble,
        product_states,
        separable_part,
        single_maximality,
        pair_maximality,
        branch_checks,
        overall,
    }
}

/// Compares `⟨z_i|ρ_ij⁻¹|z_j⟩` with the closed forms
/// `g11 = (Λ2 c + μ)/Γ`, `g22 = (Λ1 c + μ)/Γ`, `|g12| = μ/Γ`,
/// `Γ = Λ1 Λ2 c + μ(Λ1 + Λ2)`. With `normalized` the weights and vectors
/// are the unit-norm ones; otherwise the subnormalized z's with weight λ.
#[allow(clippy::too_many_arguments)]
fn gamma_check(
    name: &str,
    zs: &[Vec4],
    ws: &[f64],
    (a, b): (usize, usize),
    lambda: f64,
    mu: f64,
    p_psi: &Mat4,
    coef: f64,
    normalized: bool,
) -> NamedCheck {
    let (va, vb, la, lb) = if normalized {
        (zs[a], zs[b], ws[a], ws[b])
    } else {
        (
            zs[a].scale_real((ws[a] / lambda).sqrt()),
            zs[b].scale_real((ws[b] / lambda).sqrt()),
            lambda,
            lambda,
        )
    };
    let m = va.projector().scale_real(la) + vb.projector().scale_real(lb) + *p_psi;
    let gamma = la * lb * coef + mu * (la + lb);
    let want = [
        (lb * coef + mu) / gamma,
        (la * coef + mu) / gamma,
        mu / gamma,
    ];
    let residual = inverse_elements(&m, &[va, vb], &[(va, va), (vb, vb), (va, vb)])
        .map(|g| {
            rel(g[0].re, want[0])
                .max(rel(g[1].re, want[1]))
                .max(rel(g[2].norm(), want[2]))
        })
        .filter(|r| r.is_finite())
        .unwrap_or(f64::INFINITY);
    NamedCheck {
        name: name.to_string(),
        passed: residual <= MAXIMALITY_TOL,
        residual,
    }
}

/// Concurrence of every member of a subnormalized set after normalization.
pub fn member_concurrences(set: &SubnormalizedSet) -> Vec<f64> {
    set.vectors.iter().map(normalized_concurrence).collect()
}
