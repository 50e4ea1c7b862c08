//! Numerical ground truth that does not rely on any closed form: a direct
//! search for the best separable approximation, sampled decompositions for
//! the concurrence, and seeded random states.
//!
//! All randomness comes from ChaCha20 streams derived from a `u64` seed, so
//! results are reproducible for a given build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concurrence::{average_concurrence, subnormalized_eigenvectors, wootters_ensemble};
use crate::icd::ICDParams;
use crate::qmat::{hermitian_eig, partial_transpose, CVector, Mat4, Subsystem, Vec4, C64};
use crate::qstate::{ppt_min_eigenvalue, spin_flip_overlap, DensityMatrix, PureState};

pub const RNG_ALGORITHM: &str = "chacha20/rand_chacha-0.9/stream-per-chunk";

/// Resolution of the λ bisection.
pub const BISECTION_TOL: f64 = 1e-10;
/// Diagonal shift used by the Cholesky feasibility tests.
const PSD_SHIFT: f64 = 1e-13;
/// Eigenvalues of ρ above this span the range searched for pure parts.
const RANGE_CUTOFF: f64 = 1e-12;
/// Candidates per RNG stream in the random phase.
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Largest separable weight found; a lower bound on the optimum.
    pub numeric_lambda: f64,
    pub best_pure_part: PureState,
    /// Number of candidate pure states evaluated.
    pub sample_count: u64,
    /// Smallest average concurrence among sampled decompositions of ρ.
    pub min_avg_concurrence: f64,
    pub pt_min_eig: f64,
    pub seed: u64,
    pub rng: String,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Feasibility of a separable weight for a fixed pure part: `ρ − (1 − λ)|ψ⟩⟨ψ|`
/// must be PSD and PPT. Candidates are expressed in an eigenbasis of ρ's
/// range, where the PSD side reduces to `1 − λ ≤ 1/⟨ψ|ρ⁺|ψ⟩`.
struct Problem {
    rho: Mat4,
    pt_rho: Mat4,
    range: Vec<Vec4>,
    inv_eigs: Vec<f64>,
    rho_is_ppt: bool,
}

impl Problem {
    fn new(rho: &DensityMatrix) -> Self {
        let eig = hermitian_eig(rho.matrix()).expect("density matrices are Hermitian");
        let keep: Vec<usize> = (0..4).filter(|&k| eig.values[k] > RANGE_CUTOFF).collect();
        let pt_rho = partial_transpose(rho.matrix(), Subsystem::Second);
        Problem {
            rho: *rho.matrix(),
            pt_rho,
            range: keep.iter().map(|&k| eig.vectors[k]).collect(),
            inv_eigs: keep.iter().map(|&k| 1.0 / eig.values[k]).collect(),
            rho_is_ppt: pt_rho.is_psd_shifted(PSD_SHIFT),
        }
    }

    fn dim(&self) -> usize {
        self.range.len()
    }

    fn state(&self, c: &[C64]) -> Vec4 {
        c.iter()
            .zip(&self.range)
            .fold(Vec4::zeros(), |acc, (ck, e)| acc + e.scale(*ck))
    }

    /// `ρ − t|ψ⟩⟨ψ|` is PPT (its PSD part is handled by the caller).
    fn ppt_at(&self, pt_p: &Mat4, t: f64) -> bool {
        (self.pt_rho - pt_p.scale_real(t)).is_psd_shifted(PSD_SHIFT)
    }

    /// Largest feasible λ for the normalized coefficients `c`. Infeasible
    /// candidates get a score in `[-2, -1)` that grows with the best PPT
    /// margin reachable, which gives the local search a slope to climb.
    fn score(&self, c: &[C64]) -> f64 {
        if self.rho_is_ppt {
            return 1.0;
        }
        let q: f64 = c
            .iter()
            .zip(&self.inv_eigs)
            .map(|(ck, w)| ck.norm_sqr() * w)
            .sum();
        let t_psd = (1.0 / q).min(1.0);
        let psi = self.state(c);
        let pt_p = partial_transpose(&psi.projector(), Subsystem::Second);
        let mut lo_bound = (1.0 - t_psd).max(0.0);
        if lo_bound < BISECTION_TOL {
            lo_bound = 0.0;
        }
        let feasible = |lam: f64| {
            if lam == 0.0 {
                // no separable part: ρ has to be the candidate itself
                return (self.rho - psi.projector()).max_abs() <= 1e-10;
            }
            self.ppt_at(&pt_p, 1.0 - lam)
        };
        let start = if feasible(lo_bound) {
            Some(lo_bound)
        } else {
            let n = 64;
            (1..n)
                .map(|j| lo_bound + (1.0 - lo_bound) * j as f64 / n as f64)
                .find(|&l| feasible(l))
        };
        let start = match start {
            Some(s) => s,
            None => {
                // the smallest PT eigenvalue is concave in t
                let f = |t: f64| {
                    hermitian_eig(&(self.pt_rho - pt_p.scale_real(t)))
                        .map(|e| e.min_value())
                        .unwrap_or(f64::NEG_INFINITY)
                };
                let (t, margin) = golden_max(f, 0.0, t_psd.min(1.0 - lo_bound), 40);
                if margin < -PSD_SHIFT || 1.0 - t <= 0.0 {
                    return -1.0 + margin.max(-1.0);
                }
                1.0 - t
            }
        };
        // the feasible set is an interval containing `start`; λ = 1 is not in it
        let (mut lo, mut hi) = (start, 1.0);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Clone)]
struct Candidate {
    lambda: f64,
    c: Vec<C64>,
}

impl Candidate {
    /// Larger λ first, then lexicographically smaller coefficients.
    fn better_than(&self, other: &Candidate) -> bool {
        if self.lambda != other.lambda {
            return self.lambda > other.lambda;
        }
        for (a, b) in self.c.iter().zip(&other.c) {
            for (x, y) in [(a.re, b.re), (a.im, b.im)] {
                if x != y {
                    return x < y;
                }
            }
        }
        false
    }
}

fn normalize(c: &mut [C64]) {
    let n = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in c.iter_mut() {
            *x /= n;
        }
    }
}

fn evaluate(problem: &Problem, mut c: Vec<C64>) -> Candidate {
    normalize(&mut c);
    let lambda = problem.score(&c);
    Candidate { lambda, c }
}

/// Coordinate pattern search over the real and imaginary parts of `c`,
/// halving the step whenever a full sweep brings no improvement.
fn refine(problem: &Problem, start: Candidate, budget: usize) -> (Candidate, usize) {
    let mut best = start;
    let mut used = 0;
    let mut step = 0.05;
    let coords = 2 * best.c.len();
    while used < budget && step > 1e-10 {
        let mut improved = false;
        for k in 0..coords {
            for sign in [1.0, -1.0] {
                if used >= budget {
                    break;
                }
                let mut c = best.c.clone();
                let delta = sign * step;
                if k % 2 == 0 {
                    c[k / 2].re += delta;
                } else {
                    c[k / 2].im += delta;
                }
                let cand = evaluate(problem, c);
                used += 1;
                if cand.lambda > best.lambda {
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, used)
}

/// Randomized best-separable-approximation search.
///
/// About half of `budget` goes to random pure parts in the range of ρ, the
/// rest to pattern-search refinement from the best few. Every candidate's
/// weight is the largest λ with `ρ − (1 − λ)|ψ⟩⟨ψ|` PSD and PPT, so the
/// returned value never exceeds the true optimum (up to the bisection
/// resolution).
pub fn bsa_numeric(rho: &DensityMatrix, budget: u64, seed: u64) -> OracleReport {
    let budget = budget.max(1) as usize;
    let problem = Problem::new(rho);
    let r = problem.dim();
    let n_random = budget.div_ceil(2);
    let chunks = n_random.div_ceil(CHUNK);

    let mut pool: Vec<Candidate> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = rng_for(seed, chunk as u64);
            let count = CHUNK.min(n_random - chunk * CHUNK);
            let problem = &problem;
            (0..count).map(move |_| {
                let c: Vec<C64> = (0..r).map(|_| gaussian_c64(&mut rng)).collect();
                evaluate(problem, c)
            })
        })
        .collect();
    pool.sort_by(|a, b| {
        if a.better_than(b) {
            std::cmp::Ordering::Less
        } else if b.better_than(a) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });

    let mut used = pool.len();
    let starts = 4.min(pool.len());
    let share = (budget - used.min(budget)) / starts.max(1);
    let mut best = pool[0].clone();
    if !problem.rho_is_ppt {
        for start in pool.iter().take(starts) {
            let (cand, n) = refine(&problem, start.clone(), share);
            used += n;
            if cand.better_than(&best) {
                best = cand;
            }
        }
    }

    let psi = problem.state(&best.c);
    OracleReport {
        numeric_lambda: best.lambda.max(0.0),
        best_pure_part: PureState::from_unnormalized(psi)
            .unwrap_or_else(|_| PureState::new(Vec4::basis(0)).expect("unit vector")),
        sample_count: used as u64,
        min_avg_concurrence: min_avg_concurrence_sample(
            rho,
            (budget / 100).clamp(1, 1000) as u64,
            seed,
        ),
        pt_min_eig: ppt_min_eigenvalue(rho),
        seed,
        rng: RNG_ALGORITHM.to_string(),
    }
}

/// Random `rows x cols` matrix with orthonormal columns.
fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<C64>> {
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while q.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian_c64(rng)).collect();
        for _ in 0..2 {
            for u in &q {
                let ov: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= ov * y;
                }
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            q.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    q
}

/// Smallest average concurrence `Σ_k |⟨w_k|w̃_k⟩|` over sampled pure-state
/// decompositions `w_k = Σ_j U_kj v_j` of ρ, with `U` a random isometry of
/// size `K x r` (`K` in 4..=8). Trial 0 is Wootters' optimal ensemble.
pub fn min_avg_concurrence_sample(rho: &DensityMatrix, trials: u64, seed: u64) -> f64 {
    let v = subnormalized_eigenvectors(rho).vectors;
    let r = v.len();
    let mut best = average_concurrence(&wootters_ensemble(rho).vectors);
    let mut rng = rng_for(seed, u64::MAX);
    for _ in 1..trials.max(1) {
        let k = rng.random_range(r.max(4)..=8);
        let cols = random_isometry(&mut rng, k, r);
        let avg: f64 = (0..k)
            .map(|row| {
                let w = (0..r).fold(Vec4::zeros(), |acc, j| acc + v[j].scale(cols[j][row]));
                spin_flip_overlap(&w).norm()
            })
            .sum();
        best = best.min(avg);
    }
    best
}

/// `p` uniform on the simplex, θ uniform on `[0.05, π/2 − 0.05]`.
pub fn random_icd(seed: u64) -> ICDParams {
    random_icd_with(&mut rng_for(seed, 0))
}

pub fn random_icd_with<R: Rng + ?Sized>(rng: &mut R) -> ICDParams {
    let e: [f64; 4] = std::array::from_fn(|_| rng.sample(Exp1));
    let sum: f64 = e.iter().sum();
    let theta = rng.random_range(0.05..(std::f64::consts::FRAC_PI_2 - 0.05));
    ICDParams::new(e.map(|x| x / sum), theta).expect("normalized exponentials")
}

/// Hilbert-Schmidt random state `G G† / tr(G G†)`.
pub fn random_density(seed: u64) -> DensityMatrix {
    random_density_with(&mut rng_for(seed, 0))
}

pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let g = Mat4::from_fn(|_, _| gaussian_c64(rng));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).expect("G G† is PSD")
}

pub fn random_pure_state_with<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        let v = CVector(std::array::from_fn(|_| gaussian_c64(rng)));
        if let Ok(s) = PureState::from_unnormalized(v) {
            return s;
        }
    }
}

/// Haar-random unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let cols = random_isometry(rng, 4, 4);
    Mat4::from_fn(|i, j| cols[j][i])
}

/// Complex-symmetric matrix with Gaussian entries.
pub fn random_symmetric_with<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let g = Mat4::from_fn(|_, _| gaussian_c64(rng));
    (g + g.transpose()).scale_real(0.5)
}

/// Deterministic generator for bulk sampling in tests and tools.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    rng_for(seed, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concurrence::concurrence_general;
    use crate::icd::{classify_region, icd_density, RegionKind};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_6};

    fn e1_rho() -> DensityMatrix {
        icd_density(&ICDParams::new([0.7, 0.1, 0.1, 0.1], FRAC_PI_6).unwrap())
    }

    #[test]
    fn bsa_trivial_cases() {
        let bell = DensityMatrix::from_pure(
            &PureState::new(Vec4::from_real([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])).unwrap(),
        );
        let r = bsa_numeric(&bell, 200, 1);
        assert_eq!(r.numeric_lambda, 0.0);
        assert!((r.best_pure_part.projector() - *bell.matrix()).max_abs() < 1e-10);

        let r = bsa_numeric(&DensityMatrix::maximally_mixed(), 50, 1);
        assert_eq!(r.numeric_lambda, 1.0);
        assert_eq!(r.rng, RNG_ALGORITHM);
    }

    #[test]
    fn bsa_respects_the_concurrence_bound() {
        // C(ρ) ≤ (1 − λ) C(ψ) ≤ 1 − λ for every decomposition
        let rho = e1_rho();
        let c = concurrence_general(&rho).concurrence;
        let r = bsa_numeric(&rho, 4000, 3);
        assert!(r.numeric_lambda <= 1.0 - c + 1e-9, "{r:?}");
        assert_eq!(r.sample_count, 4000);
        assert!((r.pt_min_eig + 0.15980762113533153).abs() < 1e-12);
    }

    #[test]
    fn e1_bound_is_reached_by_a_bell_pure_part() {
        // the search attains 1 − C at E1, above the closed-form 0.6309401
        let rho = e1_rho();
        let c = concurrence_general(&rho).concurrence;
        let r = bsa_numeric(&rho, 4000, 3);
        assert!(r.numeric_lambda >= 1.0 - c - 1e-7, "{r:?}");
        assert!(r.numeric_lambda > 0.6309401076758504 + 0.04);
        let a = r.best_pure_part.amplitudes();
        assert!((a[0] - a[3]).norm() < 1e-4 && a[1].norm() < 1e-4 && a[2].norm() < 1e-4);
    }

    #[test]
    fn oracle_is_deterministic() {
        let a = bsa_numeric(&e1_rho(), 600, 9);
        let b = bsa_numeric(&e1_rho(), 600, 9);
        assert_eq!(a, b);
        assert_eq!(random_icd(42), random_icd(42));
        assert_eq!(random_density(42), random_density(42));
        assert_ne!(random_icd(42), random_icd(43));
    }

    #[test]
    fn feasibility_is_an_interval() {
        let rho = e1_rho();
        let problem = Problem::new(&rho);
        let mut rng = seeded_rng(5);
        for _ in 0..50 {
            let mut c: Vec<C64> = (0..4).map(|_| gaussian_c64(&mut rng)).collect();
            normalize(&mut c);
            let psi = problem.state(&c);
            let pt_p = partial_transpose(&psi.projector(), Subsystem::Second);
            let flags: Vec<bool> = (1..200)
                .map(|j| problem.ppt_at(&pt_p, 1.0 - j as f64 / 200.0))
                .collect();
            let changes = flags.windows(2).filter(|w| w[0] != w[1]).count();
            assert!(changes <= 2);
        }
    }

    #[test]
    fn sampled_concurrence_bounds() {
        let rho = e1_rho();
        let c = concurrence_general(&rho).concurrence;
        let m = min_avg_concurrence_sample(&rho, 200, 4);
        assert!(m >= c - 1e-9);
        assert!((min_avg_concurrence_sample(&rho, 1, 4) - c).abs() < 1e-9);
        for seed in 0..20 {
            let rho = random_density(seed);
            let c = concurrence_general(&rho).concurrence;
            assert!(min_avg_concurrence_sample(&rho, 30, seed) >= c - 1e-9);
        }
        let psi = random_pure_state_with(&mut seeded_rng(2));
        let rho = DensityMatrix::from_pure(&psi);
        let m = min_avg_concurrence_sample(&rho, 50, 2);
        assert!((m - psi.concurrence()).abs() < 1e-12);
    }

    #[test]
    fn random_generators() {
        let mut rng = seeded_rng(11);
        let mut hits = std::collections::HashSet::new();
        for _ in 0..2000 {
            let q = random_icd_with(&mut rng);
            assert!((q.p().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(q.theta() >= 0.05 && q.theta() <= std::f64::consts::FRAC_PI_2 - 0.05);
            hits.insert(classify_region(&q).kind);
        }
        for k in [
            RegionKind::Separable,
            RegionKind::Entangled1,
            RegionKind::Entangled2,
            RegionKind::Entangled3,
            RegionKind::Entangled4,
        ] {
            assert!(hits.contains(&k), "{k:?}");
        }
        let u = random_unitary_with(&mut rng);
        assert!((u * u.adjoint()).max_abs_diff(&Mat4::identity()) < 1e-12);
        let s = random_symmetric_with(&mut rng);
        assert_eq!(s, s.transpose());
    }

    #[test]
    fn hilbert_schmidt_purity() {
        let mut rng = seeded_rng(17);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| random_density_with(&mut rng).purity())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 8.0 / 17.0).abs() < 0.01, "{mean}");
    }
}
