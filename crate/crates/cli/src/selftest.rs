//! Reduced-size invariant battery, one suite per library module.

use icdlab::concurrence::{average_concurrence, concurrence_general, takagi, wootters_ensemble};
use icdlab::icd::{
    alphas, classify_region, concurrence_icd, icd_density, lambda_spectrum_icd, tau_icd,
};
use icdlab::lsd::{
    average_concurrence as lsd_average, bsa_ensemble, lsd_closed_form, verify_optimality,
};
use icdlab::oracle::{
    bsa_numeric, min_avg_concurrence_sample, random_density_with, random_icd_with,
    random_pure_state_with, random_symmetric_with, random_unitary_with, seeded_rng,
};
use icdlab::qmat::{
    dual_basis, gram_determinant, hermitian_eig, partial_transpose, psd_sqrt, Subsystem,
};
use icdlab::qstate::{is_ppt_separable, ppt_min_eigenvalue, spin_flip, spin_flip_overlap};
use icdlab::{DensityMatrix, ICDParams, Mat4, RegionKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &str) -> Self {
        Suite {
            result: SuiteResult {
                name: name.to_string(),
                checks: 0,
                failures: 0,
                first_failure: None,
            },
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.result.checks += 1;
        if !ok {
            self.result.failures += 1;
            if self.result.first_failure.is_none() {
                self.result.first_failure = Some(what());
            }
        }
    }

    fn within(&mut self, name: &str, value: f64, tol: f64) {
        self.check(value.abs() <= tol, || {
            format!("{name}: {value:e} > {tol:e}")
        });
    }
}

fn qmat_suite(n: usize, seed: u64) -> SuiteResult {
    let mut s = Suite::new("qmat");
    let mut rng = seeded_rng(seed);
    for _ in 0..n {
        let rho = random_density_with(&mut rng);
        let u = random_unitary_with(&mut rng);
        let h =
            (u * *rho.matrix() * u.adjoint()).scale_real(20.0) - Mat4::identity().scale_real(5.0);
        let eig = hermitian_eig(&h).unwrap();
        s.within(
            "eig reconstruction",
            eig.reconstruct().max_abs_diff(&h),
            1e-10,
        );
        let r = psd_sqrt(rho.matrix()).unwrap();
        s.within("sqrt", (r * r).max_abs_diff(rho.matrix()), 1e-9);
        let m = u.scale_real(3.0) + h;
        let ok = partial_transpose(&partial_transpose(&m, Subsystem::First), Subsystem::First) == m;
        s.check(ok, || "partial transpose involution".into());
        let vs = [0, 1, 2]
            .map(|k| icdlab::CVector(u.rows()[k]) + icdlab::CVector(rho.matrix().rows()[k]));
        if gram_determinant(&vs) > 1e-6 {
            let back = dual_basis(&dual_basis(&vs).unwrap()).unwrap();
            let err = vs
                .iter()
                .zip(&back)
                .map(|(a, b)| a.max_abs_diff(b))
                .fold(0.0, f64::max);
            s.within("biduality", err, 1e-9);
        }
    }
    s.result
}

fn qstate_suite(n: usize, seed: u64) -> SuiteResult {
    let mut s = Suite::new("qstate");
    let mut rng = seeded_rng(seed);
    for _ in 0..n {
        let rho = random_density_with(&mut rng);
        let once = DensityMatrix::new(spin_flip(&rho)).unwrap();
        s.within(
            "spin flip involution",
            spin_flip(&once).max_abs_diff(rho.matrix()),
            1e-12,
        );
        let pt = ppt_min_eigenvalue(&rho);
        s.check(pt >= -0.5, || format!("PT eigenvalue {pt} below -1/2"));
        let a = random_pure_state_with(&mut rng);
        let b = random_pure_state_with(&mut rng);
        let e1 = icdlab::CVector([a.amplitudes()[0], a.amplitudes()[1]]);
        let e2 = icdlab::CVector([b.amplitudes()[0], b.amplitudes()[1]]);
        if let (Some(e1), Some(e2)) = (e1.normalized(), e2.normalized()) {
            let prod = icdlab::PureState::product(&e1, &e2).unwrap();
            s.within(
                "product overlap",
                spin_flip_overlap(prod.amplitudes()).norm(),
                1e-12,
            );
        }
    }
    s.result
}

fn concurrence_suite(n: usize, seed: u64) -> SuiteResult {
    let mut s = Suite::new("concurrence");
    let mut rng = seeded_rng(seed);
    for _ in 0..n {
        let psi = random_pure_state_with(&mut rng);
        let a = psi.amplitudes();
        let direct = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        let c = concurrence_general(&DensityMatrix::from_pure(&psi)).concurrence;
        s.within("pure state", c - direct, 1e-10);

        let rho = random_density_with(&mut rng);
        let c = concurrence_general(&rho).concurrence;
        s.check((0.0..=1.0).contains(&c), || {
            format!("C = {c} outside [0, 1]")
        });
        let pt = ppt_min_eigenvalue(&rho);
        if !(c > 0.0 && c <= 1e-8) && pt.abs() > 1e-8 {
            s.check((c == 0.0) == is_ppt_separable(&rho), || {
                format!("C = {c}, PT min {pt}")
            });
        }
        let z = wootters_ensemble(&rho);
        s.within("ensemble", z.operator().max_abs_diff(rho.matrix()), 1e-10);
        if c > 0.0 {
            s.within(
                "ensemble concurrence",
                average_concurrence(&z.vectors) - c,
                1e-8,
            );
        }

        let tau = random_symmetric_with(&mut rng);
        let t = takagi(&tau).unwrap();
        s.within("takagi unitarity", t.unitarity_residual(), 1e-9);
        s.within(
            "takagi diagonalization",
            t.diagonalization_residual(&tau),
            1e-9,
        );
    }
    s.result
}

fn icd_suite(n: usize, seed: u64) -> SuiteResult {
    let mut s = Suite::new("icd");
    let mut rng = seeded_rng(seed);
    for _ in 0..n {
        let q = random_icd_with(&mut rng);
        let rho = icd_density(&q);
        let general = concurrence_general(&rho);
        s.within(
            "closed-form concurrence",
            concurrence_icd(&q) - general.concurrence,
            1e-9,
        );
        let label = classify_region(&q);
        let pt = ppt_min_eigenvalue(&rho);
        if label.slack.abs() > 1e-10 {
            s.check(
                (label.kind == RegionKind::Separable) == (pt >= -1e-10),
                || format!("{q:?}: {:?} with PT min {pt}", label.kind),
            );
        }
        let a = alphas(&q);
        s.within("alpha norm", a[0] * a[0] + a[1] * a[1] - 1.0, 1e-12);
        s.within("alpha norm", a[2] * a[2] + a[3] * a[3] - 1.0, 1e-12);
        s.within(
            "mirror",
            concurrence_icd(&q) - concurrence_icd(&q.mirrored()),
            1e-12,
        );
        let spec = lambda_spectrum_icd(&q).sorted;
        let tau = tau_icd(&q);
        let t = takagi(&tau).unwrap();
        s.within(
            "tau diagonalization",
            t.diagonalization_residual(&tau),
            1e-9,
        );
        for (a, b) in spec.iter().zip(&general.lambdas) {
            s.within("spectrum", a - b, 1e-9);
        }
    }
    s.result
}

fn region1(draw: &mut impl FnMut() -> ICDParams) -> ICDParams {
    loop {
        let q = draw();
        if classify_region(&q).kind == RegionKind::Entangled1 {
            return q;
        }
    }
}

fn lsd_suite(n: usize, seed: u64) -> SuiteResult {
    let mut s = Suite::new("lsd");
    let mut rng = seeded_rng(seed);
    for k in 0..n {
        let q = region1(&mut || random_icd_with(&mut rng));
        let d = lsd_closed_form(&q).unwrap();
        let rho = icd_density(&q);
        s.check(d.lambda >= 0.0 && d.lambda < 1.0, || {
            format!("lambda {}", d.lambda)
        });
        s.within(
            "reconstruction",
            d.reconstruct().max_abs_diff(rho.matrix()),
            1e-10,
        );
        s.within("saturation", lsd_average(&d) - concurrence_icd(&q), 1e-10);
        s.within("boundary", concurrence_icd(&d.sep_params), 1e-9);
        let e = bsa_ensemble(&d).unwrap();
        let worst = e
            .states()
            .iter()
            .map(|z| z.concurrence())
            .fold(0.0, f64::max);
        s.within("product ensemble", worst, 1e-9);
        let total = e.operator() + d.pure_part.projector().scale_real(1.0 - d.lambda);
        s.within("ensemble", total.max_abs_diff(rho.matrix()), 1e-10);
        if k % 10 == 0 {
            let v = verify_optimality(&d);
            s.check(v.overall, || format!("verifier rejected {q:?}"));
        }
    }
    s.result
}

fn oracle_suite(n: usize, seed: u64) -> SuiteResult {
    let mut s = Suite::new("oracle");
    let mut rng = seeded_rng(seed);
    let points = (n / 50).clamp(2, 20);
    for _ in 0..points {
        let q = region1(&mut || random_icd_with(&mut rng));
        let rho = icd_density(&q);
        let c = concurrence_icd(&q);
        let r = bsa_numeric(&rho, 400, seed);
        // every decomposition has C(ρ) ≤ 1 − λ
        s.check(r.numeric_lambda <= 1.0 - c + 1e-9, || {
            format!("{q:?}: numeric {} above 1 - C", r.numeric_lambda)
        });
        s.check(r == bsa_numeric(&rho, 400, seed), || {
            "oracle not deterministic".into()
        });
        let m = min_avg_concurrence_sample(&rho, 20, seed);
        s.check(m >= c - 1e-9, || format!("sampled {m} below C = {c}"));
    }
    s.result
}

pub fn run(samples: usize, seed: u64) -> SelftestReport {
    let n = samples.max(1);
    let suites = vec![
        qmat_suite(n, seed),
        qstate_suite(n, seed ^ 1),
        concurrence_suite(n, seed ^ 2),
        icd_suite(n, seed ^ 3),
        lsd_suite(n, seed ^ 4),
        oracle_suite(n, seed ^ 5),
    ];
    SelftestReport {
        seed,
        samples: n,
        passed: suites.iter().all(SuiteResult::passed),
        suites,
    }
}

pub fn csv(report: &SelftestReport) -> String {
    let mut out = String::from("suite,checks,failures,status\n");
    for s in &report.suites {
        let status = if s.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{},{},{},{status}\n",
            s.name, s.checks, s.failures
        ));
    }
    out
}
