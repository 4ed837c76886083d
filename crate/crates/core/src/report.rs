//! Check records, run reports and the verification suites behind
//! `g2f verify`.
//!
//! Each suite is a list of named checks. A check carries a short reference
//! string naming the statement it tests, its residual (or a flag), and
//! whether it passed. Suites are deterministic functions of the seed.

use nalgebra::{DMatrix, Vector3, Vector4};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::exterior::{self, basis_tuples, Form};
use crate::fm;
use crate::fueter::{self, EdsSystem};
use crate::g2::{metric_from_phi, operator_rank, phi0, G2Structure, Mat7, Vec7};
use crate::models::{h1_nilmanifold, jacobi_check, LieAlgebraModel};
use crate::pde;
use crate::rng;
use crate::splitting::{self, GraphPlane, GraphSampler, PlaneSampler, Splitting};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Strict,
    Fast,
}

impl Profile {
    pub fn parse(s: &str) -> Option<Profile> {
        match s {
            "strict" => Some(Profile::Strict),
            "fast" => Some(Profile::Fast),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Strict => "strict",
            Profile::Fast => "fast",
        }
    }

    /// Tolerance override, `None` for the per-check strict defaults.
    pub fn tol(&self) -> Option<f64> {
        match self {
            Profile::Strict => None,
            Profile::Fast => Some(1e-8),
        }
    }

    pub fn samples(&self, strict: usize) -> usize {
        match self {
            Profile::Strict => strict,
            Profile::Fast => (strict / 10).max(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub paper_ref: String,
    pub residual_or_flag: Value,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual < limit`; NaN fails.
    pub fn residual(name: &str, reference: &str, residual: f64, limit: f64) -> Check {
        Check {
            name: name.into(),
            paper_ref: reference.into(),
            residual_or_flag: json!(residual),
            pass: residual < limit,
        }
    }

    /// Passes only when the residual is exactly zero.
    pub fn exact(name: &str, reference: &str, residual: f64) -> Check {
        Check {
            name: name.into(),
            paper_ref: reference.into(),
            residual_or_flag: json!(residual),
            pass: residual == 0.0,
        }
    }

    pub fn at_least(name: &str, reference: &str, value: f64, min: f64) -> Check {
        Check {
            name: name.into(),
            paper_ref: reference.into(),
            residual_or_flag: json!(value),
            pass: value >= min,
        }
    }

    pub fn flag(name: &str, reference: &str, flag: bool) -> Check {
        Check {
            name: name.into(),
            paper_ref: reference.into(),
            residual_or_flag: json!(flag),
            pass: flag,
        }
    }

    pub fn value(name: &str, reference: &str, value: Value, pass: bool) -> Check {
        Check {
            name: name.into(),
            paper_ref: reference.into(),
            residual_or_flag: value,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub seed: Option<u64>,
    pub tolerance_profile: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunReport {
    pub fn new(command: &str, seed: Option<u64>, profile: Profile, checks: Vec<Check>, data: Option<Value>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            seed,
            tolerance_profile: profile.name().into(),
            checks,
            pass,
            data,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn tol(profile: Profile, strict: f64) -> f64 {
    profile.tol().map_or(strict, |t| t.max(strict))
}

fn rand_vec7(r: &mut rand_chacha::ChaCha8Rng) -> Vec7 {
    Vec7::from_vec(rng::normals(r, 7))
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

/// Max relative residuals of the associator and coassociator equalities
/// `φ(u,v,w)² + |χ(u,v,w)|² = |u∧v∧w|²` and the analogue for `∗φ, τ`.
pub fn associator_residuals(g: &G2Structure, seed: u64, n: usize) -> (f64, f64) {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let (u, v, w, x) = (rand_vec7(&mut r), rand_vec7(&mut r), rand_vec7(&mut r), rand_vec7(&mut r));
            let p = exterior::evaluate(g.phi(), &[u.as_slice(), v.as_slice(), w.as_slice()]).unwrap();
            let a = rel(p * p + g.chi(&u, &v, &w).norm_squared(), g.gram_det(&[u, v, w]));
            let s = exterior::evaluate(g.star_phi(), &[u.as_slice(), v.as_slice(), w.as_slice(), x.as_slice()])
                .unwrap();
            let b = rel(s * s + g.tau(&u, &v, &w, &x).norm_squared(), g.gram_det(&[u, v, w, x]));
            (a, b)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
}

fn random_form(r: &mut rand_chacha::ChaCha8Rng, k: usize) -> Form {
    let n = basis_tuples(7, k).len();
    Form::from_dense(7, k, &rng::normals(r, n))
}

pub fn algebra_suite(seed: u64, samples: Option<usize>, profile: Profile) -> Vec<Check> {
    let n = samples.unwrap_or(profile.samples(10_000));
    let g = G2Structure::standard();
    let mut out = Vec::new();
    let metric = metric_from_phi(&phi0()).map(|m| (m - Mat7::identity()).amax()).unwrap_or(f64::NAN);
    out.push(Check::residual("metric of the model form is the identity", "metric induced by φ", metric, 1e-12));
    out.push(Check::flag(
        "|φ|² = 7",
        "norm of the model 3-form",
        exterior::inner(&phi0(), &phi0()).unwrap() == 7.0,
    ));
    let (a, b) = associator_residuals(&g, seed, n);
    let t = tol(profile, 1e-10);
    out.push(Check::residual("associator equality", "φ² + |χ|² = |u∧v∧w|²", a, t));
    out.push(Check::residual("coassociator equality", "∗φ² + |τ|² = |u∧v∧w∧x|²", b, t));
    let m = n.min(500);
    let (mut hodge_res, mut cross_res, mut lam_res): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..m {
        let mut r = rng::stream(seed ^ 0x5eed, i as u64);
        let k = 1 + i % 6;
        let a = random_form(&mut r, k);
        let back = exterior::hodge(&exterior::hodge(&a));
        hodge_res = hodge_res.max((&back - &a).max_abs());
        let (u, v) = (rand_vec7(&mut r), rand_vec7(&mut r));
        cross_res = cross_res.max(rel(g.cross(&u, &v).norm_squared(), g.gram_det(&[u, v])));
        let alpha = Form::one_form(&rng::normals(&mut r, 7));
        for kk in [2, 4, 6] {
            let l = g.lambda(&alpha, kk).unwrap();
            lam_res = lam_res.max(rel(g.norm(&l), g.norm(&alpha)));
        }
    }
    out.push(Check::residual("hodge star is an involution in dimension 7", "∗∗ = 1", hodge_res, t));
    out.push(Check::residual("cross product norm", "|u×v|² = |u∧v|²", cross_res, t));
    out.push(Check::residual("λ maps are isometries", "Λ¹ ≅ Λ^k_7", lam_res, t));
    let r7 = operator_rank(7, 2, |b| g.project_2_7(b).unwrap(), 1e-9);
    let r14 = operator_rank(7, 2, |b| g.project_2_14(b).unwrap(), 1e-9);
    out.push(Check::value(
        "Λ² splits as 7 + 14",
        "type decomposition of 2-forms",
        json!([r7, r14]),
        (r7, r14) == (7, 14),
    ));
    out
}

/// Max of `|ve_series − ve_recursive|` over seeded graph planes.
pub fn ve_agreement(seed: u64, n: usize) -> f64 {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let g = fueter::random_graph_plane(seed, i, 1.0);
            let a = splitting::ve_series(&g, 3);
            let b = splitting::ve_recursive(&g, 3);
            a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

pub fn unit_row_ve() -> Vec<f64> {
    splitting::ve_series(&GraphPlane::with_entries(&[(1, 4, 1.0)]), 3)
}

pub fn splitting_suite(seed: u64, samples: Option<usize>, profile: Profile) -> (Vec<Check>, Value) {
    let t = tol(profile, 1e-10);
    let mut out = Vec::new();
    let n = samples.unwrap_or(profile.samples(1000));
    out.push(Check::residual("ve series and recursion agree", "vertical energy recursion", ve_agreement(seed, n), t));
    let pinned = unit_row_ve();
    let expected = [1.0, 0.5, -0.125, 0.0625];
    let err = pinned.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(Check::residual("ve of a single unit row", "Taylor series of √(1+ε)", err, 1e-15));
    let s = Splitting::standard();
    let scan = splitting::anisotropic_scan(&s, &GraphSampler::default(), samples.unwrap_or(profile.samples(10_000)), seed, t);
    out.push(Check::residual(
        "ω ≤ ve₁ on sampled planes",
        "anisotropic calibration inequality",
        (scan.max_ratio - 1.0).max(0.0),
        t,
    ));
    out.push(Check::residual(
        "ω + ½|χ₁|² = ve₁ on sampled planes",
        "anisotropic calibration identity",
        scan.max_identity_residual.unwrap_or(f64::NAN),
        t,
    ));
    let semi = splitting::semi_calibration_scan(
        &phi0(),
        &Mat7::identity(),
        &PlaneSampler::default(),
        samples.unwrap_or(profile.samples(10_000)),
        seed,
        t,
    );
    out.push(Check::residual("φ ≤ vol on sampled planes", "φ is a calibration", (semi.max_ratio - 1.0).max(0.0), t));
    let data = json!({ "anisotropic": scan, "semiCalibration": semi });
    (out, data)
}

/// Max residual over Fueter-completed planes and min residual over generic
/// planes, per condition.
pub fn fueter_separation(seed: u64, n: usize) -> ([f64; 6], [f64; 6]) {
    let s = Splitting::standard();
    let fold = |f: fn(f64, f64) -> f64, init: f64, rows: Vec<[f64; 6]>| {
        rows.into_iter()
            .fold([init; 6], |acc, r| std::array::from_fn(|k| f(acc[k], r[k])))
    };
    let good: Vec<[f64; 6]> = (0..n)
        .into_par_iter()
        .map(|i| fueter::condition_residuals(&s, &fueter::random_fueter_plane(&s, seed, i, 1.0)).residuals())
        .collect();
    let bad: Vec<[f64; 6]> = (0..n)
        .into_par_iter()
        .map(|i| fueter::condition_residuals(&s, &fueter::random_graph_plane(seed ^ 0xbad, i, 1.0)).residuals())
        .collect();
    (fold(f64::max, 0.0, good), fold(f64::min, f64::INFINITY, bad))
}

/// Polar space dimensions `(s=1 associative, s=2 associative, s=2 Fueter)`
/// over seeded flags; `None` if they disagree across flags.
pub fn polar_dims(seed: u64, n: usize) -> Option<(usize, usize, usize)> {
    let s = Splitting::standard();
    let dims: Vec<(usize, usize, usize)> = (0..n)
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let (w1, w2) = (rand_vec7(&mut r), rand_vec7(&mut r));
            (
                fueter::polar_space_dim(&s, &[w1], EdsSystem::Associative).unwrap_or(0),
                fueter::polar_space_dim(&s, &[w1, w2], EdsSystem::Associative).unwrap_or(0),
                fueter::polar_space_dim(&s, &[w1, w2], EdsSystem::Fueter).unwrap_or(0),
            )
        })
        .collect();
    let first = *dims.first()?;
    dims.iter().all(|d| *d == first).then_some(first)
}

pub fn fueter_suite(seed: u64, samples: Option<usize>, profile: Profile) -> Vec<Check> {
    let n = samples.unwrap_or(profile.samples(1000));
    let (good, bad) = fueter_separation(seed, n);
    let mut out = vec![
        Check::residual(
            "all six conditions vanish on Fueter planes",
            "equivalent characterizations of Fueter planes",
            good.iter().cloned().fold(0.0, f64::max),
            tol(profile, 1e-9),
        ),
        Check::at_least(
            "no condition vanishes on generic planes",
            "equivalent characterizations of Fueter planes",
            bad.iter().cloned().fold(f64::INFINITY, f64::min),
            1e-6,
        ),
    ];
    let s = Splitting::standard();
    let mut chi_err: f64 = 0.0;
    for i in 0..n.min(200) {
        let g = fueter::random_graph_plane(seed ^ 0xc41, i, 1.0);
        let via = fueter::chi_via_beta(&s, &g);
        let direct = fueter::chi_direct(&s, &g);
        chi_err = chi_err
            .max((&via.chi1 - &direct[0]).max_abs())
            .max((&via.chi2 - &direct[1]).max_abs())
            .max((&via.chi3 - &direct[2]).max_abs());
    }
    out.push(Check::residual("χ₁, χ₂, χ₃ from β", "χ expressed through β", chi_err, tol(profile, 1e-10)));
    let dims = polar_dims(seed, samples.unwrap_or(profile.samples(100)));
    out.push(Check::value(
        "polar space dimensions",
        "associative and Fueter polar spaces",
        json!(dims.map(|d| [d.0, d.1, d.2])),
        dims == Some((7, 3, 3)),
    ));
    out
}

fn b_basis() -> Vec<[[f64; 3]; 3]> {
    (0..9)
        .map(|k| {
            let mut b = [[0.0; 3]; 3];
            b[k / 3][k % 3] = 1.0;
            b
        })
        .collect()
}

/// Max over the basis `E_ij` of `|dω − 2 tr(B) μ|`.
pub fn heisenberg_omega_identity() -> f64 {
    b_basis()
        .iter()
        .map(|b| {
            let m = LieAlgebraModel::heisenberg(b);
            let s = m.splitting();
            let tr = b[0][0] + b[1][1] + b[2][2];
            (&m.d(s.omega()) - &s.mu().scale(2.0 * tr)).max_abs()
        })
        .fold(0.0, f64::max)
}

/// Rank of `B ↦ dΘ` and whether every symmetric `B` lies in its kernel.
pub fn heisenberg_theta_kernel() -> (usize, bool) {
    let cols: Vec<Vec<f64>> = b_basis()
        .iter()
        .map(|b| {
            let m = LieAlgebraModel::heisenberg(b);
            m.d(m.splitting().theta()).dense()
        })
        .collect();
    let mat = DMatrix::from_fn(cols[0].len(), 9, |r, c| cols[c][r]);
    let symmetric_closed = (0..3).all(|i| {
        (i..3).all(|j| {
            let mut b = [[0.0; 3]; 3];
            b[i][j] = 1.0;
            b[j][i] = 1.0;
            let m = LieAlgebraModel::heisenberg(&b);
            m.d(m.splitting().theta()).is_zero()
        })
    });
    (mat.rank(1e-12), symmetric_closed)
}

/// The displayed `dω` of the `su(2)` model: `−2e²³∧ω₁ + 2e¹³∧ω₂ − 2e¹²∧ω₃`.
pub fn su2_omega_differential_residual() -> f64 {
    let m = LieAlgebraModel::su2_semidirect();
    let s = m.splitting();
    let e = |idx: &[usize], c: f64| Form::monomial(7, idx, c);
    let expected = exterior::wedge(&e(&[2, 3], -2.0), &s.omega_i(1)).unwrap()
        + exterior::wedge(&e(&[1, 3], 2.0), &s.omega_i(2)).unwrap()
        + exterior::wedge(&e(&[1, 2], -2.0), &s.omega_i(3)).unwrap();
    (&m.d(s.omega()) - &expected).max_abs()
}

/// `(n, torsion order, 8|n(n+1)|)` for `B = diag(2n, 2, −2n−2)`.
pub fn torsion_family(range: std::ops::RangeInclusive<i64>) -> Vec<(i64, i128, i128)> {
    range
        .map(|n| {
            let h = h1_nilmanifold(&[[2 * n, 0, 0], [0, 2, 0], [0, 0, -2 * n - 2]]).expect("even entries");
            (n, h.torsion_order(), 8 * (n as i128 * (n as i128 + 1)).abs())
        })
        .collect()
}

pub fn models_suite() -> Vec<Check> {
    let su2 = LieAlgebraModel::su2_semidirect();
    let f = su2.closedness();
    let mut out = vec![
        Check::flag("su(2) model: dΘ = 0", "closedness flags of the su(2) model", f.d_theta == 0.0),
        Check::flag("su(2) model: dω ≠ 0", "closedness flags of the su(2) model", f.d_omega != 0.0),
        Check::exact("su(2) model: displayed dω", "dω on the su(2) model", su2_omega_differential_residual()),
        Check::exact("heisenberg: dω = 2 tr(B) μ", "Heisenberg-type models", heisenberg_omega_identity()),
    ];
    let (rank, sym) = heisenberg_theta_kernel();
    out.push(Check::value(
        "heisenberg: dΘ = 0 iff B symmetric",
        "Heisenberg-type models",
        json!({ "rank": rank, "symmetricClosed": sym }),
        rank == 3 && sym,
    ));
    let flat = LieAlgebraModel::product_flat().closedness();
    out.push(Check::flag("product model: dφ = 0", "flat product model", flat.d_phi == 0.0));
    let jac = [
        jacobi_check(su2.constants()),
        jacobi_check(LieAlgebraModel::heisenberg(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]).constants()),
    ];
    out.push(Check::exact("jacobi identity", "structure constants", jac[0].max(jac[1])));
    let fam = torsion_family(1..=10);
    out.push(Check::value(
        "torsion order of H₁ is 8|n(n+1)|",
        "first homology of nilmanifolds",
        json!(fam.iter().map(|r| r.1.to_string()).collect::<Vec<_>>()),
        fam.iter().all(|r| r.1 == r.2),
    ));
    out
}

/// Max `|D²F + ΔF|` over seeded random cubic polynomial maps.
pub fn flat_d_squared(seed: u64, n: usize) -> f64 {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let f = pde::PolynomialMap::random(3, 4, 3, &mut r);
            let x = rng::normals(&mut r, 3);
            pde::d_squared_residual(&f, &x).unwrap().amax()
        })
        .reduce(|| 0.0, f64::max)
}

/// Max `|D²F + ΔF + 2DF|` on SU(2) over the catalog (random polynomials,
/// linear maps, the cotangent potential) at seeded points.
pub fn su2_identity(seed: u64, n: usize) -> f64 {
    let mut r = rng::stream(seed, u64::MAX);
    let poly = pde::PolynomialMap::random(4, 4, 3, &mut r);
    let lin = pde::PolynomialMap::random(4, 4, 1, &mut r);
    let cot = pde::CotPotential {
        center: Vector4::new(0.0, 0.0, 1.0, 0.0),
        a: 1.0 / (4.0 * std::f64::consts::PI),
        b: 0.5,
        v0: Vector4::new(1.0, -1.0, 0.5, 2.0),
    };
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let h = pde::random_unit_quaternion(&mut r);
            let h = h.as_slice();
            let mut worst = pde::su2_identity_residual(&poly, h).unwrap().amax();
            worst = worst.max(pde::su2_identity_residual(&lin, h).unwrap().amax());
            if !cot.near_singularity(h, 1e-3) {
                worst = worst.max(pde::su2_identity_residual(&cot, h).unwrap().amax());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Max Fueter residual of the `harmonic_to_fueter` outputs at seeded points.
pub fn harmonic_outputs(seed: u64, n: usize) -> Result<f64, pde::PdeError> {
    let mut r = rng::stream(seed, 0);
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            let v = rng::normals(&mut r, 3);
            [v[0], v[1], v[2]]
        })
        .collect();
    let p = |t: Vec<(f64, Vec<u32>)>| pde::Polynomial::new(3, t);
    let quad = pde::PolynomialMap::new(vec![
        p(vec![(1.0, vec![2, 0, 0]), (-1.0, vec![0, 2, 0])]),
        p(vec![(1.0, vec![1, 1, 0])]),
        p(vec![(2.0, vec![0, 0, 2]), (-1.0, vec![2, 0, 0]), (-1.0, vec![0, 2, 0])]),
        p(vec![(1.0, vec![1, 1, 1])]),
    ]);
    let newton = pde::NewtonianPotential {
        center: Vector3::new(0.05, -0.03, 0.02),
        v0: Vector4::new(1.0, 0.5, -2.0, 0.25),
    };
    let u1 = pde::harmonic_to_fueter(quad, &pts)?;
    let u2 = pde::harmonic_to_fueter(newton, &pts)?;
    Ok(pts
        .iter()
        .map(|x| pde::fueter_operator_flat(&u1, x).amax().max(pde::fueter_operator_flat(&u2, x).amax()))
        .fold(0.0, f64::max))
}

pub fn standard_fueter_base() -> pde::AffineMap {
    pde::affine_fueter(Vector4::new(1.0, 0.0, -1.0, 2.0), Vector4::new(0.0, 1.0, 1.0, 0.0), Vector4::zeros())
}

pub fn pde_suite(seed: u64, samples: Option<usize>, profile: Profile) -> (Vec<Check>, Value) {
    let mut out = vec![
        Check::residual(
            "flat: D² + Δ = 0",
            "square of the flat Fueter operator",
            flat_d_squared(seed, samples.unwrap_or(profile.samples(50)).max(1)),
            tol(profile, 1e-10),
        ),
        Check::residual(
            "SU(2): D² + Δ + 2D = 0",
            "square of the Fueter operator on SU(2)",
            su2_identity(seed, samples.unwrap_or(profile.samples(100)).max(1)),
            tol(profile, 1e-8),
        ),
    ];
    let h = harmonic_outputs(seed, 50).unwrap_or(f64::NAN);
    out.push(Check::residual("D of harmonic maps is Fueter", "Fueter sections from harmonic maps", h, tol(profile, 1e-10)));
    let base = standard_fueter_base();
    let cfg = pde::MinimizationConfig {
        samples: samples.unwrap_or(profile.samples(200)).max(1),
        seed,
        grid: 6,
        ..Default::default()
    };
    let m = pde::minimization_experiment(&base, &cfg);
    let (viol, mdata) = match &m {
        Ok(r) => ((r.violations_ve + r.violations_ve_plus_vol_h) as f64, json!(r)),
        Err(e) => (f64::NAN, json!(e.to_string())),
    };
    out.push(Check::residual("Fueter sections minimize VE and VE + Vol^H", "minimizing property", viol, 0.5));
    let mut r = rng::stream(seed, 1 << 20);
    let w = pde::TrigField::random(&mut r, 1, 0.2, 4);
    let u = pde::SumMap(vec![Box::new(base.clone()), Box::new(w.clone())]);
    let rep = pde::reparametrization_invariance(&u, &pde::Shear { a: 0.1 }, 12).map(|r| r.residual);
    out.push(Check::residual(
        "VE is invariant under reparametrization",
        "reparametrization invariance",
        rep.unwrap_or(f64::NAN),
        1e-10,
    ));
    let model = LieAlgebraModel::product_flat();
    let z = pde::TrigField::random(&mut r, 1, 0.5, 4);
    let cs = pde::cs_first_variation(&model, &base, &w, &z, 6).map(|v| v.numeric.abs().max(v.boundary.abs()));
    out.push(Check::residual(
        "first variation of CS vanishes at Fueter endpoint",
        "Fueter sections are critical for CS",
        cs.unwrap_or(f64::NAN),
        1e-6,
    ));
    (out, json!({ "minimization": mdata }))
}

/// `(max |ratio − 1|, max over pairs of |inst| + |Du|·[Fueter])` for
/// seeded random quadratic lifts at random points; also counts pairs where
/// exactly one of the two residuals vanishes.
pub fn mirror_statistics(seed: u64, n: usize) -> (f64, usize) {
    let rows: Vec<(f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let fueter_case = i % 2 == 0;
            let x = rng::normals(&mut r, 3);
            let (a, b) = if fueter_case {
                let cols = rng::normals(&mut r, 12);
                let u = pde::affine_fueter(
                    Vector4::from_column_slice(&cols[0..4]),
                    Vector4::from_column_slice(&cols[4..8]),
                    Vector4::from_column_slice(&cols[8..12]),
                );
                fm::mirror_pair(&u, &x)
            } else {
                let u = pde::PolynomialMap::random(3, 4, 2, &mut r);
                fm::mirror_pair(&u, &x)
            };
            let vanish_a = a < 1e-12;
            let vanish_b = b < 1e-12;
            let ratio_err = if vanish_a || vanish_b { 0.0 } else { (a / b - fm::MIRROR_RATIO).abs() };
            (ratio_err, vanish_a != vanish_b)
        })
        .collect();
    (
        rows.iter().map(|r| r.0).fold(0.0, f64::max),
        rows.iter().filter(|r| r.1).count(),
    )
}

pub fn fm_sweep_default() -> fm::RadiusSweep {
    let c = fm::fm_transform(standard_fueter_base());
    fm::radius_sweep(&c, &[0.0; 3], &fm::log_radii(1.0, 1e3, 31)).expect("valid radii")
}

pub fn fm_suite(seed: u64, samples: Option<usize>, profile: Profile) -> (Vec<Check>, Value) {
    let n = samples.unwrap_or(profile.samples(1000)).max(2);
    let (ratio_err, mismatches) = mirror_statistics(seed, n);
    let mut beta: f64 = 0.0;
    for i in 0..n.min(100) {
        let mut r = rng::stream(seed ^ 0xbe7a, i as u64);
        let u = pde::PolynomialMap::random(3, 4, 3, &mut r);
        beta = beta.max(fm::beta_relation_residual(&u, &rng::normals(&mut r, 3)));
    }
    let sweep = fm_sweep_default();
    let kc = fm::kernel_comparison(&Splitting::standard());
    let out = vec![
        Check::residual("β = 2π Ψ*K", "β and the curvature of the transform", beta, 1e-12),
        Check::residual("instanton residual ∝ Fueter residual", "Fueter sections and G₂-instantons", ratio_err, 1e-8),
        Check::value(
            "instanton = 0 iff Fueter = 0",
            "Fueter sections and G₂-instantons",
            json!(mismatches),
            mismatches == 0,
        ),
        Check::residual("dDT large-radius slope is −4", "large radius limit of dDT", (sweep.slope + 4.0).abs(), 0.1),
        Check::flag("K∧∗φ = 0 iff K∧Θ = 0 on mixed forms", "β∧μ = 0 for mixed β", kc.kernels_agree()),
    ];
    (out, json!({ "sweep": sweep, "kernels": kc }))
}

/// Runs `verify <target>`; `None` for an unknown target.
pub fn verify(target: &str, seed: u64, samples: Option<usize>, profile: Profile) -> Option<(Vec<Check>, Option<Value>)> {
    Some(match target {
        "algebra" => (algebra_suite(seed, samples, profile), None),
        "splitting" => {
            let (c, d) = splitting_suite(seed, samples, profile);
            (c, Some(d))
        }
        "fueter" => (fueter_suite(seed, samples, profile), None),
        "models" => (models_suite(), None),
        "pde" => {
            let (c, d) = pde_suite(seed, samples, profile);
            (c, Some(d))
        }
        "fm" => {
            let (c, d) = fm_suite(seed, samples, profile);
            (c, Some(d))
        }
        _ => return None,
    })
}
