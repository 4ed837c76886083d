//! Analytic Fueter PDE checks on the homogeneous models.
//!
//! Maps are evaluated with exact jets (no finite differences): polynomials,
//! affine maps, trigonometric fields, the Newtonian potential on R^3 and the
//! cotangent potential on the unit sphere of R^4 = H.
//!
//! On the flat model `Du = J1 ∂1u + J2 ∂2u + J3 ∂3u`. On `SU(2)` the
//! coordinate derivatives are replaced by the left-invariant fields
//! `e_i F(h) = d/dt F(h exp(t X_i))` with `X_1 = j`, `X_2 = k`, `X_3 = i`,
//! the quaternions of the `su(2)` basis under
//! `a + bi + cj + dk ↦ [[a + bi, c + di], [−c + di, a − bi]]`.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Quaternion, SMatrix, Vector3, Vector4};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::exterior::{self, Form};
use crate::fueter::JTriple;
use crate::models::LieAlgebraModel;
use crate::rng;
use crate::splitting::{ve_series, GraphPlane, Mat34};

pub type Mat43 = SMatrix<f64, 4, 3>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("input is not harmonic: max |ΔF| = {0:e}")]
    NotHarmonic(f64),
    #[error("second derivatives are not available for this map")]
    NoSecondJet,
    #[error("grid point {index} at {x:?} is not horizontally projectable")]
    NotProjectable { index: usize, x: [f64; 3] },
    #[error("base section is not Fueter: max |Du| = {0:e}")]
    NotFueter(f64),
    #[error("Θ is not closed on this model (|dΘ| = {0:e})")]
    ThetaNotClosed(f64),
    #[error("map has domain dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}

/// A smooth map `R^n -> R^m` with exact first and second derivatives.
pub trait AnalyticMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn value(&self, x: &[f64]) -> Vec<f64>;
    /// `m × n` Jacobian.
    fn jet1(&self, x: &[f64]) -> DMatrix<f64>;
    /// Hessians of the `m` components, each `n × n`.
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>>;
    /// `A` with `f(x + k) − f(x) = A k` for integer `k`, for maps that
    /// descend to tori.
    fn periodicity(&self) -> Option<DMatrix<f64>> {
        None
    }
}

/// Multivariate polynomial `Σ c · x^e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl Polynomial {
    pub fn new(vars: usize, terms: Vec<(f64, Vec<u32>)>) -> Self {
        for (_, e) in &terms {
            assert_eq!(e.len(), vars);
        }
        Polynomial { vars, terms }
    }

    pub fn zero(vars: usize) -> Self {
        Polynomial { vars, terms: Vec::new() }
    }

    pub fn constant(vars: usize, c: f64) -> Self {
        Polynomial::new(vars, vec![(c, vec![0; vars])])
    }

    /// Partial derivative with respect to variable `i` (0-based).
    pub fn derivative(&self, i: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[i] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (c * e[i] as f64, e2)
            })
            .collect();
        Polynomial { vars: self.vars, terms }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&p, &xi)| xi.powi(p as i32)).product::<f64>())
            .sum()
    }

    /// All monomials of total degree `<= degree` with standard normal
    /// coefficients.
    pub fn random(vars: usize, degree: u32, r: &mut rand_chacha::ChaCha8Rng) -> Self {
        fn exps(vars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == vars {
                out.push(cur.clone());
                return;
            }
            for p in 0..=left {
                cur.push(p);
                exps(vars, left - p, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        exps(vars, degree, &mut Vec::new(), &mut all);
        Polynomial::new(vars, all.into_iter().map(|e| (rng::normal(r), e)).collect())
    }
}

/// Vector of polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    comps: Vec<Polynomial>,
    grads: Vec<Vec<Polynomial>>,
    hessians: Vec<Vec<Vec<Polynomial>>>,
}

impl PolynomialMap {
    pub fn new(comps: Vec<Polynomial>) -> Self {
        let n = comps[0].vars;
        let grads: Vec<Vec<Polynomial>> = comps.iter().map(|p| (0..n).map(|i| p.derivative(i)).collect()).collect();
        let hessians = grads
            .iter()
            .map(|g| g.iter().map(|gi| (0..n).map(|j| gi.derivative(j)).collect()).collect())
            .collect();
        PolynomialMap { comps, grads, hessians }
    }

    pub fn random(vars: usize, outs: usize, degree: u32, r: &mut rand_chacha::ChaCha8Rng) -> Self {
        PolynomialMap::new((0..outs).map(|_| Polynomial::random(vars, degree, r)).collect())
    }
}

impl AnalyticMap for PolynomialMap {
    fn dim_in(&self) -> usize {
        self.comps[0].vars
    }
    fn dim_out(&self) -> usize {
        self.comps.len()
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim_out(), self.dim_in(), |a, i| self.grads[a][i].eval(x))
    }
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let n = self.dim_in();
        Some(
            self.hessians
                .iter()
                .map(|h| DMatrix::from_fn(n, n, |i, j| h[i][j].eval(x)))
                .collect(),
        )
    }
}

/// `x ↦ b + A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl AffineMap {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Self {
        assert_eq!(a.nrows(), b.len());
        AffineMap { a, b }
    }

    /// Section `R^3 -> R^4` whose linear part has rows... columns
    /// `a_1, a_2, a_3` (the images of `e_1, e_2, e_3`).
    pub fn from_columns(cols: [Vector4<f64>; 3], b: Vector4<f64>) -> Self {
        let a = DMatrix::from_fn(4, 3, |r, c| cols[c][r]);
        AffineMap::new(a, DVector::from_column_slice(b.as_slice()))
    }
}

impl AnalyticMap for AffineMap {
    fn dim_in(&self) -> usize {
        self.a.ncols()
    }
    fn dim_out(&self) -> usize {
        self.a.nrows()
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        (&self.b + &self.a * DVector::from_column_slice(x)).as_slice().to_vec()
    }
    fn jet1(&self, _x: &[f64]) -> DMatrix<f64> {
        self.a.clone()
    }
    fn jet2(&self, _x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let n = self.dim_in();
        Some(vec![DMatrix::zeros(n, n); self.dim_out()])
    }
    fn periodicity(&self) -> Option<DMatrix<f64>> {
        if self.a.iter().all(|x| x.fract() == 0.0) {
            Some(self.a.clone())
        } else {
            None
        }
    }
}

/// One Fourier mode `cos(2π k·x) c + sin(2π k·x) s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub k: Vec<i32>,
    pub cos: DVector<f64>,
    pub sin: DVector<f64>,
}

/// Finite Fourier series on the unit torus; periodic with `A = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigField {
    vars: usize,
    outs: usize,
    modes: Vec<Mode>,
}

impl TrigField {
    pub fn new(vars: usize, outs: usize, modes: Vec<Mode>) -> Self {
        TrigField { vars, outs, modes }
    }

    /// Random field over the wave vectors with entries in `-kmax..=kmax`
    /// (excluding 0), coefficients standard normal, scaled so that the max
    /// of `|w|` over an `n³` grid equals `amplitude`.
    pub fn random(r: &mut rand_chacha::ChaCha8Rng, kmax: i32, amplitude: f64, grid: usize) -> Self {
        let mut modes = Vec::new();
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                for k3 in -kmax..=kmax {
                    // one representative of each ±k pair
                    let k = [k1, k2, k3];
                    if k == [0, 0, 0] || k.iter().find(|&&x| x != 0).map_or(false, |&x| x < 0) {
                        continue;
                    }
                    modes.push(Mode {
                        k: k.to_vec(),
                        cos: DVector::from_vec(rng::normals(r, 4)),
                        sin: DVector::from_vec(rng::normals(r, 4)),
                    });
                }
            }
        }
        let field = TrigField::new(3, 4, modes);
        let sup = grid_points(grid)
            .iter()
            .map(|x| DVector::from_vec(field.value(x)).norm())
            .fold(0.0, f64::max);
        field.scaled(if sup > 0.0 { amplitude / sup } else { 0.0 })
    }

    pub fn scaled(&self, c: f64) -> Self {
        TrigField {
            vars: self.vars,
            outs: self.outs,
            modes: self
                .modes
                .iter()
                .map(|m| Mode {
                    k: m.k.clone(),
                    cos: &m.cos * c,
                    sin: &m.sin * c,
                })
                .collect(),
        }
    }

    fn phase(m: &Mode, x: &[f64]) -> f64 {
        2.0 * PI * m.k.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>()
    }
}

impl AnalyticMap for TrigField {
    fn dim_in(&self) -> usize {
        self.vars
    }
    fn dim_out(&self) -> usize {
        self.outs
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        let mut v = DVector::zeros(self.outs);
        for m in &self.modes {
            let t = Self::phase(m, x);
            v += &m.cos * t.cos() + &m.sin * t.sin();
        }
        v.as_slice().to_vec()
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.outs, self.vars);
        for m in &self.modes {
            let t = Self::phase(m, x);
            let d = &m.sin * t.cos() - &m.cos * t.sin();
            for i in 0..self.vars {
                let w = 2.0 * PI * m.k[i] as f64;
                for a in 0..self.outs {
                    j[(a, i)] += w * d[a];
                }
            }
        }
        j
    }
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let mut h = vec![DMatrix::zeros(self.vars, self.vars); self.outs];
        for m in &self.modes {
            let t = Self::phase(m, x);
            let v = &m.cos * t.cos() + &m.sin * t.sin();
            for i in 0..self.vars {
                for j in 0..self.vars {
                    let w = 4.0 * PI * PI * (m.k[i] * m.k[j]) as f64;
                    for a in 0..self.outs {
                        h[a][(i, j)] -= w * v[a];
                    }
                }
            }
        }
        Some(h)
    }
    fn periodicity(&self) -> Option<DMatrix<f64>> {
        Some(DMatrix::zeros(self.outs, self.vars))
    }
}

/// `v0 / (4π |x − c|)` on `R^3 \ {c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonianPotential {
    pub center: Vector3<f64>,
    pub v0: Vector4<f64>,
}

impl NewtonianPotential {
    fn parts(&self, x: &[f64]) -> (Vector3<f64>, f64) {
        let d = Vector3::new(x[0], x[1], x[2]) - self.center;
        let r = d.norm();
        (d, r)
    }
}

impl AnalyticMap for NewtonianPotential {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        4
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        let (_, r) = self.parts(x);
        (self.v0 / (4.0 * PI * r)).as_slice().to_vec()
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        let (d, r) = self.parts(x);
        let g = -d / (4.0 * PI * r.powi(3));
        DMatrix::from_fn(4, 3, |a, i| self.v0[a] * g[i])
    }
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let (d, r) = self.parts(x);
        let h = (d * d.transpose() * 3.0 / r.powi(5) - Matrix3::identity() / r.powi(3)) / (4.0 * PI);
        Some(
            (0..4)
                .map(|a| DMatrix::from_fn(3, 3, |i, j| self.v0[a] * h[(i, j)]))
                .collect(),
        )
    }
}

/// `(A c / √(1 − c²) + B) v0` with `c = ⟨p, center⟩`: on the unit sphere this
/// is `A cot(r) + B` for the geodesic distance `r` to `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotPotential {
    pub center: Vector4<f64>,
    pub a: f64,
    pub b: f64,
    pub v0: Vector4<f64>,
}

impl CotPotential {
    fn c(&self, x: &[f64]) -> f64 {
        self.center.dot(&Vector4::new(x[0], x[1], x[2], x[3]))
    }

    /// Distance guard: points within `radius` of `±center` on the sphere.
    pub fn near_singularity(&self, x: &[f64], radius: f64) -> bool {
        let c = self.c(x).clamp(-1.0, 1.0);
        let r = c.acos();
        r < radius || PI - r < radius
    }
}

impl AnalyticMap for CotPotential {
    fn dim_in(&self) -> usize {
        4
    }
    fn dim_out(&self) -> usize {
        4
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        let c = self.c(x);
        let f = self.a * c / (1.0 - c * c).sqrt() + self.b;
        (self.v0 * f).as_slice().to_vec()
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        let c = self.c(x);
        let f1 = self.a * (1.0 - c * c).powf(-1.5);
        DMatrix::from_fn(4, 4, |a, i| self.v0[a] * f1 * self.center[i])
    }
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let c = self.c(x);
        let f2 = 3.0 * self.a * c * (1.0 - c * c).powf(-2.5);
        Some(
            (0..4)
                .map(|a| DMatrix::from_fn(4, 4, |i, j| self.v0[a] * f2 * self.center[i] * self.center[j]))
                .collect(),
        )
    }
}

/// Pointwise sum of maps with equal shapes.
pub struct SumMap(pub Vec<Box<dyn AnalyticMap>>);

impl AnalyticMap for SumMap {
    fn dim_in(&self) -> usize {
        self.0[0].dim_in()
    }
    fn dim_out(&self) -> usize {
        self.0[0].dim_out()
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim_out()];
        for m in &self.0 {
            for (a, b) in v.iter_mut().zip(m.value(x)) {
                *a += b;
            }
        }
        v
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        self.0.iter().map(|m| m.jet1(x)).fold(DMatrix::zeros(self.dim_out(), self.dim_in()), |a, b| a + b)
    }
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let mut out: Option<Vec<DMatrix<f64>>> = None;
        for m in &self.0 {
            let h = m.jet2(x)?;
            out = Some(match out {
                None => h,
                Some(acc) => acc.into_iter().zip(h).map(|(a, b)| a + b).collect(),
            });
        }
        out
    }
    fn periodicity(&self) -> Option<DMatrix<f64>> {
        let mut acc = DMatrix::zeros(self.dim_out(), self.dim_in());
        for m in &self.0 {
            acc += m.periodicity()?;
        }
        Some(acc)
    }
}

fn jmat(j: &JTriple, i: usize) -> DMatrix<f64> {
    let m = j.get(i);
    DMatrix::from_fn(4, 4, |r, c| m[(r, c)])
}

/// `u = DF` for `F: R^3 -> R^4`; its Jacobian uses the Hessians of `F`.
pub struct FlatDApplied<M: AnalyticMap> {
    pub inner: M,
    j: JTriple,
}

impl<M: AnalyticMap> AnalyticMap for FlatDApplied<M> {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        4
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        let jac = self.inner.jet1(x);
        let mut v = DVector::zeros(4);
        for i in 0..3 {
            v += jmat(&self.j, i + 1) * jac.column(i);
        }
        v.as_slice().to_vec()
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        let h = self.inner.jet2(x).expect("checked at construction");
        let mut out = DMatrix::zeros(4, 3);
        for k in 0..3 {
            for i in 0..3 {
                let col = DVector::from_fn(4, |a, _| h[a][(i, k)]);
                let img = jmat(&self.j, i + 1) * col;
                for a in 0..4 {
                    out[(a, k)] += img[a];
                }
            }
        }
        out
    }
    fn jet2(&self, _x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        None
    }
}

/// `Du(x) = Σ J_i ∂_i u(x)`.
pub fn fueter_operator_flat(u: &dyn AnalyticMap, x: &[f64]) -> Vector4<f64> {
    fueter_operator_with(&JTriple::standard(), u, x)
}

fn fueter_operator_with(j: &JTriple, u: &dyn AnalyticMap, x: &[f64]) -> Vector4<f64> {
    let jac = u.jet1(x);
    let mut v = Vector4::zeros();
    for i in 0..3 {
        let col = Vector4::new(jac[(0, i)], jac[(1, i)], jac[(2, i)], jac[(3, i)]);
        v += j.get(i + 1) * col;
    }
    v
}

/// The operator with the `J_i` read off a model's `ω`; the nilpotent models
/// use the flat formula in their invariant frame.
pub fn fueter_operator_model(m: &LieAlgebraModel, u: &dyn AnalyticMap, x: &[f64]) -> Vector4<f64> {
    let j = JTriple::from_splitting(m.splitting()).expect("model triple");
    fueter_operator_with(&j, u, x)
}

/// `D(DF) + ΔF`.
pub fn d_squared_residual(f: &dyn AnalyticMap, x: &[f64]) -> Result<Vector4<f64>, PdeError> {
    let h = f.jet2(x).ok_or(PdeError::NoSecondJet)?;
    let j = JTriple::standard();
    let mut out = Vector4::zeros();
    for i in 0..3 {
        for k in 0..3 {
            let col = Vector4::from_fn(|a, _| h[a][(i, k)]);
            out += j.get(i + 1) * j.get(k + 1) * col;
        }
    }
    for a in 0..4 {
        out[a] += (0..3).map(|i| h[a][(i, i)]).sum::<f64>();
    }
    Ok(out)
}

/// Euclidean Laplacian of each component.
pub fn laplacian(f: &dyn AnalyticMap, x: &[f64]) -> Result<Vector4<f64>, PdeError> {
    let h = f.jet2(x).ok_or(PdeError::NoSecondJet)?;
    Ok(Vector4::from_fn(|a, _| (0..3).map(|i| h[a][(i, i)]).sum()))
}

/// `DF` for componentwise-harmonic `F`, checked at the given points.
pub fn harmonic_to_fueter<M: AnalyticMap>(f: M, check_points: &[[f64; 3]]) -> Result<FlatDApplied<M>, PdeError> {
    if f.dim_in() != 3 {
        return Err(PdeError::Dimension {
            expected: 3,
            got: f.dim_in(),
        });
    }
    let mut worst: f64 = 0.0;
    for x in check_points {
        worst = worst.max(laplacian(&f, x)?.amax());
    }
    if worst > 1e-9 {
        return Err(PdeError::NotHarmonic(worst));
    }
    Ok(FlatDApplied {
        inner: f,
        j: JTriple::standard(),
    })
}

/// Affine Fueter section with free columns `a2, a3`: `a1 = −J3 a2 + J2 a3`.
pub fn affine_fueter(a2: Vector4<f64>, a3: Vector4<f64>, b: Vector4<f64>) -> AffineMap {
    let j = JTriple::standard();
    let a1 = -(j.get(3) * a2) + j.get(2) * a3;
    AffineMap::from_columns([a1, a2, a3], b)
}

/// Unit-quaternion coordinates `(a, b, c, d)` of `a + bi + cj + dk`.
fn quat(x: &[f64]) -> Quaternion<f64> {
    Quaternion::new(x[0], x[1], x[2], x[3])
}

fn qvec(q: &Quaternion<f64>) -> Vector4<f64> {
    Vector4::new(q.w, q.i, q.j, q.k)
}

/// The quaternions representing `e_1, e_2, e_3`.
pub fn su2_basis() -> [Quaternion<f64>; 3] {
    [
        Quaternion::new(0.0, 0.0, 1.0, 0.0),
        Quaternion::new(0.0, 0.0, 0.0, 1.0),
        Quaternion::new(0.0, 1.0, 0.0, 0.0),
    ]
}

/// Complex 2×2 matrix of a quaternion, row-major as `(re, im)` pairs.
pub fn quaternion_matrix(q: &Quaternion<f64>) -> [[(f64, f64); 2]; 2] {
    [[(q.w, q.i), (q.j, q.k)], [(-q.j, q.k), (q.w, -q.i)]]
}

/// `e_i F(h)` for `i = 1..=3`, as columns of a `m × 3` matrix.
pub fn su2_derivatives(f: &dyn AnalyticMap, h: &[f64]) -> DMatrix<f64> {
    let jac = f.jet1(h);
    let hq = quat(h);
    let mut out = DMatrix::zeros(f.dim_out(), 3);
    for (i, x) in su2_basis().iter().enumerate() {
        let dir = qvec(&(hq * x));
        let col = &jac * DVector::from_column_slice(dir.as_slice());
        out.set_column(i, &col);
    }
    out
}

/// `e_i e_j F(h) = Hess(hX_i, hX_j) + ∇F · (h X_i X_j)`, indexed `[i][j]`.
pub fn su2_second_derivatives(f: &dyn AnalyticMap, h: &[f64]) -> Result<Vec<Vec<DVector<f64>>>, PdeError> {
    let jac = f.jet1(h);
    let hess = f.jet2(h).ok_or(PdeError::NoSecondJet)?;
    let hq = quat(h);
    let basis = su2_basis();
    let dirs: Vec<DVector<f64>> = basis
        .iter()
        .map(|x| DVector::from_column_slice(qvec(&(hq * x)).as_slice()))
        .collect();
    Ok((0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let second = DVector::from_column_slice(qvec(&(hq * basis[i] * basis[j])).as_slice());
                    let mut v = &jac * second;
                    for (a, h) in hess.iter().enumerate() {
                        v[a] += dirs[i].dot(&(h * &dirs[j]));
                    }
                    v
                })
                .collect()
        })
        .collect())
}

fn vec4(v: &DVector<f64>) -> Vector4<f64> {
    Vector4::new(v[0], v[1], v[2], v[3])
}

/// `D_{SU(2)} u(h) = Σ J_i (e_i u)(h)`.
pub fn su2_fueter_operator(u: &dyn AnalyticMap, h: &[f64]) -> Vector4<f64> {
    let j = JTriple::standard();
    let d = su2_derivatives(u, h);
    (0..3).map(|i| j.get(i + 1) * vec4(&d.column(i).into_owned())).sum()
}

/// `Δ_{SU(2)} F = Σ e_i² F`.
pub fn su2_laplacian(f: &dyn AnalyticMap, h: &[f64]) -> Result<Vector4<f64>, PdeError> {
    let s = su2_second_derivatives(f, h)?;
    Ok((0..3).map(|i| vec4(&s[i][i])).sum())
}

/// `D²F + ΔF + 2DF`, with `D²F = Σ_ij J_i J_j e_i e_j F`.
pub fn su2_identity_residual(f: &dyn AnalyticMap, h: &[f64]) -> Result<Vector4<f64>, PdeError> {
    let j = JTriple::standard();
    let s = su2_second_derivatives(f, h)?;
    let mut d2 = Vector4::zeros();
    for a in 0..3 {
        for b in 0..3 {
            d2 += j.get(a + 1) * j.get(b + 1) * vec4(&s[a][b]);
        }
    }
    Ok(d2 + su2_laplacian(f, h)? + su2_fueter_operator(f, h) * 2.0)
}

/// `u = (D_{SU(2)} + 2) F`, extended to `R^4` by the same formula with `h`
/// replaced by an arbitrary point, so that its jet along the sphere is exact.
pub struct Su2DPlus2<M: AnalyticMap> {
    pub inner: M,
}

impl<M: AnalyticMap> AnalyticMap for Su2DPlus2<M> {
    fn dim_in(&self) -> usize {
        4
    }
    fn dim_out(&self) -> usize {
        4
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        let u = su2_fueter_operator(&self.inner, x) + Vector4::from_column_slice(&self.inner.value(x)) * 2.0;
        u.as_slice().to_vec()
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        let j = JTriple::standard();
        let jac = self.inner.jet1(x);
        let hess = self.inner.jet2(x).expect("second jet required");
        let p = quat(x);
        let mut out = DMatrix::zeros(4, 4);
        for (i, xi) in su2_basis().iter().enumerate() {
            let dir = qvec(&(p * xi));
            for k in 0..4 {
                let mut ek = Vector4::zeros();
                ek[k] = 1.0;
                let ekx = qvec(&(quat(ek.as_slice()) * xi));
                // ∂_k [∇F(p) · (p X_i)] = Hess_k · (p X_i) + ∇F · (e_k X_i)
                let col = Vector4::from_fn(|a, _| {
                    let hrow: f64 = (0..4).map(|l| hess[a][(k, l)] * dir[l]).sum();
                    let g: f64 = (0..4).map(|l| jac[(a, l)] * ekx[l]).sum();
                    hrow + g
                });
                let img = j.get(i + 1) * col;
                for a in 0..4 {
                    out[(a, k)] += img[a];
                }
            }
        }
        out + jac * 2.0
    }
    fn jet2(&self, _x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        None
    }
}

/// Regular grid `{(i + ½)/n}` on the unit cube, row-major.
pub fn grid_points(n: usize) -> Vec<[f64; 3]> {
    let mut pts = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                pts.push([i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64]);
            }
        }
    }
    pts
}

/// Number of grid points of the `(c n)³` lattice mapped to the origin by
/// `x ↦ c x mod 1`: the covering degree `|c|³` of the induced torus map.
pub fn covering_degree(c: i64, n: usize) -> usize {
    let m = (c.unsigned_abs() as usize) * n;
    let per_axis = (0..m).filter(|&k| (c * k as i64).rem_euclid(m as i64) == 0).count();
    per_axis.pow(3)
}

/// One sample of an immersion: `P = ∂(base)/∂x` and `Q = ∂(fiber)/∂x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub x: [f64; 3],
    pub u: Vector4<f64>,
    pub p: Matrix3<f64>,
    pub q: Mat43,
}

impl GridPoint {
    /// `T = Q P⁻¹`, the graph coordinates of the tangent plane.
    pub fn graph(&self) -> Option<GraphPlane> {
        let pinv = self.p.try_inverse()?;
        Some(GraphPlane::new(Mat34::from((self.q * pinv).transpose())))
    }
}

/// Samples of an immersion of the unit torus on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionGrid {
    pub n: usize,
    pub points: Vec<GridPoint>,
    pub weight: f64,
}

fn to43(m: &DMatrix<f64>) -> Mat43 {
    Mat43::from_fn(|a, i| m[(a, i)])
}

impl ImmersionGrid {
    /// Graph section `x ↦ (x, u(x))`.
    pub fn section(u: &dyn AnalyticMap, n: usize) -> Self {
        let points = grid_points(n)
            .into_iter()
            .map(|x| GridPoint {
                x,
                u: Vector4::from_column_slice(&u.value(&x)),
                p: Matrix3::identity(),
                q: to43(&u.jet1(&x)),
            })
            .collect();
        ImmersionGrid {
            n,
            points,
            weight: 1.0 / (n * n * n) as f64,
        }
    }

    /// `x ↦ (f(x), u(f(x)))` for a diffeomorphism `f` of the torus.
    pub fn reparametrized(u: &dyn AnalyticMap, f: &dyn AnalyticMap, n: usize) -> Self {
        let points = grid_points(n)
            .into_iter()
            .map(|x| {
                let y = f.value(&x);
                let df = f.jet1(&x);
                let p = Matrix3::from_fn(|i, j| df[(i, j)]);
                GridPoint {
                    x,
                    u: Vector4::from_column_slice(&u.value(&y)),
                    p,
                    q: to43(&u.jet1(&y)) * p,
                }
            })
            .collect();
        ImmersionGrid {
            n,
            points,
            weight: 1.0 / (n * n * n) as f64,
        }
    }

    pub fn weights_total(&self) -> f64 {
        self.weight * self.points.len() as f64
    }

    /// CSV with columns `x1,x2,x3,u4..u7,q_ia (12),fueter,ve1`.
    pub fn to_csv(&self) -> String {
        let j = JTriple::standard();
        let mut out = String::from("x1,x2,x3,u4,u5,u6,u7");
        for i in 1..=3 {
            for a in 4..=7 {
                out.push_str(&format!(",d{i}u{a}"));
            }
        }
        out.push_str(",fueterResidual,ve1Density\n");
        for pt in &self.points {
            let mut row: Vec<String> = pt.x.iter().chain(pt.u.iter()).map(|v| v.to_string()).collect();
            for i in 0..3 {
                for a in 0..4 {
                    row.push(pt.q[(a, i)].to_string());
                }
            }
            let (res, ve1) = match pt.graph() {
                Some(g) => {
                    let f: Vector4<f64> = (1..=3).map(|i| j.get(i) * g.row(i)).sum();
                    (f.norm(), ve_series(&g, 1)[1] * pt.p.determinant().abs())
                }
                None => (f64::NAN, f64::NAN),
            };
            row.push(res.to_string());
            row.push(ve1.to_string());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EnergyReport {
    pub vol_h: f64,
    pub vol: f64,
    pub ve: f64,
    pub ve2: f64,
    pub ve3: f64,
    pub total_energy: f64,
    /// `½ ∫ |dι|²` with the norm of `g^H ⊗ g`.
    pub dirichlet_energy: f64,
    /// Max over grid points of `|½|dι|² − 3/2 − ve_1| · vol^H`.
    pub max_pointwise_identity_residual: f64,
    pub grid: usize,
}

pub fn immersion_energies(grid: &ImmersionGrid) -> Result<EnergyReport, PdeError> {
    let rows: Vec<Result<[f64; 8], PdeError>> = grid
        .points
        .par_iter()
        .enumerate()
        .map(|(index, pt)| {
            let det = pt.p.determinant();
            let g = pt.graph().filter(|_| det.abs() > 1e-12).ok_or(PdeError::NotProjectable { index, x: pt.x })?;
            let vh = det.abs();
            let ve = ve_series(&g, 3);
            let gh = pt.p.transpose() * pt.p;
            let full = gh + pt.q.transpose() * pt.q;
            let vol = full.determinant().max(0.0).sqrt();
            let ghinv = gh.try_inverse().ok_or(PdeError::NotProjectable { index, x: pt.x })?;
            let dnorm2 = (ghinv * full).trace();
            let ident = (0.5 * dnorm2 - 1.5 - ve[1]) * vh;
            Ok([vh, vol, ve[1] * vh, ve[2] * vh, ve[3] * vh, 0.5 * dnorm2 * vh, ident.abs(), 0.0])
        })
        .collect();
    let mut acc = [0.0; 8];
    let mut max_ident: f64 = 0.0;
    for r in rows {
        let r = r?;
        for k in 0..6 {
            acc[k] += r[k];
        }
        max_ident = max_ident.max(r[6]);
    }
    let w = grid.weight;
    Ok(EnergyReport {
        vol_h: acc[0] * w,
        vol: acc[1] * w,
        ve: acc[2] * w,
        ve2: acc[3] * w,
        ve3: acc[4] * w,
        total_energy: 1.5 * acc[0] * w + acc[2] * w,
        dirichlet_energy: acc[5] * w,
        max_pointwise_identity_residual: max_ident,
        grid: grid.n,
    })
}

/// Max of `|Du|` over the grid points of a section.
pub fn max_fueter_residual(u: &dyn AnalyticMap, n: usize) -> f64 {
    grid_points(n)
        .iter()
        .map(|x| fueter_operator_flat(u, x).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct MinimizationConfig {
    pub samples: usize,
    pub amplitude: f64,
    pub seed: u64,
    pub grid: usize,
    /// Largest wave number of the perturbation fields.
    pub kmax: i32,
    /// When set, perturbation `i` also subtracts `(i mod 5)/4` times this
    /// field, so the family contains directions that undo it.
    pub counter_field: Option<TrigField>,
}

impl Default for MinimizationConfig {
    fn default() -> Self {
        MinimizationConfig {
            samples: 200,
            amplitude: 0.1,
            seed: 0,
            grid: 8,
            kmax: 1,
            counter_field: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MinimizationReport {
    pub samples: usize,
    pub amplitude: f64,
    pub seed: u64,
    pub grid: usize,
    pub base_fueter_residual: f64,
    pub base_ve: f64,
    pub base_vol_h: f64,
    pub violations_ve: usize,
    pub violations_ve_plus_vol_h: usize,
    pub skipped: usize,
    pub min_gap_ve: f64,
    pub median_gap_ve: f64,
    pub min_gap_ve_plus_vol_h: f64,
    pub scope: String,
}

const MIN_SLACK: f64 = 1e-12;

/// Compares `VE` and `VE + Vol^H` of a Fueter section with those of seeded
/// periodic vertical perturbations of it. The perturbations are homotopic
/// to the base, so they stay in its restricted homology class.
pub fn minimization_experiment(base: &dyn AnalyticMap, cfg: &MinimizationConfig) -> Result<MinimizationReport, PdeError> {
    let res = max_fueter_residual(base, cfg.grid);
    if res >= 1e-10 {
        return Err(PdeError::NotFueter(res));
    }
    run_minimization(base, cfg, res)
}

/// Same comparison without requiring the base to be Fueter.
pub fn minimization_experiment_unchecked(
    base: &dyn AnalyticMap,
    cfg: &MinimizationConfig,
) -> Result<MinimizationReport, PdeError> {
    let res = max_fueter_residual(base, cfg.grid);
    run_minimization(base, cfg, res)
}

struct Shifted<'a> {
    base: &'a dyn AnalyticMap,
    w: TrigField,
}

impl AnalyticMap for Shifted<'_> {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        4
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        self.base.value(x).iter().zip(self.w.value(x)).map(|(a, b)| a + b).collect()
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        self.base.jet1(x) + self.w.jet1(x)
    }
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        Some(self.base.jet2(x)?.into_iter().zip(self.w.jet2(x)?).map(|(a, b)| a + b).collect())
    }
}

fn run_minimization(base: &dyn AnalyticMap, cfg: &MinimizationConfig, res: f64) -> Result<MinimizationReport, PdeError> {
    let e0 = immersion_energies(&ImmersionGrid::section(base, cfg.grid))?;
    let gaps: Vec<Option<(f64, f64)>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, i as u64);
            let mut w = TrigField::random(&mut r, cfg.kmax, cfg.amplitude, cfg.grid);
            if let Some(c) = &cfg.counter_field {
                let t = (i % 5) as f64 / 4.0;
                let mut modes = w.modes.clone();
                modes.extend(c.scaled(-t).modes);
                w = TrigField::new(3, 4, modes);
            }
            let shifted = Shifted { base, w };
            let e = immersion_energies(&ImmersionGrid::section(&shifted, cfg.grid)).ok()?;
            Some((e.ve - e0.ve, (e.ve + e.vol_h) - (e0.ve + e0.vol_h)))
        })
        .collect();
    let mut ve_gaps = Vec::new();
    let (mut v1, mut v2, mut skipped) = (0, 0, 0);
    let mut min2 = f64::INFINITY;
    for g in gaps {
        match g {
            None => skipped += 1,
            Some((a, b)) => {
                if a < -MIN_SLACK {
                    v1 += 1;
                }
                if b < -MIN_SLACK {
                    v2 += 1;
                }
                ve_gaps.push(a);
                min2 = min2.min(b);
            }
        }
    }
    let mut sorted = ve_gaps.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = if sorted.is_empty() { f64::NAN } else { sorted[sorted.len() / 2] };
    Ok(MinimizationReport {
        samples: cfg.samples,
        amplitude: cfg.amplitude,
        seed: cfg.seed,
        grid: cfg.grid,
        base_fueter_residual: res,
        base_ve: e0.ve,
        base_vol_h: e0.vol_h,
        violations_ve: v1,
        violations_ve_plus_vol_h: v2,
        skipped,
        min_gap_ve: sorted.first().copied().unwrap_or(f64::NAN),
        median_gap_ve: median,
        min_gap_ve_plus_vol_h: min2,
        scope: "finite family of smooth periodic vertical perturbations homotopic to the base; \
                the full restricted homology class is not sampled"
            .to_string(),
    })
}

/// Shear `x ↦ x + a sin(2π x_2) e_1` of the unit torus.
pub struct Shear {
    pub a: f64,
}

impl AnalyticMap for Shear {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        3
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0] + self.a * (2.0 * PI * x[1]).sin(), x[1], x[2]]
    }
    fn jet1(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = self.a * 2.0 * PI * (2.0 * PI * x[1]).cos();
        m
    }
    fn jet2(&self, x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let mut h0 = DMatrix::zeros(3, 3);
        h0[(1, 1)] = -self.a * 4.0 * PI * PI * (2.0 * PI * x[1]).sin();
        Some(vec![h0, DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReparamReport {
    pub grid: usize,
    pub ve: f64,
    pub ve_reparametrized: f64,
    pub residual: f64,
}

/// `|VE(ι∘f) − VE(ι)|` on an `n³` grid.
pub fn reparametrization_invariance(u: &dyn AnalyticMap, f: &dyn AnalyticMap, n: usize) -> Result<ReparamReport, PdeError> {
    let a = immersion_energies(&ImmersionGrid::section(u, n))?;
    let b = immersion_energies(&ImmersionGrid::reparametrized(u, f, n))?;
    Ok(ReparamReport {
        grid: n,
        ve: a.ve,
        ve_reparametrized: b.ve,
        residual: (a.ve - b.ve).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CsVariation {
    /// Five-point derivative of the Chern–Simons type functional.
    pub numeric: f64,
    /// `∫ Θ(Z, ∂_1 ι, ∂_2 ι, ∂_3 ι) dx` at the endpoint.
    pub boundary: f64,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, three points.
const GL3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

fn theta_on(theta: &Form, vs: [&[f64]; 4]) -> f64 {
    exterior::evaluate(theta, &vs).unwrap()
}

/// First variation of `CS[I] = ∫_{[0,1]×T³} I*Θ` along the path
/// `u_t = end + (1 − t) w` when the endpoint moves by `s Z`. The integrand
/// is polynomial of degree `<= 4` in `t` and `s`, so three Gauss nodes in
/// `t` and the five-point stencil in `s` are exact; the torus integral uses
/// the trapezoidal rule.
pub fn cs_first_variation(
    model: &LieAlgebraModel,
    end: &dyn AnalyticMap,
    w: &dyn AnalyticMap,
    z: &dyn AnalyticMap,
    n: usize,
) -> Result<CsVariation, PdeError> {
    let d_theta = model.d(model.splitting().theta()).max_abs();
    if d_theta != 0.0 {
        return Err(PdeError::ThetaNotClosed(d_theta));
    }
    let theta = model.splitting().theta().clone();
    let pts = grid_points(n);
    let weight = 1.0 / pts.len() as f64;
    let h = 1e-2;
    let cs = |s: f64| -> f64 {
        pts.par_iter()
            .map(|x| {
                let je = end.jet1(x);
                let jw = w.jet1(x);
                let jz = z.jet1(x);
                let wv = w.value(x);
                let zv = z.value(x);
                let mut acc = 0.0;
                for &(t, wt) in &GL3 {
                    let mut dt = [0.0; 7];
                    for a in 0..4 {
                        dt[3 + a] = -wv[a] + s * zv[a];
                    }
                    let cols: Vec<[f64; 7]> = (0..3)
                        .map(|i| {
                            let mut v = [0.0; 7];
                            v[i] = 1.0;
                            for a in 0..4 {
                                v[3 + a] = je[(a, i)] + (1.0 - t) * jw[(a, i)] + s * t * jz[(a, i)];
                            }
                            v
                        })
                        .collect();
                    acc += wt * theta_on(&theta, [&dt, &cols[0], &cols[1], &cols[2]]);
                }
                acc * weight
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    };
    let numeric = (cs(-2.0 * h) - 8.0 * cs(-h) + 8.0 * cs(h) - cs(2.0 * h)) / (12.0 * h);
    let boundary: f64 = pts
        .iter()
        .map(|x| {
            let je = end.jet1(x);
            let zv = z.value(x);
            let mut zz = [0.0; 7];
            for a in 0..4 {
                zz[3 + a] = zv[a];
            }
            let cols: Vec<[f64; 7]> = (0..3)
                .map(|i| {
                    let mut v = [0.0; 7];
                    v[i] = 1.0;
                    for a in 0..4 {
                        v[3 + a] = je[(a, i)];
                    }
                    v
                })
                .collect();
            theta_on(&theta, [&zz, &cols[0], &cols[1], &cols[2]]) * weight
        })
        .sum();
    Ok(CsVariation { numeric, boundary })
}

/// Constant map `R^n -> R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantMap {
    pub vars: usize,
    pub value: DVector<f64>,
}

impl AnalyticMap for ConstantMap {
    fn dim_in(&self) -> usize {
        self.vars
    }
    fn dim_out(&self) -> usize {
        self.value.len()
    }
    fn value(&self, _x: &[f64]) -> Vec<f64> {
        self.value.as_slice().to_vec()
    }
    fn jet1(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(self.value.len(), self.vars)
    }
    fn jet2(&self, _x: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        Some(vec![DMatrix::zeros(self.vars, self.vars); self.value.len()])
    }
    fn periodicity(&self) -> Option<DMatrix<f64>> {
        Some(DMatrix::zeros(self.value.len(), self.vars))
    }
}

/// Random unit quaternion.
pub fn random_unit_quaternion(r: &mut rand_chacha::ChaCha8Rng) -> Vector4<f64> {
    loop {
        let v = Vector4::from_vec(rng::normals(r, 4));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// `J_i J_j` products used in the SU(2) identity, exposed for reports.
pub fn j_products() -> [[Matrix4<f64>; 3]; 3] {
    let j = JTriple::standard();
    std::array::from_fn(|a| std::array::from_fn(|b| j.get(a + 1) * j.get(b + 1)))
}
