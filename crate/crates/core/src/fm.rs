//! Real Fourier–Mukai transform of graph sections over a box `B ⊂ R^3`.
//!
//! A lift `u: B -> R^4` of a section of `B × T^4` becomes the connection
//! `d + √−1 Σ u^a dy^a` on the dual fibration. Everything is kept real: the
//! stored curvature is `K = Σ ∂_i u^a dx^i ∧ dy^a` with `F = √−1 K`, and all
//! residuals are norms, on which the factor `√−1` has no effect.

use nalgebra::{DMatrix, Vector4};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

use crate::exterior::{wedge, Form};
use crate::g2::G2Structure;
use crate::pde::{fueter_operator_flat, AnalyticMap};
use crate::splitting::{GraphPlane, Mat34, Splitting};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FmError {
    #[error("radius must be positive, got {0}")]
    Radius(f64),
    #[error("sweep needs at least two radii")]
    ShortSweep,
}

/// `d + √−1 Σ u^a dy^a` in the gauge without `dx` components.
pub struct LineConnection<M: AnalyticMap> {
    pub b: M,
}

impl<M: AnalyticMap> LineConnection<M> {
    /// Real part of the connection 1-form: `Σ u^a dy^a`.
    pub fn connection_form(&self, x: &[f64]) -> Form {
        let u = self.b.value(x);
        let mut coeffs = [0.0; 7];
        coeffs[3..].copy_from_slice(&u);
        Form::one_form(&coeffs)
    }
}

pub fn fm_transform<M: AnalyticMap>(u: M) -> LineConnection<M> {
    assert!(u.dim_in() == 3 && u.dim_out() == 4, "lift must map R^3 to R^4");
    LineConnection { b: u }
}

/// Curvature from a 4×3 Jacobian `∂_i u^a`.
pub fn curvature_from_jacobian(jac: &DMatrix<f64>) -> Form {
    let mut k = Form::zero(7, 2);
    for i in 0..3 {
        for a in 0..4 {
            let v = jac[(a, i)];
            if v != 0.0 {
                k += &Form::monomial(7, &[i + 1, a + 4], v);
            }
        }
    }
    k
}

pub fn curvature<M: AnalyticMap>(c: &LineConnection<M>, x: &[f64]) -> Form {
    curvature_from_jacobian(&c.b.jet1(x))
}

/// `2π Ψ*K` where `Ψ*(dy^a) = dz^a / 2π`: the fiber-period conversion
/// between the torus of period 1 in `y` and period `2π` in `z`. Both
/// factors live here and nowhere else.
pub fn fiber_period_pullback(k: &Form) -> Form {
    let two_pi = 2.0 * PI;
    let mut out = Form::zero(k.dim(), k.degree());
    for (idx, v) in k.terms() {
        let vertical = idx.iter().filter(|&&i| i >= 4).count() as i32;
        out += &Form::monomial(k.dim(), &idx, two_pi * v / two_pi.powi(vertical));
    }
    out
}

/// Max-abs coefficient of `β_ι − 2π Ψ*K` at `x`, with `β_ι` taken from the
/// graph plane of the section.
pub fn beta_relation_residual(u: &dyn AnalyticMap, x: &[f64]) -> f64 {
    let jac = u.jet1(x);
    let g = GraphPlane::new(Mat34::from_fn(|i, a| jac[(a, i)]));
    let beta = Splitting::standard().beta_of(&g);
    (&beta - &fiber_period_pullback(&curvature_from_jacobian(&jac))).max_abs()
}

/// `K ∧ ∗φ`, a 6-form.
pub fn instanton_form(k: &Form) -> Form {
    wedge(k, G2Structure::standard().star_phi()).unwrap()
}

pub fn instanton_residual<M: AnalyticMap>(c: &LineConnection<M>, x: &[f64]) -> f64 {
    instanton_form(&curvature(c, x)).norm()
}

/// `r^4 K∧∗φ − K^3/6`: the real form behind `√−1 (r^4 K∧∗φ − K^3/6)`,
/// using `F^3 = −√−1 K^3`. Degree 6.
pub fn ddt_form(k: &Form, r: f64) -> Result<Form, FmError> {
    if !(r > 0.0) {
        return Err(FmError::Radius(r));
    }
    let k3 = wedge(&wedge(k, k).unwrap(), k).unwrap();
    Ok(r.powi(4) * instanton_form(k) - (1.0 / 6.0) * k3)
}

pub fn ddt_residual<M: AnalyticMap>(c: &LineConnection<M>, x: &[f64], r: f64) -> Result<f64, FmError> {
    Ok(ddt_form(&curvature(c, x), r)?.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    pub r: f64,
    pub raw_residual: f64,
    pub normalized_residual: f64,
    /// `|ddt/r^4 − K∧∗φ|`, the distance to the instanton limit.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RadiusSweep {
    pub instanton_residual: f64,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `log gap` against `log r`.
    pub slope: f64,
}

impl RadiusSweep {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,rawResidual,normalizedResidual,gap\n");
        for row in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", row.r, row.raw_residual, row.normalized_residual, row.gap));
        }
        s
    }
}

/// Log-spaced radii `r_min .. r_max`, `count` of them.
pub fn log_radii(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    let (a, b) = (r_min.ln(), r_max.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp())
        .collect()
}

pub fn radius_sweep<M: AnalyticMap>(c: &LineConnection<M>, x: &[f64], radii: &[f64]) -> Result<RadiusSweep, FmError> {
    if radii.len() < 2 {
        return Err(FmError::ShortSweep);
    }
    let k = curvature(c, x);
    let inst = instanton_form(&k);
    let rows = radii
        .par_iter()
        .map(|&r| {
            let f = ddt_form(&k, r)?;
            let scale = r.powi(4);
            let normalized = (1.0 / scale) * f.clone();
            Ok(SweepRow {
                r,
                raw_residual: f.norm(),
                normalized_residual: normalized.norm(),
                gap: (&normalized - &inst).norm(),
            })
        })
        .collect::<Result<Vec<_>, FmError>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.gap > 0.0)
        .map(|row| (row.r.ln(), row.gap.ln()))
        .collect();
    Ok(RadiusSweep {
        instanton_residual: inst.norm(),
        slope: fit_slope(&pts),
        rows,
    })
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `|K∧∗φ| / |Du|` for the transform of any lift, measured once and pinned.
pub const MIRROR_RATIO: f64 = 1.0;

/// `(|K∧∗φ|, |Du|)` at one point.
pub fn mirror_pair(u: &dyn AnalyticMap, x: &[f64]) -> (f64, f64) {
    let k = curvature_from_jacobian(&u.jet1(x));
    (instanton_form(&k).norm(), fueter_operator_flat(u, x).norm())
}

/// Basis of the mixed 2-forms `dx^i ∧ dy^a`.
pub fn mixed_basis() -> Vec<Form> {
    let mut out = Vec::with_capacity(12);
    for i in 1..=3 {
        for a in 4..=7 {
            out.push(Form::monomial(7, &[i, a], 1.0));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelComparison {
    /// Max over the mixed basis of `|K ∧ μ|`.
    pub mu_wedge_max: f64,
    pub rank_star_phi: usize,
    pub rank_theta: usize,
    pub rank_stacked: usize,
}

impl KernelComparison {
    /// Equal ranks of the two maps and of their stack mean equal kernels.
    pub fn kernels_agree(&self) -> bool {
        self.mu_wedge_max == 0.0 && self.rank_star_phi == self.rank_theta && self.rank_theta == self.rank_stacked
    }
}

/// Compares the kernels of `K ↦ K∧∗φ` and `K ↦ K∧Θ` on mixed 2-forms.
pub fn kernel_comparison(s: &Splitting) -> KernelComparison {
    let basis = mixed_basis();
    let mu_wedge_max = basis
        .iter()
        .map(|k| wedge(k, s.mu()).unwrap().max_abs())
        .fold(0.0, f64::max);
    let image = |form: &Form| -> DMatrix<f64> {
        let cols: Vec<Vec<f64>> = basis.iter().map(|k| wedge(k, form).unwrap().dense()).collect();
        DMatrix::from_fn(cols[0].len(), cols.len(), |r, c| cols[c][r])
    };
    let a = image(s.star_phi());
    let b = image(s.theta());
    let mut stacked = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    stacked.rows_mut(0, a.nrows()).copy_from(&a);
    stacked.rows_mut(a.nrows(), b.nrows()).copy_from(&b);
    KernelComparison {
        mu_wedge_max,
        rank_star_phi: a.rank(1e-10),
        rank_theta: b.rank(1e-10),
        rank_stacked: stacked.rank(1e-10),
    }
}

/// Another lift of the same torus point: `u + 2π m`.
pub fn shifted_by_period(u: &Vector4<f64>, m: [i64; 4]) -> Vector4<f64> {
    u + Vector4::from_fn(|a, _| 2.0 * PI * m[a] as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{affine_fueter, AffineMap, ConstantMap, PolynomialMap};
    use crate::rng;
    use nalgebra::DVector;

    fn x1_to_u4() -> AffineMap {
        AffineMap::from_columns(
            [Vector4::new(1.0, 0.0, 0.0, 0.0), Vector4::zeros(), Vector4::zeros()],
            Vector4::zeros(),
        )
    }

    #[test]
    fn curvature_examples() {
        let c = fm_transform(ConstantMap {
            vars: 3,
            value: DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]),
        });
        let x = [0.3, 0.1, 0.2];
        assert!(curvature(&c, &x).is_zero());
        assert_eq!(instanton_residual(&c, &x), 0.0);
        assert_eq!(ddt_residual(&c, &x, 3.0).unwrap(), 0.0);
        let c = fm_transform(x1_to_u4());
        assert_eq!(curvature(&c, &x), Form::monomial(7, &[1, 4], 1.0));
        assert_eq!(c.connection_form(&[0.5, 0.0, 0.0]), Form::monomial(7, &[4], 0.5));
        let inst = instanton_form(&curvature(&c, &x));
        assert!(!inst.is_zero());
        // ∗φ ⊃ dx^{23} ∧ (dy^{45} + dy^{67}); the product carries dx^{123} dy^{4..}
        assert!(inst.coeff(&[1, 2, 3, 4, 6, 7]) != 0.0);
        assert!(matches!(ddt_residual(&c, &x, 0.0), Err(FmError::Radius(_))));
    }

    #[test]
    fn curvature_is_mixed_and_gauge_invariant() {
        let mut r = rng::stream(9, 0);
        let u = PolynomialMap::random(3, 4, 3, &mut r);
        let x = [0.2, -0.4, 0.6];
        let k = curvature(&fm_transform(u.clone()), &x);
        for (idx, _) in k.terms() {
            assert!(idx[0] <= 3 && idx[1] >= 4);
        }
        let shift = ConstantMap {
            vars: 3,
            value: DVector::from_column_slice(shifted_by_period(&Vector4::zeros(), [1, 0, -2, 3]).as_slice()),
        };
        let lifted = crate::pde::SumMap(vec![Box::new(u), Box::new(shift)]);
        assert_eq!(curvature(&fm_transform(lifted), &x), k);
    }

    #[test]
    fn beta_relation() {
        let u = x1_to_u4();
        assert_eq!(beta_relation_residual(&u, &[0.0; 3]), 0.0);
        assert_eq!(fiber_period_pullback(&Form::monomial(7, &[1, 4], 1.0)), Form::monomial(7, &[1, 4], 1.0));
        for s in 0..100 {
            let mut r = rng::stream(10, s);
            let u = PolynomialMap::random(3, 4, 3, &mut r);
            let x = rng::normals(&mut r, 3);
            assert!(beta_relation_residual(&u, &x) < 1e-12);
        }
    }

    #[test]
    fn mirror_ratio_is_one() {
        let mut ratios = Vec::new();
        for s in 0..200 {
            let mut r = rng::stream(11, s);
            let u = PolynomialMap::random(3, 4, 2, &mut r);
            let x = rng::normals(&mut r, 3);
            let (a, b) = mirror_pair(&u, &x);
            ratios.push(a / b);
        }
        for q in &ratios {
            assert!((q - MIRROR_RATIO).abs() < 1e-8, "{q}");
        }
        let f = affine_fueter(Vector4::new(1.0, 2.0, 0.0, -1.0), Vector4::new(0.0, 1.0, 3.0, 0.0), Vector4::zeros());
        let (a, b) = mirror_pair(&f, &[0.1, 0.2, 0.3]);
        assert!(a < 1e-12 && b < 1e-12);
    }

    #[test]
    fn large_radius_limit() {
        let f = affine_fueter(Vector4::new(1.0, 2.0, 0.0, -1.0), Vector4::new(0.0, 1.0, 3.0, 0.0), Vector4::zeros());
        let c = fm_transform(f);
        let x = [0.0; 3];
        let k = curvature(&c, &x);
        let k3 = wedge(&wedge(&k, &k).unwrap(), &k).unwrap();
        assert!(!k3.is_zero());
        let sweep = radius_sweep(&c, &x, &log_radii(1.0, 1e3, 31)).unwrap();
        assert!((sweep.slope + 4.0).abs() < 0.1, "{}", sweep.slope);
        for row in &sweep.rows {
            let expected = k3.norm() / (6.0 * row.r.powi(4));
            assert!((row.normalized_residual - expected).abs() <= 1e-12 * expected.max(1.0));
        }
        assert!(sweep.to_csv().starts_with("r,rawResidual,normalizedResidual"));
        let generic = fm_transform(x1_to_u4());
        let s2 = radius_sweep(&generic, &x, &log_radii(1.0, 1e3, 7)).unwrap();
        assert!(s2.rows.iter().all(|r| r.gap < 1e-14));
    }

    #[test]
    fn star_phi_and_theta_kernels_agree() {
        let cmp = kernel_comparison(&Splitting::standard());
        assert!(cmp.kernels_agree(), "{cmp:?}");
        assert_eq!(cmp.rank_star_phi, 4);
    }
}
