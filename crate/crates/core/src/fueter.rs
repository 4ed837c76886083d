//! The Fueter condition on horizontally projectable 3-planes.
//!
//! The Fueter vector `Σ e_i × T(e_i)` is computed both from the cross
//! product and from the three complex structures `J_i` on `V`; the six
//! equivalent vanishing conditions are reported side by side so that they
//! can be checked against each other.

use nalgebra::{DMatrix, Matrix4, SMatrix, Vector4};
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{self, Form};
use crate::rng;
use crate::g2::{unit, G2Structure, Vec7};
use crate::splitting::{ve_series, GraphPlane, Mat34, Splitting};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FueterError {
    #[error("horizontal parts are not orthonormal (residual {0:e})")]
    HorizontalNotOrthonormal(f64),
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("plane is not Fueter (|F| = {0:e})")]
    NotFueter(f64),
    #[error("complex structures violate the quaternion relations (residual {0:e})")]
    BadTriple(f64),
    #[error("polar spaces are only computed for s <= 2, got s = {0}")]
    UnsupportedDimension(usize),
    #[error("subspace is not horizontally projectable")]
    NotProjectable,
}

/// Three complex structures on `V`, as matrices acting on `(η4, …, η7)`
/// coordinates (column `a` holds the image of `η_a`).
#[derive(Debug, Clone, PartialEq)]
pub struct JTriple {
    j: [Matrix4<f64>; 3],
}

impl JTriple {
    pub fn new(j: [Matrix4<f64>; 3]) -> Result<Self, FueterError> {
        let id = Matrix4::identity();
        let mut res: f64 = 0.0;
        for a in 0..3 {
            res = res.max((j[a] * j[a] + id).abs().max());
            for b in 0..3 {
                if a != b {
                    res = res.max((j[a] * j[b] + j[b] * j[a]).abs().max());
                }
            }
        }
        res = res.max((j[0] * j[1] + j[2]).abs().max());
        if res > 1e-12 {
            return Err(FueterError::BadTriple(res));
        }
        Ok(JTriple { j })
    }

    /// The matrices for the standard splitting of the model form.
    pub fn standard() -> Self {
        #[rustfmt::skip]
        let j1 = Matrix4::new(
            0.0, -1.0, 0.0, 0.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, -1.0,
            0.0, 0.0, 1.0, 0.0,
        );
        #[rustfmt::skip]
        let j2 = Matrix4::new(
            0.0, 0.0, -1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        );
        #[rustfmt::skip]
        let j3 = Matrix4::new(
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
        );
        JTriple::new([j1, j2, j3]).expect("standard triple")
    }

    /// `(J_i)_{ba} = ω(e_i, η_a, η_b)`.
    pub fn from_splitting(s: &Splitting) -> Result<Self, FueterError> {
        let omega = s.omega();
        let j = std::array::from_fn(|i| {
            Matrix4::from_fn(|b, a| {
                exterior::evaluate(
                    omega,
                    &[unit(i + 1).as_slice(), unit(a + 4).as_slice(), unit(b + 4).as_slice()],
                )
                .unwrap()
            })
        });
        JTriple::new(j)
    }

    pub fn get(&self, i: usize) -> &Matrix4<f64> {
        &self.j[i - 1]
    }
}

fn vertical_of(v: &Vec7) -> Vector4<f64> {
    Vector4::new(v[3], v[4], v[5], v[6])
}

/// `Σ_i e_i × p_V(v_i)`, from the cross product of the frame G2 structure.
pub fn fueter_vector(s: &Splitting, g: &GraphPlane) -> Vector4<f64> {
    let g2 = s.frame_g2();
    let mut out = Vec7::zeros();
    for i in 1..=3 {
        out += g2.cross(&unit(i), &g.vertical(i));
    }
    vertical_of(&out)
}

/// `Σ_i J_i p_V(v_i)`.
pub fn fueter_via_j(g: &GraphPlane, j: &JTriple) -> Vector4<f64> {
    (1..=3).map(|i| j.get(i) * g.row(i)).sum()
}

/// Output of [`fueter_complete`].
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub v3: Vec7,
    /// 2-norm condition number of the linear system for the vertical part.
    pub condition: f64,
}

/// Given `v1, v2` with orthonormal horizontal parts, the unique `v3` with
/// `p_H(v3) = p_H(v1) × p_H(v2)` making the span Fueter. Vectors are in
/// splitting-frame coordinates.
pub fn fueter_complete(s: &Splitting, v1: &Vec7, v2: &Vec7) -> Result<Completion, FueterError> {
    let h = |v: &Vec7| Vec7::from_fn(|i, _| if i < 3 { v[i] } else { 0.0 });
    let p = |v: &Vec7| Vec7::from_fn(|i, _| if i >= 3 { v[i] } else { 0.0 });
    let (h1, h2) = (h(v1), h(v2));
    let res = (h1.dot(&h1) - 1.0)
        .abs()
        .max((h2.dot(&h2) - 1.0).abs())
        .max(h1.dot(&h2).abs());
    if res > 1e-10 {
        return Err(FueterError::HorizontalNotOrthonormal(res));
    }
    let g2 = s.frame_g2();
    let h3 = g2.cross(&h1, &h2);
    let r = g2.cross(&h1, &p(v1)) + g2.cross(&h2, &p(v2));
    // solve p_V(h3 × w) = −p_V(r) for w ∈ V
    let m = Matrix4::from_fn(|b, a| g2.cross(&h3, &unit(a + 4))[b + 3]);
    let rhs = -vertical_of(&r);
    let w = m.lu().solve(&rhs).ok_or(FueterError::Dependent)?;
    let sv = m.singular_values();
    let condition = sv.max() / sv.min();
    let mut v3 = h3;
    for a in 0..4 {
        v3[a + 3] = w[a];
    }
    Ok(Completion { v3, condition })
}

/// `v1 × v2`, which spans an associative plane with `v1, v2`.
pub fn associative_complete(g2: &G2Structure, v1: &Vec7, v2: &Vec7) -> Result<Vec7, FueterError> {
    if g2.gram_det(&[*v1, *v2]) <= 1e-20 * (g2.dot(v1, v1) * g2.dot(v2, v2)).max(1e-300) {
        return Err(FueterError::Dependent);
    }
    Ok(g2.cross(v1, v2))
}

/// The six residuals whose simultaneous vanishing characterises Fueter
/// planes, each computed along its own route.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionReport {
    /// `ve_1 · vol^H(v) − ω(v)`.
    pub anisotropic_gap: f64,
    pub fueter_norm: f64,
    pub chi1_norm: f64,
    /// `max_a |Θ(v1, v2, v3, e_a)|`.
    pub theta_contraction_norm: f64,
    pub beta_wedge_star_phi_norm: f64,
    pub beta_wedge_theta_norm: f64,
    pub t: [[f64; 4]; 3],
}

impl ConditionReport {
    pub fn residuals(&self) -> [f64; 6] {
        [
            self.anisotropic_gap,
            self.fueter_norm,
            self.chi1_norm,
            self.theta_contraction_norm,
            self.beta_wedge_star_phi_norm,
            self.beta_wedge_theta_norm,
        ]
    }

    pub fn max(&self) -> f64 {
        self.residuals().iter().cloned().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.residuals().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub fn condition_residuals(s: &Splitting, g: &GraphPlane) -> ConditionReport {
    let ve1 = 0.5 * g.t().norm_squared();
    let gap = ve1 - s.omega_on(g);
    let fueter = fueter_vector(s, g).norm();
    let chi1 = s.chi_parts_on(g)[1].norm();
    let f = g.frame();
    let mut c = s.theta().clone();
    for v in &f {
        c = exterior::interior(v.as_slice(), &c).unwrap();
    }
    let beta = s.beta_of(g);
    let b_star = exterior::wedge(&beta, s.star_phi()).unwrap().norm();
    let b_theta = exterior::wedge(&beta, s.theta()).unwrap().norm();
    ConditionReport {
        anisotropic_gap: gap.abs(),
        fueter_norm: fueter,
        chi1_norm: chi1,
        theta_contraction_norm: c.max_abs(),
        beta_wedge_star_phi_norm: b_star,
        beta_wedge_theta_norm: b_theta,
        t: g.rows(),
    }
}

/// `𝒫(β) = ∗(β ∧ ∗φ)`, a 1-form depending linearly on `β`.
pub fn p_operator(s: &Splitting, beta: &Form) -> Form {
    exterior::hodge(&exterior::wedge(beta, s.star_phi()).unwrap())
}

/// `(χ_1♭, χ_2♭, χ_3♭)` computed from `β` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiViaBeta {
    /// `∗(β ∧ ∗φ)`.
    pub chi1: Form,
    /// `√3 (λ²)⁻¹ π²_7(β)`.
    pub chi1_projection: Form,
    /// `−2 (λ⁴)⁻¹ π⁴_7(β²/2)`.
    pub chi2: Form,
    /// `−∗(β³/6)`.
    pub chi3: Form,
}

pub fn chi_via_beta(s: &Splitting, g: &GraphPlane) -> ChiViaBeta {
    let g2 = s.frame_g2();
    let beta = s.beta_of(g);
    let beta2 = exterior::wedge(&beta, &beta).unwrap();
    let beta3 = exterior::wedge(&beta2, &beta).unwrap();
    ChiViaBeta {
        chi1: p_operator(s, &beta),
        chi1_projection: g2.lambda_adjoint(&beta, 2).unwrap().scale(3f64.sqrt()),
        chi2: g2.lambda_adjoint(&beta2.scale(0.5), 4).unwrap().scale(-2.0),
        chi3: -exterior::hodge(&beta3.scale(1.0 / 6.0)),
    }
}

/// The same three vectors read off the decomposition of `χ`.
pub fn chi_direct(s: &Splitting, g: &GraphPlane) -> [Form; 3] {
    let parts = s.chi_parts_on(g);
    std::array::from_fn(|i| Form::one_form(parts[i + 1].as_slice()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VanishingProfile {
    /// Largest `k` with `|χ_i(v)| < tol` for all `i <= k`.
    pub depth: usize,
    pub chi_norms: [f64; 3],
    /// `α_{2ℓ}(v) − ve_ℓ` for `ℓ = 1..=depth`.
    pub alpha_residuals: Vec<f64>,
    /// `α_{2k+2} + ½|χ_{k+1}|² − ve_{k+1}` for `k = 1..=depth`, capped at 2.
    pub ladder_residuals: Vec<f64>,
    pub one_iff_two: bool,
}

pub fn k_vanishing_profile(s: &Splitting, g: &GraphPlane, tol: f64) -> VanishingProfile {
    let chi = s.chi_parts_on(g);
    let norms = [chi[1].norm(), chi[2].norm(), chi[3].norm()];
    let depth = norms.iter().take_while(|&&n| n < tol).count();
    let alpha = s.alpha_parts_on(g);
    let ve = ve_series(g, 3);
    let a = |i: usize| if i < 4 { alpha[i] } else { 0.0 };
    let alpha_residuals = (1..=depth).map(|l| a(2 * l) - ve[l]).collect();
    let ladder_residuals = (1..=depth.min(2)).map(|k| s.vanishing_identity(g, k)).collect();
    VanishingProfile {
        depth,
        chi_norms: norms,
        alpha_residuals,
        ladder_residuals,
        one_iff_two: (norms[0] < tol) == (norms[0] < tol && norms[1] < tol),
    }
}

/// Matrix of the linear map `T ↦ F(T)` on the 12 entries of `T`
/// (column `4i + a` corresponds to `v_{i+1, a+4}`).
pub fn fueter_matrix(s: &Splitting) -> SMatrix<f64, 4, 12> {
    let mut m = SMatrix::<f64, 4, 12>::zeros();
    for i in 0..3 {
        for a in 0..4 {
            let mut t = Mat34::zeros();
            t[(i, a)] = 1.0;
            let f = fueter_vector(s, &GraphPlane::new(t));
            m.set_column(4 * i + a, &f);
        }
    }
    m
}

/// Rank of the linearised Fueter condition at a Fueter plane. Since the
/// condition is linear in `T`, this is the rank of [`fueter_matrix`].
pub fn linearization_rank(s: &Splitting, g: &GraphPlane) -> Result<usize, FueterError> {
    let n = fueter_vector(s, g).norm();
    if n >= 1e-10 {
        return Err(FueterError::NotFueter(n));
    }
    Ok(fueter_matrix(s).rank(1e-10))
}

/// Norm of `χ(v1, v2, v3)` and the sign of `φ(v1, v2, v3)` for a graph
/// plane. Associativity is orientation-free in this test; the sign tells
/// which orientation is calibrated.
pub fn associativity(s: &Splitting, g: &GraphPlane) -> (f64, f64) {
    let f = g.frame();
    let c = s.frame_g2().chi(&f[0], &f[1], &f[2]);
    let p = exterior::evaluate(s.phi(), &[f[0].as_slice(), f[1].as_slice(), f[2].as_slice()]).unwrap();
    (c.norm(), p.signum())
}

/// Exterior differential systems whose polar spaces are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdsSystem {
    /// Generated by the components of `χ`.
    Associative,
    /// Generated by the components of `χ_1`.
    Fueter,
}

/// Dimension of `{X : ω(w_1, …, w_s, X) = 0 for all generators ω}` for an
/// integral element spanned by `w` (frame coordinates). The generators are
/// 3-forms, so for `s <= 1` there is no condition.
pub fn polar_space_dim(s: &Splitting, w: &[Vec7], system: EdsSystem) -> Result<usize, FueterError> {
    let k = w.len();
    if k > 2 {
        return Err(FueterError::UnsupportedDimension(k));
    }
    if k > 0 {
        let gram = DMatrix::from_fn(k, k, |i, j| w[i].dot(&w[j]));
        if gram.determinant().abs() < 1e-20 {
            return Err(FueterError::Dependent);
        }
    }
    if system == EdsSystem::Fueter && k > 0 {
        let hp = DMatrix::from_fn(3, k, |i, j| w[j][i]);
        let smin = hp.singular_values().min();
        if smin < 1e-10 {
            return Err(FueterError::NotProjectable);
        }
    }
    if k < 2 {
        return Ok(7);
    }
    let comps: Vec<Form> = match system {
        EdsSystem::Associative => s.chi().components().to_vec(),
        EdsSystem::Fueter => s.chi_parts()[1].components()[3..].to_vec(),
    };
    let rows: Vec<Vec<f64>> = comps
        .iter()
        .map(|c| {
            let one = exterior::interior(w[1].as_slice(), &exterior::interior(w[0].as_slice(), c).unwrap())
                .unwrap();
            (1..=7).map(|x| one.coeff(&[x])).collect()
        })
        .collect();
    let m = DMatrix::from_fn(rows.len(), 7, |i, j| rows[i][j]);
    Ok(7 - m.rank(1e-10))
}

/// Seeded Fueter plane: `e_1 + s·ξ_1`, `e_2 + s·ξ_2` with Gaussian vertical
/// `ξ_i`, completed by [`fueter_complete`].
pub fn random_fueter_plane(s: &Splitting, seed: u64, index: usize, scale: f64) -> GraphPlane {
    let mut r = rng::stream(seed, index as u64);
    let v = rng::normals(&mut r, 8);
    let mut v1 = unit(1);
    let mut v2 = unit(2);
    for a in 0..4 {
        v1[a + 3] = scale * v[a];
        v2[a + 3] = scale * v[a + 4];
    }
    let v3 = fueter_complete(s, &v1, &v2).expect("horizontal parts are orthonormal").v3;
    let frame = [v1, v2, v3];
    GraphPlane::new(Mat34::from_fn(|i, a| frame[i][a + 3]))
}

/// Seeded generic graph plane with standard normal entries.
pub fn random_graph_plane(seed: u64, index: usize, scale: f64) -> GraphPlane {
    let mut r = rng::stream(seed, index as u64);
    GraphPlane::new(Mat34::from_vec(rng::normals(&mut r, 12)) * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    /// The coordinate expression of the Fueter vector.
    fn coordinate_formula(g: &GraphPlane) -> Vector4<f64> {
        let v = |i, a| g.v(i, a);
        Vector4::new(
            -v(1, 5) - v(2, 6) + v(3, 7),
            v(1, 4) + v(2, 7) + v(3, 6),
            -v(1, 7) + v(2, 4) - v(3, 5),
            v(1, 6) - v(2, 5) - v(3, 4),
        )
    }

    fn random_graph(seed: u64, idx: u64) -> GraphPlane {
        let mut r = rng::stream(seed, idx);
        GraphPlane::new(Mat34::from_vec(rng::normals(&mut r, 12)))
    }

    fn fueter_example() -> GraphPlane {
        GraphPlane::with_entries(&[(1, 4, 1.0), (3, 6, -1.0)])
    }

    #[test]
    fn j_triple_relations_and_origin() {
        let j = JTriple::standard();
        assert_eq!(j.get(1) * j.get(2), -j.get(3));
        assert_eq!(j.get(2) * j.get(3), -j.get(1));
        assert_eq!(j.get(1) * j.get(3), *j.get(2));
        assert_eq!(JTriple::from_splitting(&Splitting::standard()).unwrap(), j);
        let bad = [*j.get(1), *j.get(2), -j.get(3)];
        assert!(matches!(JTriple::new(bad), Err(FueterError::BadTriple(_))));
    }

    #[test]
    fn fueter_vector_examples() {
        let s = Splitting::standard();
        let j = JTriple::standard();
        let cases = [
            (GraphPlane::zero(), Vector4::zeros()),
            (GraphPlane::with_entries(&[(1, 4, 1.0)]), Vector4::new(0.0, 1.0, 0.0, 0.0)),
            (fueter_example(), Vector4::zeros()),
        ];
        for (g, expected) in cases {
            assert_eq!(fueter_vector(&s, &g), expected);
            assert_eq!(fueter_via_j(&g, &j), expected);
            assert_eq!(coordinate_formula(&g), expected);
        }
        for idx in 0..50 {
            let g = random_graph(1, idx);
            let a = fueter_vector(&s, &g);
            assert!((a - fueter_via_j(&g, &j)).norm() < 1e-12);
            assert!((a - coordinate_formula(&g)).norm() < 1e-12);
        }
    }

    #[test]
    fn completion_examples() {
        let s = Splitting::standard();
        assert_eq!(fueter_complete(&s, &unit(1), &unit(2)).unwrap().v3, unit(3));
        let c = fueter_complete(&s, &(unit(1) + unit(4)), &unit(2)).unwrap();
        assert!((c.v3 - (unit(3) - unit(6))).norm() < 1e-15);
        assert_abs_diff_eq!(c.condition, 1.0, epsilon = 1e-12);
        assert!(matches!(
            fueter_complete(&s, &(unit(1) * 2.0), &unit(2)),
            Err(FueterError::HorizontalNotOrthonormal(_))
        ));
        let g2 = s.g2();
        assert_eq!(associative_complete(g2, &unit(1), &unit(2)).unwrap(), unit(3));
        assert_eq!(associative_complete(g2, &unit(1), &unit(4)).unwrap(), unit(5));
        assert!(associative_complete(g2, &unit(1), &(unit(1) * 2.0)).is_err());
    }

    #[test]
    fn condition_report_examples() {
        let s = Splitting::standard();
        let r = condition_residuals(&s, &fueter_example());
        assert!(r.max() < 1e-12, "{r:?}");
        let r = condition_residuals(&s, &GraphPlane::zero());
        assert_eq!(r.max(), 0.0);
        let r = condition_residuals(&s, &GraphPlane::with_entries(&[(1, 4, 1.0)]));
        assert_abs_diff_eq!(r.fueter_norm, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.chi1_norm, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.anisotropic_gap, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn chi_routes_agree() {
        let s = Splitting::standard();
        for idx in 0..30 {
            let g = random_graph(2, idx);
            let b = chi_via_beta(&s, &g);
            let d = chi_direct(&s, &g);
            assert!(b.chi1.approx_eq(&d[0], 1e-10));
            assert!(b.chi1_projection.approx_eq(&d[0], 1e-10));
            assert!(b.chi2.approx_eq(&d[1], 1e-10), "{:?} vs {:?}", b.chi2, d[1]);
            assert!(b.chi3.approx_eq(&d[2], 1e-10));
            let f = fueter_vector(&s, &g);
            let c1: Vec<f64> = (4..=7).map(|a| d[0].coeff(&[a])).collect();
            assert!((Vector4::from_vec(c1) - f).norm() < 1e-12);
        }
        let zero = chi_via_beta(&s, &GraphPlane::zero());
        assert!(zero.chi1.is_zero() && zero.chi2.is_zero() && zero.chi3.is_zero());
    }

    #[test]
    fn chi3_detects_horizontal_directions() {
        let s = Splitting::standard();
        for idx in 0..30 {
            let mut g = random_graph(3, idx);
            assert!(chi_via_beta(&s, &g).chi3.norm() > 1e-6);
            let mut t = *g.t();
            t.set_row(1, &(t.row(0) * 0.3 - t.row(2) * 1.5));
            g = GraphPlane::new(t);
            assert!(chi_via_beta(&s, &g).chi3.norm() < 1e-12);
            t.set_row(2, &nalgebra::RowVector4::zeros());
            assert!(chi_via_beta(&s, &GraphPlane::new(t)).chi3.norm() < 1e-12);
        }
    }

    #[test]
    fn vanishing_profiles() {
        let s = Splitting::standard();
        // Fueter completion of a generic pair has χ3 ≠ 0
        let c = fueter_complete(&s, &(unit(1) + unit(4) * 0.3 + unit(7)), &(unit(2) - unit(5) + unit(6) * 0.5)).unwrap();
        let frame = [unit(1) + unit(4) * 0.3 + unit(7), unit(2) - unit(5) + unit(6) * 0.5, c.v3];
        let g = GraphPlane::new(Mat34::from_fn(|i, a| frame[i][a + 3]));
        let p = k_vanishing_profile(&s, &g, 1e-10);
        assert_eq!(p.depth, 2);
        assert!(p.one_iff_two);
        assert!(p.alpha_residuals.iter().chain(&p.ladder_residuals).all(|r| r.abs() < 1e-10));
        let p = k_vanishing_profile(&s, &fueter_example(), 1e-10);
        assert_eq!(p.depth, 3);
        let p = k_vanishing_profile(&s, &random_graph(4, 0), 1e-10);
        assert_eq!(p.depth, 0);
    }

    #[test]
    fn linearization() {
        let s = Splitting::standard();
        assert_eq!(linearization_rank(&s, &GraphPlane::zero()).unwrap(), 4);
        assert_eq!(linearization_rank(&s, &fueter_example()).unwrap(), 4);
        assert!(linearization_rank(&s, &GraphPlane::with_entries(&[(1, 4, 1.0)])).is_err());
        let b1 = s.beta_of(&random_graph(5, 0));
        let b2 = s.beta_of(&random_graph(5, 1));
        let lhs = p_operator(&s, &(&b1.scale(2.0) + &b2.scale(-0.7)));
        let rhs = &p_operator(&s, &b1).scale(2.0) + &p_operator(&s, &b2).scale(-0.7);
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn polar_dimensions() {
        let s = Splitting::standard();
        assert_eq!(polar_space_dim(&s, &[], EdsSystem::Associative).unwrap(), 7);
        assert_eq!(polar_space_dim(&s, &[unit(4)], EdsSystem::Associative).unwrap(), 7);
        assert_eq!(polar_space_dim(&s, &[unit(1), unit(4)], EdsSystem::Associative).unwrap(), 3);
        assert_eq!(
            polar_space_dim(&s, &[unit(1) + unit(5), unit(2)], EdsSystem::Fueter).unwrap(),
            3
        );
        assert!(matches!(
            polar_space_dim(&s, &[unit(1), unit(2), unit(3)], EdsSystem::Associative),
            Err(FueterError::UnsupportedDimension(3))
        ));
        assert!(matches!(
            polar_space_dim(&s, &[unit(4), unit(5)], EdsSystem::Fueter),
            Err(FueterError::NotProjectable)
        ));
    }
}
