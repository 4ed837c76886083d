//! Geometry relative to a splitting `R^7 = H ⊕ V` with `H` associative:
//! horizontally projectable 3-planes and their graph coordinates, the
//! horizontal metric and volume, the vertical energies, decomposition of
//! forms by vertical degree, the anisotropic family and Monte-Carlo scans.
//!
//! All forms and vectors returned by a [`Splitting`] are written in its
//! orthonormal frame `(e1, e2, e3, η4, …, η7)`, so frame indices `1..=3` are
//! horizontal and `4..=7` vertical.

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{self, ExteriorError, Form, VectorValuedForm};
use crate::g2::{unit, G2Error, G2Structure, Mat7, Vec7};
use crate::rng;

pub type Mat34 = SMatrix<f64, 3, 4>;
pub type Mat3 = Matrix3<f64>;

/// Planes whose smallest singular value falls below this are degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Planes with `ve1` below this are skipped by the anisotropic scan.
pub const ZERO_ENERGY_SKIP: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplittingError {
    #[error("not horizontally projectable: smallest singular value of p_H is {0:e}")]
    NotProjectable(f64),
    #[error("spanning vectors are dependent: smallest singular value {0:e}")]
    Degenerate(f64),
    #[error("expected a {expected}-plane, got {got} vectors")]
    WrongSize { expected: usize, got: usize },
    #[error("frame is not orthonormal (residual {0:e})")]
    FrameNotOrthonormal(f64),
    #[error("horizontal distribution is not associative (residual {0:e})")]
    NotAssociative(f64),
    #[error("horizontal frame is not positively calibrated (φ = {0})")]
    WrongOrientation(f64),
    #[error("ε must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    G2(#[from] G2Error),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// An ordered list of independent vectors in R^7.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    span: Vec<Vec7>,
    oriented: bool,
}

fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    m.singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

impl Plane {
    pub fn new(span: Vec<Vec7>) -> Result<Self, SplittingError> {
        if span.len() > 3 {
            return Err(SplittingError::WrongSize {
                expected: 3,
                got: span.len(),
            });
        }
        let m = DMatrix::from_fn(7, span.len(), |i, j| span[j][i]);
        let s = smallest_singular_value(&m);
        if s <= DEGENERACY_TOL {
            return Err(SplittingError::Degenerate(s));
        }
        Ok(Plane {
            span,
            oriented: true,
        })
    }

    pub fn unoriented(mut self) -> Self {
        self.oriented = false;
        self
    }

    pub fn span(&self) -> &[Vec7] {
        &self.span
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }
}

/// A horizontally projectable 3-plane stored as `T: H -> V`, with
/// `T(e_i) = Σ_a v_ia η_a`. Row `i` of `t` holds `(v_i4, …, v_i7)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPlane {
    t: Mat34,
}

impl GraphPlane {
    pub fn new(t: Mat34) -> Self {
        GraphPlane { t }
    }

    pub fn zero() -> Self {
        GraphPlane { t: Mat34::zeros() }
    }

    pub fn from_rows(rows: [[f64; 4]; 3]) -> Self {
        GraphPlane {
            t: Mat34::from_fn(|i, a| rows[i][a]),
        }
    }

    /// The single nonzero entry `v_{ia}` (vertical index `a` in `4..=7`).
    pub fn with_entries(entries: &[(usize, usize, f64)]) -> Self {
        let mut t = Mat34::zeros();
        for &(i, a, v) in entries {
            t[(i - 1, a - 4)] = v;
        }
        GraphPlane { t }
    }

    pub fn t(&self) -> &Mat34 {
        &self.t
    }

    /// `v_{ia}` with `i ∈ 1..=3`, `a ∈ 4..=7`.
    pub fn v(&self, i: usize, a: usize) -> f64 {
        self.t[(i - 1, a - 4)]
    }

    pub fn row(&self, i: usize) -> Vector4<f64> {
        self.t.row(i - 1).transpose()
    }

    pub fn rows(&self) -> [[f64; 4]; 3] {
        let mut out = [[0.0; 4]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (a, x) in row.iter_mut().enumerate() {
                *x = self.t[(i, a)];
            }
        }
        out
    }

    /// Graph frame `v_i = e_i + T e_i` in splitting-frame coordinates.
    pub fn frame(&self) -> [Vec7; 3] {
        std::array::from_fn(|i| {
            let mut v = unit(i + 1);
            for a in 0..4 {
                v[3 + a] = self.t[(i, a)];
            }
            v
        })
    }

    /// `p_V(v_i)` as a 7-vector in splitting-frame coordinates.
    pub fn vertical(&self, i: usize) -> Vec7 {
        let mut v = Vec7::zeros();
        for a in 0..4 {
            v[3 + a] = self.t[(i - 1, a)];
        }
        v
    }

    pub fn plane(&self) -> Plane {
        Plane::new(self.frame().to_vec()).expect("graph frames are independent")
    }

    /// `G = T Tᵀ`, the Gram matrix of the vertical parts.
    pub fn vertical_gram(&self) -> Mat3 {
        self.t * self.t.transpose()
    }
}

/// Result of converting a general plane to graph coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Projected {
    pub graph: GraphPlane,
    /// `+1` if the plane's orientation agrees with the one induced from `H`.
    pub orientation: f64,
}

/// Residuals of the equality ladder for one graph plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LadderReport {
    /// `Σ_{i+j=2ℓ} (α_i α_j + ⟨χ_i, χ_j⟩) − |v_ℓ|²` for `ℓ = 1..=lmax`.
    pub even: Vec<f64>,
    /// `Σ_{i+j=2ℓ+1} (α_i α_j + ⟨χ_i, χ_j⟩)` for `ℓ = 1..=lmax`.
    pub odd: Vec<f64>,
    /// `|v_ℓ|² − Σ_{i+j=ℓ} ve_i ve_j` for `ℓ = 1..=lmax`.
    pub product: Vec<f64>,
    /// `α_2 + ½|χ_1|² − ve_1`.
    pub weighted: f64,
}

/// The splitting `R^7 = H ⊕ V` given by an orthonormal frame whose first
/// three vectors span an associative, positively calibrated `H`.
#[derive(Debug, Clone)]
pub struct Splitting {
    g2: G2Structure,
    frame: Mat7,
    phi: Form,
    star_phi: Form,
    phi_parts: Vec<Form>,
    star_parts: Vec<Form>,
    chi: VectorValuedForm,
    chi_parts: Vec<VectorValuedForm>,
    frame_g2: G2Structure,
}

/// Number of frame indices in `idx` that are vertical.
pub fn vertical_count(idx: &[usize]) -> usize {
    idx.iter().filter(|&&i| i >= 4).count()
}

/// Splits a frame-coordinate form by vertical degree: entry `i` keeps the
/// monomials with exactly `i` vertical indices.
pub fn vertical_parts(a: &Form) -> Vec<Form> {
    let top = a.degree().min(4);
    (0..=top)
        .map(|i| a.filter_terms(|idx| vertical_count(idx) == i))
        .collect()
}

fn vertical_parts_vv(a: &VectorValuedForm) -> Vec<VectorValuedForm> {
    let top = a.degree().min(4);
    (0..=top)
        .map(|i| a.map(|f| f.filter_terms(|idx| vertical_count(idx) == i)))
        .collect()
}

impl Splitting {
    /// `H = span(e1, e2, e3)`, `V = span(e4, …, e7)` for the model form.
    pub fn standard() -> Self {
        Self::adapted(G2Structure::standard(), Mat7::identity()).expect("standard splitting")
    }

    /// Splitting whose frame vectors are the columns of `frame`.
    pub fn adapted(g2: G2Structure, frame: Mat7) -> Result<Self, SplittingError> {
        let gram = frame.transpose() * g2.metric() * frame;
        let res = (gram - Mat7::identity()).abs().max();
        if res > 1e-12 {
            return Err(SplittingError::FrameNotOrthonormal(res));
        }
        if frame.determinant() <= 0.0 {
            return Err(SplittingError::FrameNotOrthonormal(frame.determinant()));
        }
        let h: Vec<Vec7> = (0..3).map(|i| frame.column(i).into_owned()).collect();
        let chi = g2.chi(&h[0], &h[1], &h[2]);
        let chi_res = g2.vec_norm(&chi);
        if chi_res > 1e-10 {
            return Err(SplittingError::NotAssociative(chi_res));
        }
        let cal = exterior::evaluate(g2.phi(), &[h[0].as_slice(), h[1].as_slice(), h[2].as_slice()])?;
        if (cal - 1.0).abs() > 1e-10 {
            return Err(SplittingError::WrongOrientation(cal));
        }
        let f = DMatrix::from_fn(7, 7, |i, j| frame[(i, j)]);
        let phi = exterior::pullback(&f, g2.phi())?;
        let star_phi = exterior::pullback(&f, g2.star_phi())?;
        let phi_parts = vertical_parts(&phi);
        let star_parts = vertical_parts(&star_phi);
        // frame metric is the identity: χ^a = −i(e_a) ∗φ
        let chi = VectorValuedForm::new(
            (1..=7)
                .map(|a| -exterior::interior(unit(a).as_slice(), &star_phi).unwrap())
                .collect(),
        )?;
        let chi_parts = vertical_parts_vv(&chi);
        let frame_g2 = G2Structure::from_phi(phi.clone())?;
        Ok(Splitting {
            frame_g2,
            g2,
            frame,
            phi,
            star_phi,
            phi_parts,
            star_parts,
            chi,
            chi_parts,
        })
    }

    pub fn g2(&self) -> &G2Structure {
        &self.g2
    }

    /// The G2 structure written in the splitting frame; its metric is the
    /// identity.
    pub fn frame_g2(&self) -> &G2Structure {
        &self.frame_g2
    }

    pub fn frame(&self) -> &Mat7 {
        &self.frame
    }

    /// `φ` in frame coordinates.
    pub fn phi(&self) -> &Form {
        &self.phi
    }

    pub fn star_phi(&self) -> &Form {
        &self.star_phi
    }

    /// `χ` in frame coordinates.
    pub fn chi(&self) -> &VectorValuedForm {
        &self.chi
    }

    /// Horizontal volume form `e123`.
    pub fn lambda(&self) -> &Form {
        &self.phi_parts[0]
    }

    /// Vertical-degree-2 part of `φ`.
    pub fn omega(&self) -> &Form {
        &self.phi_parts[2]
    }

    /// `ω_i = i(e_i) ω`, a 2-form on `V`.
    pub fn omega_i(&self, i: usize) -> Form {
        exterior::interior(unit(i).as_slice(), self.omega()).unwrap()
    }

    /// Vertical-degree-2 part of `∗φ`.
    pub fn theta(&self) -> &Form {
        &self.star_parts[2]
    }

    /// Vertical volume form `η4567` part of `∗φ`.
    pub fn mu(&self) -> &Form {
        &self.star_parts[4]
    }

    pub fn phi_parts(&self) -> &[Form] {
        &self.phi_parts
    }

    pub fn chi_parts(&self) -> &[VectorValuedForm] {
        &self.chi_parts
    }

    /// Frame coordinates of an ambient vector.
    pub fn frame_coords(&self, v: &Vec7) -> Vec7 {
        self.frame.transpose() * self.g2.metric() * v
    }

    pub fn ambient(&self, y: &Vec7) -> Vec7 {
        self.frame * y
    }

    /// Rewrites an ambient-coordinate form in frame coordinates.
    pub fn to_frame_form(&self, a: &Form) -> Form {
        let f = DMatrix::from_fn(7, 7, |i, j| self.frame[(i, j)]);
        exterior::pullback(&f, a).expect("dim 7")
    }

    pub fn graph_from_plane(&self, p: &Plane) -> Result<Projected, SplittingError> {
        if p.dim() != 3 {
            return Err(SplittingError::WrongSize {
                expected: 3,
                got: p.dim(),
            });
        }
        let ys: Vec<Vec7> = p.span().iter().map(|v| self.frame_coords(v)).collect();
        let a = Mat3::from_fn(|r, c| ys[c][r]);
        let s = smallest_singular_value(&DMatrix::from_fn(3, 3, |r, c| a[(r, c)]));
        if s <= DEGENERACY_TOL {
            return Err(SplittingError::NotProjectable(s));
        }
        let vert = SMatrix::<f64, 4, 3>::from_fn(|r, c| ys[c][3 + r]);
        let a_inv = a.try_inverse().ok_or(SplittingError::NotProjectable(0.0))?;
        let m = vert * a_inv;
        Ok(Projected {
            graph: GraphPlane::new(m.transpose()),
            orientation: a.determinant().signum(),
        })
    }

    /// `β = Σ_i e^i ∧ (T e_i)♭`.
    pub fn beta_of(&self, g: &GraphPlane) -> Form {
        let mut b = Form::zero(7, 2);
        for i in 1..=3 {
            for a in 4..=7 {
                let v = g.v(i, a);
                if v != 0.0 {
                    b += &Form::monomial(7, &[i, a], v);
                }
            }
        }
        b
    }

    /// Gram matrix of the horizontal projections of the spanning vectors.
    pub fn horizontal_metric(&self, p: &Plane) -> Result<Mat3, SplittingError> {
        if p.dim() != 3 {
            return Err(SplittingError::WrongSize {
                expected: 3,
                got: p.dim(),
            });
        }
        let ys: Vec<Vec7> = p.span().iter().map(|v| self.frame_coords(v)).collect();
        let a = Mat3::from_fn(|r, c| ys[c][r]);
        let s = smallest_singular_value(&DMatrix::from_fn(3, 3, |r, c| a[(r, c)]));
        if s <= DEGENERACY_TOL {
            return Err(SplittingError::NotProjectable(s));
        }
        Ok(a.transpose() * a)
    }

    /// `vol^H_π` evaluated on the spanning vectors.
    pub fn horizontal_volume(&self, p: &Plane) -> Result<f64, SplittingError> {
        Ok(self.horizontal_metric(p)?.determinant().sqrt())
    }

    /// `vol_π` evaluated on the spanning vectors.
    pub fn volume(&self, p: &Plane) -> f64 {
        self.g2.gram_det(p.span()).max(0.0).sqrt()
    }

    /// Decomposition of an ambient form by vertical degree, in frame
    /// coordinates. The parts sum to the input.
    pub fn decompose_form(&self, a: &Form) -> Vec<Form> {
        vertical_parts(&self.to_frame_form(a))
    }

    /// `Σ (√ε)^i α_i` for a frame-coordinate form.
    pub fn adiabatic_family(&self, a: &Form, eps: f64) -> Result<Form, SplittingError> {
        if !(eps > 0.0) {
            return Err(SplittingError::InvalidEpsilon(eps));
        }
        let s = eps.sqrt();
        let mut out = Form::zero(a.dim(), a.degree());
        for (i, part) in vertical_parts(a).iter().enumerate() {
            out += &part.scale(s.powi(i as i32));
        }
        Ok(out)
    }

    /// `Σ (√ε)^i χ_i`, grading by the vertical degree of the form part.
    pub fn adiabatic_vector_valued(
        &self,
        a: &VectorValuedForm,
        eps: f64,
    ) -> Result<VectorValuedForm, SplittingError> {
        if !(eps > 0.0) {
            return Err(SplittingError::InvalidEpsilon(eps));
        }
        let s = eps.sqrt();
        let top = a.degree().min(4);
        Ok(a.map(|f| {
            let mut out = Form::zero(f.dim(), f.degree());
            for i in 0..=top {
                out += &f.filter_terms(|idx| vertical_count(idx) == i).scale(s.powi(i as i32));
            }
            out
        }))
    }

    /// `diag(1, 1, 1, √ε, √ε, √ε, √ε)`.
    pub fn scaling_matrix(eps: f64) -> DMatrix<f64> {
        let s = eps.sqrt();
        DMatrix::from_diagonal(&DVector::from_iterator(
            7,
            [1.0, 1.0, 1.0, s, s, s, s].into_iter(),
        ))
    }

    /// `g_ε = g|_H + ε g|_V` in frame coordinates.
    pub fn adiabatic_metric(eps: f64) -> Mat7 {
        Mat7::from_diagonal(&Vec7::from_vec(vec![1.0, 1.0, 1.0, eps, eps, eps, eps]))
    }

    /// `α_i(v1, v2, v3)` for `i = 0..=3`.
    pub fn alpha_parts_on(&self, g: &GraphPlane) -> [f64; 4] {
        let f = g.frame();
        let vs = [f[0].as_slice(), f[1].as_slice(), f[2].as_slice()];
        std::array::from_fn(|i| exterior::evaluate(&self.phi_parts[i], &vs).unwrap())
    }

    /// `χ_i(v1, v2, v3)` for `i = 0..=3`, in frame coordinates.
    pub fn chi_parts_on(&self, g: &GraphPlane) -> [Vec7; 4] {
        let f = g.frame();
        let vs = [f[0].as_slice(), f[1].as_slice(), f[2].as_slice()];
        std::array::from_fn(|i| Vec7::from_vec(self.chi_parts[i].evaluate(&vs).unwrap()))
    }

    /// `ω(v1, v2, v3)`.
    pub fn omega_on(&self, g: &GraphPlane) -> f64 {
        self.alpha_parts_on(g)[2]
    }

    /// `|v_ℓ|²`: squared norm of the part of `v1∧v2∧v3` with `ℓ` vertical
    /// factors, computed from the wedge product directly.
    pub fn trivector_part_norm_sq(&self, g: &GraphPlane, l: usize) -> f64 {
        let f = g.frame();
        let ones: Vec<Form> = f.iter().map(|v| Form::one_form(v.as_slice())).collect();
        let tri = exterior::wedge_all(&[&ones[0], &ones[1], &ones[2]]).unwrap();
        let part = tri.filter_terms(|idx| vertical_count(idx) == l);
        exterior::inner(&part, &part).unwrap()
    }

    pub fn equality_ladder(&self, g: &GraphPlane, lmax: usize) -> LadderReport {
        let alpha = self.alpha_parts_on(g);
        let chi = self.chi_parts_on(g);
        let ve = ve_series(g, 2 * lmax + 1);
        let a = |i: usize| if i < 4 { alpha[i] } else { 0.0 };
        let c = |i: usize, j: usize| if i < 4 && j < 4 { chi[i].dot(&chi[j]) } else { 0.0 };
        let pair_sum = |n: usize| -> f64 { (0..=n).map(|i| a(i) * a(n - i) + c(i, n - i)).sum() };
        let mut even = Vec::new();
        let mut odd = Vec::new();
        let mut product = Vec::new();
        for l in 1..=lmax {
            let vl = if l <= 3 { self.trivector_part_norm_sq(g, l) } else { 0.0 };
            even.push(pair_sum(2 * l) - vl);
            odd.push(pair_sum(2 * l + 1));
            let conv: f64 = (0..=l).map(|i| ve[i] * ve[l - i]).sum();
            product.push(vl - conv);
        }
        LadderReport {
            even,
            odd,
            product,
            weighted: alpha[2] + 0.5 * chi[1].norm_squared() - ve[1],
        }
    }

    /// Residual of `α_{2k+2} + ½|χ_{k+1}|² = ve_{k+1}`, the identity that
    /// holds on `k`-vanishing planes.
    pub fn vanishing_identity(&self, g: &GraphPlane, k: usize) -> f64 {
        let alpha = self.alpha_parts_on(g);
        let chi = self.chi_parts_on(g);
        let ve = ve_series(g, k + 1);
        let a = if 2 * k + 2 < 4 { alpha[2 * k + 2] } else { 0.0 };
        let c = if k + 1 < 4 { chi[k + 1].norm_squared() } else { 0.0 };
        a + 0.5 * c - ve[k + 1]
    }
}

/// Binomial coefficient `C(1/2, n)`.
fn half_binomial(n: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..n {
        c *= (0.5 - j as f64) / (j as f64 + 1.0);
    }
    c
}

/// Coefficients of `√det(I + εG)` up to `ε^kmax`, via the eigenvalues of
/// `G = T Tᵀ` and the binomial series of each `√(1 + ελ)`.
pub fn ve_series(g: &GraphPlane, kmax: usize) -> Vec<f64> {
    let eig = g.vertical_gram().symmetric_eigenvalues();
    let mut poly = vec![0.0; kmax + 1];
    poly[0] = 1.0;
    for &lam in eig.iter() {
        let factor: Vec<f64> = (0..=kmax).map(|n| half_binomial(n) * lam.powi(n as i32)).collect();
        let mut next = vec![0.0; kmax + 1];
        for (i, p) in poly.iter().enumerate() {
            for (j, f) in factor.iter().enumerate().take(kmax + 1 - i) {
                next[i + j] += p * f;
            }
        }
        poly = next;
    }
    poly
}

/// `Σ_{|I|=k} |p_V v_{i1} ∧ … ∧ p_V v_{ik}|²`, from the wedge engine on V.
pub fn vertical_wedge_sum(g: &GraphPlane, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > 3 {
        return 0.0;
    }
    let rows: Vec<Form> = (1..=3)
        .map(|i| Form::one_form(g.row(i).as_slice()))
        .collect();
    exterior::basis_tuples(3, k)
        .iter()
        .map(|subset| {
            let fs: Vec<&Form> = subset.iter().map(|&i| &rows[i - 1]).collect();
            let w = exterior::wedge_all(&fs).unwrap();
            exterior::inner(&w, &w).unwrap()
        })
        .sum()
}

/// `|(p_V|_π)^k|²` in the tensor-power normalisation, equal to `k!` times
/// [`vertical_wedge_sum`].
pub fn wedge_power_norm_sq(g: &GraphPlane, k: usize) -> f64 {
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    fact * vertical_wedge_sum(g, k)
}

/// Vertical energies from the recursion
/// `ve_k = ½ (|(p_V)^k|²/k! − Σ_{i=1}^{k−1} ve_i ve_{k−i})`.
pub fn ve_recursive(g: &GraphPlane, kmax: usize) -> Vec<f64> {
    let mut ve = vec![1.0];
    for k in 1..=kmax {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        let ck = wedge_power_norm_sq(g, k) / fact;
        let conv: f64 = (1..k).map(|i| ve[i] * ve[k - i]).sum();
        ve.push(0.5 * (ck - conv));
    }
    ve
}

/// Source of random oriented 3-planes for [`semi_calibration_scan`].
#[derive(Debug, Clone, Default)]
pub struct PlaneSampler {
    /// Planes evaluated before any random sample (e.g. a calibrated one).
    pub anchors: Vec<[Vec7; 3]>,
}

impl PlaneSampler {
    pub fn with_anchor(mut self, frame: [Vec7; 3]) -> Self {
        self.anchors.push(frame);
        self
    }

    /// Sample `index` of the run: an anchor, or a Gaussian 7×3 matrix with
    /// orthonormalised columns, swapped if needed so that `a` is nonnegative.
    pub fn sample(&self, seed: u64, index: usize, a: &Form) -> [Vec7; 3] {
        if index < self.anchors.len() {
            return self.anchors[index];
        }
        let mut rng = rng::stream(seed, index as u64);
        loop {
            let m = DMatrix::from_vec(7, 3, rng::normals(&mut rng, 21));
            let q = m.clone().qr().q();
            let r_diag_ok = smallest_singular_value(&m) > DEGENERACY_TOL;
            if !r_diag_ok {
                continue;
            }
            let mut f: [Vec7; 3] = std::array::from_fn(|j| Vec7::from_fn(|i, _| q[(i, j)]));
            let val = exterior::evaluate(a, &[f[0].as_slice(), f[1].as_slice(), f[2].as_slice()]).unwrap();
            if val < 0.0 {
                f.swap(0, 1);
            }
            return f;
        }
    }
}

/// Source of random graph planes for [`anisotropic_scan`].
#[derive(Debug, Clone)]
pub struct GraphSampler {
    pub anchors: Vec<GraphPlane>,
    /// Standard deviation of the entries of `T`.
    pub scale: f64,
}

impl Default for GraphSampler {
    fn default() -> Self {
        GraphSampler {
            anchors: Vec::new(),
            scale: 1.0,
        }
    }
}

impl GraphSampler {
    pub fn sample(&self, seed: u64, index: usize) -> GraphPlane {
        if index < self.anchors.len() {
            return self.anchors[index];
        }
        let mut rng = rng::stream(seed, index as u64);
        let v = rng::normals(&mut rng, 12);
        GraphPlane::new(Mat34::from_fn(|i, a| self.scale * v[4 * i + a]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanReport {
    pub form: String,
    pub metric: Vec<Vec<f64>>,
    pub samples: usize,
    pub max_ratio: f64,
    pub argmax_frame: Vec<Vec<f64>>,
    pub violations: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_identity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub identity_violations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equality_cases: Option<usize>,
}

fn matrix_rows(m: &Mat7) -> Vec<Vec<f64>> {
    (0..7).map(|i| (0..7).map(|j| m[(i, j)]).collect()).collect()
}

/// Max over sampled oriented 3-planes of `a(frame) / vol_g(frame)`.
pub fn semi_calibration_scan(
    a: &Form,
    metric: &Mat7,
    sampler: &PlaneSampler,
    n: usize,
    seed: u64,
    tol: f64,
) -> ScanReport {
    let ratios: Vec<(f64, [Vec7; 3])> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let f = sampler.sample(seed, idx, a);
            let val = exterior::evaluate(a, &[f[0].as_slice(), f[1].as_slice(), f[2].as_slice()]).unwrap();
            let gram = Mat3::from_fn(|i, j| (f[i].transpose() * metric * f[j])[(0, 0)]);
            (val / gram.determinant().sqrt(), f)
        })
        .collect();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = [Vec7::zeros(); 3];
    let mut violations = 0;
    for (r, f) in &ratios {
        if *r > 1.0 + tol {
            violations += 1;
        }
        if *r > max_ratio {
            max_ratio = *r;
            argmax = *f;
        }
    }
    ScanReport {
        form: a.render(),
        metric: matrix_rows(metric),
        samples: n,
        max_ratio,
        argmax_frame: argmax.iter().map(|v| v.as_slice().to_vec()).collect(),
        violations,
        seed,
        tolerance: tol,
        skipped: 0,
        max_identity_residual: None,
        identity_violations: None,
        equality_cases: None,
    }
}

/// Max over sampled graph planes of `ω(v) / ve_1`, skipping planes with
/// `ve_1 < 1e-8`; also tracks `ω(v) + ½|χ_1(v)|² − ve_1`.
pub fn anisotropic_scan(
    s: &Splitting,
    sampler: &GraphSampler,
    n: usize,
    seed: u64,
    tol: f64,
) -> ScanReport {
    let rows: Vec<Option<(f64, f64, GraphPlane)>> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let g = sampler.sample(seed, idx);
            let ve1 = 0.5 * g.t().norm_squared();
            if ve1 < ZERO_ENERGY_SKIP {
                return None;
            }
            let om = s.omega_on(&g);
            let chi1 = s.chi_parts_on(&g)[1];
            let ident = om + 0.5 * chi1.norm_squared() - ve1;
            Some((om / ve1, ident, g))
        })
        .collect();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = GraphPlane::zero();
    let (mut violations, mut skipped, mut ident_viol, mut equal) = (0, 0, 0, 0);
    let mut max_ident: f64 = 0.0;
    for row in &rows {
        let Some((r, ident, g)) = row else {
            skipped += 1;
            continue;
        };
        if *r > 1.0 + tol {
            violations += 1;
        }
        if *r > 1.0 - 1e-9 {
            equal += 1;
        }
        if ident.abs() > tol {
            ident_viol += 1;
        }
        max_ident = max_ident.max(ident.abs());
        if *r > max_ratio {
            max_ratio = *r;
            argmax = *g;
        }
    }
    ScanReport {
        form: s.omega().render(),
        metric: matrix_rows(&Mat7::identity()),
        samples: n,
        max_ratio,
        argmax_frame: argmax.frame().iter().map(|v| v.as_slice().to_vec()).collect(),
        violations,
        seed,
        tolerance: tol,
        skipped,
        max_identity_residual: Some(max_ident),
        identity_violations: Some(ident_viol),
        equality_cases: Some(equal),
    }
}
