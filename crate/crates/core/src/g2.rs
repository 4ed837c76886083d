//! Linear G2 geometry on R^7: the model 3-form, the metric it induces, the
//! cross product, the associator and coassociator tensors, the isometries
//! `Λ^1 -> Λ^k_7` and the splitting `Λ^2 = Λ^2_7 ⊕ Λ^2_14`.
//!
//! A [`G2Structure`] may carry a non-identity metric (e.g. the anisotropic
//! rescalings). Hodge stars and form norms are then computed by moving to an
//! orthonormal coframe with a pullback and back again.

use nalgebra::{DMatrix, SMatrix, SVector};
use thiserror::Error;

use crate::exterior::{self, ExteriorError, Form, VectorValuedForm};

pub type Vec7 = SVector<f64, 7>;
pub type Mat7 = SMatrix<f64, 7, 7>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum G2Error {
    #[error("not a G2 form: {0}")]
    NotG2Form(String),
    #[error("invalid degree {0} for the λ map (expected 2, 4 or 6)")]
    InvalidLambdaDegree(usize),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// Unit coordinate vector `e_{i}` (1-based).
pub fn unit(i: usize) -> Vec7 {
    let mut v = Vec7::zeros();
    v[i - 1] = 1.0;
    v
}

/// The model 3-form `dx123 + dx145 + dx167 + dx246 - dx257 - dx347 - dx356`.
pub fn phi0() -> Form {
    Form::from_terms(
        7,
        3,
        [
            (&[1, 2, 3][..], 1.0),
            (&[1, 4, 5][..], 1.0),
            (&[1, 6, 7][..], 1.0),
            (&[2, 4, 6][..], 1.0),
            (&[2, 5, 7][..], -1.0),
            (&[3, 4, 7][..], -1.0),
            (&[3, 5, 6][..], -1.0),
        ],
    )
}

fn to_dmatrix(m: &Mat7) -> DMatrix<f64> {
    DMatrix::from_fn(7, 7, |i, j| m[(i, j)])
}

/// Metric induced by a 3-form: `B_ij vol0 = (1/6) i(e_i)φ ∧ i(e_j)φ ∧ φ`
/// with `vol0 = dx1..7`, normalised as `g = B / det(B)^(1/9)`.
pub fn metric_from_phi(phi: &Form) -> Result<Mat7, G2Error> {
    if phi.dim() != 7 || phi.degree() != 3 {
        return Err(G2Error::NotG2Form(format!(
            "expected a 3-form on R^7, got degree {} on R^{}",
            phi.degree(),
            phi.dim()
        )));
    }
    let contractions: Vec<Form> = (1..=7)
        .map(|i| exterior::interior(unit(i).as_slice(), phi))
        .collect::<Result<_, _>>()?;
    let full: Vec<usize> = (1..=7).collect();
    let mut b = Mat7::zeros();
    for i in 0..7 {
        for j in i..7 {
            let top = exterior::wedge_all(&[&contractions[i], &contractions[j], phi])?;
            let v = top.coeff(&full) / 6.0;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let det = b.determinant();
    if det <= 0.0 {
        return Err(G2Error::NotG2Form(format!("det B = {det} is not positive")));
    }
    let g = b / det.powf(1.0 / 9.0);
    if g.cholesky().is_none() {
        return Err(G2Error::NotG2Form("induced metric is not positive definite".into()));
    }
    Ok(g)
}

/// A constant-coefficient G2 structure on R^7.
#[derive(Debug, Clone)]
pub struct G2Structure {
    phi: Form,
    metric: Mat7,
    vol: Form,
    star_phi: Form,
    frame_labels: Vec<String>,
    /// `P` with `g = PᵀP`, upper triangular, positive diagonal.
    ortho: Mat7,
    ortho_inv: Mat7,
    metric_inv: Mat7,
}

impl G2Structure {
    pub fn standard() -> Self {
        Self::from_phi(phi0()).expect("model form is G2")
    }

    pub fn from_phi(phi: Form) -> Result<Self, G2Error> {
        let metric = metric_from_phi(&phi)?;
        let chol = metric
            .cholesky()
            .ok_or_else(|| G2Error::NotG2Form("metric not positive definite".into()))?;
        let ortho = chol.l().transpose();
        let ortho_inv = ortho
            .try_inverse()
            .ok_or_else(|| G2Error::NotG2Form("singular metric".into()))?;
        let metric_inv = chol.inverse();
        let mut s = G2Structure {
            phi,
            metric,
            vol: Form::volume(7),
            star_phi: Form::zero(7, 4),
            frame_labels: (1..=7).map(|i| format!("dx{i}")).collect(),
            ortho,
            ortho_inv,
            metric_inv,
        };
        s.vol = s.from_orthonormal(&Form::volume(7));
        s.star_phi = s.hodge(&s.phi);
        Ok(s)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), 7);
        self.frame_labels = labels;
        self
    }

    pub fn phi(&self) -> &Form {
        &self.phi
    }

    pub fn metric(&self) -> &Mat7 {
        &self.metric
    }

    pub fn metric_inverse(&self) -> &Mat7 {
        &self.metric_inv
    }

    pub fn vol(&self) -> &Form {
        &self.vol
    }

    pub fn star_phi(&self) -> &Form {
        &self.star_phi
    }

    pub fn frame_labels(&self) -> &[String] {
        &self.frame_labels
    }

    /// Rewrites a form in the orthonormal coordinates `y = P x`.
    pub fn to_orthonormal(&self, a: &Form) -> Form {
        exterior::pullback(&to_dmatrix(&self.ortho_inv), a).expect("dim 7")
    }

    pub fn from_orthonormal(&self, a: &Form) -> Form {
        exterior::pullback(&to_dmatrix(&self.ortho), a).expect("dim 7")
    }

    /// Inner product of forms induced by the metric.
    pub fn inner(&self, a: &Form, b: &Form) -> Result<f64, G2Error> {
        Ok(exterior::inner(
            &self.to_orthonormal(a),
            &self.to_orthonormal(b),
        )?)
    }

    pub fn norm(&self, a: &Form) -> f64 {
        exterior::inner(&self.to_orthonormal(a), &self.to_orthonormal(a))
            .expect("same space")
            .sqrt()
    }

    /// Hodge star of the metric with orientation `dx1..7`.
    pub fn hodge(&self, a: &Form) -> Form {
        self.from_orthonormal(&exterior::hodge(&self.to_orthonormal(a)))
    }

    pub fn dot(&self, u: &Vec7, v: &Vec7) -> f64 {
        (u.transpose() * self.metric * v)[(0, 0)]
    }

    pub fn vec_norm(&self, u: &Vec7) -> f64 {
        self.dot(u, u).sqrt()
    }

    /// Metric dual of a vector, as a 1-form.
    pub fn flat(&self, v: &Vec7) -> Form {
        Form::one_form((self.metric * v).as_slice())
    }

    /// Metric dual of a 1-form.
    pub fn sharp(&self, a: &Form) -> Vec7 {
        assert_eq!(a.degree(), 1);
        let c = Vec7::from_fn(|i, _| a.coeff(&[i + 1]));
        self.metric_inv * c
    }

    /// Gram determinant `|v_1 ∧ … ∧ v_k|^2`.
    pub fn gram_det(&self, vs: &[Vec7]) -> f64 {
        let k = vs.len();
        DMatrix::from_fn(k, k, |i, j| self.dot(&vs[i], &vs[j])).determinant()
    }

    fn covector_to_vector(&self, c: impl Fn(usize) -> f64) -> Vec7 {
        self.metric_inv * Vec7::from_fn(|i, _| c(i + 1))
    }

    /// Cross product: `g(u × v, w) = φ(u, v, w)`.
    pub fn cross(&self, u: &Vec7, v: &Vec7) -> Vec7 {
        let c = exterior::interior(v.as_slice(), &exterior::interior(u.as_slice(), &self.phi).unwrap())
            .unwrap();
        self.covector_to_vector(|i| c.coeff(&[i]))
    }

    /// Associator: `g(χ(u, v, w), x) = ∗φ(u, v, w, x)`.
    pub fn chi(&self, u: &Vec7, v: &Vec7, w: &Vec7) -> Vec7 {
        let mut c = self.star_phi.clone();
        for x in [u, v, w] {
            c = exterior::interior(x.as_slice(), &c).unwrap();
        }
        self.covector_to_vector(|i| c.coeff(&[i]))
    }

    /// Coassociator `τ = φ ∧ id` evaluated on four vectors.
    pub fn tau(&self, u: &Vec7, v: &Vec7, w: &Vec7, x: &Vec7) -> Vec7 {
        let p = |a: &Vec7, b: &Vec7, c: &Vec7| {
            exterior::evaluate(&self.phi, &[a.as_slice(), b.as_slice(), c.as_slice()]).unwrap()
        };
        x * p(u, v, w) - w * p(u, v, x) + v * p(u, w, x) - u * p(v, w, x)
    }

    /// `χ` as a TM-valued 3-form: component `a` is `g^{ab} (−i(e_b) ∗φ)`.
    pub fn chi_form(&self) -> VectorValuedForm {
        let contractions: Vec<Form> = (1..=7)
            .map(|b| -exterior::interior(unit(b).as_slice(), &self.star_phi).unwrap())
            .collect();
        let comps = (0..7)
            .map(|a| {
                let mut f = Form::zero(7, 3);
                for (b, cb) in contractions.iter().enumerate() {
                    let m = self.metric_inv[(a, b)];
                    if m != 0.0 {
                        f += &cb.scale(m);
                    }
                }
                f
            })
            .collect();
        VectorValuedForm::new(comps).expect("uniform components")
    }

    /// `τ` as a TM-valued 4-form: component `a` is `φ ∧ dx^a`.
    pub fn tau_form(&self) -> VectorValuedForm {
        let comps = (1..=7)
            .map(|a| exterior::wedge(&self.phi, &Form::monomial(7, &[a], 1.0)).unwrap())
            .collect();
        VectorValuedForm::new(comps).expect("uniform components")
    }

    /// The isometries `λ^2(α) = i(α♯)φ/√3`, `λ^4(α) = α∧φ/2`, `λ^6(α) = ∗α`.
    pub fn lambda(&self, alpha: &Form, k: usize) -> Result<Form, G2Error> {
        if alpha.dim() != 7 || alpha.degree() != 1 {
            return Err(ExteriorError::DegreeMismatch(alpha.degree(), 1).into());
        }
        match k {
            2 => Ok(exterior::interior(self.sharp(alpha).as_slice(), &self.phi)?
                .scale(1.0 / 3f64.sqrt())),
            4 => Ok(exterior::wedge(alpha, &self.phi)?.scale(0.5)),
            6 => Ok(self.hodge(alpha)),
            _ => Err(G2Error::InvalidLambdaDegree(k)),
        }
    }

    /// Orthonormal coframe `θ^j = Σ_k P_jk dx^k`.
    fn orthonormal_coframe(&self) -> Vec<Form> {
        (0..7)
            .map(|j| {
                let row: Vec<f64> = (0..7).map(|k| self.ortho[(j, k)]).collect();
                Form::one_form(&row)
            })
            .collect()
    }

    /// Adjoint of `λ^k`; since `λ^k` is an isometry this inverts it on `Λ^k_7`
    /// and kills the complement.
    pub fn lambda_adjoint(&self, beta: &Form, k: usize) -> Result<Form, G2Error> {
        if beta.degree() != k {
            return Err(ExteriorError::DegreeMismatch(beta.degree(), k).into());
        }
        let mut out = Form::zero(7, 1);
        for theta in self.orthonormal_coframe() {
            let c = self.inner(&self.lambda(&theta, k)?, beta)?;
            out += &theta.scale(c);
        }
        Ok(out)
    }

    /// Orthogonal projection onto `Λ^k_7`, `k ∈ {2, 4}`.
    pub fn project_7(&self, beta: &Form) -> Result<Form, G2Error> {
        let k = beta.degree();
        self.lambda(&self.lambda_adjoint(beta, k)?, k)
    }

    pub fn project_2_7(&self, beta: &Form) -> Result<Form, G2Error> {
        if beta.degree() != 2 {
            return Err(ExteriorError::DegreeMismatch(beta.degree(), 2).into());
        }
        self.project_7(beta)
    }

    pub fn project_2_14(&self, beta: &Form) -> Result<Form, G2Error> {
        Ok(beta - &self.project_2_7(beta)?)
    }
}

/// Numerical rank of a linear map on forms of a given degree, computed from
/// its matrix on the monomial basis.
pub fn operator_rank<F>(dim: usize, degree: usize, op: F, tol: f64) -> usize
where
    F: Fn(&Form) -> Form,
{
    let basis = exterior::basis_tuples(dim, degree);
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|t| op(&Form::monomial(dim, t, 1.0)).dense())
        .collect();
    let rows = cols.first().map_or(0, Vec::len);
    let m = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    m.rank(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn rand_vec(rng: &mut ChaCha8Rng) -> Vec7 {
        Vec7::from_fn(|_, _| rng.sample(StandardNormal))
    }

    fn rand_form(rng: &mut ChaCha8Rng, k: usize) -> Form {
        let n = exterior::basis_tuples(7, k).len();
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        Form::from_dense(7, k, &v)
    }

    #[test]
    fn model_metric_is_identity() {
        let g = metric_from_phi(&phi0()).unwrap();
        assert!((g - Mat7::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn metric_is_homogeneous_of_degree_two_thirds() {
        let g = metric_from_phi(&phi0().scale(8.0)).unwrap();
        assert!((g - Mat7::identity() * 4.0).abs().max() < 1e-12);
    }

    #[test]
    fn anisotropic_pullback_gives_rescaled_metric() {
        let eps: f64 = 0.01;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0,
            1.0,
            1.0,
            eps.sqrt(),
            eps.sqrt(),
            eps.sqrt(),
            eps.sqrt(),
        ]));
        let phi = exterior::pullback(&d, &phi0()).unwrap();
        let g = metric_from_phi(&phi).unwrap();
        let expected = Mat7::from_diagonal(&Vec7::from_vec(vec![1.0, 1.0, 1.0, eps, eps, eps, eps]));
        assert!((g - expected).abs().max() < 1e-12);
    }

    #[test]
    fn degenerate_forms_are_rejected() {
        let f = Form::monomial(7, &[1, 2, 3], 1.0);
        assert!(matches!(metric_from_phi(&f), Err(G2Error::NotG2Form(_))));
        assert!(metric_from_phi(&Form::monomial(7, &[1, 2], 1.0)).is_err());
    }

    #[test]
    fn structure_invariants() {
        let g = G2Structure::standard();
        assert_eq!(g.inner(g.phi(), g.phi()).unwrap(), 7.0);
        assert_eq!(g.inner(g.star_phi(), g.star_phi()).unwrap(), 7.0);
        assert_eq!(g.vol(), &Form::volume(7));
    }

    #[test]
    fn cross_product_table() {
        let g = G2Structure::standard();
        assert_eq!(g.cross(&unit(1), &unit(2)), unit(3));
        assert_eq!(g.cross(&unit(1), &unit(4)), unit(5));
        assert_eq!(g.cross(&unit(2), &unit(5)), -unit(7));
        assert_eq!(g.cross(&unit(3), &unit(5)), -unit(6));
    }

    #[test]
    fn chi_examples() {
        let g = G2Structure::standard();
        assert_eq!(g.chi(&unit(1), &unit(2), &unit(3)), Vec7::zeros());
        // sign read off the dx4567 coefficient of ∗φ
        let c = g.star_phi().coeff(&[4, 5, 6, 7]);
        assert_eq!(g.chi(&unit(4), &unit(5), &unit(6)), unit(7) * c);
    }

    #[test]
    fn tau_examples() {
        let g = G2Structure::standard();
        assert_eq!(g.tau(&unit(4), &unit(5), &unit(6), &unit(7)), Vec7::zeros());
        let t = g.tau(&unit(1), &unit(2), &unit(3), &unit(4));
        // expansion of φ ∧ dx^a on the quadruple
        let vs = [unit(1), unit(2), unit(3), unit(4)];
        let slices: Vec<&[f64]> = vs.iter().map(|v| v.as_slice()).collect();
        let oracle = Vec7::from_vec(g.tau_form().evaluate(&slices).unwrap());
        assert_eq!(t, oracle);
        let sp = exterior::evaluate(g.star_phi(), &slices).unwrap();
        assert_eq!(sp, 0.0);
        assert_abs_diff_eq!(t.norm_squared() + sp * sp, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn associator_and_coassociator_equalities() {
        let g = G2Structure::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (u, v, w, x) = (rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng));
            let p = exterior::evaluate(g.phi(), &[u.as_slice(), v.as_slice(), w.as_slice()]).unwrap();
            let lhs = p * p + g.chi(&u, &v, &w).norm_squared();
            let rhs = g.gram_det(&[u, v, w]);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
            let s = exterior::evaluate(
                g.star_phi(),
                &[u.as_slice(), v.as_slice(), w.as_slice(), x.as_slice()],
            )
            .unwrap();
            let lhs = s * s + g.tau(&u, &v, &w, &x).norm_squared();
            let rhs = g.gram_det(&[u, v, w, x]);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
        }
    }

    #[test]
    fn cross_product_identities() {
        let g = G2Structure::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let u = rand_vec(&mut rng).normalize();
            let v = rand_vec(&mut rng);
            let uv = g.cross(&u, &v);
            assert!(g.dot(&uv, &u).abs() < 1e-12);
            assert!(g.dot(&uv, &v).abs() < 1e-12);
            assert!((g.cross(&v, &u) + uv).norm() < 1e-12);
            let lhs = g.cross(&u, &uv);
            let rhs = -v * g.dot(&u, &u) + u * g.dot(&u, &v);
            assert!((lhs - rhs).norm() < 1e-10);
            // χ vanishes on {u, v, u × v}
            assert!(g.chi(&u, &v, &uv).norm() < 1e-10);
        }
    }

    #[test]
    fn chi_form_matches_contraction() {
        let g = G2Structure::standard();
        let chi = g.chi_form();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (u, v, w) = (rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng));
            let a = Vec7::from_vec(chi.evaluate(&[u.as_slice(), v.as_slice(), w.as_slice()]).unwrap());
            assert!((a - g.chi(&u, &v, &w)).norm() < 1e-12);
        }
    }

    #[test]
    fn lambda_examples() {
        let g = G2Structure::standard();
        let dx1 = Form::monomial(7, &[1], 1.0);
        let s = 1.0 / 3f64.sqrt();
        let expected = Form::from_terms(7, 2, [(&[2, 3][..], s), (&[4, 5][..], s), (&[6, 7][..], s)]);
        let l2 = g.lambda(&dx1, 2).unwrap();
        assert!(l2.approx_eq(&expected, 1e-15));
        assert_abs_diff_eq!(g.norm(&l2), 1.0, epsilon = 1e-15);
        let l4 = g.lambda(&dx1, 4).unwrap();
        assert_eq!(l4, exterior::wedge(&dx1, g.phi()).unwrap().scale(0.5));
        assert!(matches!(g.lambda(&dx1, 3), Err(G2Error::InvalidLambdaDegree(3))));
    }

    #[test]
    fn lambda_maps_are_isometries() {
        let g = G2Structure::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let a = rand_form(&mut rng, 1);
            for k in [2, 4, 6] {
                let l = g.lambda(&a, k).unwrap();
                assert!((g.norm(&l) - g.norm(&a)).abs() < 1e-12);
                let back = g.lambda_adjoint(&l, k).unwrap();
                assert!(back.approx_eq(&a, 1e-12));
            }
        }
    }

    #[test]
    fn two_form_projections() {
        let g = G2Structure::standard();
        let dx1 = Form::monomial(7, &[1], 1.0);
        assert!(g.project_2_14(&g.lambda(&dx1, 2).unwrap()).unwrap().max_abs() < 1e-15);
        assert_eq!(operator_rank(7, 2, |b| g.project_2_7(b).unwrap(), 1e-9), 7);
        assert_eq!(operator_rank(7, 2, |b| g.project_2_14(b).unwrap(), 1e-9), 14);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let b = rand_form(&mut rng, 2);
            let p = g.project_2_7(&b).unwrap();
            let oracle = (&b + &exterior::hodge(&exterior::wedge(g.phi(), &b).unwrap())).scale(1.0 / 3.0);
            assert!(p.approx_eq(&oracle, 1e-12));
            let q = g.project_2_14(&b).unwrap();
            assert!(exterior::wedge(&q, g.star_phi()).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn non_orthonormal_structure_is_consistent() {
        let eps: f64 = 0.1;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [1.0, 1.0, 1.0].into_iter().chain([eps.sqrt(); 4]).collect(),
        ));
        let g = G2Structure::from_phi(exterior::pullback(&d, &phi0()).unwrap()).unwrap();
        assert!((g.norm(g.phi()).powi(2) - 7.0).abs() < 1e-12);
        assert!((g.norm(g.star_phi()).powi(2) - 7.0).abs() < 1e-12);
        let vol = Form::volume(7).scale(eps * eps);
        assert!(g.vol().approx_eq(&vol, 1e-14));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let (u, v, w) = (rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng));
            let p = exterior::evaluate(g.phi(), &[u.as_slice(), v.as_slice(), w.as_slice()]).unwrap();
            let c = g.chi(&u, &v, &w);
            let lhs = p * p + g.dot(&c, &c);
            let rhs = g.gram_det(&[u, v, w]);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
        }
    }
}
