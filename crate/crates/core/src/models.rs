//! Homogeneous models: seven-dimensional Lie algebras carrying the model G2
//! form on their invariant coframe `(e1, e2, e3, η4, …, η7)`.
//!
//! Structure constants follow `[e_i, e_j] = Σ_k c_ij^k e_k` and the
//! Chevalley–Eilenberg differential is `de^k = −Σ_{i<j} c_ij^k e^{ij}`,
//! extended as a graded derivation. With `[e2, e3] = 2e1` this gives
//! `de1 = −2e23`.
//!
//! The nilpotent family uses `[y, y'] = −Σ_ij B_ij ω_j(y, y') e_i` on the
//! vertical directions, so that `de^i = Σ_j B_ij ω_j`. Some references write
//! these structure equations with the opposite sign; every flag computed here
//! depends on `B` only through vanishing conditions and is insensitive to it.

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{self, Form};
use crate::splitting::{vertical_count, Splitting};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("structure constants are not antisymmetric at ({0}, {1}, {2})")]
    NotAntisymmetric(usize, usize, usize),
    #[error("not a lattice-compatible B: entry {0} is odd")]
    OddEntry(i64),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("cannot parse matrix `{0}`: {1}")]
    BadMatrix(String, String),
}

/// Structure constants `c[i][j][k] = c_{i+1, j+1}^{k+1}`.
pub type Constants = [[[f64; 7]; 7]; 7];

#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    name: String,
    c: Constants,
    /// `de^k` for each coframe element.
    d1: Vec<Form>,
    splitting: Splitting,
}

/// `ρ(e_i)` for the action of `su(2)` on `V`, column `a` the image of `η_a`.
#[rustfmt::skip]
const SU2_ACTION: [[[f64; 4]; 4]; 3] = [
    [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [-1.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]],
    [[0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0], [0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]],
    [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]],
];

impl LieAlgebraModel {
    pub fn new(name: impl Into<String>, c: Constants) -> Result<Self, ModelError> {
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    if c[i][j][k] != -c[j][i][k] {
                        return Err(ModelError::NotAntisymmetric(i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        let d1 = (0..7)
            .map(|k| {
                let mut f = Form::zero(7, 2);
                for i in 0..7 {
                    for j in (i + 1)..7 {
                        if c[i][j][k] != 0.0 {
                            f += &Form::monomial(7, &[i + 1, j + 1], -c[i][j][k]);
                        }
                    }
                }
                f
            })
            .collect();
        Ok(LieAlgebraModel {
            name: name.into(),
            c,
            d1,
            splitting: Splitting::standard(),
        })
    }

    /// Abelian `R^7`, the tangent model of `T³ × T⁴`.
    pub fn product_flat() -> Self {
        Self::new("product-flat", [[[0.0; 7]; 7]; 7]).unwrap()
    }

    /// `su(2) ⋉ R^4` with `[e_i, e_j] = 2 ε_ijk e_k` and `su(2)` acting on
    /// `V` by the quaternionic representation.
    pub fn su2_semidirect() -> Self {
        let mut c = [[[0.0; 7]; 7]; 7];
        for (i, j, k) in [(1, 2, 0), (2, 0, 1), (0, 1, 2)] {
            c[i][j][k] = 2.0;
            c[j][i][k] = -2.0;
        }
        for (i, rho) in SU2_ACTION.iter().enumerate() {
            for a in 0..4 {
                for b in 0..4 {
                    let v = rho[b][a];
                    if v != 0.0 {
                        c[i][3 + a][3 + b] = v;
                        c[3 + a][i][3 + b] = -v;
                    }
                }
            }
        }
        Self::new("su2-semidirect", c).unwrap()
    }

    /// The 2-step nilpotent algebra with `de^i = Σ_j B_ij ω_j`.
    pub fn heisenberg(b: &[[f64; 3]; 3]) -> Self {
        let s = Splitting::standard();
        let omegas: Vec<Form> = (1..=3).map(|j| s.omega_i(j)).collect();
        let mut c = [[[0.0; 7]; 7]; 7];
        for i in 0..3 {
            for a in 3..7 {
                for bb in 3..7 {
                    let mut v = 0.0;
                    for (j, w) in omegas.iter().enumerate() {
                        v -= b[i][j] * w.coeff(&[a + 1, bb + 1]);
                    }
                    c[a][bb][i] = v;
                }
            }
        }
        let name = format!(
            "heisenberg:B=[[{}],[{}],[{}]]",
            join(&b[0]),
            join(&b[1]),
            join(&b[2])
        );
        Self::new(name, c).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constants(&self) -> &Constants {
        &self.c
    }

    pub fn splitting(&self) -> &Splitting {
        &self.splitting
    }

    /// `de^k` for the coframe element `k` (1-based).
    pub fn d_coframe(&self, k: usize) -> &Form {
        &self.d1[k - 1]
    }

    /// The CE differential of a form on the invariant coframe.
    pub fn d(&self, a: &Form) -> Form {
        let mut out = Form::zero(7, (a.degree() + 1).min(7));
        if a.degree() == 7 {
            return out;
        }
        for (idx, coeff) in a.terms() {
            for (pos, &k) in idx.iter().enumerate() {
                let dk = &self.d1[k - 1];
                if dk.is_zero() {
                    continue;
                }
                let mut term = Form::scalar(7, coeff * if pos % 2 == 0 { 1.0 } else { -1.0 });
                for (p2, &m) in idx.iter().enumerate() {
                    let factor = if p2 == pos {
                        dk.clone()
                    } else {
                        Form::monomial(7, &[m], 1.0)
                    };
                    term = exterior::wedge(&term, &factor).unwrap();
                }
                out += &term;
            }
        }
        out
    }

    pub fn closedness(&self) -> ClosednessFlags {
        let s = &self.splitting;
        let r = |f: &Form| self.d(f).max_abs();
        let d_lambda = r(s.lambda());
        let d_omega = r(s.omega());
        ClosednessFlags {
            d_lambda,
            d_omega,
            d_theta: r(s.theta()),
            d_mu: r(s.mu()),
            d_phi: r(s.phi()),
            d_star_phi: r(s.star_phi()),
            d_omega_i: [r(&s.omega_i(1)), r(&s.omega_i(2)), r(&s.omega_i(3))],
        }
    }

    /// Splits `da` into the parts `(F_H, d_H, d_V, F_V)` that shift the
    /// vertical degree by `−1, 0, +1, +2`.
    pub fn derivative_type_split(&self, a: &Form) -> TypeSplit {
        let mut out = TypeSplit {
            f_h: Form::zero(7, (a.degree() + 1).min(7)),
            d_h: Form::zero(7, (a.degree() + 1).min(7)),
            d_v: Form::zero(7, (a.degree() + 1).min(7)),
            f_v: Form::zero(7, (a.degree() + 1).min(7)),
        };
        for q in 0..=a.degree().min(4) {
            let part = a.filter_terms(|idx| vertical_count(idx) == q);
            if part.is_zero() {
                continue;
            }
            let d = self.d(&part);
            out.f_h += &d.filter_terms(|idx| vertical_count(idx) + 1 == q);
            out.d_h += &d.filter_terms(|idx| vertical_count(idx) == q);
            out.d_v += &d.filter_terms(|idx| vertical_count(idx) == q + 1);
            out.f_v += &d.filter_terms(|idx| vertical_count(idx) == q + 2);
        }
        out
    }

    /// True when some bracket of two vertical frame vectors has a
    /// horizontal component, i.e. `V` is not involutive.
    pub fn vertical_bracket_has_horizontal_part(&self) -> bool {
        (3..7).any(|a| (3..7).any(|b| (0..3).any(|i| self.c[a][b][i] != 0.0)))
    }
}

fn join(row: &[f64; 3]) -> String {
    row.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

/// `max |Σ_l (c_ij^l c_lk^m + c_jk^l c_li^m + c_ki^l c_lj^m)|`.
pub fn jacobi_check(c: &Constants) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            for k in 0..7 {
                for m in 0..7 {
                    let mut s = 0.0;
                    for l in 0..7 {
                        s += c[i][j][l] * c[l][k][m] + c[j][k][l] * c[l][i][m] + c[k][i][l] * c[l][j][m];
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Max-abs coefficients of the differentials of the distinguished forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosednessFlags {
    pub d_lambda: f64,
    pub d_omega: f64,
    pub d_theta: f64,
    pub d_mu: f64,
    pub d_phi: f64,
    pub d_star_phi: f64,
    pub d_omega_i: [f64; 3],
}

impl ClosednessFlags {
    pub fn closed(x: f64) -> bool {
        x == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeSplit {
    pub f_h: Form,
    pub d_h: Form,
    pub d_v: Form,
    pub f_v: Form,
}

impl TypeSplit {
    pub fn sum(&self) -> Form {
        &(&self.f_h + &self.d_h) + &(&self.d_v + &self.f_v)
    }
}

/// Parses `a,b,c;d,e,f;g,h,i` or `[[a,b,c],[d,e,f],[g,h,i]]`.
pub fn parse_matrix3(text: &str) -> Result<[[f64; 3]; 3], ModelError> {
    let bad = |why: &str| ModelError::BadMatrix(text.to_string(), why.to_string());
    let cleaned = text.trim().trim_start_matches("[[").trim_end_matches("]]");
    let rows: Vec<&str> = if cleaned.contains(';') {
        cleaned.split(';').collect()
    } else {
        cleaned.split("],[").collect()
    };
    if rows.len() != 3 {
        return Err(bad("expected 3 rows"));
    }
    let mut out = [[0.0; 3]; 3];
    for (i, row) in rows.iter().enumerate() {
        let vals: Vec<&str> = row.split(',').map(str::trim).collect();
        if vals.len() != 3 {
            return Err(bad("expected 3 columns"));
        }
        for (j, v) in vals.iter().enumerate() {
            out[i][j] = v.parse().map_err(|_| bad("not a number"))?;
        }
    }
    Ok(out)
}

/// Looks up `product-flat`, `su2-semidirect` or `heisenberg:B=<matrix>`.
pub fn catalog(name: &str) -> Result<LieAlgebraModel, ModelError> {
    match name {
        "product-flat" => Ok(LieAlgebraModel::product_flat()),
        "su2-semidirect" => Ok(LieAlgebraModel::su2_semidirect()),
        _ => {
            if let Some(rest) = name.strip_prefix("heisenberg:B=") {
                Ok(LieAlgebraModel::heisenberg(&parse_matrix3(rest)?))
            } else if name == "heisenberg" {
                Ok(LieAlgebraModel::heisenberg(&[[0.0; 3]; 3]))
            } else {
                Err(ModelError::UnknownModel(name.to_string()))
            }
        }
    }
}

/// Smith normal form over the integers: `U · A · V = D` with `U`, `V`
/// unimodular and `D` diagonal, `d_1 | d_2 | …`, entries nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct SmithForm {
    pub u: Vec<Vec<i128>>,
    pub d: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.d.len().min(self.d[0].len())).map(|i| self.d[i][i]).collect()
    }
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn smith_normal_form(a: &[Vec<i64>]) -> SmithForm {
    let n = a.len();
    let m = a[0].len();
    let mut d: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u = identity(n);
    let mut v = identity(m);

    let swap_rows = |d: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        d.swap(i, j);
        u.swap(i, j);
    };
    let swap_cols = |d: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in d.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // row_i -= q * row_j
    let row_op = |d: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, i: usize, j: usize, q: i128| {
        for c in 0..d[0].len() {
            d[i][c] -= q * d[j][c];
        }
        for c in 0..u[0].len() {
            u[i][c] -= q * u[j][c];
        }
    };
    // col_i -= q * col_j
    let col_op = |d: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, i: usize, j: usize, q: i128| {
        for r in d.iter_mut() {
            r[i] -= q * r[j];
        }
        for r in v.iter_mut() {
            r[i] -= q * r[j];
        }
    };

    for t in 0..n.min(m) {
        loop {
            // pivot: smallest nonzero |entry| in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..m {
                    if d[i][j] != 0 && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            swap_rows(&mut d, &mut u, t, pi);
            swap_cols(&mut d, &mut v, t, pj);
            let mut clean = true;
            for i in (t + 1)..n {
                let q = d[i][t].div_euclid(d[t][t]);
                row_op(&mut d, &mut u, i, t, q);
                if d[i][t] != 0 {
                    clean = false;
                }
            }
            for j in (t + 1)..m {
                let q = d[t][j].div_euclid(d[t][t]);
                col_op(&mut d, &mut v, j, t, q);
                if d[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold a non-multiple entry into row t
            let mut fixed = true;
            'outer: for i in (t + 1)..n {
                for j in (t + 1)..m {
                    if d[i][j] % d[t][t] != 0 {
                        row_op(&mut d, &mut u, t, i, -1);
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if t < n && t < m && d[t][t] < 0 {
            for c in 0..m {
                d[t][c] = -d[t][c];
            }
            for c in 0..n {
                u[t][c] = -u[t][c];
            }
        }
    }
    SmithForm { u, d, v }
}

/// `H_1 = Z^free ⊕ Z/t_1 ⊕ …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<i128>,
}

impl AbelianGroup {
    pub fn torsion_order(&self) -> i128 {
        self.torsion.iter().product()
    }

    pub fn describe(&self) -> String {
        let mut parts = vec![format!("Z^{}", self.free_rank)];
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        parts.join(" + ")
    }
}

/// First homology of the nilmanifold `M_B`: `Z^4 ⊕ Z^3 / B Z^3`.
pub fn h1_nilmanifold(b: &[[i64; 3]; 3]) -> Result<AbelianGroup, ModelError> {
    for row in b {
        for &x in row {
            if x % 2 != 0 {
                return Err(ModelError::OddEntry(x));
            }
        }
    }
    let snf = smith_normal_form(&b.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let diag = snf.diagonal();
    let zeros = diag.iter().filter(|&&x| x == 0).count();
    Ok(AbelianGroup {
        free_rank: 4 + zeros,
        torsion: diag.into_iter().filter(|&x| x > 1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::basis_tuples;

    fn e(idx: &[usize], c: f64) -> Form {
        Form::monomial(7, idx, c)
    }

    fn det3(m: &[Vec<i128>]) -> i128 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        (0..a.len())
            .map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn su2_differentials() {
        let m = LieAlgebraModel::su2_semidirect();
        assert_eq!(jacobi_check(m.constants()), 0.0);
        assert_eq!(m.d_coframe(1), &e(&[2, 3], -2.0));
        let de4 = -(e(&[1, 6], 1.0) + e(&[2, 7], -1.0) + e(&[3, 5], -1.0));
        assert_eq!(m.d_coframe(4), &de4);
        let de5 = -(e(&[1, 7], 1.0) + e(&[2, 6], 1.0) + e(&[3, 4], 1.0));
        assert_eq!(m.d_coframe(5), &de5);
        let de6 = -(e(&[1, 4], -1.0) + e(&[2, 5], -1.0) + e(&[3, 7], 1.0));
        assert_eq!(m.d_coframe(6), &de6);
        let de7 = -(e(&[1, 5], -1.0) + e(&[2, 4], 1.0) + e(&[3, 6], -1.0));
        assert_eq!(m.d_coframe(7), &de7);
        let s = m.splitting();
        let w = |i| s.omega_i(i);
        let expected = exterior::wedge(&e(&[2, 3], -2.0), &w(1)).unwrap()
            + exterior::wedge(&e(&[1, 3], 2.0), &w(2)).unwrap()
            + exterior::wedge(&e(&[1, 2], -2.0), &w(3)).unwrap();
        assert_eq!(m.d(s.omega()), expected);
        let f = m.closedness();
        assert_eq!((f.d_lambda, f.d_theta, f.d_mu, f.d_star_phi), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(f.d_omega_i, [0.0; 3]);
        assert!(f.d_omega > 0.0 && f.d_phi > 0.0);
    }

    #[test]
    fn jacobi_detects_a_sign_flip() {
        let mut c = *LieAlgebraModel::su2_semidirect().constants();
        c[1][2][0] = -2.0;
        c[2][1][0] = 2.0;
        assert!(jacobi_check(&c) > 0.0);
    }

    #[test]
    fn d_squared_vanishes() {
        let b = [[2.0, -4.0, 0.0], [6.0, 2.0, 2.0], [0.0, 8.0, -4.0]];
        for m in [LieAlgebraModel::su2_semidirect(), LieAlgebraModel::heisenberg(&b), LieAlgebraModel::product_flat()] {
            assert_eq!(jacobi_check(m.constants()), 0.0);
            for k in 1..=2 {
                for idx in basis_tuples(7, k) {
                    assert!(m.d(&m.d(&e(&idx, 1.0))).is_zero(), "{} {:?}", m.name(), idx);
                }
            }
        }
    }

    #[test]
    fn leibniz_rule() {
        let m = LieAlgebraModel::su2_semidirect();
        let a = e(&[1, 5], 1.0) + e(&[3, 4], -2.0);
        let b = e(&[2], 1.0) + e(&[6], 3.0);
        let lhs = m.d(&exterior::wedge(&a, &b).unwrap());
        let rhs = exterior::wedge(&m.d(&a), &b).unwrap() + exterior::wedge(&a, &m.d(&b)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn heisenberg_structure() {
        let b = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]];
        let m = LieAlgebraModel::heisenberg(&b);
        let s = m.splitting();
        for i in 0..3 {
            let mut expected = Form::zero(7, 2);
            for j in 0..3 {
                expected += &s.omega_i(j + 1).scale(b[i][j]);
            }
            assert_eq!(m.d_coframe(i + 1), &expected);
        }
        for a in 4..=7 {
            assert!(m.d_coframe(a).is_zero());
        }
        let split = m.derivative_type_split(s.lambda());
        assert!(split.f_h.is_zero() && split.d_h.is_zero() && split.d_v.is_zero());
        assert_eq!(split.f_v, m.d(s.lambda()));
        assert!(m.vertical_bracket_has_horizontal_part());
        assert!(!LieAlgebraModel::su2_semidirect().vertical_bracket_has_horizontal_part());
    }

    #[test]
    fn heisenberg_flags() {
        let m = LieAlgebraModel::heisenberg(&[[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -4.0]]);
        let f = m.closedness();
        assert_eq!((f.d_omega, f.d_theta), (0.0, 0.0));
        assert!(f.d_lambda > 0.0 && f.d_phi > 0.0);
        for n in 1..5 {
            let nf = n as f64;
            let m = LieAlgebraModel::heisenberg(&[[2.0 * nf, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -2.0 * nf - 2.0]]);
            assert_eq!(m.closedness().d_omega, 0.0);
        }
        let f = LieAlgebraModel::heisenberg(&[[0.0; 3]; 3]).closedness();
        assert_eq!((f.d_lambda, f.d_omega, f.d_phi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn flat_model_is_closed() {
        let m = LieAlgebraModel::product_flat();
        let f = m.closedness();
        assert_eq!(f.d_phi + f.d_theta + f.d_star_phi, 0.0);
        let s = m.splitting();
        // ω written with the hyperkähler triple (ω1, ω2, η47 + η56)
        let hk3 = e(&[4, 7], 1.0) + e(&[5, 6], 1.0);
        let layout = exterior::wedge(&e(&[1], 1.0), &s.omega_i(1)).unwrap()
            + exterior::wedge(&e(&[2], 1.0), &s.omega_i(2)).unwrap()
            - exterior::wedge(&e(&[3], 1.0), &hk3).unwrap();
        assert_eq!(&layout, s.omega());
        let split = m.derivative_type_split(s.phi());
        assert!(split.sum().is_zero());
    }

    #[test]
    fn type_split_sums_to_differential() {
        let m = LieAlgebraModel::su2_semidirect();
        let s = m.splitting();
        let split = m.derivative_type_split(s.theta());
        assert!(split.d_h.is_zero() && split.d_v.is_zero() && split.f_v.is_zero());
        let mixed = s.phi().clone();
        assert_eq!(m.derivative_type_split(&mixed).sum(), m.d(&mixed));
    }

    #[test]
    fn smith_form_properties() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let snf = smith_normal_form(&a);
        let a128: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        assert_eq!(matmul(&matmul(&snf.u, &a128), &snf.v), snf.d);
        assert_eq!(det3(&snf.u).abs(), 1);
        assert_eq!(det3(&snf.v).abs(), 1);
        assert_eq!(snf.diagonal(), vec![2, 6, 12]);
    }

    #[test]
    fn homology_examples() {
        let h = h1_nilmanifold(&[[2, 0, 0], [0, 2, 0], [0, 0, -4]]).unwrap();
        assert_eq!(h, AbelianGroup { free_rank: 4, torsion: vec![2, 2, 4] });
        assert_eq!(h.describe(), "Z^4 + Z/2 + Z/2 + Z/4");
        assert_eq!(h1_nilmanifold(&[[0; 3]; 3]).unwrap().free_rank, 7);
        let h = h1_nilmanifold(&[[6, 0, 0], [0, 0, 0], [0, 0, 0]]).unwrap();
        assert_eq!(h, AbelianGroup { free_rank: 6, torsion: vec![6] });
        assert!(matches!(h1_nilmanifold(&[[1, 0, 0], [0, 0, 0], [0, 0, 0]]), Err(ModelError::OddEntry(1))));
    }

    #[test]
    fn catalog_lookup() {
        assert_eq!(catalog("product-flat").unwrap().name(), "product-flat");
        let m = catalog("heisenberg:B=[[2,0,0],[0,2,0],[0,0,-4]]").unwrap();
        assert_eq!(m.closedness().d_omega, 0.0);
        assert_eq!(parse_matrix3("2,0,0;0,2,0;0,0,-4").unwrap()[2][2], -4.0);
        assert!(catalog("nope").is_err());
    }
}
