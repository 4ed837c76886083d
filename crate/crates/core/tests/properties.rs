use nalgebra::{DVector, Matrix4, Vector4};
use proptest::prelude::*;

use g2fueter::exterior::{basis_tuples, hodge, inner, interior, wedge, Form};
use g2fueter::fm;
use g2fueter::fueter::{self, chi_direct, chi_via_beta, fueter_via_j, fueter_vector, JTriple};
use g2fueter::g2::{G2Structure, Vec7};
use g2fueter::models::{jacobi_check, smith_normal_form, LieAlgebraModel};
use g2fueter::pde::{self, AnalyticMap};
use g2fueter::splitting::{self, vertical_parts, GraphPlane, Mat34, Plane, Splitting};

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

fn form(k: usize) -> impl Strategy<Value = Form> {
    coeffs(basis_tuples(7, k).len()).prop_map(move |c| Form::from_dense(7, k, &c))
}

fn any_form() -> impl Strategy<Value = Form> {
    (0usize..=7).prop_flat_map(form)
}

fn vec7() -> impl Strategy<Value = Vec7> {
    coeffs(7).prop_map(Vec7::from_vec)
}

fn graph() -> impl Strategy<Value = GraphPlane> {
    coeffs(12).prop_map(|c| GraphPlane::new(Mat34::from_vec(c)))
}

fn monomial() -> impl Strategy<Value = Form> {
    (1usize..=4, any::<u32>(), -5.0..5.0f64).prop_map(|(k, pick, c)| {
        let all = basis_tuples(7, k);
        Form::monomial(7, &all[pick as usize % all.len()], c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wedge_is_graded_commutative(a in monomial(), b in monomial()) {
        let sign = if a.degree() * b.degree() % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(wedge(&a, &b).unwrap(), wedge(&b, &a).unwrap().scale(sign));
    }

    #[test]
    fn hodge_is_an_involution(a in any_form()) {
        prop_assert!((&hodge(&hodge(&a)) - &a).max_abs() < 1e-14);
    }

    #[test]
    fn inner_product_through_hodge(k in 0usize..=7, seed in any::<u64>()) {
        let mut r = g2fueter::rng::stream(seed, 0);
        let n = basis_tuples(7, k).len();
        let a = Form::from_dense(7, k, &g2fueter::rng::normals(&mut r, n));
        let b = Form::from_dense(7, k, &g2fueter::rng::normals(&mut r, n));
        let lhs = Form::volume(7).scale(inner(&a, &b).unwrap());
        prop_assert!((&lhs - &wedge(&a, &hodge(&b)).unwrap()).max_abs() < 1e-12);
    }

    #[test]
    fn interior_is_an_antiderivation(a in form(2), b in form(3), v in coeffs(7)) {
        let lhs = interior(&v, &wedge(&a, &b).unwrap()).unwrap();
        let rhs = wedge(&interior(&v, &a).unwrap(), &b).unwrap() + wedge(&a, &interior(&v, &b).unwrap()).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn render_parse_roundtrip(a in form(3)) {
        prop_assert_eq!(Form::parse(7, 3, &a.render()).unwrap(), a);
    }

    #[test]
    fn cross_product_is_a_contraction(u in vec7(), v in vec7()) {
        let g = G2Structure::standard();
        let c = interior(v.as_slice(), &interior(u.as_slice(), g.phi()).unwrap()).unwrap();
        let via = g.sharp(&c);
        prop_assert!((g.cross(&u, &v) - via).amax() < 1e-12);
    }

    #[test]
    fn double_cross(u in vec7(), v in vec7()) {
        prop_assume!(u.norm() > 1e-3);
        let g = G2Structure::standard();
        let u = u.normalize();
        let lhs = g.cross(&u, &g.cross(&u, &v));
        let rhs = -v + u * g.dot(&u, &v);
        prop_assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn chi_vanishes_on_associative_completion(u in vec7(), v in vec7()) {
        let g = G2Structure::standard();
        prop_assume!(g.gram_det(&[u, v]) > 1e-3);
        let w = g.cross(&u, &v);
        prop_assert!(g.chi(&u, &v, &w).amax() < 1e-10 * (1.0 + g.gram_det(&[u, v])));
    }

    #[test]
    fn lambda_is_an_isometry(a in coeffs(7)) {
        let g = G2Structure::standard();
        let alpha = Form::one_form(&a);
        for k in [2, 4, 6] {
            let l = g.lambda(&alpha, k).unwrap();
            prop_assert!((g.norm(&l) - g.norm(&alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn ve_formulas_agree(g in graph()) {
        let a = splitting::ve_series(&g, 3);
        let b = splitting::ve_recursive(&g, 3);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn decomposition_sums_and_grades(a in form(3), eps in 0.01..1.0f64) {
        let s = Splitting::standard();
        let parts = s.decompose_form(&a);
        let mut sum = Form::zero(7, 3);
        for (k, p) in parts.iter().enumerate() {
            for (idx, _) in p.terms() {
                prop_assert_eq!(idx.iter().filter(|&&i| i >= 4).count(), k);
            }
            sum += p;
        }
        prop_assert!((&sum - &a).max_abs() < 1e-15);
        let fam = s.adiabatic_family(s.phi(), eps).unwrap();
        prop_assert!(vertical_parts(&fam)[2].approx_eq(&s.omega().scale(eps), 1e-15));
    }

    #[test]
    fn horizontal_volume_is_at_most_volume(g in graph()) {
        let s = Splitting::standard();
        let plane = Plane::new(g.frame().to_vec()).unwrap();
        let vh = s.horizontal_volume(&plane).unwrap();
        let v = s.volume(&plane);
        prop_assert!(vh <= v * (1.0 + 1e-12));
        if g.t().amax() > 1e-3 {
            prop_assert!(vh < v);
        }
    }

    #[test]
    fn fueter_routes_agree(g in graph()) {
        let s = Splitting::standard();
        let f = fueter_vector(&s, &g);
        let j = fueter_via_j(&g, &JTriple::standard());
        let via = chi_via_beta(&s, &g);
        let d = chi_direct(&s, &g);
        let c1 = Vector4::from_fn(|a, _| d[0].coeff(&[a + 4]));
        let p = Vector4::from_fn(|a, _| via.chi1_projection.coeff(&[a + 4]));
        prop_assert!((f - j).amax() < 1e-10);
        prop_assert!((f - c1).amax() < 1e-10);
        prop_assert!((f - p).amax() < 1e-10);
        let ident = s.omega_on(&g) + 0.5 * s.chi_parts_on(&g)[1].norm_squared() - 0.5 * g.t().norm_squared();
        prop_assert!(ident.abs() < 1e-10 * (1.0 + g.t().norm_squared()));
    }

    #[test]
    fn chi3_detects_rank_drop(rows in coeffs(8), mix in coeffs(2)) {
        let s = Splitting::standard();
        let r1 = Vector4::from_column_slice(&rows[0..4]);
        let r2 = Vector4::from_column_slice(&rows[4..8]);
        let r3 = r1 * mix[0] + r2 * mix[1];
        let low = GraphPlane::new(Mat34::from_rows(&[r1.transpose(), r2.transpose(), r3.transpose()]));
        prop_assert!(s.chi_parts_on(&low)[3].norm() < 1e-10);
        // on rank ≤ 2 planes Fueter and associative coincide
        let chi = s.chi_parts_on(&low);
        let full: f64 = chi.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();
        prop_assert!((chi[1].norm() < 1e-9) == (full < 1e-9));
    }

    #[test]
    fn completion_is_fueter(seed in any::<u64>(), scale in 0.1..3.0f64) {
        let s = Splitting::standard();
        let g = fueter::random_fueter_plane(&s, seed, 0, scale);
        prop_assert!(fueter_vector(&s, &g).amax() < 1e-10 * (1.0 + scale * scale));
    }

    #[test]
    fn smith_form_is_unimodular(entries in prop::collection::vec(-20i64..20, 9)) {
        let a: Vec<Vec<i64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
        let snf = smith_normal_form(&a);
        let mul = |x: &Vec<Vec<i128>>, y: &Vec<Vec<i128>>| -> Vec<Vec<i128>> {
            (0..3).map(|i| (0..3).map(|j| (0..3).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
        };
        let det = |m: &Vec<Vec<i128>>| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let a128: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        prop_assert_eq!(mul(&mul(&snf.u, &a128), &snf.v), snf.d.clone());
        prop_assert_eq!(det(&snf.u).abs(), 1);
        prop_assert_eq!(det(&snf.v).abs(), 1);
        let d = snf.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[0] == 0 && w[1] == 0 || w[0] != 0 && w[1] % w[0] == 0);
        }
    }

    #[test]
    fn heisenberg_flags_are_identities_in_b(b in prop::collection::vec(-4i32..4, 9)) {
        let m: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| b[3 * i + j] as f64));
        let model = LieAlgebraModel::heisenberg(&m);
        prop_assert_eq!(jacobi_check(model.constants()), 0.0);
        let s = model.splitting();
        let tr = m[0][0] + m[1][1] + m[2][2];
        prop_assert_eq!(model.d(s.omega()), s.mu().scale(2.0 * tr));
        let symmetric = (0..3).all(|i| (0..3).all(|j| m[i][j] == m[j][i]));
        prop_assert_eq!(model.d(s.theta()).is_zero(), symmetric);
        let nonzero = m.iter().flatten().any(|&x| x != 0.0);
        prop_assert_eq!(model.d(s.lambda()).is_zero(), !nonzero);
        for k in 1..=7 {
            prop_assert!(model.d(model.d_coframe(k)).is_zero());
        }
    }

    #[test]
    fn flat_d_squared_is_minus_laplacian(seed in any::<u64>()) {
        let mut r = g2fueter::rng::stream(seed, 0);
        let f = pde::PolynomialMap::random(3, 4, 3, &mut r);
        let x = g2fueter::rng::normals(&mut r, 3);
        prop_assert!(pde::d_squared_residual(&f, &x).unwrap().amax() < 1e-9);
    }

    #[test]
    fn integer_affine_sections(a2 in prop::collection::vec(-3i32..3, 4), a3 in prop::collection::vec(-3i32..3, 4), c in 1i64..4) {
        let v = |x: &Vec<i32>| Vector4::from_iterator(x.iter().map(|&y| y as f64));
        let u = pde::affine_fueter(v(&a2), v(&a3), Vector4::zeros());
        prop_assert!(u.periodicity().is_some());
        prop_assert_eq!(pde::fueter_operator_flat(&u, &[0.3, 0.1, 0.7]), Vector4::zeros());
        prop_assert_eq!(pde::covering_degree(c, 2), (c * c * c) as usize);
    }

    #[test]
    fn heisenberg_operator_matches_flat(seed in any::<u64>()) {
        let mut r = g2fueter::rng::stream(seed, 0);
        let f = pde::PolynomialMap::random(3, 4, 2, &mut r);
        let x = g2fueter::rng::normals(&mut r, 3);
        let m = LieAlgebraModel::heisenberg(&[[1.0, 2.0, 0.0], [0.0, -1.0, 3.0], [2.0, 0.0, 0.0]]);
        prop_assert_eq!(pde::fueter_operator_model(&m, &f, &x), pde::fueter_operator_flat(&f, &x));
    }

    #[test]
    fn energy_identity_pointwise(seed in any::<u64>()) {
        let mut r = g2fueter::rng::stream(seed, 0);
        let w = pde::TrigField::random(&mut r, 1, 0.5, 3);
        let e = pde::immersion_energies(&pde::ImmersionGrid::section(&w, 3)).unwrap();
        prop_assert!(e.max_pointwise_identity_residual < 1e-12);
        prop_assert!((e.total_energy - (1.5 * e.vol_h + e.ve)).abs() < 1e-12);
    }

    #[test]
    fn mirror_residuals_are_proportional(seed in any::<u64>()) {
        let mut r = g2fueter::rng::stream(seed, 0);
        let u = pde::PolynomialMap::random(3, 4, 2, &mut r);
        let x = g2fueter::rng::normals(&mut r, 3);
        let (a, b) = fm::mirror_pair(&u, &x);
        prop_assert!((a - fm::MIRROR_RATIO * b).abs() < 1e-8 * (1.0 + b));
    }

    #[test]
    fn curvature_is_gauge_invariant(seed in any::<u64>(), m in prop::collection::vec(-5i64..5, 4)) {
        let mut r = g2fueter::rng::stream(seed, 0);
        let u = pde::PolynomialMap::random(3, 4, 2, &mut r);
        let x = g2fueter::rng::normals(&mut r, 3);
        let shift = fm::shifted_by_period(&Vector4::zeros(), [m[0], m[1], m[2], m[3]]);
        let shifted = pde::SumMap(vec![
            Box::new(u.clone()),
            Box::new(pde::ConstantMap { vars: 3, value: DVector::from_column_slice(shift.as_slice()) }),
        ]);
        prop_assert_eq!(fm::curvature(&fm::fm_transform(u), &x), fm::curvature(&fm::fm_transform(shifted), &x));
    }
}

#[test]
fn ve1_blows_up_toward_vertical_planes() {
    let s = Splitting::standard();
    let mut last = 0.0;
    for theta in [1.0, 1.4, 1.5, 1.55, 1.57] {
        let mut v1 = Vec7::zeros();
        v1[0] = f64::cos(theta);
        v1[3] = f64::sin(theta);
        let plane = Plane::new(vec![v1, g2fueter::g2::unit(2), g2fueter::g2::unit(3)]).unwrap();
        let g = s.graph_from_plane(&plane).unwrap().graph;
        let ve1 = splitting::ve_series(&g, 1)[1];
        assert!(ve1 > last);
        last = ve1;
    }
    assert!(last > 1e5);
}

#[test]
fn d_squared_vanishes_on_catalog_bases() {
    for m in [
        LieAlgebraModel::product_flat(),
        LieAlgebraModel::su2_semidirect(),
        LieAlgebraModel::heisenberg(&[[2.0, 0.0, 1.0], [0.0, 2.0, 0.0], [0.0, 0.0, -4.0]]),
    ] {
        for k in 1..=2 {
            for idx in basis_tuples(7, k) {
                assert!(m.d(&m.d(&Form::monomial(7, &idx, 1.0))).is_zero());
            }
        }
    }
}

#[test]
fn su2_pin_is_left_invariant_for_linear_maps() {
    // DF for F(p) = M p at h equals Σ J_i M (h X_i)
    let m = Matrix4::new(1.0, 2.0, 0.0, -1.0, 0.0, 1.0, 3.0, 0.0, 2.0, 0.0, 1.0, 1.0, -1.0, 1.0, 0.0, 2.0);
    let f = pde::AffineMap::new(
        nalgebra::DMatrix::from_fn(4, 4, |i, j| m[(i, j)]),
        DVector::zeros(4),
    );
    let h = [0.5, 0.5, 0.5, 0.5];
    let d = pde::su2_fueter_operator(&f, &h);
    let hq = nalgebra::Quaternion::new(h[0], h[1], h[2], h[3]);
    let j = JTriple::standard();
    let mut expected = Vector4::zeros();
    for (i, x) in pde::su2_basis().iter().enumerate() {
        let q = hq * x;
        expected += j.get(i + 1) * (m * Vector4::new(q.w, q.i, q.j, q.k));
    }
    assert!((d - expected).amax() < 1e-14);
    assert_eq!(f.dim_in(), 4);
}
