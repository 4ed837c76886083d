//! Real exterior algebra over `R^n` (3 <= n <= 8) with the standard
//! orthonormal metric and orientation `dx{1..n}`.
//!
//! A [`Form`] stores its coefficients sparsely, keyed by the set of indices of
//! each monomial. Public index APIs are 1-based so that `dx{145}` is written
//! `&[1, 4, 5]`; vectors are plain 0-based coordinate slices.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use thiserror::Error;

/// Smallest supported ambient dimension.
pub const MIN_DIM: usize = 1;
/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;
/// Default tolerance for [`Form::approx_eq`].
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExteriorError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("unsupported ambient dimension {0}")]
    UnsupportedDimension(usize),
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("expected {expected} vectors, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("cannot parse form: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, ExteriorError>;

/// Bitmask of a monomial; bit `i` set means `dx{i+1}` is a factor.
type Mask = u16;

fn mask_indices(mask: Mask) -> impl Iterator<Item = usize> {
    (0..MAX_DIM).filter(move |i| mask & (1 << i) != 0)
}

/// Sign of `dx^a ∧ dx^b` relative to the sorted monomial `dx^{a∪b}`,
/// assuming `a` and `b` are disjoint.
fn merge_sign(a: Mask, b: Mask) -> f64 {
    let mut swaps = 0u32;
    for j in mask_indices(b) {
        // factors of `a` with larger index must be moved past dx^j
        swaps += (a >> (j + 1)).count_ones();
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Parity of the permutation sorting `idx` (0 for even). `None` on repeats.
pub fn permutation_sign(idx: &[usize]) -> Option<f64> {
    let mut inversions = 0usize;
    for i in 0..idx.len() {
        for j in (i + 1)..idx.len() {
            if idx[i] == idx[j] {
                return None;
            }
            if idx[i] > idx[j] {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Real alternating `k`-form on `R^n`.
#[derive(Clone, PartialEq)]
pub struct Form {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Mask, f64>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(
            (MIN_DIM..=MAX_DIM).contains(&dim),
            "unsupported ambient dimension {dim}"
        );
        assert!(degree <= dim, "degree {degree} exceeds dimension {dim}");
        Form {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut f = Form::zero(dim, 0);
        f.add_term(0, c);
        f
    }

    /// The volume form `dx{1..n}`.
    pub fn volume(dim: usize) -> Self {
        let idx: Vec<usize> = (1..=dim).collect();
        Form::monomial(dim, &idx, 1.0)
    }

    /// `c · dx{idx}`; indices are 1-based and may be unsorted (the
    /// permutation sign is applied). Repeated indices give the zero form.
    pub fn monomial(dim: usize, idx: &[usize], c: f64) -> Self {
        Form::try_monomial(dim, idx, c).expect("invalid monomial")
    }

    pub fn try_monomial(dim: usize, idx: &[usize], c: f64) -> Result<Self> {
        if !(MIN_DIM..=MAX_DIM).contains(&dim) {
            return Err(ExteriorError::UnsupportedDimension(dim));
        }
        for &i in idx {
            if i == 0 || i > dim {
                return Err(ExteriorError::IndexOutOfRange { index: i, dim });
            }
        }
        if idx.len() > dim {
            return Ok(Form::zero(dim, dim));
        }
        let mut f = Form::zero(dim, idx.len());
        if let Some(sign) = permutation_sign(idx) {
            let mask = idx.iter().fold(0 as Mask, |m, &i| m | (1 << (i - 1)));
            f.add_term(mask, sign * c);
        }
        Ok(f)
    }

    /// Builds a form from `(indices, coefficient)` pairs.
    pub fn from_terms<'a, I>(dim: usize, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (&'a [usize], f64)>,
    {
        let mut f = Form::zero(dim, degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "term degree mismatch");
            f += &Form::monomial(dim, idx, c);
        }
        f
    }

    /// The 1-form `Σ a_i dx{i}` with 0-based coefficient slice.
    pub fn one_form(a: &[f64]) -> Self {
        let mut f = Form::zero(a.len(), 1);
        for (i, &c) in a.iter().enumerate() {
            f.add_term(1 << i, c);
        }
        f
    }

    fn add_term(&mut self, mask: Mask, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.coeffs.entry(mask).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.coeffs.remove(&mask);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `dx{idx}` (1-based, any order; sign-adjusted).
    pub fn coeff(&self, idx: &[usize]) -> f64 {
        if idx.len() != self.degree {
            return 0.0;
        }
        let Some(sign) = permutation_sign(idx) else {
            return 0.0;
        };
        let mask = idx.iter().fold(0 as Mask, |m, &i| m | (1 << (i - 1)));
        sign * self.coeffs.get(&mask).copied().unwrap_or(0.0)
    }

    /// Terms as (sorted 1-based index tuple, coefficient), in lexicographic
    /// order of the tuples.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out: Vec<(Vec<usize>, f64)> = self
            .coeffs
            .iter()
            .map(|(&m, &c)| (mask_indices(m).map(|i| i + 1).collect(), c))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Coefficients over all sorted index tuples of this degree, in
    /// lexicographic order. Useful for treating `Λ^k` as `R^N`.
    pub fn dense(&self) -> Vec<f64> {
        basis_tuples(self.dim, self.degree)
            .iter()
            .map(|t| self.coeff(t))
            .collect()
    }

    pub fn from_dense(dim: usize, degree: usize, values: &[f64]) -> Self {
        let tuples = basis_tuples(dim, degree);
        assert_eq!(tuples.len(), values.len());
        let mut f = Form::zero(dim, degree);
        for (t, &c) in tuples.iter().zip(values) {
            f += &Form::monomial(dim, t, c);
        }
        f
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut f = Form::zero(self.dim, self.degree);
        for (&m, &v) in &self.coeffs {
            f.add_term(m, c * v);
        }
        f
    }

    /// Drops coefficients with `|c| <= tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let mut f = self.clone();
        f.coeffs.retain(|_, c| c.abs() > tol);
        f
    }

    /// Keeps only the monomials for which `keep(indices)` is true.
    pub fn filter_terms<F: Fn(&[usize]) -> bool>(&self, keep: F) -> Self {
        let mut f = Form::zero(self.dim, self.degree);
        for (&m, &c) in &self.coeffs {
            let idx: Vec<usize> = mask_indices(m).map(|i| i + 1).collect();
            if keep(&idx) {
                f.add_term(m, c);
            }
        }
        f
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Equality within `tol` on every coefficient.
    pub fn approx_eq(&self, other: &Form, tol: f64) -> bool {
        self.dim == other.dim
            && self.degree == other.degree
            && (self - other).max_abs() <= tol
    }

    fn check_same_space(&self, other: &Form) -> Result<()> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch(self.dim, other.dim));
        }
        if self.degree != other.degree {
            return Err(ExteriorError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    /// Canonical text rendering: `+c·dx{i…}` terms sorted lexicographically
    /// by index tuple; the zero form renders as `0`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms()
            .iter()
            .map(|(idx, c)| {
                let sign = if *c < 0.0 { '-' } else { '+' };
                let body: String = idx.iter().map(|i| i.to_string()).collect();
                format!("{sign}{}·dx{{{body}}}", c.abs())
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Inverse of [`Form::render`].
    pub fn parse(dim: usize, degree: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        let mut f = Form::zero(dim, degree);
        if text == "0" {
            return Ok(f);
        }
        for tok in text.split_whitespace() {
            let (sign, rest) = match tok.chars().next() {
                Some('+') => (1.0, &tok[1..]),
                Some('-') => (-1.0, &tok[1..]),
                _ => return Err(ExteriorError::Parse(tok.to_string())),
            };
            let (num, mono) = rest
                .split_once("·dx{")
                .ok_or_else(|| ExteriorError::Parse(tok.to_string()))?;
            let mono = mono
                .strip_suffix('}')
                .ok_or_else(|| ExteriorError::Parse(tok.to_string()))?;
            let c: f64 = num
                .parse()
                .map_err(|_| ExteriorError::Parse(tok.to_string()))?;
            let idx: Vec<usize> = mono
                .chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| ExteriorError::Parse(tok.to_string()))
                })
                .collect::<Result<_>>()?;
            if idx.len() != degree {
                return Err(ExteriorError::DegreeMismatch(idx.len(), degree));
            }
            f += &Form::try_monomial(dim, &idx, sign * c)?;
        }
        Ok(f)
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[n={}, k={}]({})", self.dim, self.degree, self.render())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl AddAssign<&Form> for Form {
    fn add_assign(&mut self, rhs: &Form) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in addition");
        assert_eq!(self.degree, rhs.degree, "degree mismatch in addition");
        for (&m, &c) in &rhs.coeffs {
            self.add_term(m, c);
        }
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        let mut f = self.clone();
        f += rhs;
        f
    }
}

impl Add for Form {
    type Output = Form;
    fn add(mut self, rhs: Form) -> Form {
        self += &rhs;
        self
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        let mut f = self.clone();
        f += &rhs.scale(-1.0);
        f
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        &self - &rhs
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(-1.0)
    }
}

impl Mul<&Form> for f64 {
    type Output = Form;
    fn mul(self, rhs: &Form) -> Form {
        rhs.scale(self)
    }
}

impl Mul<Form> for f64 {
    type Output = Form;
    fn mul(self, rhs: Form) -> Form {
        rhs.scale(self)
    }
}

/// All strictly increasing 1-based `k`-tuples over `1..=n`, lexicographic.
pub fn basis_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exterior product. If the degrees add up past `n` the zero top-degree form
/// is returned.
pub fn wedge(a: &Form, b: &Form) -> Result<Form> {
    if a.dim != b.dim {
        return Err(ExteriorError::DimensionMismatch(a.dim, b.dim));
    }
    let degree = (a.degree + b.degree).min(a.dim);
    let mut out = Form::zero(a.dim, degree);
    if a.degree + b.degree > a.dim {
        return Ok(out);
    }
    for (&ma, &ca) in &a.coeffs {
        for (&mb, &cb) in &b.coeffs {
            if ma & mb == 0 {
                out.add_term(ma | mb, merge_sign(ma, mb) * ca * cb);
            }
        }
    }
    Ok(out)
}

/// Wedge of several forms, left to right.
pub fn wedge_all(forms: &[&Form]) -> Result<Form> {
    let (first, rest) = forms.split_first().expect("wedge_all of nothing");
    rest.iter().try_fold((*first).clone(), |acc, f| wedge(&acc, f))
}

/// Hodge star for the standard metric and orientation: `a ∧ *b = <a,b> vol`.
pub fn hodge(a: &Form) -> Form {
    let full: Mask = ((1u32 << a.dim) - 1) as Mask;
    let mut out = Form::zero(a.dim, a.dim - a.degree);
    for (&m, &c) in &a.coeffs {
        let comp = full & !m;
        out.add_term(comp, merge_sign(m, comp) * c);
    }
    out
}

/// Interior product `i(v) a`. Degree-0 input gives the zero 0-form.
pub fn interior(v: &[f64], a: &Form) -> Result<Form> {
    if v.len() != a.dim {
        return Err(ExteriorError::VectorLength {
            expected: a.dim,
            got: v.len(),
        });
    }
    if a.degree == 0 {
        return Ok(Form::zero(a.dim, 0));
    }
    let mut out = Form::zero(a.dim, a.degree - 1);
    for (&m, &c) in &a.coeffs {
        for (pos, i) in mask_indices(m).enumerate() {
            if v[i] != 0.0 {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                out.add_term(m & !(1 << i), sign * v[i] * c);
            }
        }
    }
    Ok(out)
}

/// Pointwise inner product in which the monomials are orthonormal.
pub fn inner(a: &Form, b: &Form) -> Result<f64> {
    a.check_same_space(b)?;
    Ok(a.coeffs
        .iter()
        .map(|(m, c)| c * b.coeffs.get(m).copied().unwrap_or(0.0))
        .sum())
}

/// Pullback by a linear map `A: R^n -> R^n`, i.e. `(A^*a)(v..) = a(Av, ..)`.
pub fn pullback(map: &DMatrix<f64>, a: &Form) -> Result<Form> {
    let n = a.dim;
    if map.nrows() != n || map.ncols() != n {
        return Err(ExteriorError::DimensionMismatch(map.nrows(), n));
    }
    // A^* dx^i = Σ_j A_ij dx^j
    let pulled: Vec<Form> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..n).map(|j| map[(i, j)]).collect();
            Form::one_form(&row)
        })
        .collect();
    let mut out = Form::zero(n, a.degree);
    for (&m, &c) in &a.coeffs {
        let mut term = Form::scalar(n, c);
        for i in mask_indices(m) {
            term = wedge(&term, &pulled[i])?;
        }
        out += &term;
    }
    Ok(out)
}

/// Evaluates `a(v_1, …, v_k)`.
pub fn evaluate(a: &Form, vectors: &[&[f64]]) -> Result<f64> {
    if vectors.len() != a.degree {
        return Err(ExteriorError::Arity {
            expected: a.degree,
            got: vectors.len(),
        });
    }
    for v in vectors {
        if v.len() != a.dim {
            return Err(ExteriorError::VectorLength {
                expected: a.dim,
                got: v.len(),
            });
        }
    }
    let k = a.degree;
    let mut total = 0.0;
    let mut rows = [0usize; MAX_DIM];
    for (&m, &c) in &a.coeffs {
        for (slot, i) in mask_indices(m).enumerate() {
            rows[slot] = i;
        }
        let at = |r: usize, s: usize| vectors[s][rows[r]];
        let minor = match k {
            0 => 1.0,
            1 => at(0, 0),
            2 => at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0),
            3 => {
                at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
                    - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
                    + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0))
            }
            _ => DMatrix::from_fn(k, k, at).determinant(),
        };
        total += c * minor;
    }
    Ok(total)
}

/// Form-valued object with values in `R^m`: one component form per value
/// coordinate, all of the same degree and ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorValuedForm {
    components: Vec<Form>,
}

impl VectorValuedForm {
    pub fn new(components: Vec<Form>) -> Result<Self> {
        if let Some(first) = components.first() {
            for c in &components[1..] {
                first.check_same_space(c)?;
            }
        }
        Ok(VectorValuedForm { components })
    }

    pub fn components(&self) -> &[Form] {
        &self.components
    }

    pub fn value_dim(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self) -> usize {
        self.components.first().map_or(0, Form::degree)
    }

    pub fn map<F: Fn(&Form) -> Form>(&self, f: F) -> Self {
        VectorValuedForm {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn evaluate(&self, vectors: &[&[f64]]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| evaluate(c, vectors)).collect()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.components.len() == other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}
