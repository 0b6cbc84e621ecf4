//! Dense matrix aliases, small constructors and the text dump formats.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use serde_json::{json, Value};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

/// Scalar types the library computes with: `f64` and `Complex64`.
pub trait Entry: ComplexField<RealField = f64> + Copy {
    /// Full SVD `(U, sigma, V)` with `sigma` nonincreasing.
    fn svd_factors(m: &DMatrix<Self>) -> Option<(DMatrix<Self>, Vec<f64>, DMatrix<Self>)>;
}

impl Entry for f64 {
    fn svd_factors(m: &DMatrix<Self>) -> Option<(DMatrix<Self>, Vec<f64>, DMatrix<Self>)> {
        let svd = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
            .svd()
            .ok()?;
        let sigma = (0..svd.S().dim()).map(|k| svd.S()[k]).collect();
        Some((to_nalgebra(svd.U()), sigma, to_nalgebra(svd.V())))
    }
}

impl Entry for Complex64 {
    fn svd_factors(m: &DMatrix<Self>) -> Option<(DMatrix<Self>, Vec<f64>, DMatrix<Self>)> {
        let svd = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
            .svd()
            .ok()?;
        let sigma = (0..svd.S().dim()).map(|k| svd.S()[k].re).collect();
        Some((to_nalgebra(svd.U()), sigma, to_nalgebra(svd.V())))
    }
}

fn to_nalgebra<T: Entry>(m: faer::MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn max_abs<T: Entry>(m: &DMatrix<T>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.modulus()))
}

pub fn max_abs_slice<T: Entry>(x: &[T]) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.modulus()))
}

/// max |a - b| divided by max |b| (or 1 when `b` vanishes).
pub fn rel_max_diff<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in rel_max_diff");
    let scale = max_abs(b);
    let diff = max_abs(&(a - b));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// ‖a - b‖_F / ‖b‖_F (or the absolute norm when `b` vanishes).
pub fn rel_fro_diff<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in rel_fro_diff");
    let scale = b.norm();
    let diff = (a - b).norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Circulant matrix with `M(i, j) = row[(j - i) mod n]`.
pub fn circulant_from_row<T: Entry>(row: &[T]) -> DMatrix<T> {
    let n = row.len();
    DMatrix::from_fn(n, n, |i, j| row[(j + n - i) % n])
}

/// Row selector Ψ_idx: one row per index, picking that coordinate.
pub fn selector(n: usize, idx: &[usize]) -> RMat {
    let mut m = RMat::zeros(idx.len(), n);
    for (r, &i) in idx.iter().enumerate() {
        m[(r, i)] = 1.0;
    }
    m
}

pub fn indicator(n: usize, set: &[usize]) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for &i in set {
        v[i] = 1.0;
    }
    v
}

pub fn unit(n: usize, i: usize) -> Vec<f64> {
    indicator(n, &[i])
}

/// Columns `cols` of `m`, in order.
pub fn select_columns<T: Entry>(m: &DMatrix<T>, cols: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Rows `rows` of `m`, in order.
pub fn select_rows<T: Entry>(m: &DMatrix<T>, rows: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

pub fn hcat<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.nrows(), b.nrows(), "row mismatch in hcat");
    let mut m = DMatrix::from_element(a.nrows(), a.ncols() + b.ncols(), T::zero());
    m.columns_mut(0, a.ncols()).copy_from(a);
    m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    m
}

pub fn column_vec<T: Entry>(v: &[T]) -> DMatrix<T> {
    DMatrix::from_column_slice(v.len(), 1, v)
}

pub fn matrix_power<T: Entry>(m: &DMatrix<T>, k: usize) -> DMatrix<T> {
    let mut out = DMatrix::<T>::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Formats like C's `%.17g`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mant), sign, exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x))
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn real_csv(m: &RMat) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_g17(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Each complex entry becomes two adjacent columns, re then im.
pub fn complex_csv(m: &CMat) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .flat_map(|j| [format_g17(m[(i, j)].re), format_g17(m[(i, j)].im)])
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn real_json(m: &RMat) -> Value {
    let data: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    json!({"rows": m.nrows(), "cols": m.ncols(), "kind": "real", "data": data})
}

pub fn complex_json(m: &CMat) -> Value {
    let data: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    json!({"rows": m.nrows(), "cols": m.ncols(), "kind": "complex", "data": data})
}
