//! Barcode calculus: the Künneth product for ℓ∞-products of spaces, the
//! direct sum for metric gluings (wedge sums), and closed-form barcodes of
//! the model spaces.

use crate::barcode::{reduced_barcode, Barcode, BarcodeError, Interval};

/// Barcode of the ℓ∞-product from the factor barcodes.
///
/// The tensor product of interval modules for `I` and `J` is the interval
/// module of `I ∩ J`, so dimension `k` of the product collects every
/// nonempty `(max(a,c), min(b,d)]` over splits `i + j = k`, as a multiset.
pub fn kunneth_product(b1: &Barcode, b2: &Barcode) -> Result<Barcode, BarcodeError> {
    if b1.field_char() != b2.field_char() {
        return Err(BarcodeError::FieldMismatch(
            b1.field_char(),
            b2.field_char(),
        ));
    }
    let mut out = Vec::new();
    for i in b1.intervals() {
        for j in b2.intervals() {
            let birth = i.birth.max(j.birth);
            let death = i.death.min(j.death);
            if birth < death {
                out.push(Interval::new(i.dim + j.dim, birth, death));
            }
        }
    }
    Ok(Barcode::from_intervals(b1.field_char(), out))
}

/// Barcode of the metric gluing `X ∨ Y` from the factor barcodes: the union
/// of the two reduced barcodes, with the essential component restored.
pub fn wedge_sum(b1: &Barcode, b2: &Barcode) -> Result<Barcode, BarcodeError> {
    if b1.field_char() != b2.field_char() {
        return Err(BarcodeError::FieldMismatch(
            b1.field_char(),
            b2.field_char(),
        ));
    }
    let r1 = reduced_barcode(b1)?;
    let r2 = reduced_barcode(b2)?;
    let mut out: Vec<Interval> = r1.intervals().to_vec();
    out.extend_from_slice(r2.intervals());
    out.push(Interval::new(0, 0.0, f64::INFINITY));
    Ok(Barcode::from_intervals(b1.field_char(), out))
}

/// Closed-form barcode of the geodesic circle of the given radius, holding
/// in every field: `H_{2l+1}` carries the single bar
/// `(2πρl/(2l+1), 2πρ(l+1)/(2l+3)]`, truncated at `l = l_max`.
pub fn oracle_circle(radius: f64, l_max: usize, field_char: u32) -> Result<Barcode, BarcodeError> {
    if !(radius > 0.0) {
        return Err(BarcodeError::InvalidParameter("radius must be > 0".into()));
    }
    let tau = std::f64::consts::TAU;
    let mut out = vec![Interval::new(0, 0.0, f64::INFINITY)];
    for l in 0..=l_max {
        let l = l as f64;
        let birth = tau * radius * l / (2.0 * l + 1.0);
        let death = tau * radius * (l + 1.0) / (2.0 * l + 3.0);
        out.push(Interval::new(2 * l as usize + 1, birth, death));
    }
    Ok(Barcode::from_intervals(field_char, out))
}

/// Closed-form barcode of the unit round sphere in `R^n` with the ℓ∞
/// metric: one bar `(0, 2/√n]` in dimension `n - 1`.
pub fn oracle_linf_sphere(n: usize, field_char: u32) -> Result<Barcode, BarcodeError> {
    if n < 2 {
        return Err(BarcodeError::InvalidParameter(
            "ambient dimension must be >= 2".into(),
        ));
    }
    Ok(Barcode::from_intervals(
        field_char,
        vec![
            Interval::new(0, 0.0, f64::INFINITY),
            Interval::new(n - 1, 0.0, 2.0 / (n as f64).sqrt()),
        ],
    ))
}

/// Closed-form barcode of the boundary of the cube `[-1,1]^n` with the ℓ∞
/// metric: one bar `(0, 2]` in dimension `n - 1`. For `n = 1` the boundary
/// is a two-point space, so the bar lands in dimension 0 next to the
/// essential class.
pub fn oracle_linf_square(n: usize, field_char: u32) -> Barcode {
    assert!(n >= 1, "ambient dimension must be >= 1");
    Barcode::from_intervals(
        field_char,
        vec![
            Interval::new(0, 0.0, f64::INFINITY),
            Interval::new(n - 1, 0.0, 2.0),
        ],
    )
}

/// The bar of the fundamental class of the geodesic `n`-sphere:
/// `(0, arccos(-1/(n+1))]` in dimension `n`, the unique bar of
/// `dgm_n(S^n)` starting at 0. Its length is twice the filling radius.
pub fn oracle_sphere_fundamental(n: usize) -> Interval {
    assert!(n >= 1, "sphere dimension must be >= 1");
    Interval::new(n, 0.0, (-1.0 / (n as f64 + 1.0)).acos())
}
