//! JSON helpers: 17-significant-digit floats and schema metadata.

use serde::Serializer;
use serde_json::{Number, Value};

use crate::gamma_special::ComplexValue;

/// Version tag carried by every report.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// A float as a JSON number with 17 significant digits; non-finite values become null.
pub fn f17(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    text.parse::<Number>().map(Value::Number).unwrap_or(Value::Null)
}

/// Serializes an `f64` through [`f17`].
pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&f17(*x))
}

/// Serializes a slice of `f64` through [`f17`].
pub fn ser_f64_vec<S: Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|v| f17(*v)))
}

/// A matrix as row-major nested arrays of [`f17`] numbers.
pub fn matrix_json(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| f17(m[(i, j)])).collect())).collect())
}

/// Serializes a matrix through [`matrix_json`].
pub fn ser_matrix<S: Serializer>(m: &nalgebra::DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&matrix_json(m))
}

/// A complex value as `{"re": …, "im": …}`.
pub fn complex_json(z: ComplexValue) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("re".into(), f17(z.re));
    m.insert("im".into(), f17(z.im));
    Value::Object(m)
}

/// Serializes a complex value through [`complex_json`].
pub fn ser_complex<S: Serializer>(z: &ComplexValue, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_some(&complex_json(*z))
}

/// Serializes a slice of complex values through [`complex_json`].
pub fn ser_complex_vec<S: Serializer>(z: &[ComplexValue], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(z.iter().map(|v| complex_json(*v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(f17(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(f17(f64::NAN), Value::Null);
        assert_eq!(f17(-2.0).to_string(), "-2.0000000000000000e+0");
    }
}
