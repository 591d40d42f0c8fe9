//! Node-indexed scalar fields with the zero-outside-the-domain convention.

use crate::error::{Error, Result};
use crate::geometry::Domain;
use std::ops::Index;

/// Real values at the interior nodes of a [`Domain`]. The field is implicitly
/// zero at every collar node and beyond; the nonlocal operators rely on that
/// convention for all exterior contributions.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: &Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.interior_count() {
            return Err(Error::FieldLength {
                expected: domain.interior_count(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn constant(domain: &Domain, c: f64) -> Self {
        Self {
            values: vec![c; domain.interior_count()],
        }
    }

    pub fn from_fn(domain: &Domain, f: impl Fn(&[f64; 2]) -> f64) -> Result<Self> {
        let values = domain.interior_nodes().iter().map(&f).collect();
        Self::new(domain, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sup_dist(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.values.iter()
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainShape};

    #[test]
    fn rejects_wrong_length_and_non_finite() {
        let d = build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 5, 1.0).unwrap();
        assert!(matches!(
            ScalarField::new(&d, vec![1.0; 4]),
            Err(Error::FieldLength { .. })
        ));
        assert!(matches!(
            ScalarField::new(&d, vec![1.0, f64::NAN, 1.0, 1.0, 1.0]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn norms_and_scaling() {
        let d = build_domain(DomainShape::Interval { a: 0.0, b: 1.0 }, 3, 1.0).unwrap();
        let f = ScalarField::new(&d, vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(f.sup_norm(), 2.0);
        assert_eq!(f.scaled(-2.0).values(), &[-2.0, 4.0, -1.0]);
        assert_eq!(f.sup_dist(&f.scaled(1.0)), 0.0);
    }
}
