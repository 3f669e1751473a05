//! Normed spaces on ℝⁿ: descriptors, evaluation, gradients and structural metadata.

pub mod decompose;
pub mod descriptor;
pub mod norms;
pub mod svd;

use serde::Serialize;

pub use decompose::{loglacunary_decompose, Decomposition};
pub use descriptor::{Exponent, Kind, SpaceDescriptor};
pub use norms::Node;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    pub has_gradient: bool,
    pub has_cone_sampler: bool,
    pub has_exact_volume: bool,
    pub is_canonically_positioned: bool,
}

/// A (sub)gradient of the norm. `nonsmooth` marks points where the norm is not
/// differentiable and a selector was used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gradient {
    pub g: Vec<f64>,
    pub nonsmooth: bool,
}

/// An immutable normed space built from a validated descriptor.
#[derive(Debug, Clone)]
pub struct NormedSpace {
    descriptor: SpaceDescriptor,
    node: Node,
    caps: Capabilities,
}

impl NormedSpace {
    pub fn new(descriptor: SpaceDescriptor) -> Result<Self> {
        // Re-validate descriptors assembled in code.
        let v = serde_json::to_value(&descriptor).map_err(|e| Error::input("", e.to_string()))?;
        let descriptor = SpaceDescriptor::from_value(&v)?;
        let node = Node::from_descriptor(&descriptor);
        let sampler = node.has_cone_sampler();
        let caps = Capabilities {
            has_gradient: true,
            has_cone_sampler: sampler,
            has_exact_volume: sampler,
            is_canonically_positioned: node.canonical(),
        };
        Ok(NormedSpace {
            descriptor,
            node,
            caps,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::new(SpaceDescriptor::from_json(s)?)
    }

    pub fn lp(n: usize, p: f64) -> Self {
        let p = if p.is_infinite() {
            Exponent::Inf
        } else {
            Exponent::Finite(p)
        };
        Self::new(SpaceDescriptor::lp(n, p)).expect("valid lp descriptor")
    }

    pub fn descriptor(&self) -> &SpaceDescriptor {
        &self.descriptor
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn dim(&self) -> usize {
        self.descriptor.n
    }

    pub fn capabilities(&self) -> Capabilities {
        self.caps
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::input(
                "/x",
                format!("vector has length {}, space dimension is {}", x.len(), self.dim()),
            ));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("/x", "vector has non-finite entries"));
        }
        Ok(())
    }

    /// ‖x‖_X with a dimension check.
    pub fn norm_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.node.norm(x))
    }

    /// ‖x‖_X without validation, for inner loops.
    #[inline]
    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        self.node.norm(x)
    }

    /// `‖x‖_X ≤ r`.
    #[inline]
    pub fn within(&self, x: &[f64], r: f64) -> bool {
        self.node.within(x, r)
    }

    /// ‖x − y‖_X.
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.node.norm(&d)
    }

    pub fn norm_gradient(&self, x: &[f64]) -> Result<Gradient> {
        self.check_len(x)?;
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::Domain("norm gradient is undefined at the origin".into()));
        }
        let mut g = vec![0.0; x.len()];
        let nonsmooth = self.node.gradient_into(x, &mut g);
        Ok(Gradient { g, nonsmooth })
    }

    /// max ‖x‖_∞ over B_X.
    pub fn linf_radius(&self) -> f64 {
        self.node.linf_radius()
    }

    /// max ‖x‖₂ over B_X; only for canonically positioned spaces.
    pub fn circumradius(&self) -> Result<f64> {
        self.node.l2_radius().ok_or_else(|| {
            Error::unsupported(
                "is_canonically_positioned",
                format!(
                    "{} is not canonically positioned, its Löwner ellipsoid need not be a ball",
                    self.descriptor.kind.as_str()
                ),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_norm_examples() {
        let l3 = NormedSpace::lp(2, 3.0);
        assert!((l3.norm(&[1.0, 1.0]) - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let s1 = NormedSpace::new(SpaceDescriptor::schatten(2, Exponent::Finite(1.0))).unwrap();
        assert!((s1.norm(&[1.0, 0.0, 0.0, 1.0]) - 2.0).abs() < 1e-14);
        assert!(l3.norm_eval(&[1.0]).is_err());
    }

    #[test]
    fn gradient_examples() {
        let l1 = NormedSpace::lp(2, 1.0);
        let g = l1.norm_gradient(&[3.0, -4.0]).unwrap();
        assert_eq!(g.g, vec![1.0, -1.0]);
        assert!(!g.nonsmooth);
        assert!(l1.norm_gradient(&[1.0, 0.0]).unwrap().nonsmooth);
        assert!(matches!(l1.norm_gradient(&[0.0, 0.0]), Err(Error::Domain(_))));
        let linf = NormedSpace::lp(3, f64::INFINITY);
        let g = linf.norm_gradient(&[1.0, -2.0, 2.0]).unwrap();
        assert_eq!(g.g, vec![0.0, -1.0, 0.0]);
        assert!(g.nonsmooth);
    }

    #[test]
    fn circumradius_examples() {
        assert!((NormedSpace::lp(5, 1.0).circumradius().unwrap() - 1.0).abs() < 1e-15);
        assert!((NormedSpace::lp(9, f64::INFINITY).circumradius().unwrap() - 3.0).abs() < 1e-15);
        assert!((NormedSpace::lp(4, 4.0).circumradius().unwrap() - 4f64.powf(0.25)).abs() < 1e-15);
        let ib = NormedSpace::new(SpaceDescriptor::intersect_ball(
            SpaceDescriptor::lp(3, Exponent::Inf),
            1.0,
        ))
        .unwrap();
        assert!(matches!(ib.circumradius(), Err(Error::Unsupported { .. })));
    }
}
