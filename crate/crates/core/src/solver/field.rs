use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::qtensor::{Coords5, MaterialConstants, QTensor};

/// A Q-tensor field on a box lattice with spacing h, centred at the origin.
/// Nodes are stored row-major with x slowest: idx = (i·ny + j)·nz + k.
#[derive(Debug, Clone, PartialEq)]
pub struct QField {
    dims: [usize; 3],
    h: f64,
    data: Vec<Coords5>,
    mask: Vec<bool>,
}

impl QField {
    /// Zero field; the outer shell is marked as Dirichlet boundary.
    pub fn new(dims: [usize; 3], h: f64) -> Result<Self> {
        if dims.iter().any(|&n| n < 3) {
            return Err(Error::Domain(format!("need at least 3 nodes per axis, got {dims:?}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("spacing must be positive, got {h}")));
        }
        let n = dims[0] * dims[1] * dims[2];
        let mut field = Self { dims, h, data: vec![Coords5([0.0; 5]); n], mask: vec![false; n] };
        for idx in 0..n {
            let [i, j, k] = field.coords(idx);
            field.mask[idx] = i == 0 || j == 0 || k == 0 || i == dims[0] - 1 || j == dims[1] - 1 || k == dims[2] - 1;
        }
        Ok(field)
    }

    pub fn from_fn(dims: [usize; 3], h: f64, f: impl Fn(&Vector3<f64>) -> QTensor) -> Result<Self> {
        let mut field = Self::new(dims, h)?;
        for idx in 0..field.len() {
            let x = field.position(idx);
            field.data[idx] = f(&x).pack5();
        }
        Ok(field)
    }

    /// Builds a field from raw parts, e.g. after reading a snapshot.
    pub fn from_parts(dims: [usize; 3], h: f64, data: Vec<Coords5>, mask: Vec<bool>) -> Result<Self> {
        let n = dims[0] * dims[1] * dims[2];
        if data.len() != n || mask.len() != n {
            return Err(Error::Domain(format!(
                "expected {n} nodes, got {} values and {} mask flags",
                data.len(),
                mask.len()
            )));
        }
        let mut field = Self::new(dims, h)?;
        field.data = data;
        field.mask = mask;
        Ok(field)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let ij = idx / self.dims[2];
        [ij / self.dims[1], ij % self.dims[1], k]
    }

    /// x_i = (i − (n−1)/2)·h per axis.
    pub fn position(&self, idx: usize) -> Vector3<f64> {
        let c = self.coords(idx);
        Vector3::from_fn(|a, _| (c[a] as f64 - (self.dims[a] - 1) as f64 / 2.0) * self.h)
    }

    pub fn get(&self, idx: usize) -> QTensor {
        self.data[idx].unpack()
    }

    pub fn set(&mut self, idx: usize, q: &QTensor) {
        self.data[idx] = q.pack5();
    }

    pub fn data(&self) -> &[Coords5] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Coords5] {
        &mut self.data
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|&&b| !b).count()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Neighbour index along `axis` at offset ±1, if inside the grid.
    pub fn neighbour(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let mut c = self.coords(idx);
        if forward {
            if c[axis] + 1 >= self.dims[axis] {
                return None;
            }
            c[axis] += 1;
        } else {
            if c[axis] == 0 {
                return None;
            }
            c[axis] -= 1;
        }
        Some(self.index(c[0], c[1], c[2]))
    }

    /// ∂Q/∂x_axis at a node as a raw matrix: central in the interior of the
    /// axis, one-sided second order at its ends.
    pub fn node_derivative(&self, idx: usize, axis: usize) -> Matrix3<f64> {
        let q = |i: usize| self.data[i].to_matrix();
        match (self.neighbour(idx, axis, false), self.neighbour(idx, axis, true)) {
            (Some(m), Some(p)) => (q(p) - q(m)) / (2.0 * self.h),
            (None, Some(p)) => {
                let pp = self.neighbour(p, axis, true).expect("at least 3 nodes per axis");
                (q(p) * 4.0 - q(idx) * 3.0 - q(pp)) / (2.0 * self.h)
            }
            (Some(m), None) => {
                let mm = self.neighbour(m, axis, false).expect("at least 3 nodes per axis");
                (q(idx) * 3.0 - q(m) * 4.0 + q(mm)) / (2.0 * self.h)
            }
            (None, None) => unreachable!("axis has at least 3 nodes"),
        }
    }

    /// All three node derivatives as a TensorGradient.
    pub fn node_gradient(&self, idx: usize) -> crate::densities::TensorGradient {
        crate::densities::TensorGradient { p: std::array::from_fn(|a| self.node_derivative(idx, a)) }
    }

    /// 7-point Laplacian in chart coordinates; interior nodes only.
    pub fn laplacian(&self, idx: usize) -> Coords5 {
        let mut out = [0.0; 5];
        let c = self.data[idx].0;
        for axis in 0..3 {
            let m = self.neighbour(idx, axis, false).expect("interior node");
            let p = self.neighbour(idx, axis, true).expect("interior node");
            for a in 0..5 {
                out[a] += self.data[m].0[a] + self.data[p].0[a] - 2.0 * c[a];
            }
        }
        let h2 = self.h * self.h;
        Coords5(out.map(|v| v / h2))
    }

    /// Applies f to every node value (boundary included).
    pub fn map(&self, f: impl Fn(&Vector3<f64>, &QTensor) -> QTensor) -> QField {
        let mut out = self.clone();
        for idx in 0..self.len() {
            out.data[idx] = f(&self.position(idx), &self.get(idx)).pack5();
        }
        out
    }
}

/// Radial hedgehog Q = s₊(x̂ ⊗ x̂ − I/3) about `centre`; a node sitting on
/// the centre gets Q = 0.
pub fn make_hedgehog_field_at(
    dims: [usize; 3],
    h: f64,
    mc: &MaterialConstants,
    centre: &Vector3<f64>,
) -> Result<QField> {
    let s = mc.s_plus();
    QField::from_fn(dims, h, |x| {
        let r = x - centre;
        if r.norm() <= 1e-12 * h {
            QTensor::zero()
        } else {
            QTensor::uniaxial(&r, s)
        }
    })
}

/// Radial hedgehog centred on the domain centre.
pub fn make_hedgehog_field(dims: [usize; 3], h: f64, mc: &MaterialConstants) -> Result<QField> {
    make_hedgehog_field_at(dims, h, mc, &Vector3::zeros())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mc() -> MaterialConstants {
        MaterialConstants::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn indexing_round_trip() {
        let f = QField::new([3, 4, 5], 0.5).unwrap();
        for idx in 0..f.len() {
            let [i, j, k] = f.coords(idx);
            assert_eq!(f.index(i, j, k), idx);
        }
        assert_eq!(f.interior_count(), 2 * 3);
        assert!(QField::new([2, 4, 4], 0.5).is_err());
    }

    #[test]
    fn hedgehog_construction() {
        let mc = mc();
        let f = make_hedgehog_field([5, 5, 5], 0.5, &mc).unwrap();
        let centre = f.index(2, 2, 2);
        assert_eq!(f.get(centre).norm(), 0.0);
        let corner = f.index(4, 4, 4);
        let es = f.get(corner).eigendecompose();
        let v = es.rotation.column(2).into_owned();
        assert!((v.dot(&Vector3::new(1.0, 1.0, 1.0).normalize()).abs() - 1.0).abs() < 1e-12);
        assert!((es.eigenvalues[2] - 2.0 * mc.s_plus() / 3.0).abs() < 1e-12);
        for idx in 0..f.len() {
            if idx != centre {
                assert!(f.get(idx).dist_to_uniaxial(&mc).unwrap() < 1e-12);
            }
        }
        assert!(f.is_boundary(corner) && !f.is_boundary(centre));
    }

    #[test]
    fn hedgehog_has_octahedral_symmetry() {
        let f = make_hedgehog_field([5, 5, 5], 0.5, &mc()).unwrap();
        let perms: [[usize; 3]; 3] = [[1, 0, 2], [0, 2, 1], [2, 1, 0]];
        for perm in perms {
            let mut p = Matrix3::zeros();
            for a in 0..3 {
                p[(perm[a], a)] = 1.0;
            }
            for idx in 0..f.len() {
                let c = f.coords(idx);
                let img = f.index(c[perm[0]], c[perm[1]], c[perm[2]]);
                let lhs = f.get(img);
                let rhs = QTensor::new(p.transpose() * f.get(idx).matrix() * p);
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
        // reflection x -> -x
        let mut r = Matrix3::identity();
        r[(0, 0)] = -1.0;
        for idx in 0..f.len() {
            let [i, j, k] = f.coords(idx);
            let img = f.index(4 - i, j, k);
            let rhs = QTensor::new(r * f.get(idx).matrix() * r);
            assert!((f.get(img) - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn derivatives_exact_for_quadratic_fields() {
        let a = Coords5([1.0, -0.5, 0.2, 0.3, 0.1]).unpack();
        let b = Coords5([0.0, 0.4, -0.7, 0.2, 0.5]).unpack();
        let f = QField::from_fn([4, 5, 3], 0.3, |x| a * x[0] + b * (x[0] * x[0])).unwrap();
        for idx in 0..f.len() {
            let x = f.position(idx);
            let d = f.node_derivative(idx, 0);
            let expect = (a + b * (2.0 * x[0])).matrix().to_owned();
            assert!((d - expect).norm() < 1e-12);
            assert!(f.node_derivative(idx, 1).norm() < 1e-12);
        }
    }
}
