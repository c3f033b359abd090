//! Dense complex matrices at the 2×2 / 4×4 scale used throughout the crate,
//! with a cyclic-Jacobi Hermitian eigendecomposition so that no external
//! linear-algebra backend is needed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::errors::{Error, Result};

/// Convergence threshold on the off-diagonal Frobenius norm for the Jacobi
/// eigendecomposition.
const JACOBI_OFFDIAG_TOL: f64 = 1e-13;
/// Maximum number of cyclic Jacobi sweeps.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense complex square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

/// Serialized form: `{"dim": n, "re": [n² reals], "im": [n² reals]}`,
/// row-major. This is the on-disk contract for every matrix in the crate.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_data(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                data.len()
            )));
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Outer product |v⟩⟨v| of a complex vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = v[r] * v[c].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out[(r, c)] = self[(c, r)].conj();
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Tr(A·B) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Kronecker product; output dimension is the product of the inputs'.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for ra in 0..na {
            for ca in 0..na {
                let a = self[(ra, ca)];
                for rb in 0..nb {
                    for cb in 0..nb {
                        out[(ra * nb + rb, ca * nb + cb)] = a * other[(rb, cb)];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |entry| of `self − self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Symmetrize to the nearest Hermitian matrix, (A + A†)/2. Used to shed
    /// round-off drift after long accumulations.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in descending order and the matching unitary of
    /// column eigenvectors, so that `m = V diag(λ) V†`. Errors if the input
    /// deviates from Hermitian by more than `1e-10`.
    pub fn eigen_hermitian(&self) -> Result<Eigen> {
        let dev = self.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: 1e-10,
            });
        }
        let n = self.dim;
        let mut a = self.hermitian_part();
        let mut v = Self::identity(n);

        for _sweep in 0..JACOBI_MAX_SWEEPS {
            if offdiag_norm(&a) <= JACOBI_OFFDIAG_TOL {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }

        // Diagonal now carries the eigenvalues; sort descending.
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

        let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let mut vectors = Self::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                vectors[(r, new_col)] = v[(r, old_col)];
            }
        }
        Ok(Eigen { values, vectors })
    }

    /// Hermitian matrix square root with negative eigenvalues clamped to
    /// zero before the square root is taken.
    pub fn sqrt_psd(&self) -> Result<Self> {
        let eig = self.eigen_hermitian()?;
        Ok(eig.assemble(|lambda| lambda.max(0.0).sqrt()))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(MatrixJson {
            dim: self.dim,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        })
        .expect("matrix serialization cannot fail")
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let raw: MatrixJson = serde_json::from_value(value.clone())?;
        if raw.re.len() != raw.dim * raw.dim || raw.im.len() != raw.dim * raw.dim {
            return Err(Error::InvalidMatrix(format!(
                "JSON matrix of dim {} must carry {} re and im entries",
                raw.dim,
                raw.dim * raw.dim
            )));
        }
        let data = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Self::from_data(raw.dim, data)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            dim: self.dim,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.re.len() != raw.dim * raw.dim || raw.im.len() != raw.dim * raw.dim {
            return Err(serde::de::Error::custom(format!(
                "matrix of dim {} must carry {} re and im entries",
                raw.dim,
                raw.dim * raw.dim
            )));
        }
        let data = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Ok(ComplexMatrix { dim: raw.dim, data })
    }
}

/// Result of a Hermitian eigendecomposition: eigenvalues descending,
/// eigenvectors as the columns of a unitary.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// Rebuild `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let fl = f(lambda);
            if fl == 0.0 {
                continue;
            }
            for r in 0..n {
                let vr = self.vectors[(r, k)];
                for c in 0..n {
                    out[(r, c)] += vr * self.vectors[(c, k)].conj() * fl;
                }
            }
        }
        out
    }
}

fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += a[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One two-sided Jacobi rotation zeroing the (p, q) entry of Hermitian `a`,
/// accumulating the rotation into `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let m = apq.norm();
    if m <= f64::EPSILON * (a[(p, p)].re.abs() + a[(q, q)].re.abs() + 1.0) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / m;
    let theta = (a[(p, p)].re - a[(q, q)].re) / (2.0 * m);
    // Smaller-angle root of t² + 2θt − 1 = 0.
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Unitary U = [[c, −s·e^{iφ}], [s·e^{−iφ}, c]] on the (p, q) plane;
    // update A ← U† A U and V ← V U.
    let n = a.dim();
    let se_pos = phase * s; // s·e^{iφ}
    let se_neg = phase.conj() * s; // s·e^{−iφ}

    // Columns: A[:, p] and A[:, q].
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * c + arq * se_neg;
        a[(r, q)] = -arp * se_pos + arq * c;
    }
    // Rows: A[p, :] and A[q, :] (U† from the left).
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = apc * c + aqc * se_pos;
        a[(q, col)] = -apc * se_neg + aqc * c;
    }
    // Exact zeros on the eliminated pair; keep diagonal real.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    a[(p, p)] = Complex64::new(app.re, 0.0);
    a[(q, q)] = Complex64::new(aqq.re, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c + vrq * se_neg;
        v[(r, q)] = -vrp * se_pos + vrq * c;
    }
}
