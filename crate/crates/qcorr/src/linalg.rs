//! Dense complex matrix substrate.
//!
//! Every operator carries (or is paired with) a [`DimSignature`] describing
//! its tensor-factor structure. The index convention is fixed globally:
//! row-major, label-ordered, first label most significant. For dims
//! `(d1, ..., dk)` the basis index `i` encodes the digit tuple
//! `(i1, ..., ik)` as `i = ((i1*d2 + i2)*d3 + ...) + ik`. Partial trace and
//! partial transpose depend on this single convention.

use num_complex::Complex64;

use crate::{Error, Result};

/// Entrywise tolerance for the Hermiticity pre-check.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row in matrix literal");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scaled_re(&self, factor: f64) -> Self {
        self.scaled(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |M - M'| over entries; 0 for exactly Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            dev = dev.max(self[(i, i)].im.abs());
            for j in (i + 1)..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// (M + M')/2; makes round-off from products exactly Hermitian.
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        out
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl serde::Serialize for ComplexMatrix {
    /// Emits `{ "re": [[..]], "im": [[..]] }` row-major, matching the state
    /// file schema.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| part(&self[(i, j)])).collect())
                .collect()
        };
        let mut s = serializer.serialize_struct("ComplexMatrix", 2)?;
        s.serialize_field("re", &rows(|z| z.re))?;
        s.serialize_field("im", &rows(|z| z.im))?;
        s.end()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Ordered subsystem dimensions with distinct labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimSignature {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl DimSignature {
    pub fn new(dims: &[usize], labels: &[&str]) -> Result<Self> {
        if dims.is_empty() || dims.len() != labels.len() || dims.contains(&0) {
            return Err(Error::InvalidSignature);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel {
                    label: l.to_string(),
                });
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Labels subsystems `a`, `b`, `c`, ... in order.
    pub fn with_auto_labels(dims: &[usize]) -> Result<Self> {
        let labels: Vec<String> = (0..dims.len())
            .map(|i| {
                char::from_u32('a' as u32 + i as u32)
                    .expect("more than 26 subsystems")
                    .to_string()
            })
            .collect();
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        Self::new(dims, &refs)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> Vec<&str> {
        self.labels.iter().map(|s| s.as_str()).collect()
    }

    pub fn label(&self, pos: usize) -> &str {
        &self.labels[pos]
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_string(),
            })
    }

    /// Positions of `labels` in signature order (not argument order).
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        for l in labels {
            self.position(l)?;
        }
        Ok((0..self.len())
            .filter(|&p| labels.contains(&self.labels[p].as_str()))
            .collect())
    }

    pub fn subset(&self, positions: &[usize]) -> Self {
        Self {
            dims: positions.iter().map(|&p| self.dims[p]).collect(),
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }

    /// Appends a fresh subsystem, picking the first unused letter label.
    pub fn extended(&self, dim: usize) -> Self {
        let mut label = None;
        for c in 'a'..='z' {
            if !self.labels.iter().any(|l| l == &c.to_string()) {
                label = Some(c.to_string());
                break;
            }
        }
        let mut dims = self.dims.clone();
        let mut labels = self.labels.clone();
        dims.push(dim);
        labels.push(label.expect("ran out of subsystem labels"));
        Self { dims, labels }
    }

    pub fn check_side(&self, side: usize) -> Result<()> {
        if self.total_dim() != side {
            return Err(Error::SignatureMismatch {
                side,
                product: self.total_dim(),
            });
        }
        Ok(())
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut st = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        st[i] = st[i + 1] * dims[i + 1];
    }
    st
}

/// Flat offsets contributed by a combined sub-index running over `sub_dims`
/// placed at `positions` of the full index.
fn sub_offsets(sub_dims: &[usize], positions: &[usize], full_strides: &[usize]) -> Vec<usize> {
    let total: usize = sub_dims.iter().product();
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut off = 0usize;
        for k in (0..sub_dims.len()).rev() {
            let digit = idx % sub_dims[k];
            idx /= sub_dims[k];
            off += digit * full_strides[positions[k]];
        }
        out.push(off);
    }
    out
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvector columns, so that `M = V diag(w) V'`.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let dev = m.hermiticity_defect();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { max_dev: dev });
    }
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = ComplexMatrix::identity(n);
    if n > 1 {
        let scale = a.max_abs().max(1e-300);
        let tol = 1e-15 * scale;
        for _sweep in 0..100 {
            let mut off: f64 = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a[(i, j)].norm());
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| eig[i].partial_cmp(&eig[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// One complex Jacobi rotation zeroing `a[(p, q)]`; accumulates into `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b <= 1e-300 {
        return;
    }
    // Strip the phase so the 2x2 block is real symmetric, then rotate.
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (app - aqq) / (2.0 * b);
    let hyp = (1.0 + tau * tau).sqrt();
    let t = if tau >= 0.0 {
        -1.0 / (tau + hyp)
    } else {
        1.0 / (-tau + hyp)
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J[p][p] = c, J[p][q] = s, J[q][p] = -s*conj(phase), J[q][q] = c*conj(phase)
    let jc = Complex64::new(c, 0.0);
    let jp_q = Complex64::new(s, 0.0);
    let jq_p = -Complex64::new(s, 0.0) * phase.conj();
    let jq_q = jc * phase.conj();

    let n = a.rows();
    // A <- J' A
    for col in 0..n {
        let xp = a[(p, col)];
        let xq = a[(q, col)];
        a[(p, col)] = jc * xp + jq_p.conj() * xq;
        a[(q, col)] = jp_q.conj() * xp + jq_q.conj() * xq;
    }
    // A <- A J
    for row in 0..n {
        let xp = a[(row, p)];
        let xq = a[(row, q)];
        a[(row, p)] = xp * jc + xq * jq_p;
        a[(row, q)] = xp * jp_q + xq * jq_q;
    }
    // V <- V J
    for row in 0..v.rows() {
        let xp = v[(row, p)];
        let xq = v[(row, q)];
        v[(row, p)] = xp * jc + xq * jq_p;
        v[(row, q)] = xp * jp_q + xq * jq_q;
    }
    // Clean the rotated pivot.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// `<v| m |v>` contracted over one factor of a two-factor operator: the
/// unnormalized block left on the other side. `side` 0 contracts the first
/// (most significant) factor.
pub(crate) fn partial_inner(
    m: &ComplexMatrix,
    dims: (usize, usize),
    side: usize,
    v: &[Complex64],
) -> ComplexMatrix {
    let (d0, d1) = dims;
    if side == 1 {
        ComplexMatrix::from_fn(d0, d0, |x, y| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d1 {
                for l in 0..d1 {
                    acc += v[k].conj() * m[(x * d1 + k, y * d1 + l)] * v[l];
                }
            }
            acc
        })
    } else {
        ComplexMatrix::from_fn(d1, d1, |x, y| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d0 {
                for l in 0..d0 {
                    acc += v[k].conj() * m[(k * d1 + x, l * d1 + y)] * v[l];
                }
            }
            acc
        })
    }
}

/// Kronecker product with the global row-major convention:
/// `(A (x) B)[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Traces out every subsystem not named in `keep`; kept labels stay in
/// signature order. Returns the reduced operator with its signature.
pub fn partial_trace(
    m: &ComplexMatrix,
    sig: &DimSignature,
    keep: &[&str],
) -> Result<(ComplexMatrix, DimSignature)> {
    sig.check_side(m.rows())?;
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if keep.is_empty() {
        return Err(Error::TrivialBipartition);
    }
    let keep_pos = sig.positions(keep)?;
    let traced_pos: Vec<usize> = (0..sig.len()).filter(|p| !keep_pos.contains(p)).collect();
    let out_sig = sig.subset(&keep_pos);
    if traced_pos.is_empty() {
        return Ok((m.clone(), out_sig));
    }
    let st = strides(sig.dims());
    let keep_dims: Vec<usize> = keep_pos.iter().map(|&p| sig.dims()[p]).collect();
    let traced_dims: Vec<usize> = traced_pos.iter().map(|&p| sig.dims()[p]).collect();
    let keep_off = sub_offsets(&keep_dims, &keep_pos, &st);
    let traced_off = sub_offsets(&traced_dims, &traced_pos, &st);
    let kd = keep_off.len();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (c, &co) in keep_off.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &to in &traced_off {
                acc += m[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok((out, out_sig))
}

/// Transposes the named subsystem's indices; exact involution.
pub fn partial_transpose(
    m: &ComplexMatrix,
    sig: &DimSignature,
    subsystem: &str,
) -> Result<ComplexMatrix> {
    sig.check_side(m.rows())?;
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let pos = sig.position(subsystem)?;
    let st = strides(sig.dims());
    let d = sig.dims()[pos];
    let stride = st[pos];
    let n = sig.total_dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let di = (i / stride) % d;
        let base_i = i - di * stride;
        for j in 0..n {
            let dj = (j / stride) % d;
            let base_j = j - dj * stride;
            // swap the subsystem digit between row and column
            out[(base_i + dj * stride, base_j + di * stride)] = m[(i, j)];
        }
    }
    Ok(out)
}
