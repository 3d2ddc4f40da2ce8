//! Vectorized form of symmetric weighted graphs.
//!
//! A graph on `d` vertices lives in the `p = d(d-1)/2` strict upper-triangle
//! slots of its adjacency matrix, row-major: (0,1), (0,2), ..., (d-2,d-1).
//! The degree operator S maps this vector to per-vertex degrees, Sw = A·1,
//! without materializing the matrix; its adjoint has entry (i,j) = v_i + v_j.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::{Error, Result};

/// Number of edge slots for `d` vertices.
pub fn edge_count(d: usize) -> usize {
    d * (d - 1) / 2
}

/// Flat slot of the unordered pair `(i, j)`, `i != j`, both `< d`.
pub fn pair_index(d: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < d && i != j);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

/// Vertex pair `(i, j)`, `i < j`, stored at flat slot `k`.
pub fn index_pair(d: usize, k: usize) -> (usize, usize) {
    debug_assert!(k < edge_count(d));
    let mut i = 0;
    let mut start = 0;
    loop {
        let row_len = d - 1 - i;
        if k < start + row_len {
            return (i, i + 1 + (k - start));
        }
        start += row_len;
        i += 1;
    }
}

/// Upper-triangle weights of an undirected graph: non-negative, finite.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    d: usize,
    w: Array1<f64>,
}

impl WeightVector {
    /// Wraps a length-p vector, rejecting negative or non-finite entries.
    pub fn new(d: usize, w: Array1<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 vertices, got {d}"
            )));
        }
        if w.len() != edge_count(d) {
            return Err(Error::DimensionMismatch(format!(
                "weight vector for d={d} needs {} entries, got {}",
                edge_count(d),
                w.len()
            )));
        }
        if let Some(k) = w.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::BadEntry(k));
        }
        Ok(Self { d, w })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            w: Array1::zeros(edge_count(d)),
        }
    }

    /// All slots set to `value`.
    pub fn constant(d: usize, value: f64) -> Result<Self> {
        Self::new(d, Array1::from_elem(edge_count(d), value))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of edge slots.
    pub fn p(&self) -> usize {
        self.w.len()
    }

    pub fn values(&self) -> ArrayView1<'_, f64> {
        self.w.view()
    }

    pub fn into_values(self) -> Array1<f64> {
        self.w
    }

    /// Weight of the pair `(i, j)`; zero when `i == j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.w[pair_index(self.d, i, j)]
        }
    }

    /// Slots strictly above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.w
            .iter()
            .enumerate()
            .filter(|(_, x)| **x > threshold)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Squared pairwise distances between vertex signal rows, same layout as
/// [`WeightVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector {
    d: usize,
    r: Array1<f64>,
}

impl DistanceVector {
    pub fn new(d: usize, r: Array1<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 vertices, got {d}"
            )));
        }
        if r.len() != edge_count(d) {
            return Err(Error::DimensionMismatch(format!(
                "distance vector for d={d} needs {} entries, got {}",
                edge_count(d),
                r.len()
            )));
        }
        if let Some(k) = r.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::BadEntry(k));
        }
        Ok(Self { d, r })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.r.len()
    }

    pub fn values(&self) -> ArrayView1<'_, f64> {
        self.r.view()
    }
}

/// Per-slot observations: the d×N signal matrix and its distance vector.
#[derive(Debug, Clone)]
pub struct SlotData {
    signals: Array2<f64>,
    distances: DistanceVector,
}

impl SlotData {
    /// Rows are vertices, columns are samples.
    pub fn from_signals(signals: Array2<f64>) -> Result<Self> {
        let distances = pairwise_distances(signals.view())?;
        Ok(Self { signals, distances })
    }

    /// Distances given directly; the signal matrix is left empty (d×0).
    pub fn from_distances(distances: DistanceVector) -> Self {
        Self {
            signals: Array2::zeros((distances.d(), 0)),
            distances,
        }
    }

    pub fn d(&self) -> usize {
        self.distances.d()
    }

    pub fn n_samples(&self) -> usize {
        self.signals.ncols()
    }

    pub fn signals(&self) -> ArrayView2<'_, f64> {
        self.signals.view()
    }

    pub fn distances(&self) -> &DistanceVector {
        &self.distances
    }
}

/// Adjacency matrix of `w`: symmetric, zero diagonal.
pub fn weight_to_adjacency(w: &WeightVector) -> Array2<f64> {
    let d = w.d();
    let mut a = Array2::zeros((d, d));
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            a[(i, j)] = w.values()[k];
            a[(j, i)] = w.values()[k];
            k += 1;
        }
    }
    a
}

/// Inverse of [`weight_to_adjacency`]; rejects asymmetric or nonzero-diagonal
/// input outright.
pub fn adjacency_to_weight(a: ArrayView2<f64>) -> Result<WeightVector> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "adjacency must be square, got {}x{}",
            d,
            a.ncols()
        )));
    }
    for i in 0..d {
        if a[(i, i)] != 0.0 {
            return Err(Error::NonzeroDiagonal);
        }
        for j in (i + 1)..d {
            if a[(i, j)] != a[(j, i)] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut w = Array1::zeros(edge_count(d));
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            w[k] = a[(i, j)];
            k += 1;
        }
    }
    WeightVector::new(d, w)
}

/// Degrees Sw = A·1, computed matrix-free in O(p).
pub fn degree_operator(w: &WeightVector) -> Array1<f64> {
    degree_operator_raw(w.values(), w.d())
}

pub(crate) fn degree_operator_raw(w: ArrayView1<f64>, d: usize) -> Array1<f64> {
    debug_assert_eq!(w.len(), edge_count(d));
    let mut deg = Array1::zeros(d);
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            deg[i] += w[k];
            deg[j] += w[k];
            k += 1;
        }
    }
    deg
}

/// Adjoint of the degree operator: slot (i,j) of the output is v_i + v_j.
/// Returns a raw vector since the input may be signed.
pub fn degree_operator_adjoint(v: ArrayView1<f64>) -> Array1<f64> {
    let d = v.len();
    let mut out = Array1::zeros(edge_count(d));
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            out[k] = v[i] + v[j];
            k += 1;
        }
    }
    out
}

/// Combinatorial Laplacian diag(Sw) − A(w).
pub fn laplacian(w: &WeightVector) -> Array2<f64> {
    let mut l = weight_to_adjacency(w);
    let deg = degree_operator(w);
    let d = w.d();
    for i in 0..d {
        for j in 0..d {
            l[(i, j)] = -l[(i, j)];
        }
        l[(i, i)] = deg[i];
    }
    l
}

/// Squared Euclidean distances between all pairs of rows of `x` (d×N).
pub fn pairwise_distances(x: ArrayView2<f64>) -> Result<DistanceVector> {
    let d = x.nrows();
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 vertices, got {d}"
        )));
    }
    if x.ncols() == 0 {
        return Err(Error::EmptyInput("signal matrix has no samples".into()));
    }
    let mut r = Array1::zeros(edge_count(d));
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            let mut acc = 0.0;
            for n in 0..x.ncols() {
                let diff = x[(i, n)] - x[(j, n)];
                acc += diff * diff;
            }
            r[k] = acc;
            k += 1;
        }
    }
    DistanceVector::new(d, r)
}
