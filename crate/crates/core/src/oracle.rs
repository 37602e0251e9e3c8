//! Distance-only access to a finite metric space.
//!
//! Every oracle counts the `dist` calls made against it. Counters are atomic
//! so one oracle can be shared across threads; the count is the number of
//! calls, not the number of distinct pairs.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{invalid, Result};
use crate::space::NormedSpace;

/// Matrices at most this large get the full O(n^3) triangle check on load.
pub const TRIANGLE_CHECK_LIMIT: usize = 512;

const TRIANGLE_TOL: f64 = 1e-9;

pub trait DistanceOracle: Sync {
    fn size(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    fn query_count(&self) -> u64;
}

impl<O: DistanceOracle + ?Sized> DistanceOracle for &O {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }
    fn query_count(&self) -> u64 {
        (**self).query_count()
    }
}

/// Dense, validated distance matrix.
#[derive(Debug)]
pub struct MatrixOracle {
    n: usize,
    data: Vec<f64>,
    queries: AtomicU64,
}

impl MatrixOracle {
    /// Row-major `n x n` matrix. Checks symmetry, zero diagonal and
    /// nonnegativity always, and the triangle inequality when
    /// `n <= TRIANGLE_CHECK_LIMIT`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return invalid(format!("expected {} entries for n = {n}, got {}", n * n, data.len()));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return invalid(format!("nonzero diagonal entry at ({i}, {i})"));
            }
            for j in 0..n {
                let d = data[i * n + j];
                if !(d >= 0.0 && d.is_finite()) {
                    return invalid(format!("entry ({i}, {j}) = {d} is not a finite nonnegative distance"));
                }
                if d != data[j * n + i] {
                    return invalid(format!("matrix not symmetric at ({i}, {j})"));
                }
            }
        }
        if n <= TRIANGLE_CHECK_LIMIT {
            for i in 0..n {
                for j in 0..n {
                    let dij = data[i * n + j];
                    for k in 0..n {
                        if dij > data[i * n + k] + data[k * n + j] + TRIANGLE_TOL {
                            return invalid(format!("triangle inequality fails for ({i}, {j}) via {k}"));
                        }
                    }
                }
            }
        }
        Ok(Self { n, data, queries: AtomicU64::new(0) })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return invalid(format!("row {i} has {} entries, expected {n}", r.len()));
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    /// Full matrix of pairwise distances of explicit points.
    pub fn from_points<N: NormedSpace + ?Sized>(points: &[Vec<f64>], norm: &N) -> Result<Self> {
        let n = points.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = norm.distance(&points[i], &points[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self::new(n, data)
    }

    /// Uncounted read, for serialization and test fixtures.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }
}

impl DistanceOracle for MatrixOracle {
    fn size(&self) -> usize {
        self.n
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.data[i * self.n + j]
    }
    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Distances computed on demand from points the caller cannot see.
pub struct PointOracle<N> {
    points: Vec<Vec<f64>>,
    norm: N,
    queries: AtomicU64,
}

impl<N: NormedSpace> PointOracle<N> {
    pub fn new(points: Vec<Vec<f64>>, norm: N) -> Self {
        Self { points, norm, queries: AtomicU64::new(0) }
    }
}

impl<N: NormedSpace> DistanceOracle for PointOracle<N> {
    fn size(&self) -> usize {
        self.points.len()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.norm.distance(&self.points[i], &self.points[j])
    }
    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Pass-through wrapper with its own counter.
pub struct CountingOracle<O> {
    inner: O,
    queries: AtomicU64,
}

impl<O: DistanceOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, queries: AtomicU64::new(0) }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: DistanceOracle> DistanceOracle for CountingOracle<O> {
    fn size(&self) -> usize {
        self.inner.size()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.inner.dist(i, j)
    }
    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Memoizing wrapper: each unordered pair reaches the inner oracle at most
/// once. `query_count` still reports every call made against the wrapper.
pub struct MemoOracle<O> {
    inner: O,
    cache: Mutex<HashMap<(usize, usize), f64>>,
    queries: AtomicU64,
}

impl<O: DistanceOracle> MemoOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, cache: Mutex::new(HashMap::new()), queries: AtomicU64::new(0) }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: DistanceOracle> DistanceOracle for MemoOracle<O> {
    fn size(&self) -> usize {
        self.inner.size()
    }
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let key = (i.min(j), i.max(j));
        let mut cache = self.cache.lock().expect("memo cache poisoned");
        *cache.entry(key).or_insert_with(|| self.inner.dist(i, j))
    }
    fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }
}

/// Extends an oracle with zero-weight copies of point 0 at indices `>= size`.
pub(crate) struct Padded<'a, O: ?Sized> {
    inner: &'a O,
}

impl<'a, O: DistanceOracle + ?Sized> Padded<'a, O> {
    pub(crate) fn new(inner: &'a O, padded: usize) -> Self {
        debug_assert!(padded >= inner.size());
        Self { inner }
    }

    pub(crate) fn resolve(&self, i: usize) -> usize {
        if i < self.inner.size() {
            i
        } else {
            0
        }
    }

    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.resolve(i), self.resolve(j));
        if a == b {
            0.0
        } else {
            self.inner.dist(a, b)
        }
    }
}
