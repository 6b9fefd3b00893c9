//! Stack-allocated kernels for dimensions up to [`MAX_DIM`].
//!
//! Everything here is `Copy` and allocation free: vectors, packed symmetric
//! forms, orthonormal frames, a cyclic Jacobi eigensolver, and the reflection
//! maps that act inside a hyperplane `ξ^⊥`.

use core::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// Tolerance used when checking that an input vector is unit length.
pub const UNIT_TOL: f64 = 1e-10;

/// Tolerance on the Gram matrix of an [`OrthonormalFrame`].
pub const FRAME_TOL: f64 = 1e-12;

const PACKED: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// A vector of dimension `1..=MAX_DIM`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector {
    dim: usize,
    coords: [f64; MAX_DIM],
}

impl Vector {
    /// Builds a vector from a slice, rejecting empty, oversized or non-finite input.
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::InvalidInput("vector dimension must be in 1..=8"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite vector entry"));
        }
        let mut v = Self::zeros(coords.len());
        v.coords[..coords.len()].copy_from_slice(coords);
        Ok(v)
    }

    /// The zero vector. Panics if `dim` is outside `1..=MAX_DIM`.
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self {
            dim,
            coords: [0.0; MAX_DIM],
        }
    }

    /// The `i`-th standard basis vector `e_{i+1}` (zero based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[i] = 1.0;
        v
    }

    /// Builds a vector from the first `dim` entries of a fixed array.
    pub(crate) fn from_array(dim: usize, coords: [f64; MAX_DIM]) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[..dim].copy_from_slice(&coords[..dim]);
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, value: f64) {
        assert!(i < self.dim);
        self.coords[i] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for i in 0..self.dim {
            acc += self.coords[i] * other.coords[i];
        }
        acc
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|c| c.is_finite())
    }

    /// True when `|‖v‖ − 1| ≤ UNIT_TOL` and every entry is finite.
    pub fn is_unit(&self) -> bool {
        self.is_finite() && libm::fabs(self.norm() - 1.0) <= UNIT_TOL
    }

    /// Returns `v / ‖v‖`; fails on non-finite or (near) zero input.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::InvalidInput(
                "cannot normalize zero or non-finite vector",
            ));
        }
        Ok(*self * (1.0 / norm))
    }

    /// `self + alpha * other`.
    #[inline]
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim {
            out.coords[i] += alpha * other.coords[i];
        }
        out
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.dim {
            m = m.max(libm::fabs(self.coords[i] - other.coords[i]));
        }
        m
    }

    pub(crate) fn require_unit(&self, what: &'static str) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::InvalidInput(what))
        }
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        assert!(
            i < self.dim,
            "index {i} out of range for dimension {}",
            self.dim
        );
        &self.coords[i]
    }
}

impl Add for Vector {
    type Output = Vector;

    fn add(self, rhs: Vector) -> Vector {
        self.axpy(1.0, &rhs)
    }
}

impl Sub for Vector {
    type Output = Vector;

    fn sub(self, rhs: Vector) -> Vector {
        self.axpy(-1.0, &rhs)
    }
}

impl Neg for Vector {
    type Output = Vector;

    fn neg(mut self) -> Vector {
        for c in &mut self.coords[..self.dim] {
            *c = -*c;
        }
        self
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;

    fn mul(mut self, rhs: f64) -> Vector {
        for c in &mut self.coords[..self.dim] {
            *c *= rhs;
        }
        self
    }
}

/// A symmetric matrix stored as its packed upper triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricForm {
    dim: usize,
    upper: [f64; PACKED],
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle: rows before r contribute r*MAX_DIM - r(r-1)/2 slots
    r * MAX_DIM - r * (r + 1) / 2 + c
}

impl SymmetricForm {
    /// Builds a form from a row-major square matrix. Only the upper triangle is read.
    pub fn from_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) || rows.len() != dim * dim {
            return Err(Error::InvalidInput(
                "symmetric form must be square with dimension in 1..=8",
            ));
        }
        let mut form = Self {
            dim,
            upper: [0.0; PACKED],
        };
        for i in 0..dim {
            for j in i..dim {
                let v = rows[i * dim + j];
                if !v.is_finite() {
                    return Err(Error::InvalidInput("non-finite symmetric form entry"));
                }
                form.upper[packed_index(i, j)] = v;
            }
        }
        Ok(form)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidInput(
                "symmetric form dimension must be in 1..=8",
            ));
        }
        if diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidInput("non-finite symmetric form entry"));
        }
        let mut form = Self {
            dim,
            upper: [0.0; PACKED],
        };
        for (i, &d) in diag.iter().enumerate() {
            form.upper[packed_index(i, i)] = d;
        }
        Ok(form)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed_index(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim).all(|i| (i..self.dim).all(|j| self.get(i, j).is_finite()))
    }

    /// `S x`.
    pub fn apply(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = 0.0;
            for j in 0..self.dim {
                acc += self.get(i, j) * x.coords[j];
            }
            out.coords[i] = acc;
        }
        out
    }

    /// `xᵀ S x`, summed so that `x ↦ −x` leaves the result bit-identical.
    #[inline]
    pub fn quadratic(&self, x: &Vector) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let xi = x.coords[i];
            acc += self.get(i, i) * (xi * xi);
            for j in (i + 1)..self.dim {
                acc += 2.0 * self.get(i, j) * (xi * x.coords[j]);
            }
        }
        acc
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                acc += v * v;
            }
        }
        libm::sqrt(acc)
    }

    /// The form `Pᵀ S P` where the columns of `P` are the frame vectors.
    pub fn restrict(&self, frame: &OrthonormalFrame) -> SymmetricForm {
        assert_eq!(frame.ambient_dim(), self.dim);
        let k = frame.len();
        let mut images = [Vector::zeros(self.dim); MAX_DIM];
        for (a, img) in images.iter_mut().enumerate().take(k) {
            *img = self.apply(frame.get(a));
        }
        let mut out = Self {
            dim: k,
            upper: [0.0; PACKED],
        };
        for a in 0..k {
            for b in a..k {
                out.upper[packed_index(a, b)] = frame.get(a).dot(&images[b]);
            }
        }
        out
    }

    fn to_square(self) -> [[f64; MAX_DIM]; MAX_DIM] {
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in m.iter_mut().enumerate().take(self.dim) {
            for (j, entry) in row.iter_mut().enumerate().take(self.dim) {
                *entry = self.get(i, j);
            }
        }
        m
    }
}

/// `k` mutually orthonormal vectors in `ℝⁿ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthonormalFrame {
    ambient: usize,
    len: usize,
    vectors: [Vector; MAX_DIM],
}

impl OrthonormalFrame {
    /// Validates that the Gram matrix is the identity within [`FRAME_TOL`].
    pub fn new(vectors: &[Vector]) -> Result<Self> {
        if vectors.is_empty() || vectors.len() > MAX_DIM {
            return Err(Error::InvalidInput("frame must contain 1..=8 vectors"));
        }
        let ambient = vectors[0].dim();
        if vectors.len() > ambient || vectors.iter().any(|v| v.dim() != ambient) {
            return Err(Error::InvalidInput(
                "frame vectors must share a dimension no smaller than the frame",
            ));
        }
        for (a, va) in vectors.iter().enumerate() {
            if !va.is_finite() {
                return Err(Error::InvalidInput("non-finite frame vector"));
            }
            for (b, vb) in vectors.iter().enumerate().skip(a) {
                let target = if a == b { 1.0 } else { 0.0 };
                if libm::fabs(va.dot(vb) - target) > FRAME_TOL {
                    return Err(Error::InvalidInput("frame vectors are not orthonormal"));
                }
            }
        }
        Ok(Self::from_unchecked(vectors))
    }

    pub(crate) fn from_unchecked(vectors: &[Vector]) -> Self {
        let ambient = vectors[0].dim();
        let mut arr = [Vector::zeros(ambient); MAX_DIM];
        arr[..vectors.len()].copy_from_slice(vectors);
        Self {
            ambient,
            len: vectors.len(),
            vectors: arr,
        }
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> &Vector {
        assert!(i < self.len);
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors[..self.len]
    }

    /// `P c`: the point with coordinates `c` in this frame.
    #[inline]
    pub fn lift(&self, coords: &[f64]) -> Vector {
        debug_assert_eq!(coords.len(), self.len);
        let mut out = Vector::zeros(self.ambient);
        for (v, &c) in self.vectors[..self.len].iter().zip(coords) {
            for i in 0..self.ambient {
                out.coords[i] += c * v.coords[i];
            }
        }
        out
    }

    /// `Pᵀ x`: coordinates of `x` in this frame.
    pub fn coordinates(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.len);
        for (a, v) in self.vectors().iter().enumerate() {
            out.coords[a] = v.dot(x);
        }
        out
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn gram_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.len {
            for b in 0..self.len {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(self.vectors[a].dot(&self.vectors[b]) - target));
            }
        }
        worst
    }
}

/// Orthonormal basis of `ξ^⊥` from the Householder reflector that sends the
/// pivot axis to `ξ`.
///
/// The pivot is the first coordinate of largest magnitude; the returned vectors
/// are the remaining columns of the reflector, in index order.
pub fn hyperplane_frame(xi: &Vector) -> Result<OrthonormalFrame> {
    xi.require_unit("hyperplane normal must be a finite unit vector")?;
    let n = xi.dim();
    if n < 2 {
        return Err(Error::InvalidInput(
            "hyperplane normal needs dimension at least 2",
        ));
    }
    let mut pivot = 0;
    for i in 1..n {
        if libm::fabs(xi[i]) > libm::fabs(xi[pivot]) {
            pivot = i;
        }
    }
    let sign = if xi[pivot] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = *xi;
    v.coords[pivot] += sign;
    let vv = v.norm_sq();
    let mut cols = [Vector::zeros(n); MAX_DIM];
    let mut k = 0;
    for j in 0..n {
        if j == pivot {
            continue;
        }
        // column j of I − 2 v vᵀ / (vᵀv)
        let mut col = Vector::basis(n, j);
        let scale = -2.0 * v[j] / vv;
        col = col.axpy(scale, &v);
        cols[k] = col;
        k += 1;
    }
    Ok(OrthonormalFrame::from_unchecked(&cols[..k]))
}

/// Eigenpairs of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEigen {
    /// Eigenvalues, ascending.
    pub values: Vector,
    /// Eigenvectors, in the same order as `values`.
    pub vectors: OrthonormalFrame,
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending; each eigenvector has its first entry of
/// magnitude above `1e-12` positive.
pub fn sym_eigen(form: &SymmetricForm) -> Result<SymEigen> {
    if !form.is_finite() {
        return Err(Error::InvalidInput("non-finite symmetric form entry"));
    }
    let n = form.dim();
    let mut a = form.to_square();
    let mut v = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in v.iter_mut().enumerate().take(n) {
        row[i] = 1.0;
    }
    let scale = form.frobenius();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off == 0.0 || libm::sqrt(off) <= 1e-18 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if libm::fabs(theta) > 1e150 {
                    0.5 / theta
                } else {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for r in 0..n {
                    let arp = a[r][p];
                    let arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p][r];
                    let aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut().take(n) {
                    let vrp = row[p];
                    let vrq = row[q];
                    row[p] = c * vrp - s * vrq;
                    row[q] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order = [0usize; MAX_DIM];
    for (i, o) in order.iter_mut().enumerate() {
        *o = i;
    }
    let order = &mut order[..n];
    // insertion sort keeps equal eigenvalues in solver order
    for i in 1..n {
        let mut j = i;
        while j > 0 && a[order[j - 1]][order[j - 1]] > a[order[j]][order[j]] {
            order.swap(j - 1, j);
            j -= 1;
        }
    }

    let mut values = Vector::zeros(n);
    let mut vectors = [Vector::zeros(n); MAX_DIM];
    for (k, &col) in order.iter().enumerate() {
        values.coords[k] = a[col][col];
        let mut vec = Vector::zeros(n);
        for r in 0..n {
            vec.coords[r] = v[r][col];
        }
        // renormalize away the rotation drift
        vec = vec * (1.0 / vec.norm());
        if let Some(&lead) = vec.as_slice().iter().find(|c| libm::fabs(**c) > 1e-12) {
            if lead < 0.0 {
                vec = -vec;
            }
        }
        vectors[k] = vec;
    }
    Ok(SymEigen {
        values,
        vectors: OrthonormalFrame::from_unchecked(&vectors[..n]),
    })
}

/// `−x + 2⟨x, η⟩η`.
pub fn reflect_in_vector(eta: &Vector, x: &Vector) -> Result<Vector> {
    eta.require_unit("reflection axis must be a finite unit vector")?;
    if eta.dim() != x.dim() {
        return Err(Error::InvalidInput("dimension mismatch"));
    }
    Ok(reflect_in_vector_unchecked(eta, x))
}

#[inline]
pub(crate) fn reflect_in_vector_unchecked(eta: &Vector, x: &Vector) -> Vector {
    (-*x).axpy(2.0 * x.dot(eta), eta)
}

/// `−x + 2⟨x, h₁⟩h₁ + 2⟨x, h₂⟩h₂` for an orthonormal pair `H = {h₁, h₂}`.
pub fn reflect_in_plane(plane: &OrthonormalFrame, x: &Vector) -> Result<Vector> {
    if plane.len() != 2 {
        return Err(Error::InvalidInput(
            "plane reflection needs exactly two frame vectors",
        ));
    }
    if plane.ambient_dim() != x.dim() {
        return Err(Error::InvalidInput("dimension mismatch"));
    }
    Ok(reflect_in_plane_unchecked(plane.get(0), plane.get(1), x))
}

#[inline]
pub(crate) fn reflect_in_plane_unchecked(h1: &Vector, h2: &Vector, x: &Vector) -> Vector {
    (-*x).axpy(2.0 * x.dot(h1), h1).axpy(2.0 * x.dot(h2), h2)
}

/// Anything that maps vectors of `ξ^⊥` into `ξ^⊥`.
pub trait SectionMap {
    fn apply(&self, x: &Vector) -> Vector;
}

/// Which isometry of `ξ^⊥` a map is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IsometryKind {
    Identity,
    /// `x ↦ −x`.
    PointReflection,
    /// Fixes the line through `η`, negates its orthogonal complement.
    ReflectInVector(Vector),
    /// Fixes the plane spanned by the two vectors pointwise, negates the rest.
    ReflectInPlane(Vector, Vector),
}

impl IsometryKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::PointReflection => "point-reflection",
            Self::ReflectInVector(_) => "reflect-in-vector",
            Self::ReflectInPlane(..) => "reflect-in-plane",
        }
    }
}

/// An involutive isometry acting on the hyperplane `carrier^⊥`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryMap {
    carrier: Vector,
    kind: IsometryKind,
}

impl IsometryMap {
    /// Validates unit generators (orthonormal for planes) of matching dimension.
    ///
    /// Orthogonality to the carrier is deliberately not enforced here; callers
    /// that need it check [`IsometryMap::leak_along`].
    pub fn new(carrier: Vector, kind: IsometryKind) -> Result<Self> {
        carrier.require_unit("carrier normal must be a finite unit vector")?;
        let n = carrier.dim();
        match &kind {
            IsometryKind::Identity | IsometryKind::PointReflection => {}
            IsometryKind::ReflectInVector(eta) => {
                if eta.dim() != n {
                    return Err(Error::InvalidInput("dimension mismatch"));
                }
                eta.require_unit("reflection axis must be a finite unit vector")?;
            }
            IsometryKind::ReflectInPlane(h1, h2) => {
                if h1.dim() != n || h2.dim() != n {
                    return Err(Error::InvalidInput("dimension mismatch"));
                }
                OrthonormalFrame::new(&[*h1, *h2])?;
            }
        }
        Ok(Self { carrier, kind })
    }

    pub fn identity(carrier: Vector) -> Result<Self> {
        Self::new(carrier, IsometryKind::Identity)
    }

    pub fn point_reflection(carrier: Vector) -> Result<Self> {
        Self::new(carrier, IsometryKind::PointReflection)
    }

    pub fn reflect_in_vector(carrier: Vector, eta: Vector) -> Result<Self> {
        Self::new(carrier, IsometryKind::ReflectInVector(eta))
    }

    pub fn reflect_in_plane(carrier: Vector, h1: Vector, h2: Vector) -> Result<Self> {
        Self::new(carrier, IsometryKind::ReflectInPlane(h1, h2))
    }

    #[inline]
    pub fn carrier(&self) -> &Vector {
        &self.carrier
    }

    #[inline]
    pub fn kind(&self) -> &IsometryKind {
        &self.kind
    }

    /// Largest component of any generator along `normal`.
    pub fn leak_along(&self, normal: &Vector) -> f64 {
        match &self.kind {
            IsometryKind::Identity | IsometryKind::PointReflection => 0.0,
            IsometryKind::ReflectInVector(eta) => libm::fabs(eta.dot(normal)),
            IsometryKind::ReflectInPlane(h1, h2) => {
                libm::fabs(h1.dot(normal)).max(libm::fabs(h2.dot(normal)))
            }
        }
    }

    /// Matrix of the map in the given frame of `ξ^⊥`: entry `(a, b)` is `⟨f_a, φ(f_b)⟩`.
    pub fn matrix_in(&self, frame: &OrthonormalFrame) -> SquareMatrix {
        let k = frame.len();
        let mut m = SquareMatrix::zeros(k);
        for b in 0..k {
            let image = self.apply(frame.get(b));
            for a in 0..k {
                m.entries[a][b] = frame.get(a).dot(&image);
            }
        }
        m
    }
}

impl SectionMap for IsometryMap {
    #[inline]
    fn apply(&self, x: &Vector) -> Vector {
        match &self.kind {
            IsometryKind::Identity => *x,
            IsometryKind::PointReflection => -*x,
            IsometryKind::ReflectInVector(eta) => reflect_in_vector_unchecked(eta, x),
            IsometryKind::ReflectInPlane(h1, h2) => reflect_in_plane_unchecked(h1, h2, x),
        }
    }
}

/// Determinant of `φ` restricted to an `(n−1)`-dimensional hyperplane of `ℝⁿ`.
pub fn isometry_det(map: &IsometryMap, n: usize) -> i32 {
    let parity = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    match map.kind() {
        IsometryKind::Identity => 1,
        IsometryKind::PointReflection => parity(n - 1),
        IsometryKind::ReflectInVector(_) => parity(n - 2),
        IsometryKind::ReflectInPlane(..) => parity(n - 3),
    }
}

/// Dense square matrix of dimension up to [`MAX_DIM`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    entries: [[f64; MAX_DIM]; MAX_DIM],
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Self {
            dim,
            entries: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i][j] = value;
    }

    /// `M x`.
    pub fn apply(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = 0.0;
            for j in 0..self.dim {
                acc += self.entries[i][j] * x.coords[j];
            }
            out.coords[i] = acc;
        }
        out
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.dim;
        let mut m = self.entries;
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if libm::fabs(m[r][col]) > libm::fabs(m[piv][col]) {
                    piv = r;
                }
            }
            if m[piv][col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                m.swap(piv, col);
                det = -det;
            }
            det *= m[col][col];
            for r in (col + 1)..n {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
        det
    }
}
