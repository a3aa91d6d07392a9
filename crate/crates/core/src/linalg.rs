//! Exact rational matrix arithmetic.
//!
//! Everything here works over `BigRational`, so ranks, kernels and
//! membership tests are exact. Matrices are flattened row-major whenever a
//! matrix space is treated as a vector space (entry `(i, j)` of an `n x n`
//! matrix is coordinate `i * n + j`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Matrix with a single `1` at `(i, j)`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.data[i * cols + j] = Rational::one();
        m
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), rows * cols, "flat data does not match shape");
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_flat(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
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

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    /// Row-major entries.
    pub fn as_flat(&self) -> &[Rational] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<Rational> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .sum()
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.row_reduce().len()
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a.get(col, col).clone();
            det *= &p;
            for r in col + 1..n {
                let factor = a.get(r, col) / &p;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(col, c) * &factor;
                    a.data[r * n + c] -= v;
                }
            }
        }
        det
    }

    /// Inverse, or `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let pivots = aug.row_reduce();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Block-diagonal matrix with the given square blocks.
    pub fn block_diagonal(blocks: &[RationalMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Self::zeros(n, n);
        let mut offset = 0;
        for b in blocks {
            assert!(b.is_square(), "block_diagonal expects square blocks");
            m.paste(offset, offset, b);
            offset += b.rows;
        }
        m
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &RationalMatrix) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                m.paste(i * other.rows, j * other.cols, &other.scale(a));
            }
        }
        m
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &RationalMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        m
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place reduced row echelon form. Pivots are chosen as the first
    /// nonzero entry scanning columns left to right, rows top to bottom.
    /// Returns the pivot columns in order.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = self.get(r, c).recip();
            for j in c..cols {
                let v = &self.data[r * cols + j] * &inv;
                self.data[r * cols + j] = v;
            }
            for i in 0..rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..cols {
                    if self.data[r * cols + j].is_zero() {
                        continue;
                    }
                    let v = &self.data[r * cols + j] * &factor;
                    self.data[i * cols + j] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Infinity norm of the entries, as an exact rational.
    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;

    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = RationalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.data[i * rhs.cols + j] += a * b;
                }
            }
        }
        out
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;

    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;

    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RationalMatrix {
    type Output = RationalMatrix;

    fn neg(self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

/// A list of linearly independent vectors in `Q^ambient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<Vec<Rational>>,
}

impl SubspaceBasis {
    pub fn new(ambient: usize, vectors: Vec<Vec<Rational>>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient));
        Self { ambient, vectors }
    }

    pub fn empty(ambient: usize) -> Self {
        Self::new(ambient, Vec::new())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    /// Basis vectors as rows of a matrix.
    pub fn as_rows(&self) -> RationalMatrix {
        RationalMatrix::from_flat(
            self.vectors.len(),
            self.ambient,
            self.vectors.iter().flatten().cloned().collect(),
        )
    }

    pub fn is_independent(&self) -> bool {
        self.as_rows().rank() == self.dim()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut ech = Echelon::new(self.ambient);
        for b in &self.vectors {
            ech.insert(b);
        }
        ech.coordinates(v).is_some()
    }

    /// Reshapes the vectors (of length `n*n`, row-major) into square matrices.
    pub fn as_matrices(&self, n: usize) -> Vec<RationalMatrix> {
        assert_eq!(self.ambient, n * n, "ambient dimension is not n^2");
        self.vectors
            .iter()
            .map(|v| RationalMatrix::from_flat(n, n, v.clone()))
            .collect()
    }
}

/// Basis of `{v : Mv = 0}`, one vector per free column of the RREF.
pub fn kernel(m: &RationalMatrix) -> SubspaceBasis {
    let mut r = m.clone();
    let pivots = r.row_reduce();
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free).clone();
            }
            v
        })
        .collect();
    SubspaceBasis::new(cols, vectors)
}

/// Incremental row-echelon basis that remembers how each stored row was
/// built from the inserted vectors, so coordinates with respect to the
/// inserted (non-reduced) vectors can be recovered.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<Rational>, Vec<Rational>)>,
    inserted: usize,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    /// Reduces `v` against the stored rows; returns the remainder and the
    /// combination of inserted vectors that was subtracted.
    fn reduce(&self, v: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut rem = v.to_vec();
        let mut combo = vec![Rational::zero(); self.inserted];
        for (pivot, row, row_combo) in &self.rows {
            let factor = rem[*pivot].clone();
            if factor.is_zero() {
                continue;
            }
            for (r, x) in rem.iter_mut().zip(row) {
                if !x.is_zero() {
                    *r -= x * &factor;
                }
            }
            for (c, x) in combo.iter_mut().zip(row_combo) {
                if !x.is_zero() {
                    *c += x * &factor;
                }
            }
        }
        (rem, combo)
    }

    /// Inserts `v` if it is independent of what is stored. Returns whether it was.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim);
        let (rem, combo) = self.reduce(v);
        let Some(pivot) = rem.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = rem[pivot].recip();
        let row: Vec<Rational> = rem.iter().map(|x| x * &inv).collect();
        // row = (v - Σ combo_i w_i) / rem[pivot]
        let mut row_combo: Vec<Rational> = combo.iter().map(|c| -(c * &inv)).collect();
        row_combo.push(inv);
        for (_, _, rc) in &mut self.rows {
            rc.push(Rational::zero());
        }
        self.rows.push((pivot, row, row_combo));
        self.inserted += 1;
        true
    }

    /// Coordinates of `v` in terms of the inserted vectors, or `None` if `v`
    /// is outside their span.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let (rem, combo) = self.reduce(v);
        rem.iter().all(Zero::is_zero).then_some(combo)
    }
}

/// Q-basis of the unital algebra generated by `generators` inside `M_n(Q)`.
///
/// The basis starts with the identity, continues with the generators that are
/// new (in input order), then with new products in discovery order.
pub fn algebra_closure(generators: &[RationalMatrix], n: usize) -> Vec<RationalMatrix> {
    assert!(
        generators.iter().all(|g| g.rows() == n && g.cols() == n),
        "generators must be {n}x{n}"
    );
    let mut ech = Echelon::new(n * n);
    let mut basis = Vec::new();
    let push = |m: RationalMatrix, ech: &mut Echelon, basis: &mut Vec<RationalMatrix>| {
        if ech.insert(m.as_flat()) {
            basis.push(m);
        }
    };
    push(RationalMatrix::identity(n), &mut ech, &mut basis);
    for g in generators {
        push(g.clone(), &mut ech, &mut basis);
    }
    let mut i = 0;
    while i < basis.len() {
        for j in 0..=i {
            let left = &basis[i] * &basis[j];
            let right = &basis[j] * &basis[i];
            push(left, &mut ech, &mut basis);
            push(right, &mut ech, &mut basis);
        }
        i += 1;
    }
    basis
}

/// A linear endomorphism of the `n x n` matrix space.
pub type MatrixMap<'a> = Box<dyn Fn(&RationalMatrix) -> RationalMatrix + Send + Sync + 'a>;

/// Matrix (acting on row-major flattened `n x n` matrices) of a linear map of
/// the matrix space.
pub fn map_matrix(n: usize, map: &dyn Fn(&RationalMatrix) -> RationalMatrix) -> RationalMatrix {
    let dim = n * n;
    let mut out: Option<RationalMatrix> = None;
    for a in 0..n {
        for b in 0..n {
            let image = map(&RationalMatrix::unit(n, n, a, b));
            let m = out.get_or_insert_with(|| RationalMatrix::zeros(image.rows() * image.cols(), dim));
            let col = a * n + b;
            for (row, x) in image.as_flat().iter().enumerate() {
                m.set(row, col, x.clone());
            }
        }
    }
    out.unwrap_or_else(|| RationalMatrix::zeros(0, dim))
}

/// Basis (as flattened `n*n` vectors) of the intersection of the kernels of
/// all `maps`.
pub fn common_kernel(n: usize, maps: &[MatrixMap<'_>]) -> SubspaceBasis {
    let dim = n * n;
    let mut stacked: Vec<Rational> = Vec::new();
    let mut rows = 0;
    for map in maps {
        let m = map_matrix(n, map.as_ref());
        rows += m.rows();
        stacked.extend(m.into_flat());
    }
    let system = RationalMatrix::from_flat(rows, dim, stacked);
    kernel(&system)
}

/// Exact test that the matrices are closed under multiplication within their span.
pub fn is_multiplicatively_closed(basis: &[RationalMatrix]) -> bool {
    let Some(first) = basis.first() else {
        return true;
    };
    let n = first.rows();
    let mut ech = Echelon::new(n * n);
    for b in basis {
        ech.insert(b.as_flat());
    }
    basis.iter().all(|a| {
        basis
            .iter()
            .all(|b| ech.coordinates((a * b).as_flat()).is_some())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j2() -> RationalMatrix {
        RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])
    }

    #[test]
    fn kernel_of_rank_one() {
        let k = kernel(&RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]));
        assert_eq!(k.dim(), 1);
        assert_eq!(k.vectors()[0], vec![rat(-2), rat(1)]);
    }

    #[test]
    fn kernel_trivial_and_full() {
        assert_eq!(kernel(&RationalMatrix::identity(3)).dim(), 0);
        let k = kernel(&RationalMatrix::zeros(2, 2));
        assert_eq!(k.dim(), 2);
        assert!(k.is_independent());
    }

    #[test]
    fn closure_examples() {
        let b = algebra_closure(&[j2()], 2);
        assert_eq!(b.len(), 2);
        assert!(b[0].is_identity());
        assert_eq!(b[1], j2());
        assert_eq!(algebra_closure(&[], 2).len(), 1);
        let e11 = RationalMatrix::unit(2, 2, 0, 0);
        assert_eq!(algebra_closure(&[e11], 2).len(), 2);
    }

    #[test]
    fn closure_of_matrix_units_is_everything() {
        let gens = [RationalMatrix::unit(3, 3, 0, 1), RationalMatrix::unit(3, 3, 1, 2), RationalMatrix::unit(3, 3, 2, 0)];
        let b = algebra_closure(&gens, 3);
        assert_eq!(b.len(), 9);
        assert!(is_multiplicatively_closed(&b));
    }

    #[test]
    fn common_kernel_commutant_in_sp2() {
        let psi = RationalMatrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let j = j2();
        let maps: Vec<MatrixMap> = vec![
            Box::new(|x: &RationalMatrix| &(x * &j) - &(&j * x)),
            Box::new(|x: &RationalMatrix| &(&x.transpose() * &psi) + &(&psi * x)),
        ];
        let k = common_kernel(2, &maps);
        assert_eq!(k.dim(), 1);
        let m = &k.as_matrices(2)[0];
        assert!(m.get(0, 0).is_zero() && m.get(1, 1).is_zero());
        assert_eq!(m.get(0, 1), &-m.get(1, 0));
    }

    #[test]
    fn common_kernel_no_constraints() {
        assert_eq!(common_kernel(2, &[]).dim(), 4);
    }

    #[test]
    fn common_kernel_center_of_full_matrix_algebra() {
        let units: Vec<RationalMatrix> = (0..4).map(|k| RationalMatrix::unit(2, 2, k / 2, k % 2)).collect();
        let maps: Vec<MatrixMap> = units
            .iter()
            .map(|b| Box::new(move |x: &RationalMatrix| &(x * b) - &(b * x)) as MatrixMap)
            .collect();
        let k = common_kernel(2, &maps);
        assert_eq!(k.dim(), 1);
        assert!(k.contains(RationalMatrix::identity(2).as_flat()));
    }

    #[test]
    fn determinant_and_inverse() {
        let m = RationalMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.determinant(), rat(18));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert!(RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn echelon_coordinates_use_inserted_vectors() {
        let mut e = Echelon::new(2);
        assert!(e.insert(&[rat(1), rat(1)]));
        assert!(e.insert(&[rat(1), rat(-1)]));
        assert!(!e.insert(&[rat(3), rat(1)]));
        assert_eq!(e.coordinates(&[rat(3), rat(1)]).unwrap(), vec![rat(2), rat(1)]);
    }
}
