//! Sparse exact linear algebra over `Ratio<i64>` with checked arithmetic.
//!
//! Every operation that could overflow returns an error instead of wrapping,
//! so a result is either exact or absent.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Zero};

pub type Q = Ratio<i64>;

/// Sparse vector: (index, value) pairs, indices strictly increasing, no zeros.
pub type SparseVec = Vec<(usize, Q)>;

fn overflow() -> Error {
    Error::Integrity("i64 overflow in exact arithmetic".into())
}

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn add(a: &Q, b: &Q) -> Result<Q> {
    a.checked_add(b).ok_or_else(overflow)
}

pub fn sub(a: &Q, b: &Q) -> Result<Q> {
    a.checked_sub(b).ok_or_else(overflow)
}

pub fn mul(a: &Q, b: &Q) -> Result<Q> {
    a.checked_mul(b).ok_or_else(overflow)
}

pub fn div(a: &Q, b: &Q) -> Result<Q> {
    a.checked_div(b).ok_or_else(overflow)
}

/// Returns y + a*x.
pub fn axpy(y: &[(usize, Q)], a: &Q, x: &[(usize, Q)]) -> Result<SparseVec> {
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j == x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i == y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i].clone());
            i += 1;
        } else if take_x {
            out.push((x[j].0, mul(a, &x[j].1)?));
            j += 1;
        } else {
            let v = add(&y[i].1, &mul(a, &x[j].1)?)?;
            if !v.is_zero() {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

pub fn scale(x: &[(usize, Q)], a: &Q) -> Result<SparseVec> {
    if a.is_zero() {
        return Ok(Vec::new());
    }
    x.iter().map(|(i, v)| Ok((*i, mul(a, v)?))).collect()
}

pub fn get(x: &[(usize, Q)], idx: usize) -> Q {
    match x.binary_search_by_key(&idx, |e| e.0) {
        Ok(p) => x[p].1,
        Err(_) => Q::zero(),
    }
}

/// Builds a sparse vector from unsorted (index, value) terms, merging duplicates.
pub fn from_terms(mut terms: Vec<(usize, Q)>) -> Result<SparseVec> {
    terms.sort_by_key(|t| t.0);
    let mut out: SparseVec = Vec::with_capacity(terms.len());
    for (i, v) in terms {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = add(&last.1, &v)?,
            _ => out.push((i, v)),
        }
    }
    out.retain(|t| !t.1.is_zero());
    Ok(out)
}

/// Reduced row echelon form of a sparse matrix.
#[derive(Debug, Clone)]
pub struct Rref {
    pub ncols: usize,
    /// Rows ordered by pivot column; each row has 1 at its pivot and zero at
    /// every other pivot column.
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Kernel basis; the vector for free column f has 1 at f and 0 at every
    /// other free column.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let free = self.free_columns();
        let mut pos = vec![usize::MAX; self.ncols];
        for (k, &f) in free.iter().enumerate() {
            pos[f] = k;
        }
        let mut terms: Vec<Vec<(usize, Q)>> = free.iter().map(|&f| vec![(f, Q::one())]).collect();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            for (c, v) in row {
                if *c != p {
                    terms[pos[*c]].push((p, -v));
                }
            }
        }
        terms
            .into_iter()
            .map(|mut t| {
                t.sort_by_key(|e| e.0);
                t
            })
            .collect()
    }
}

/// Computes the reduced row echelon form. The result depends only on the row
/// space, not on the order in which rows are supplied.
pub fn rref(input: impl IntoIterator<Item = SparseVec>, ncols: usize) -> Result<Rref> {
    let mut by_lead: Vec<Option<SparseVec>> = vec![None; ncols];
    for mut row in input {
        loop {
            let Some(&(c, lead)) = row.first() else { break };
            match &by_lead[c] {
                Some(p) => row = axpy(&row, &-lead, p)?,
                None => {
                    let inv = div(&Q::one(), &lead)?;
                    by_lead[c] = Some(scale(&row, &inv)?);
                    break;
                }
            }
        }
    }
    let pivots: Vec<usize> = (0..ncols).filter(|&c| by_lead[c].is_some()).collect();
    for &p in pivots.iter().rev() {
        let row = by_lead[p].take().expect("pivot row");
        let mut reduced = row.clone();
        for (c, v) in row.iter().skip(1) {
            if let Some(other) = &by_lead[*c] {
                reduced = axpy(&reduced, &-v, other)?;
            }
        }
        by_lead[p] = Some(reduced);
    }
    let rows = pivots
        .iter()
        .map(|&p| by_lead[p].take().expect("pivot row"))
        .collect();
    Ok(Rref { ncols, rows, pivots })
}

/// Dense square matrix over Q, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<Q>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Q::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Q::one();
        }
        Matrix { n, data }
    }

    /// Builds a matrix from its columns given as sparse vectors.
    pub fn from_columns(cols: &[SparseVec]) -> Self {
        let n = cols.len();
        let mut data = vec![Q::zero(); n * n];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col {
                data[i * n + j] = *v;
            }
        }
        Matrix { n, data }
    }

    pub fn at(&self, i: usize, j: usize) -> Q {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> Result<Q> {
        (0..self.n).try_fold(Q::zero(), |acc, i| add(&acc, &self.at(i, i)))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        let n = self.n;
        let mut data = vec![Q::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        data[i * n + j] = add(&data[i * n + j], &mul(&a, &b)?)?;
                    }
                }
            }
        }
        Ok(Matrix { n, data })
    }

    pub fn rows_sparse(&self) -> Vec<SparseVec> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter_map(|j| {
                        let v = self.at(i, j);
                        (!v.is_zero()).then_some((j, v))
                    })
                    .collect()
            })
            .collect()
    }

    /// Rows of self - I.
    pub fn minus_identity_rows(&self) -> Result<Vec<SparseVec>> {
        let mut rows = self.rows_sparse();
        for (i, row) in rows.iter_mut().enumerate() {
            *row = axpy(row, &q(-1), &[(i, Q::one())])?;
        }
        Ok(rows)
    }
}
