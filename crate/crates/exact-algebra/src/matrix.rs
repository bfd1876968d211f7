use std::collections::HashMap;

use num_traits::Zero;

use crate::error::AlgebraError;
use crate::poly::MultiPoly;
use crate::ratfun::RationalFunction;
use crate::vars::VarSet;
use crate::Q;

/// Dense rectangular matrix over an exact entry type (polynomials or
/// rational functions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> PolyMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        PolyMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> PolyMatrix<U> {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|t| f(t)).collect(),
        }
    }

    /// Submatrix keeping the given rows and columns, in order.
    pub fn select(&self, keep_rows: &[usize], keep_cols: &[usize]) -> PolyMatrix<T> {
        PolyMatrix::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
            self.at(keep_rows[i], keep_cols[j]).clone()
        })
    }
}

impl PolyMatrix<MultiPoly> {
    pub fn vars(&self) -> Option<&VarSet> {
        self.data.first().map(|p| p.vars())
    }

    /// First entry witnessing failure of `M + M^T = 0`, if any.
    pub fn skew_violation(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if !self.at(i, j).add(self.at(j, i)).is_zero() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Exact determinant by fraction-free Bareiss elimination. Polynomial
    /// input yields a polynomial determinant with no intermediate fractions
    /// beyond exact divisions.
    pub fn bareiss_determinant(&self) -> Result<MultiPoly, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let vars = match self.vars() {
            Some(v) => v.clone(),
            None => return Err(AlgebraError::NotSquare { rows: 0, cols: 0 }),
        };
        if n == 0 {
            return Ok(MultiPoly::one(&vars));
        }
        let mut m: Vec<Vec<MultiPoly>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut sign = false;
        let mut prev = MultiPoly::one(&vars);
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
                match swap {
                    Some(i) => {
                        m.swap(k, i);
                        sign = !sign;
                    }
                    None => return Ok(MultiPoly::zero(&vars)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = t.divide_exact(&prev).expect("Bareiss division is exact");
                }
                m[i][k] = MultiPoly::zero(&vars);
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if sign { det.neg() } else { det })
    }

    /// Pfaffian of an even-dimensional skew-symmetric matrix, expanded along
    /// the first row with memoization on index subsets. Satisfies
    /// `Pf(M)^2 = det(M)` with the sign fixed by that expansion order.
    pub fn pfaffian(&self) -> Result<MultiPoly, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NotSquare { rows: self.rows, cols: self.cols });
        }
        if let Some((i, j)) = self.skew_violation() {
            return Err(AlgebraError::NotSkew { i, j });
        }
        let n = self.rows;
        if n % 2 != 0 {
            return Err(AlgebraError::OddDimension { dim: n });
        }
        assert!(n <= 32, "pfaffian subset memoization uses u32 masks");
        let vars = self.vars().unwrap().clone();
        if n == 0 {
            return Ok(MultiPoly::one(&vars));
        }
        let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
        Ok(self.pf_rec(((1u64 << n) - 1) as u32, &vars, &mut memo))
    }

    fn pf_rec(&self, mask: u32, vars: &VarSet, memo: &mut HashMap<u32, MultiPoly>) -> MultiPoly {
        if mask == 0 {
            return MultiPoly::one(vars);
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let idx: Vec<usize> = (0..self.rows).filter(|&i| mask & (1 << i) != 0).collect();
        let first = idx[0];
        let mut acc = MultiPoly::zero(vars);
        for (k, &j) in idx.iter().enumerate().skip(1) {
            let a = self.at(first, j);
            if a.is_zero() {
                continue;
            }
            let sub = mask & !(1 << first) & !(1 << j);
            let term = a.mul(&self.pf_rec(sub, vars, memo));
            // (-1)^(k+1) with k the position of j among the remaining indices
            acc = if k % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        memo.insert(mask, acc.clone());
        acc
    }

    /// Maximum exact rank over `trials` random evaluations. The sampler
    /// produces one full assignment per call, aligned with the matrix
    /// variable set; rejection failures surface as `SamplerExhausted`.
    pub fn generic_rank(
        &self,
        mut sampler: impl FnMut(&VarSet) -> Result<Vec<Q>, AlgebraError>,
        trials: usize,
    ) -> Result<usize, AlgebraError> {
        assert!(trials >= 1);
        let vars = match self.vars() {
            Some(v) => v.clone(),
            None => return Ok(0),
        };
        let mut best = 0;
        for _ in 0..trials {
            let point = sampler(&vars)?;
            let m: Vec<Vec<Q>> = (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.at(i, j).eval(&point)).collect())
                .collect();
            best = best.max(rank_q(m));
            if best == self.rows.min(self.cols) {
                break;
            }
        }
        Ok(best)
    }

    /// Exact symbolic kernel basis over the fraction field. Each basis
    /// vector is cleared to a polynomial vector with no common factor and
    /// positive leading coefficient in its first nonzero entry.
    pub fn nullspace_generic(&self) -> Vec<Vec<MultiPoly>> {
        let vars = match self.vars() {
            Some(v) => v.clone(),
            None => return Vec::new(),
        };
        let rf = self.map(|p| RationalFunction::from_poly(p.clone()));
        let (rref, pivots) = rref_rf(&rf);
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut vec_rf: Vec<RationalFunction> =
                vec![RationalFunction::zero(&vars); self.cols];
            vec_rf[free] = RationalFunction::one(&vars);
            for (r, &pc) in pivots.iter().enumerate() {
                vec_rf[pc] = rref.at(r, free).neg();
            }
            basis.push(clear_vector(&vec_rf, &vars));
        }
        basis
    }
}

/// Reduced row echelon form over the fraction field; returns the reduced
/// matrix and the pivot column of each nonzero row.
fn rref_rf(m: &PolyMatrix<RationalFunction>) -> (PolyMatrix<RationalFunction>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows).find(|&i| !a.at(i, c).is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        if piv != r {
            for j in 0..cols {
                let tmp = a.at(piv, j).clone();
                a.set(piv, j, a.at(r, j).clone());
                a.set(r, j, tmp);
            }
        }
        let inv = a.at(r, c).clone();
        for j in 0..cols {
            a.set(r, j, a.at(r, j).div(&inv));
        }
        for i in 0..rows {
            if i == r || a.at(i, c).is_zero() {
                continue;
            }
            let f = a.at(i, c).clone();
            for j in 0..cols {
                let v = a.at(i, j).sub(&f.mul(a.at(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Clears denominators and common polynomial factors from a rational vector.
fn clear_vector(v: &[RationalFunction], vars: &VarSet) -> Vec<MultiPoly> {
    let mut den = MultiPoly::one(vars);
    for rf in v {
        let extra = rf
            .denom()
            .divide_exact(&MultiPoly::gcd(&den, rf.denom()))
            .expect("gcd divides");
        den = den.mul(&extra);
    }
    let mut polys: Vec<MultiPoly> = v
        .iter()
        .map(|rf| {
            rf.numer()
                .mul(&den.divide_exact(rf.denom()).expect("lcm divisible"))
        })
        .collect();
    let mut g = MultiPoly::zero(vars);
    for p in &polys {
        g = MultiPoly::gcd(&g, p);
    }
    if !g.is_constant() && !g.is_zero() {
        for p in &mut polys {
            *p = p.divide_exact(&g).expect("gcd divides");
        }
    }
    // Sign-normalize on the first nonzero entry, then strip rational content.
    if let Some(first) = polys.iter().position(|p| !p.is_zero()) {
        let c = polys[first].content();
        for p in &mut polys {
            *p = p.scale(&(Q::from_integer(1.into()) / &c));
        }
    }
    polys
}

impl PolyMatrix<RationalFunction> {
    /// Determinant over the fraction field, via Bareiss on the cleared
    /// numerator matrix divided by the product of row denominators.
    pub fn determinant(&self) -> Result<RationalFunction, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let vars = match self.data.first() {
            Some(rf) => rf.vars().clone(),
            None => return Err(AlgebraError::NotSquare { rows: 0, cols: 0 }),
        };
        let mut denoms = Vec::with_capacity(self.rows);
        let mut cleared = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut d = MultiPoly::one(&vars);
            for j in 0..self.cols {
                let extra = self
                    .at(i, j)
                    .denom()
                    .divide_exact(&MultiPoly::gcd(&d, self.at(i, j).denom()))
                    .expect("gcd divides");
                d = d.mul(&extra);
            }
            let row: Vec<MultiPoly> = (0..self.cols)
                .map(|j| {
                    self.at(i, j)
                        .numer()
                        .mul(&d.divide_exact(self.at(i, j).denom()).expect("lcm divisible"))
                })
                .collect();
            denoms.push(d);
            cleared.push(row);
        }
        let det = PolyMatrix::from_rows(cleared).bareiss_determinant()?;
        let mut den = MultiPoly::one(&vars);
        for d in denoms {
            den = den.mul(&d);
        }
        Ok(RationalFunction::new(det, den))
    }
}

/// Exact rank of a rational matrix by Gaussian elimination.
pub fn rank_q(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let piv = (row..rows).find(|&i| !m[i][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        m.swap(row, piv);
        let inv = m[row][col].clone();
        for j in col..cols {
            let v = m[row][j].clone() / &inv;
            m[row][j] = v;
        }
        for i in 0..rows {
            if i == row || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in col..cols {
                let v = m[i][j].clone() - f.clone() * &m[row][j];
                m[i][j] = v;
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}
