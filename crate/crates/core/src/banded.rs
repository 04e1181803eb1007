//! Banded matrices stored by diagonals, with products and LU solves.

use crate::error::{Error, Result};

/// Real n×n matrix whose nonzeros lie on diagonals -lower..=upper.
///
/// Storage is diagonal-major: diagonal with offset `k` occupies the contiguous
/// slice `data[(k + lower) * n..][..n]`, indexed by row. Slots whose column
/// falls outside the matrix stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        assert!(n > 0, "banded matrix must have positive dimension");
        let lower = lower.min(n - 1);
        let upper = upper.min(n - 1);
        BandedMatrix {
            n,
            lower,
            upper,
            data: vec![0.0; (lower + upper + 1) * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        m.data.fill(c);
        m
    }

    /// Builds a Toeplitz band from `stencil[k]` placed on diagonal `first + k`,
    /// truncating rows at the matrix edge.
    pub fn toeplitz(n: usize, first: isize, stencil: &[f64]) -> Self {
        let last = first + stencil.len() as isize - 1;
        let lower = (-first).max(0) as usize;
        let upper = last.max(0) as usize;
        let mut m = Self::zeros(n, lower, upper);
        for (k, &c) in stencil.iter().enumerate() {
            let off = first + k as isize;
            if off.unsigned_abs() >= n {
                continue;
            }
            m.diag_fill(off, c);
        }
        m
    }

    pub fn from_fn(n: usize, lower: usize, upper: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n, lower, upper);
        for i in 0..n {
            let (lo, hi) = m.row_range(i);
            for j in lo..=hi {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn lower_bw(&self) -> usize {
        self.lower
    }

    #[inline]
    pub fn upper_bw(&self) -> usize {
        self.upper
    }

    /// Number of stored diagonals.
    pub fn n_diagonals(&self) -> usize {
        self.lower + self.upper + 1
    }

    /// Column range of the band in row `i`.
    #[inline]
    pub fn row_range(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.lower), (i + self.upper).min(self.n - 1))
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize;
        if off < -(self.lower as isize) || off > self.upper as isize {
            None
        } else {
            Some((off + self.lower as isize) as usize * self.n + i)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index out of range");
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Panics when (i, j) is outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.n && j < self.n, "index out of range");
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside band -{}..={}", self.lower, self.upper));
        self.data[s] = v;
    }

    /// Valid row range of diagonal `off`.
    #[inline]
    fn diag_rows(&self, off: isize) -> std::ops::Range<usize> {
        if off >= 0 {
            0..self.n - off as usize
        } else {
            (-off) as usize..self.n
        }
    }

    #[inline]
    fn diag_slice(&self, off: isize) -> &[f64] {
        let d = (off + self.lower as isize) as usize;
        &self.data[d * self.n..(d + 1) * self.n]
    }

    fn diag_fill(&mut self, off: isize, c: f64) {
        let rows = self.diag_rows(off);
        let d = (off + self.lower as isize) as usize;
        let n = self.n;
        self.data[d * n + rows.start..d * n + rows.end].fill(c);
    }

    fn offsets(&self) -> impl Iterator<Item = isize> {
        -(self.lower as isize)..=self.upper as isize
    }

    /// Main diagonal.
    pub fn diagonal(&self) -> &[f64] {
        self.diag_slice(0)
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.lower == 0 || self.offsets().filter(|&k| k < 0).all(|k| self.diag_is_zero(k))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.upper == 0 || self.offsets().filter(|&k| k > 0).all(|k| self.diag_is_zero(k))
    }

    fn diag_is_zero(&self, off: isize) -> bool {
        self.diag_slice(off)[self.diag_rows(off)].iter().all(|&v| v == 0.0)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let (lo, hi) = self.row_range(i);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= c);
        m
    }

    /// `a·self + b·other`, with the union of both bands.
    pub fn lin_comb(&self, a: f64, other: &BandedMatrix, b: f64) -> Result<Self> {
        check_dims(self.n, other.n)?;
        let mut out = Self::zeros(self.n, self.lower.max(other.lower), self.upper.max(other.upper));
        for (src, coef) in [(self, a), (other, b)] {
            for off in src.offsets() {
                let rows = src.diag_rows(off);
                let s = src.diag_slice(off);
                let d = (off + out.lower as isize) as usize * out.n;
                for i in rows {
                    out.data[d + i] += coef * s[i];
                }
            }
        }
        Ok(out)
    }

    /// `self + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        let d = m.lower * m.n;
        m.data[d..d + m.n].iter_mut().for_each(|v| *v += c);
        m
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(v, &mut out)?;
        Ok(out)
    }

    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dims(self.n, v.len())?;
        check_dims(self.n, out.len())?;
        out.fill(0.0);
        for off in self.offsets() {
            let rows = self.diag_rows(off);
            let d = self.diag_slice(off);
            let shift = off;
            for i in rows {
                out[i] += d[i] * v[(i as isize + shift) as usize];
            }
        }
        Ok(())
    }

    /// Matrix product; bandwidths add (clamped at n - 1).
    pub fn mul(&self, other: &BandedMatrix) -> Result<BandedMatrix> {
        check_dims(self.n, other.n)?;
        let n = self.n;
        let mut out = Self::zeros(n, self.lower + other.lower, self.upper + other.upper);
        for ka in self.offsets() {
            let a = self.diag_slice(ka);
            for kb in other.offsets() {
                let kc = ka + kb;
                if kc.unsigned_abs() >= n {
                    continue;
                }
                let b = other.diag_slice(kb);
                let dc = (kc + out.lower as isize) as usize * n;
                // rows i with i + ka and i + ka + kb inside [0, n)
                let lo = 0isize.max(-ka).max(-kc);
                let hi = (n as isize).min(n as isize - ka).min(n as isize - kc);
                for i in lo..hi {
                    let m = (i + ka) as usize;
                    out.data[dc + i as usize] += a[i as usize] * b[m];
                }
            }
        }
        Ok(out)
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: u32) -> BandedMatrix {
        let mut acc = BandedMatrix::identity(self.n);
        for _ in 0..k {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    pub fn lu(&self) -> Result<BandedLu> {
        BandedLu::factor(self)
    }
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

fn pivot_tol(a: &BandedMatrix) -> f64 {
    a.max_abs() * f64::EPSILON * a.n as f64
}

/// Factorised banded matrix ready for repeated solves.
///
/// Triangular matrices are solved by substitution on the original band;
/// everything else goes through Gaussian elimination with partial pivoting.
#[derive(Debug, Clone)]
pub enum BandedLu {
    Upper(BandedMatrix),
    Lower(BandedMatrix),
    General(GeneralLu),
}

#[derive(Debug, Clone)]
pub struct GeneralLu {
    n: usize,
    lower: usize,
    /// Row width: lower + (lower + upper) + 1, columns i - lower ..
    width: usize,
    rows: Vec<f64>,
    piv: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        let tol = pivot_tol(a);
        if a.is_upper_triangular() || a.is_lower_triangular() {
            if let Some(row) = a.diagonal().iter().position(|d| d.abs() <= tol) {
                return Err(Error::Singular { row });
            }
            return Ok(if a.is_upper_triangular() {
                BandedLu::Upper(a.clone())
            } else {
                BandedLu::Lower(a.clone())
            });
        }
        GeneralLu::factor(a, tol).map(BandedLu::General)
    }

    pub fn n(&self) -> usize {
        match self {
            BandedLu::Upper(m) | BandedLu::Lower(m) => m.n,
            BandedLu::General(g) => g.n,
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        check_dims(self.n(), x.len())?;
        match self {
            BandedLu::Upper(m) => upper_substitute(m, x),
            BandedLu::Lower(m) => lower_substitute(m, x),
            BandedLu::General(g) => g.solve_in_place(x),
        }
        Ok(())
    }
}

fn upper_substitute(m: &BandedMatrix, x: &mut [f64]) {
    let n = m.n;
    let base = m.lower * n;
    for i in (0..n).rev() {
        let mut s = x[i];
        let hi = m.upper.min(n - 1 - i);
        for k in 1..=hi {
            s -= m.data[base + k * n + i] * x[i + k];
        }
        x[i] = s / m.data[base + i];
    }
}

fn lower_substitute(m: &BandedMatrix, x: &mut [f64]) {
    let n = m.n;
    let base = m.lower * n;
    for i in 0..n {
        let mut s = x[i];
        let lo = m.lower.min(i);
        for k in 1..=lo {
            s -= m.data[base - k * n + i] * x[i - k];
        }
        x[i] = s / m.data[base + i];
    }
}

impl GeneralLu {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.lower - i)
    }

    fn factor(a: &BandedMatrix, tol: f64) -> Result<Self> {
        let n = a.n;
        let (p, q) = (a.lower, a.upper);
        let width = 2 * p + q + 1;
        let mut lu = GeneralLu {
            n,
            lower: p,
            width,
            rows: vec![0.0; n * width],
            piv: vec![0; n],
        };
        for i in 0..n {
            let (lo, hi) = a.row_range(i);
            for j in lo..=hi {
                let s = lu.idx(i, j);
                lu.rows[s] = a.get(i, j);
            }
        }
        for k in 0..n {
            let last_row = (k + p).min(n - 1);
            let last_col = (k + p + q).min(n - 1);
            let mut r = k;
            let mut best = lu.rows[lu.idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = lu.rows[lu.idx(i, k)].abs();
                if v > best {
                    best = v;
                    r = i;
                }
            }
            if best <= tol {
                return Err(Error::Singular { row: k });
            }
            lu.piv[k] = r;
            if r != k {
                for j in k..=last_col {
                    let (s1, s2) = (lu.idx(k, j), lu.idx(r, j));
                    lu.rows.swap(s1, s2);
                }
            }
            let pivot = lu.rows[lu.idx(k, k)];
            for i in k + 1..=last_row {
                let sik = lu.idx(i, k);
                let l = lu.rows[sik] / pivot;
                lu.rows[sik] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let skj = lu.idx(k, j);
                        let sij = lu.idx(i, j);
                        lu.rows[sij] -= l * lu.rows[skj];
                    }
                }
            }
        }
        Ok(lu)
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        let p = self.lower;
        let span = self.width - p - 1;
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for i in k + 1..=(k + p).min(n - 1) {
                x[i] -= self.rows[self.idx(i, k)] * xk;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + span).min(n - 1) {
                s -= self.rows[self.idx(i, j)] * x[j];
            }
            x[i] = s / self.rows[self.idx(i, i)];
        }
    }
}

pub fn band_matvec(a: &BandedMatrix, v: &[f64]) -> Result<Vec<f64>> {
    a.matvec(v)
}

pub fn band_mul(a: &BandedMatrix, b: &BandedMatrix) -> Result<BandedMatrix> {
    a.mul(b)
}

/// One-shot factor and solve.
pub fn band_lu_solve(a: &BandedMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    check_dims(a.n, rhs.len())?;
    a.lu()?.solve(rhs)
}
