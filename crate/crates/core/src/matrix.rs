//! Dense matrices over 𝔽_q and Gaussian elimination over 𝔽_{q^m}.

use crate::field::{BaseField, ExtField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows: Vec<Vec<u8>> = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        let mut m = Self::from_rows(&rows);
        m.cols = self.cols;
        m
    }

    pub fn mul(&self, f: &BaseField, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &BaseField, v: &[u8]) -> Vec<u8> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).fold(0u8, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))).collect()
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self, f: &BaseField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = f.inv(self.get(r, c));
            self.scale_row(f, r, inv);
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        self.add_row_multiple(f, i, r, f.neg(factor));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Rank by forward elimination only.
    pub fn rank(&self, f: &BaseField) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = f.inv(m.get(r, c));
            m.scale_row(f, r, inv);
            for i in r + 1..m.rows {
                let factor = m.get(i, c);
                if factor != 0 {
                    m.add_row_multiple(f, i, r, f.neg(factor));
                }
            }
            r += 1;
        }
        r
    }

    pub fn inverse(&self, f: &BaseField) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// A solution of `self · x = b`, with whether it is the only one.
    pub fn solve(&self, f: &BaseField, b: &[u8]) -> Option<(Vec<u8>, bool)> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for (i, &bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, bi);
        }
        let pivots = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u8; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some((x, pivots.len() == self.cols))
    }

    /// Greedily picks rows, in order, that extend the row space; stops at
    /// `want` rows.
    pub fn independent_rows(&self, f: &BaseField, want: usize) -> Vec<usize> {
        let mut chosen = Vec::new();
        // echelon rows with their pivot column, sorted by pivot
        let mut basis: Vec<(usize, Vec<u8>)> = Vec::new();
        for i in 0..self.rows {
            if chosen.len() == want {
                break;
            }
            let mut v = self.row(i).to_vec();
            for (p, row) in &basis {
                let c = v[*p];
                if c != 0 {
                    let c = f.neg(c);
                    for (x, &y) in v.iter_mut().zip(row) {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
            }
            if let Some(p) = v.iter().position(|&x| x != 0) {
                let inv = f.inv(v[p]);
                for x in v.iter_mut() {
                    *x = f.mul(*x, inv);
                }
                let at = basis.partition_point(|(q, _)| *q < p);
                basis.insert(at, (p, v));
                chosen.push(i);
            }
        }
        chosen
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, f: &BaseField, r: usize, c: u8) {
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = f.mul(*x, c);
        }
    }

    /// row[dst] += c · row[src]
    fn add_row_multiple(&mut self, f: &BaseField, dst: usize, src: usize, c: u8) {
        let cols = self.cols;
        let (d, s) = if dst < src {
            let (a, b) = self.data.split_at_mut(src * cols);
            (&mut a[dst * cols..(dst + 1) * cols], &b[..cols])
        } else {
            let (a, b) = self.data.split_at_mut(dst * cols);
            (&mut b[..cols], &a[src * cols..(src + 1) * cols])
        };
        if c == 1 && f.q() == 2 {
            for (x, &y) in d.iter_mut().zip(s) {
                *x ^= y;
            }
        } else {
            for (x, &y) in d.iter_mut().zip(s) {
                *x = f.add(*x, f.mul(c, y));
            }
        }
    }
}

/// Reduced row echelon form over 𝔽_{q^m}; returns the pivot columns.
pub fn ext_rref<F: ExtField>(field: &F, rows: &mut [Vec<F::Elem>]) -> Vec<usize> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n_cols {
        if r == n_rows {
            break;
        }
        let Some(p) = (r..n_rows).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(p, r);
        let inv = field.inv(&rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || field.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = field.sub(x, &field.mul(&factor, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank over 𝔽_{q^m} by forward elimination; one inversion per pivot.
pub fn ext_rank<F: ExtField>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut rows = rows.to_vec();
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n_cols {
        if r == n_rows {
            break;
        }
        let Some(p) = (r..n_rows).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(p, r);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &mut head[r];
        let inv = field.inv(&pivot_row[c]).expect("pivot is nonzero");
        for x in &mut pivot_row[c + 1..] {
            *x = field.mul(&inv, x);
        }
        for row in tail.iter_mut() {
            if field.is_zero(&row[c]) {
                continue;
            }
            // row ← row − row[c]·pivot_row, pivot_row[c] = 1
            let factor = row[c].clone();
            for j in c + 1..n_cols {
                let t = field.mul(&factor, &pivot_row[j]);
                row[j] = field.sub(&row[j], &t);
            }
            row[c] = field.zero();
        }
        r += 1;
    }
    r
}
