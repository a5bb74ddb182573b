//! Dense integer matrices and the Smith normal form.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Mat {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    /// Matrix whose `j`-th column is `images[j]`: the linear map sending basis
    /// vector `e_j` to `images[j]`.
    pub fn from_images(images: &[Vec<i128>]) -> Self {
        Mat::from_rows(images).transpose()
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

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i128) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Mat {
        (0..e).fold(Mat::identity(self.rows), |acc, _| acc.mul(self))
    }

    /// Least `n ≥ 1` with `selfⁿ = I`, searched up to `bound`.
    pub fn order(&self, bound: u32) -> Option<u32> {
        let id = Mat::identity(self.rows);
        let mut acc = self.clone();
        for n in 1..=bound {
            if acc == id {
                return Some(n);
            }
            acc = acc.mul(self);
        }
        None
    }

    /// `I + T + … + T^(n−1)`.
    pub fn norm(&self, n: u32) -> Mat {
        let mut acc = Mat::zeros(self.rows, self.cols);
        let mut p = Mat::identity(self.rows);
        for _ in 0..n {
            acc = acc.add(&p);
            p = p.mul(self);
        }
        acc
    }

    /// `I − T`.
    pub fn delta(&self) -> Mat {
        Mat::identity(self.rows).sub(self)
    }

    /// Block matrix from a grid of equally shaped blocks (`None` = zero block).
    pub fn blocks(grid: &[Vec<Option<&Mat>>], block_rows: usize, block_cols: usize) -> Mat {
        let br = grid.len();
        let bc = grid.first().map_or(0, Vec::len);
        let mut out = Mat::zeros(br * block_rows, bc * block_cols);
        for (bi, row) in grid.iter().enumerate() {
            for (bj, blk) in row.iter().enumerate() {
                if let Some(b) = blk {
                    assert_eq!((b.rows, b.cols), (block_rows, block_cols), "block shape");
                    for i in 0..block_rows {
                        for j in 0..block_cols {
                            out[(bi * block_rows + i, bj * block_cols + j)] = b[(i, j)];
                        }
                    }
                }
            }
        }
        out
    }

    /// Horizontal concatenation.
    pub fn hcat(parts: &[Mat]) -> Mat {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows);
            for i in 0..rows {
                for j in 0..m.cols {
                    out[(i, off + j)] = m[(i, j)];
                }
            }
            off += m.cols;
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += k · row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, k: i128) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] = self[(dst, j)]
                .checked_add(k.checked_mul(v).expect("entry overflow"))
                .expect("entry overflow");
        }
    }

    /// `col[dst] += k · col[src]`.
    fn add_col(&mut self, dst: usize, src: usize, k: i128) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] = self[(i, dst)]
                .checked_add(k.checked_mul(v).expect("entry overflow"))
                .expect("entry overflow");
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal, each nonzero
/// diagonal entry dividing the next. `v_inv` is `V⁻¹`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Mat,
    pub d: Mat,
    pub v: Mat,
    pub v_inv: Mat,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.rank).map(|i| self.d[(i, i)]).collect()
    }
}

pub fn smith_normal_form(a: &Mat) -> Smith {
    let (r, c) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = Mat::identity(r);
    let mut v = Mat::identity(c);
    let mut vi = Mat::identity(c);
    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = smallest_entry(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        vi.swap_rows(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..r {
                let q = d[(i, t)].div_euclid(d[(t, t)]);
                if q != 0 {
                    d.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                dirty |= d[(i, t)] != 0;
            }
            for j in t + 1..c {
                let q = d[(t, j)].div_euclid(d[(t, t)]);
                if q != 0 {
                    d.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                    vi.add_row(t, j, q);
                }
                dirty |= d[(t, j)] != 0;
            }
            if dirty {
                let (pi, pj) = smallest_in_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                vi.swap_rows(t, pj);
                continue;
            }
            let p = d[(t, t)];
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| d[(i, j)] % p != 0));
            match bad {
                Some(i) => {
                    d.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Smith {
        u,
        d,
        v,
        v_inv: vi,
        rank: t,
    }
}

fn smallest_entry(d: &Mat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d[(i, j)].abs();
            if x != 0 && best.is_none_or(|(bi, bj)| x < d[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t` (from position `t` on).
fn smallest_in_cross(d: &Mat, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut val = if d[(t, t)] != 0 {
        d[(t, t)].abs()
    } else {
        i128::MAX
    };
    for i in t + 1..d.rows {
        let x = d[(i, t)].abs();
        if x != 0 && x < val {
            val = x;
            best = (i, t);
        }
    }
    for j in t + 1..d.cols {
        let x = d[(t, j)].abs();
        if x != 0 && x < val {
            val = x;
            best = (t, j);
        }
    }
    best
}
