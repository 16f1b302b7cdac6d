//! Small dense matrices over Q(zeta_N), used for fiber actions and
//! cohomology representations.

use crate::scalars::Cyclotomic;
use crate::CoreError;
use std::fmt;
use std::ops::{Add, Mul};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Cyclotomic>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Cyclotomic::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Cyclotomic::one());
        }
        m
    }

    pub fn scalar(n: usize, c: Cyclotomic) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Cyclotomic>>) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyclotomic {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cyclotomic) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn trace(&self) -> Cyclotomic {
        assert_eq!(self.rows, self.cols);
        let mut t = Cyclotomic::zero();
        for i in 0..self.rows {
            t = &t + self.get(i, i);
        }
        t
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse by Gauss-Jordan elimination; errors on singular input.
    pub fn inverse(&self) -> Result<Mat, CoreError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(CoreError::SingularMatrix)?;
            if pivot != col {
                for j in 0..n {
                    let x = a.get(pivot, j).clone();
                    let y = a.get(col, j).clone();
                    a.set(pivot, j, y);
                    a.set(col, j, x);
                    let x = inv.get(pivot, j).clone();
                    let y = inv.get(col, j).clone();
                    inv.set(pivot, j, y);
                    inv.set(col, j, x);
                }
            }
            let p = a.get(col, col).clone();
            let pinv = p.inv()?;
            for j in 0..n {
                a.set(col, j, &*a.get(col, j) * &pinv);
                inv.set(col, j, &*inv.get(col, j) * &pinv);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = &*a.get(r, j) - &(&f * a.get(col, j));
                    a.set(r, j, v);
                    let v = &*inv.get(r, j) - &(&f * inv.get(col, j));
                    inv.set(r, j, v);
                }
            }
        }
        Ok(inv)
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(other.data.iter()) {
            *x = &*x + y;
        }
        out
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if other.get(k, j).is_zero() {
                        continue;
                    }
                    let v = &*out.get(i, j) + &(self.get(i, k) * other.get(k, j));
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
