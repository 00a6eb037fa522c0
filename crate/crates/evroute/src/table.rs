//! Dense n x n and n x n x n tables indexed by vertex ids.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(n: usize, value: T) -> Self {
        Matrix {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn reset(&mut self, value: T) {
        self.data.fill(value);
    }
}

impl<T> Matrix<T> {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

impl<T: Copy> Matrix<T> {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> Cube<T> {
    pub fn filled(n: usize, value: T) -> Self {
        Cube {
            n,
            data: vec![value; n * n * n],
        }
    }

    pub fn reset(&mut self, value: T) {
        self.data.fill(value);
    }
}

impl<T> Cube<T> {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        let ix = self.idx(i, j, k);
        self.data[ix] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

impl<T: Copy> Cube<T> {
    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> T {
        self.data[self.idx(i, j, k)]
    }
}

/// Minimum initial charge values: in `[0, B]`, or `+inf` when the target is
/// unreachable even on a full battery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BetaValue {
    Finite(i64),
    PosInf,
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaValue::Finite(v) => write!(f, "{v}"),
            BetaValue::PosInf => write!(f, "+inf"),
        }
    }
}
