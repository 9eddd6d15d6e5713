//! Dense LU with full pivoting over big floats.

use crate::error::{Error, Result};
use crate::mpfun::{BigComplex, BigReal};

/// Scalar field used by the solvers.
pub trait Field: Clone + Send + Sync {
    fn zero_p(prec: u32) -> Self;
    fn add_(&self, o: &Self) -> Self;
    fn sub_(&self, o: &Self) -> Self;
    fn mul_(&self, o: &Self) -> Self;
    fn div_(&self, o: &Self) -> Self;
    fn modulus(&self) -> BigReal;
    fn is_exact_zero(&self) -> bool;
    fn at_prec(&self, prec: u32) -> Self;
}

impl Field for BigReal {
    fn zero_p(prec: u32) -> Self {
        BigReal::zero(prec)
    }
    fn add_(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_(&self, o: &Self) -> Self {
        self * o
    }
    fn div_(&self, o: &Self) -> Self {
        self / o
    }
    fn modulus(&self) -> BigReal {
        self.abs()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn at_prec(&self, prec: u32) -> Self {
        self.with_prec(prec)
    }
}

impl Field for BigComplex {
    fn zero_p(prec: u32) -> Self {
        BigComplex::zero(prec)
    }
    fn add_(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_(&self, o: &Self) -> Self {
        self * o
    }
    fn div_(&self, o: &Self) -> Self {
        self / o
    }
    fn modulus(&self) -> BigReal {
        self.abs()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn at_prec(&self, prec: u32) -> Self {
        self.with_prec(prec)
    }
}

/// `P A Q = L U`, stored compactly.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<Vec<T>>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    /// Parity of the two permutations combined.
    odd: bool,
    singular: bool,
    prec: u32,
}

impl<T: Field> Lu<T> {
    pub fn factor(a: &[Vec<T>], prec: u32) -> Self {
        let n = a.len();
        let mut m: Vec<Vec<T>> = a.iter().map(|r| r.iter().map(|x| x.at_prec(prec)).collect()).collect();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut singular = false;
        for k in 0..n {
            // Full pivot search.
            let mut best = (k, k);
            let mut best_mag = BigReal::from_f64(-1.0, prec);
            for (i, row) in m.iter().enumerate().skip(k) {
                for (j, v) in row.iter().enumerate().skip(k) {
                    let mag = v.modulus();
                    if mag > best_mag {
                        best_mag = mag;
                        best = (i, j);
                    }
                }
            }
            if best.0 != k {
                m.swap(k, best.0);
                row_perm.swap(k, best.0);
                odd = !odd;
            }
            if best.1 != k {
                for row in m.iter_mut() {
                    row.swap(k, best.1);
                }
                col_perm.swap(k, best.1);
                odd = !odd;
            }
            if m[k][k].is_exact_zero() {
                singular = true;
                continue;
            }
            let (upper, lower) = m.split_at_mut(k + 1);
            let pivot_row = &upper[k];
            for row in lower.iter_mut() {
                if row[k].is_exact_zero() {
                    continue;
                }
                let l = row[k].div_(&pivot_row[k]);
                for j in (k + 1)..n {
                    if pivot_row[j].is_exact_zero() {
                        continue;
                    }
                    row[j] = row[j].sub_(&l.mul_(&pivot_row[j]));
                }
                row[k] = l;
            }
        }
        Lu {
            n,
            lu: m,
            row_perm,
            col_perm,
            odd,
            singular,
            prec,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> T {
        let mut d = self.lu[0][0].clone();
        for k in 1..self.n {
            d = d.mul_(&self.lu[k][k]);
        }
        if self.odd {
            T::zero_p(self.prec).sub_(&d)
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if self.singular {
            return Err(Error::Solver("singular matrix".into()));
        }
        let n = self.n;
        let mut y: Vec<T> = self.row_perm.iter().map(|&i| b[i].at_prec(self.prec)).collect();
        for i in 0..n {
            for j in 0..i {
                if !self.lu[i][j].is_exact_zero() && !y[j].is_exact_zero() {
                    y[i] = y[i].sub_(&self.lu[i][j].mul_(&y[j]));
                }
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                if !self.lu[i][j].is_exact_zero() && !y[j].is_exact_zero() {
                    y[i] = y[i].sub_(&self.lu[i][j].mul_(&y[j]));
                }
            }
            y[i] = y[i].div_(&self.lu[i][i]);
        }
        let mut x = vec![T::zero_p(self.prec); n];
        for (k, &c) in self.col_perm.iter().enumerate() {
            x[c] = y[k].clone();
        }
        Ok(x)
    }
}

/// `A x - b` evaluated at `prec` bits.
pub fn residual<T: Field>(a: &[Vec<T>], x: &[T], b: &[T], prec: u32) -> Vec<T> {
    a.iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut s = bi.at_prec(prec);
            s = T::zero_p(prec).sub_(&s);
            for (aij, xj) in row.iter().zip(x) {
                s = s.add_(&aij.at_prec(prec).mul_(&xj.at_prec(prec)));
            }
            s
        })
        .collect()
}

/// Solve at `prec` with `steps` rounds of iterative refinement, residuals at `2 prec`.
pub fn solve_refined<T: Field>(a: &[Vec<T>], b: &[T], prec: u32, steps: usize) -> Result<Vec<T>> {
    let lu = Lu::factor(a, prec);
    let mut x = lu.solve(b)?;
    for _ in 0..steps {
        let r = residual(a, &x, b, 2 * prec);
        let r: Vec<T> = r.iter().map(|v| v.at_prec(prec)).collect();
        let d = lu.solve(&r)?;
        x = x.iter().zip(&d).map(|(xi, di)| xi.at_prec(2 * prec).sub_(di)).collect();
    }
    Ok(x)
}

/// Hadamard bound Π ||row||_2, an upper bound on |det A|.
pub fn hadamard_bound<T: Field>(a: &[Vec<T>], prec: u32) -> BigReal {
    let mut h = BigReal::one(prec);
    for row in a {
        let mut s = BigReal::zero(prec);
        for v in row {
            s = s + v.modulus().square();
        }
        h = h * s.sqrt();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]], p: u32) -> Vec<Vec<BigReal>> {
        rows.iter().map(|r| r.iter().map(|&x| BigReal::from_f64(x, p)).collect()).collect()
    }

    #[test]
    fn det_and_solve_small() {
        let p = 128;
        let a = m(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]], p);
        let lu = Lu::factor(&a, p);
        assert!((lu.det().to_f64() - 18.0).abs() < 1e-30);
        let b: Vec<BigReal> = [1.0, 2.0, 3.0].iter().map(|&x| BigReal::from_f64(x, p)).collect();
        let x = lu.solve(&b).unwrap();
        let r = residual(&a, &x, &b, 2 * p);
        assert!(r.iter().all(|v| v.abs() < 1e-35));
    }

    #[test]
    fn permutation_sign() {
        let p = 64;
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]], p);
        assert_eq!(Lu::factor(&a, p).det().to_f64(), -1.0);
        let a = m(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 5.0], &[0.0, 1.0, 0.0]], p);
        assert_eq!(Lu::factor(&a, p).det().to_f64(), -5.0);
    }

    #[test]
    fn singular_is_flagged() {
        let p = 64;
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0]], p);
        let lu = Lu::factor(&a, p);
        assert!(lu.is_singular());
        assert!(lu.det().is_zero());
        assert!(lu.solve(&[BigReal::one(p), BigReal::one(p)]).is_err());
    }

    #[test]
    fn complex_refined_solve() {
        let p = 128;
        let c = |re: f64, im: f64| BigComplex::from_f64(re, im, p);
        let a = vec![vec![c(1.0, 1.0), c(2.0, 0.0)], vec![c(0.0, -1.0), c(3.0, 0.5)]];
        let b = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let x = solve_refined(&a, &b, p, 2).unwrap();
        let r = residual(&a, &x, &b, 4 * p);
        assert!(r.iter().all(|v| v.abs() < 1e-70));
    }
}
