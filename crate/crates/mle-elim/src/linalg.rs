//! Exact dense linear algebra over `Q` and over polynomial rings.
//!
//! Both the rational solver and the polynomial determinant run Bareiss
//! fraction-free elimination; every interior division is exact by the
//! Bareiss identity, and a nonzero remainder is a hard internal error.

use crate::poly::MultiPoly;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("singular matrix")]
    SingularMatrix,
}

/// Fraction-free forward elimination on an augmented rational matrix.
/// Returns `None` when a pivot column is entirely zero (singular).
fn bareiss_rational(m: &mut [Vec<BigRational>]) -> Option<()> {
    let n = m.len();
    let mut prev = BigRational::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            // Pivot by the first row with a nonzero in column k.
            let r = (k + 1..n).find(|&r| !m[r][k].is_zero())?;
            m.swap(k, r);
        }
        for i in k + 1..n {
            for j in k + 1..m[i].len() {
                let t = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigRational::zero();
        }
        prev = m[k][k].clone();
    }
    Some(())
}

/// Dense matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Self {
        assert_eq!(entries.len(), rows * cols, "matrix must be rectangular");
        RatMatrix { rows, cols, entries }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        RatMatrix::new(n, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.at(i, j) * &x[j])
                    .fold(BigRational::zero(), |a, b| a + b)
            })
            .collect()
    }
}

/// Exact solution of `M x = rhs` for square `M`.
pub fn solve_exact(m: &RatMatrix, rhs: &[BigRational]) -> Result<Vec<BigRational>, LinalgError> {
    assert_eq!(m.rows, m.cols, "solve_exact requires a square matrix");
    assert_eq!(rhs.len(), m.rows);
    let n = m.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    // Augmented fraction-free elimination, then back substitution over Q.
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n).map(|j| m.at(i, j).clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    if bareiss_rational(&mut aug).is_none() {
        return Err(LinalgError::SingularMatrix);
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = aug[i][n].clone();
        for j in i + 1..n {
            acc -= &aug[i][j] * &x[j];
        }
        if aug[i][i].is_zero() {
            return Err(LinalgError::SingularMatrix);
        }
        x[i] = acc / &aug[i][i];
    }
    Ok(x)
}

/// Exact determinant of a square matrix of polynomials.
pub fn det_exact(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    assert!(n > 0, "determinant of an empty matrix");
    for row in m {
        assert_eq!(row.len(), n, "det_exact requires a square matrix");
    }
    let vars = m[0][0].vars().clone();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut work: Vec<Vec<MultiPoly>> = m
        .iter()
        .map(|row| row.iter().map(|e| e.with_universe(&vars)).collect())
        .collect();
    match bareiss_poly(&mut work, MultiPoly::one(&vars)) {
        Some(det) => det,
        None => MultiPoly::zero(&vars),
    }
}

/// Polynomial variant with explicit sign handling (avoids `b_one`).
fn bareiss_poly(m: &mut Vec<Vec<MultiPoly>>, one: MultiPoly) -> Option<MultiPoly> {
    let n = m.len();
    let mut prev = one;
    let mut sign_flip = false;
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return None,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t
                    .div_exact(&prev)
                    .expect("Bareiss interior division must be exact");
            }
            m[i][k] = MultiPoly::zero(m[i][k].vars());
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Some(if sign_flip { det.neg() } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, VarSet};
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let m = RatMatrix::identity(4);
        let rhs = vec![q(3), qr(1, 2), q(-7), q(0)];
        assert_eq!(solve_exact(&m, &rhs).unwrap(), rhs);
    }

    #[test]
    fn die_sampling_system_from_four_specializations() {
        // Rows (b_0..b_3)/S(b) against the sampled p0^2 coefficients; the
        // solution is the coefficient vector of R_2.
        let rows: [( [i64; 4], (i64, i64)); 4] = [
            ([5, 6, 11, 32], (-7, 5)),
            ([11, 2, 3, 8], (-311, 120)),
            ([7, 2, 5, 9], (-244, 115)),
            ([7, 3, 13, 21], (-181, 110)),
        ];
        let mut entries = Vec::new();
        let mut rhs = Vec::new();
        for (b, (num, den)) in rows {
            let s: i64 = b.iter().sum();
            for v in b {
                entries.push(qr(v, s));
            }
            rhs.push(qr(num, den));
        }
        let m = RatMatrix::new(4, 4, entries);
        let x = solve_exact(&m, &rhs).unwrap();
        assert_eq!(x, vec![qr(-43, 10), q(-2), qr(-3, 2), qr(-4, 5)]);
    }

    #[test]
    fn random_system_residual_is_zero() {
        let mut st = 0xdeadbeefcafef00du64;
        let mut next = move || {
            st ^= st << 13;
            st ^= st >> 7;
            st ^= st << 17;
            (st % 19) as i64 - 9
        };
        for _ in 0..4 {
            let n = 6;
            let entries: Vec<BigRational> = (0..n * n).map(|_| q(next())).collect();
            let rhs: Vec<BigRational> = (0..n).map(|_| q(next())).collect();
            let m = RatMatrix::new(n, n, entries);
            match solve_exact(&m, &rhs) {
                Ok(x) => assert_eq!(m.mul_vec(&x), rhs),
                Err(LinalgError::SingularMatrix) => {}
            }
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = RatMatrix::new(2, 2, vec![q(1), q(2), q(2), q(4)]);
        assert_eq!(solve_exact(&m, &[q(1), q(1)]), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn det_1x1_and_2x2_symbols() {
        let vs = VarSet::new(["a", "b", "c", "d", "p"]);
        let p = |s: &str| parse_poly(s, &vs).unwrap();
        assert_eq!(det_exact(&[vec![p("p")]]), p("p"));
        let m = vec![vec![p("a"), p("b")], vec![p("c"), p("d")]];
        assert_eq!(det_exact(&m), p("a*d - b*c"));
    }

    #[test]
    fn det_triangular_is_diagonal_product() {
        let vs = VarSet::new(["x", "y"]);
        let p = |s: &str| parse_poly(s, &vs).unwrap();
        let z = MultiPoly::zero(&vs);
        let m = vec![
            vec![p("x + 1"), p("y"), p("3")],
            vec![z.clone(), p("x*y"), p("x")],
            vec![z.clone(), z.clone(), p("y - 2")],
        ];
        assert_eq!(det_exact(&m), p("(x + 1)*(x*y)*(y - 2)"));
    }

    #[test]
    fn det_is_alternating_and_multilinear() {
        let vs = VarSet::new(["x", "y", "z"]);
        let p = |s: &str| parse_poly(s, &vs).unwrap();
        let rows = [
            vec![p("x"), p("y + 1"), p("2")],
            vec![p("z"), p("x*y"), p("y")],
            vec![p("1"), p("x + z"), p("x^2")],
        ];
        let base = det_exact(&rows.to_vec());
        // Swapping two rows flips the sign.
        let swapped = vec![rows[1].clone(), rows[0].clone(), rows[2].clone()];
        assert_eq!(det_exact(&swapped), base.neg());
        // Equal rows vanish.
        let dup = vec![rows[0].clone(), rows[0].clone(), rows[2].clone()];
        assert!(det_exact(&dup).is_zero());
        // Linearity in the first row: det(r0 + s, ...) = det(r0,...) + det(s,...).
        let s_row = vec![p("y"), p("z"), p("x")];
        let summed: Vec<MultiPoly> = rows[0]
            .iter()
            .zip(&s_row)
            .map(|(a, b)| a.add(b))
            .collect();
        let lhs = det_exact(&vec![summed, rows[1].clone(), rows[2].clone()]);
        let rhs = base.add(&det_exact(&vec![
            s_row,
            rows[1].clone(),
            rows[2].clone(),
        ]));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn det_zero_pivot_column_swap() {
        let vs = VarSet::new(["x"]);
        let p = |s: &str| parse_poly(s, &vs).unwrap();
        let z = MultiPoly::zero(&vs);
        // Structural zero at the pivot forces a row swap.
        let m = vec![vec![z.clone(), p("x")], vec![p("x + 1"), p("2")]];
        assert_eq!(det_exact(&m), p("-x^2 - x"));
    }

    #[test]
    fn sylvester_matrix_of_generic_cubic_yields_d3() {
        // Sylvester matrix of c3 v^3 + ... + c0 and its derivative; dividing
        // the determinant by c3 and applying the (-1)^{N(N-1)/2} sign gives
        // the 5-term D_3.
        let vs = VarSet::new(["c0", "c1", "c2", "c3"]);
        let p = |s: &str| parse_poly(s, &vs).unwrap();
        let z = MultiPoly::zero(&vs);
        let m = vec![
            vec![p("c3"), p("c2"), p("c1"), p("c0"), z.clone()],
            vec![z.clone(), p("c3"), p("c2"), p("c1"), p("c0")],
            vec![p("3*c3"), p("2*c2"), p("c1"), z.clone(), z.clone()],
            vec![z.clone(), p("3*c3"), p("2*c2"), p("c1"), z.clone()],
            vec![z.clone(), z.clone(), p("3*c3"), p("2*c2"), p("c1")],
        ];
        let res = det_exact(&m);
        let d3 = res.div_exact(&p("c3")).unwrap().neg();
        assert_eq!(
            d3,
            p("-27*c0^2*c3^2 + 18*c0*c1*c2*c3 - 4*c0*c2^3 - 4*c1^3*c3 + c1^2*c2^2")
        );
    }
}
