//! Exact rational linear algebra: Gaussian elimination and a dense two-phase simplex.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Solves the square system A x = b; `None` if A is singular.
pub fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=n {
                    let d = &factor * &m[col][c];
                    m[r][c] -= d;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Optimum of min c·x subject to rows·x ≥ rhs, x ≥ 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOptimum {
    pub value: Rational,
    pub x: Vec<Rational>,
}

/// Two-phase tableau simplex with Bland's rule. `Ok(None)` when infeasible.
pub fn minimize_covering(c: &[Rational], rows: &[(Vec<Rational>, Rational)]) -> Result<Option<LpOptimum>> {
    let nx = c.len();
    let m = rows.len();
    if rows.iter().any(|(a, _)| a.len() != nx) {
        return Err(Error::InvalidInput("constraint row length differs from objective".into()));
    }
    // Columns: x (nx), surplus (m), artificial (m), then rhs.
    let width = nx + 2 * m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (r, (a, b)) in rows.iter().enumerate() {
        let flip = b.is_negative();
        let sign = if flip { -Rational::one() } else { Rational::one() };
        let mut row = vec![Rational::zero(); width];
        for j in 0..nx {
            row[j] = &a[j] * &sign;
        }
        row[nx + r] = -sign.clone();
        row[nx + m + r] = Rational::one();
        row[width - 1] = b * &sign;
        t.push(row);
        basis.push(nx + m + r);
    }
    let mut phase1 = vec![Rational::zero(); width - 1];
    for j in nx + m..nx + 2 * m {
        phase1[j] = Rational::one();
    }
    run(&mut t, &mut basis, &phase1, width - 1)?;
    let infeas = basis.iter().zip(&t).fold(Rational::zero(), |acc, (&j, row)| acc + &phase1[j] * &row[width - 1]);
    if infeas.is_positive() {
        return Ok(None);
    }
    // Drive zero-level artificials out of the basis where possible.
    for r in 0..m {
        if basis[r] >= nx + m {
            if let Some(j) = (0..nx + m).find(|&j| !t[r][j].is_zero()) {
                pivot(&mut t, &mut basis, r, j);
            }
        }
    }
    let mut cost = vec![Rational::zero(); width - 1];
    cost[..nx].clone_from_slice(c);
    run(&mut t, &mut basis, &cost, nx + m)?;
    let mut x = vec![Rational::zero(); nx];
    for (r, &j) in basis.iter().enumerate() {
        if j < nx {
            x[j] = t[r][width - 1].clone();
        }
    }
    let value = c.iter().zip(&x).fold(Rational::zero(), |acc, (a, b)| acc + a * b);
    Ok(Some(LpOptimum { value, x }))
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], r: usize, j: usize) {
    let p = t[r][j].clone();
    for x in t[r].iter_mut() {
        *x /= &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[j].is_zero() {
            let factor = row[j].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
    }
    basis[r] = j;
}

/// Minimizes `cost` over columns `0..allowed`, Bland's rule for entering and leaving.
fn run(t: &mut [Vec<Rational>], basis: &mut [usize], cost: &[Rational], allowed: usize) -> Result<()> {
    let rhs = cost.len();
    loop {
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let reduced = basis.iter().zip(t.iter()).fold(cost[j].clone(), |acc, (&b, row)| acc - &cost[b] * &row[j]);
            reduced.is_negative()
        });
        let Some(j) = entering else { return Ok(()) };
        let mut leave: Option<(usize, Rational)> = None;
        for (r, row) in t.iter().enumerate() {
            if row[j].is_positive() {
                let ratio = &row[rhs] / &row[j];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::InvalidInput("linear program is unbounded".into()));
        };
        pivot(t, basis, r, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn row(a: &[i64], b: i64) -> (Vec<Rational>, Rational) {
        (a.iter().map(|&x| int(x)).collect(), int(b))
    }

    #[test]
    fn gaussian_elimination() {
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        assert_eq!(solve_square(&a, &[int(3), int(1)]), Some(vec![int(2), int(1)]));
        let singular = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(solve_square(&singular, &[int(1), int(1)]), None);
    }

    #[test]
    fn triangle_vertex_cover_lp() {
        let rows = vec![row(&[1, 1, 0], 1), row(&[0, 1, 1], 1), row(&[1, 0, 1], 1)];
        let opt = minimize_covering(&[int(1), int(1), int(1)], &rows).unwrap().unwrap();
        assert_eq!(opt.value, ratio(3, 2));
        assert_eq!(opt.x, vec![ratio(1, 2); 3]);
    }

    #[test]
    fn infeasible_and_empty() {
        let rows = vec![row(&[0, 0], 1)];
        assert_eq!(minimize_covering(&[int(1), int(1)], &rows).unwrap(), None);
        let opt = minimize_covering(&[int(1)], &[]).unwrap().unwrap();
        assert_eq!(opt.value, int(0));
    }

    #[test]
    fn degenerate_rows_terminate() {
        let rows = vec![row(&[1, 1], 1), row(&[1, 1], 1), row(&[2, 2], 2), row(&[1, 0], 0)];
        let opt = minimize_covering(&[int(2), int(3)], &rows).unwrap().unwrap();
        assert_eq!(opt.value, int(2));
    }
}
