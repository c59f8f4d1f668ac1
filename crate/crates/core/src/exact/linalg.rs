//! Dense exact Gaussian elimination over ℚ.

use num_traits::{One, Zero};

use super::Rational;

/// Reduces `rows` to reduced row-echelon form in place and returns the pivot
/// columns.
pub fn rref(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    rref(&mut rows).len()
}

/// Coefficients `c` with `Σ c_i · vectors[i] = target`, if any.
pub fn solve_combination(vectors: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let n = vectors.len();
    let dim = target.len();
    // Augmented system: one row per coordinate, columns = vectors | target.
    let mut rows: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rational> = vectors.iter().map(|v| v[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.contains(&n) {
        return None;
    }
    let mut sol = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = rows[r][n].clone();
    }
    Some(sol)
}

/// The first index `k` such that `vectors[k]` lies in the span of its
/// predecessors, together with the expressing coefficients.
pub fn first_dependency(vectors: &[Vec<Rational>]) -> Option<(usize, Vec<Rational>)> {
    (0..vectors.len()).find_map(|k| {
        if k == 0 {
            return vectors[0]
                .iter()
                .all(Zero::is_zero)
                .then(|| (0, Vec::new()));
        }
        solve_combination(&vectors[..k], &vectors[k]).map(|c| (k, c))
    })
}

pub fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(rank(m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(m(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]])), 2);
        assert_eq!(rank(identity(4)), 4);
        assert_eq!(rank(Vec::new()), 0);
    }

    #[test]
    fn combinations() {
        let v = m(&[&[1, 0], &[1, 1]]);
        let c = solve_combination(&v, &[q(3), q(2)]).unwrap();
        assert_eq!(c, vec![q(1), q(2)]);
        assert!(solve_combination(&v[..1], &[q(0), q(1)]).is_none());
        let (k, c) = first_dependency(&m(&[&[1, 0], &[0, 1], &[2, 3]])).unwrap();
        assert_eq!(k, 2);
        assert_eq!(c, vec![q(2), q(3)]);
    }
}
