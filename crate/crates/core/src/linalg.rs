//! Exact Gaussian elimination over a [`Scalar`] field.

use crate::numeric::Scalar;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Scalar>(rows: &mut Vec<Vec<F>>) -> Vec<usize> {
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
        let inv = F::one().div_ref(&rows[r][c]);
        for v in rows[r].iter_mut() {
            *v = v.mul_ref(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                v.sub_mul(&f, pv);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: Scalar>(rows: &[Vec<F>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{ v : rows * v = 0 }`, one vector per free column.
pub fn nullspace<F: Scalar>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `rows * v = rhs`, or `None` if inconsistent.
pub fn solve<F: Scalar>(rows: &[Vec<F>], rhs: &[F], ncols: usize) -> Option<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut v = vec![F::zero(); ncols];
    for (row, &pc) in m.iter().zip(&pivots) {
        v[pc] = row[ncols].clone();
    }
    Some(v)
}

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    let mut acc = F::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc.add_ref(&x.mul_ref(y));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, Rational};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| rat(v, 1)).collect())
            .collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            assert_eq!(dot(row, &ns[0]), rat(0, 1));
        }
        assert_eq!(rank::<Rational>(&[]), 0);
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &[rat(3, 1), rat(1, 1)], 2).unwrap();
        assert_eq!(x, vec![rat(2, 1), rat(1, 1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[rat(1, 1), rat(3, 1)], 2).is_none());
    }
}
