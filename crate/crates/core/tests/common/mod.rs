//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's solvers.

#![allow(dead_code)]

use itertools::Itertools;
use nlgame::{Behavior, Game, Prior, QuadExt, Rational, Scenario};
use num_rational::Rational64;
use num_traits::{Num, One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Gauss-Jordan on `[rows | rhs]`. Returns the unique solution, or `None`
/// when the system is inconsistent or underdetermined.
pub fn unique_solution<F: Clone + Num>(rows: &[Vec<F>], rhs: &[F], n: usize) -> Option<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| row.iter().cloned().chain([b.clone()]).collect())
        .collect();
    let mut pivot_row = 0;
    for col in 0..n {
        let p = (pivot_row..m.len()).find(|&i| !m[i][col].is_zero())?;
        m.swap(pivot_row, p);
        let lead = m[pivot_row][col].clone();
        for v in m[pivot_row].iter_mut() {
            *v = v.clone() / lead.clone();
        }
        let pivot = m[pivot_row].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot) {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

fn chsh_index(x: usize, y: usize, a: usize, b: usize) -> usize {
    ((x * 2 + y) * 2 + a) * 2 + b
}

/// No-signaling equalities for the CHSH scenario, written out directly.
pub fn chsh_ns_equalities() -> (Vec<Vec<Rational64>>, Vec<Rational64>) {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let unit = |cells: &[(usize, Rational64)]| {
        let mut row = vec![Rational64::zero(); 16];
        for (i, v) in cells {
            row[*i] += v;
        }
        row
    };
    for (x, y) in (0..2).cartesian_product(0..2) {
        let cells: Vec<_> = (0..2)
            .cartesian_product(0..2)
            .map(|(a, b)| (chsh_index(x, y, a, b), Rational64::one()))
            .collect();
        rows.push(unit(&cells));
        rhs.push(Rational64::one());
    }
    for (x, a) in (0..2).cartesian_product(0..2) {
        let cells: Vec<_> = (0..2)
            .flat_map(|b| {
                [
                    (chsh_index(x, 0, a, b), Rational64::one()),
                    (chsh_index(x, 1, a, b), -Rational64::one()),
                ]
            })
            .collect();
        rows.push(unit(&cells));
        rhs.push(Rational64::zero());
    }
    for (y, b) in (0..2).cartesian_product(0..2) {
        let cells: Vec<_> = (0..2)
            .flat_map(|a| {
                [
                    (chsh_index(0, y, a, b), Rational64::one()),
                    (chsh_index(1, y, a, b), -Rational64::one()),
                ]
            })
            .collect();
        rows.push(unit(&cells));
        rhs.push(Rational64::zero());
    }
    (rows, rhs)
}

/// Every CHSH no-signaling vertex: the affine hull has dimension 8, so a
/// vertex is a nonnegative point pinned down uniquely by the equalities plus
/// eight vanishing coordinates.
pub fn chsh_vertices_brute_force() -> Vec<Vec<Rational64>> {
    let (eq, eq_rhs) = chsh_ns_equalities();
    let mut found: Vec<Vec<Rational64>> = Vec::new();
    for zeros in (0..16).combinations(8) {
        let mut rows = eq.clone();
        let mut rhs = eq_rhs.clone();
        for &z in &zeros {
            let mut row = vec![Rational64::zero(); 16];
            row[z] = Rational64::one();
            rows.push(row);
            rhs.push(Rational64::zero());
        }
        if let Some(p) = unique_solution(&rows, &rhs, 16) {
            if p.iter().all(|v| !v.is_negative()) && !found.contains(&p) {
                found.push(p);
            }
        }
    }
    found.sort();
    found
}

pub fn to_behavior(scenario: &Scenario, p: &[Rational64]) -> Behavior {
    Behavior::from_fn(scenario.clone(), |x, y, a, b| {
        QuadExt::ratio(
            *p[chsh_index(x, y, a, b)].numer(),
            *p[chsh_index(x, y, a, b)].denom(),
        )
    })
}

/// Brute-force maximum of `c.x` over `{A x <= b, x >= 0}`, assumed bounded
/// and nonempty: best feasible point among all intersections of `n`
/// constraint hyperplanes.
pub fn lp_max_brute_force(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Option<Rational> {
    let n = c.len();
    let mut planes: Vec<(Vec<Rational>, Rational)> =
        a.iter().cloned().zip(b.iter().cloned()).collect();
    for j in 0..n {
        let mut row = vec![Rational::zero(); n];
        row[j] = -Rational::one();
        planes.push((row, Rational::zero()));
    }
    let mut best: Option<Rational> = None;
    for tight in (0..planes.len()).combinations(n) {
        let rows: Vec<_> = tight.iter().map(|&i| planes[i].0.clone()).collect();
        let rhs: Vec<_> = tight.iter().map(|&i| planes[i].1.clone()).collect();
        let Some(x) = unique_solution(&rows, &rhs, n) else {
            continue;
        };
        let feasible = planes.iter().all(|(row, bound)| {
            let lhs: Rational = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            lhs <= *bound
        });
        if feasible {
            let value: Rational = c.iter().zip(&x).map(|(p, q)| p * q).sum();
            if best.as_ref().is_none_or(|b| value > *b) {
                best = Some(value);
            }
        }
    }
    best
}

pub fn small_int(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    Rational::from_integer(rng.gen_range(lo..=hi).into())
}

pub fn random_game(rng: &mut ChaCha8Rng, scenario: &Scenario, common: bool) -> Game {
    Game::from_fn(scenario.clone(), |_, _, _, _| {
        let ua = QuadExt::from(rng.gen_range(-4i64..=4));
        let ub = if common {
            ua.clone()
        } else {
            QuadExt::from(rng.gen_range(-4i64..=4))
        };
        (ua, ub)
    })
}

pub fn random_prior(rng: &mut ChaCha8Rng, scenario: &Scenario) -> Prior {
    let w = (0..scenario.alice_types())
        .map(|_| {
            (0..scenario.bob_types())
                .map(|_| QuadExt::ratio(rng.gen_range(1i64..=5), 4))
                .collect()
        })
        .collect();
    Prior::new(w).expect("positive weights")
}
