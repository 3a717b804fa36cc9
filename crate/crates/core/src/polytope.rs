//! The no-signaling polytope, the local polytope, and vertex enumeration.
//!
//! The no-signaling polytope is kept in H-representation (equalities plus
//! coordinatewise nonnegativity). The local polytope is kept in
//! V-representation: membership is a feasibility LP over convex weights on
//! the deterministic behaviors.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{LinearProgram, LpOutcome};
use crate::model::{validate_behavior, Behavior, LocalStrategy, Scenario};
use crate::numeric::{QuadExt, Rational, Scalar};
use crate::par::{self, Execution};

/// Default limit on the behavior dimension for [`enumerate_ns_vertices`].
pub const DEFAULT_VERTEX_CEILING: usize = 32;

/// Equalities of the no-signaling polytope; nonnegativity of every
/// coordinate is implied.
#[derive(Clone, Debug)]
pub struct NsConstraintSystem {
    pub scenario: Scenario,
    pub equalities: Vec<(Vec<Rational>, Rational)>,
    /// Human-readable name of each equality, same order.
    pub labels: Vec<String>,
}

impl NsConstraintSystem {
    pub fn num_coords(&self) -> usize {
        self.scenario.num_coords()
    }

    /// `row . P - rhs` for every equality.
    pub fn residuals(&self, behavior: &Behavior) -> Vec<QuadExt> {
        self.equalities
            .iter()
            .map(|(row, rhs)| {
                let lhs: QuadExt = row
                    .iter()
                    .zip(behavior.entries())
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, p)| p * &QuadExt::from_rational(c.clone()))
                    .sum();
                lhs - QuadExt::from_rational(rhs.clone())
            })
            .collect()
    }

    /// Exact membership in the polytope.
    pub fn contains(&self, behavior: &Behavior) -> bool {
        behavior.scenario() == &self.scenario
            && behavior.entries().iter().all(|p| !p.is_negative())
            && self.residuals(behavior).iter().all(Zero::is_zero)
    }

    /// `maximize objective . P` over the polytope.
    pub fn program<F: Scalar>(&self, objective: Vec<F>) -> LinearProgram<F> {
        let mut lp = LinearProgram::new(self.num_coords()).maximize(objective);
        for (row, rhs) in &self.equalities {
            lp.add_eq(
                row.iter().cloned().map(F::from_rational).collect(),
                F::from_rational(rhs.clone()),
            );
        }
        lp
    }
}

/// Normalization of each block plus the marginal equalities between
/// consecutive types of the other party.
pub fn ns_constraints(scenario: &Scenario) -> NsConstraintSystem {
    let n = scenario.num_coords();
    let mut equalities = Vec::new();
    let mut labels = Vec::new();
    let unit = |coords: &mut dyn Iterator<Item = (usize, i64)>| {
        let mut row = vec![Rational::zero(); n];
        for (c, v) in coords {
            row[c] += Rational::from_integer(BigInt::from(v));
        }
        row
    };

    for (x, y) in scenario.blocks() {
        let mut it = (0..scenario.alice_actions(x))
            .cartesian_product(0..scenario.bob_actions(y))
            .map(|(a, b)| (scenario.coord(x, y, a, b), 1));
        equalities.push((unit(&mut it), Rational::one()));
        labels.push(format!("normalization ({x},{y})"));
    }
    for x in 0..scenario.alice_types() {
        for a in 0..scenario.alice_actions(x) {
            for y in 1..scenario.bob_types() {
                let mut it = (0..scenario.bob_actions(y - 1))
                    .map(|b| (scenario.coord(x, y - 1, a, b), 1))
                    .chain((0..scenario.bob_actions(y)).map(|b| (scenario.coord(x, y, a, b), -1)));
                equalities.push((unit(&mut it), Rational::zero()));
                labels.push(format!("alice marginal a={a} x={x} y={}~{y}", y - 1));
            }
        }
    }
    for y in 0..scenario.bob_types() {
        for b in 0..scenario.bob_actions(y) {
            for x in 1..scenario.alice_types() {
                let mut it = (0..scenario.alice_actions(x - 1))
                    .map(|a| (scenario.coord(x - 1, y, a, b), 1))
                    .chain(
                        (0..scenario.alice_actions(x)).map(|a| (scenario.coord(x, y, a, b), -1)),
                    );
                equalities.push((unit(&mut it), Rational::zero()));
                labels.push(format!("bob marginal b={b} y={y} x={}~{x}", x - 1));
            }
        }
    }
    NsConstraintSystem {
        scenario: scenario.clone(),
        equalities,
        labels,
    }
}

/// All deterministic local strategies, lexicographic in
/// `(alice map, bob map)`.
pub fn enumerate_local_strategies(scenario: &Scenario) -> Vec<LocalStrategy> {
    let maps = |counts: &[usize]| -> Vec<Vec<usize>> {
        counts
            .iter()
            .map(|&n| 0..n)
            .multi_cartesian_product()
            .collect()
    };
    let alice = maps(scenario.alice_action_counts());
    let bob = maps(scenario.bob_action_counts());
    alice
        .iter()
        .cartesian_product(&bob)
        .map(|(a, b)| LocalStrategy {
            alice: a.clone(),
            bob: b.clone(),
        })
        .collect()
}

/// Outcome of the local-polytope membership test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LocalityCertificate {
    /// Convex weights on deterministic strategies; only nonzero weights are
    /// listed.
    Local {
        weights: Vec<(LocalStrategy, QuadExt)>,
    },
    /// The convex-weight feasibility program has no solution.
    Nonlocal,
}

impl LocalityCertificate {
    pub fn is_local(&self) -> bool {
        matches!(self, LocalityCertificate::Local { .. })
    }

    /// `sum lambda_D P_D` for a local certificate.
    pub fn remix(&self, scenario: &Scenario) -> Option<Behavior> {
        let LocalityCertificate::Local { weights } = self else {
            return None;
        };
        let mut p = vec![QuadExt::zero(); scenario.num_coords()];
        for (s, w) in weights {
            for (x, y) in scenario.blocks() {
                p[scenario.coord(x, y, s.alice[x], s.bob[y])] += w;
            }
        }
        Behavior::new(scenario.clone(), p).ok()
    }
}

/// Local-polytope membership with exact equality.
pub fn is_local(behavior: &Behavior) -> Result<LocalityCertificate> {
    is_local_within(behavior, &QuadExt::zero())
}

/// Local-polytope membership where every coordinate of the mixture may
/// deviate from the behavior by at most `tolerance`.
pub fn is_local_within(behavior: &Behavior, tolerance: &QuadExt) -> Result<LocalityCertificate> {
    let report = validate_behavior(behavior, tolerance);
    if !report.normalized {
        return Err(Error::Invalid(
            "behavior is not a normalized distribution within tolerance".into(),
        ));
    }
    let scenario = behavior.scenario();
    let strategies = enumerate_local_strategies(scenario);
    let n = scenario.num_coords();
    let mut lp = LinearProgram::<QuadExt>::new(strategies.len());
    lp.add_eq(vec![QuadExt::one(); strategies.len()], QuadExt::one());
    let mut rows = vec![vec![QuadExt::zero(); strategies.len()]; n];
    for (k, s) in strategies.iter().enumerate() {
        for (x, y) in scenario.blocks() {
            rows[scenario.coord(x, y, s.alice[x], s.bob[y])][k] = QuadExt::one();
        }
    }
    for (row, p) in rows.into_iter().zip(behavior.entries()) {
        if tolerance.is_zero() {
            lp.add_eq(row, p.clone());
        } else {
            lp.add_le(row.clone(), p + tolerance);
            lp.add_ge(row, p - tolerance);
        }
    }
    Ok(match lp.solve()? {
        LpOutcome::Optimal { point, .. } => LocalityCertificate::Local {
            weights: strategies
                .into_iter()
                .zip(point)
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        },
        _ => LocalityCertificate::Nonlocal,
    })
}

/// Whether `behavior` is an extreme point of the no-signaling polytope:
/// the equalities together with the tight nonnegativity constraints have
/// full rank.
pub fn is_vertex(behavior: &Behavior, scenario: &Scenario) -> Result<bool> {
    let system = ns_constraints(scenario);
    if behavior.scenario() != scenario || !system.contains(behavior) {
        return Err(Error::Precondition(
            "behavior is not in the no-signaling polytope".into(),
        ));
    }
    let n = scenario.num_coords();
    let mut rows: Vec<Vec<Rational>> = system.equalities.iter().map(|(r, _)| r.clone()).collect();
    for (i, p) in behavior.entries().iter().enumerate() {
        if p.is_zero() {
            let mut r = vec![Rational::zero(); n];
            r[i] = Rational::one();
            rows.push(r);
        }
    }
    Ok(linalg::rank(&rows) == n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    Local,
    Nonlocal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedVertex {
    #[serde(flatten)]
    pub behavior: Behavior,
    pub classification: VertexClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexList {
    pub vertices: Vec<ClassifiedVertex>,
}

impl VertexList {
    pub fn count(&self, class: VertexClass) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.classification == class)
            .count()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VertexOptions {
    pub ceiling: usize,
    pub execution: Execution,
}

impl Default for VertexOptions {
    fn default() -> Self {
        VertexOptions {
            ceiling: DEFAULT_VERTEX_CEILING,
            execution: Execution::default(),
        }
    }
}

/// Every vertex of the no-signaling polytope, classified local/nonlocal,
/// sorted lexicographically by coordinates.
pub fn enumerate_ns_vertices(scenario: &Scenario) -> Result<VertexList> {
    enumerate_ns_vertices_with(scenario, VertexOptions::default())
}

pub fn enumerate_ns_vertices_with(
    scenario: &Scenario,
    options: VertexOptions,
) -> Result<VertexList> {
    let n = scenario.num_coords();
    if n > options.ceiling {
        return Err(Error::TooLarge {
            coords: n,
            ceiling: options.ceiling,
        });
    }
    let system = ns_constraints(scenario);
    let (rows, rhs): (Vec<_>, Vec<_>) = system.equalities.iter().cloned().unzip();
    let order: Vec<usize> = (0..n).collect();
    let points = standard_polytope_vertices(&rows, &rhs, n, &order, options.execution)?;
    let behaviors: Vec<Behavior> = points
        .into_iter()
        .map(|p| {
            Behavior::new(
                scenario.clone(),
                p.into_iter().map(QuadExt::from_rational).collect(),
            )
        })
        .collect::<Result<_>>()?;
    let classes = par::map(options.execution, &behaviors, |b| {
        is_local(b).map(|c| c.is_local())
    });
    let vertices = behaviors
        .into_iter()
        .zip(classes)
        .map(|(behavior, local)| {
            Ok(ClassifiedVertex {
                behavior,
                classification: if local? {
                    VertexClass::Local
                } else {
                    VertexClass::Nonlocal
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(VertexList { vertices })
}

/// Vertices of the bounded polytope `{ P : rows . P = rhs, P >= 0 }` by the
/// double description method. `order` is the sequence in which the
/// nonnegativity constraints are inserted (a permutation of `0..n`); the
/// result is sorted and does not depend on it.
pub fn standard_polytope_vertices(
    rows: &[Vec<Rational>],
    rhs: &[Rational],
    n: usize,
    order: &[usize],
    exec: Execution,
) -> Result<Vec<Vec<Rational>>> {
    let Some(p0) = linalg::solve(rows, rhs, n) else {
        return Ok(Vec::new());
    };
    let kernel = linalg::nullspace(rows, n);
    let d = kernel.len();
    // Homogenized cone in (s, t): s * p0 + K t >= 0 per coordinate, s >= 0.
    let halfspace = |i: usize| -> Vec<Rational> {
        std::iter::once(p0[i].clone())
            .chain(kernel.iter().map(|k| k[i].clone()))
            .collect()
    };
    let mut constraints: Vec<Vec<Rational>> = order.iter().map(|&i| halfspace(i)).collect();
    let mut s_row = vec![Rational::zero(); d + 1];
    s_row[0] = Rational::one();
    constraints.push(s_row);

    let rays = double_description(&constraints, d + 1, exec)?;
    let mut vertices: Vec<Vec<Rational>> = rays
        .into_iter()
        .map(|r| {
            if !Signed::is_positive(&r[0]) {
                return Err(Error::Invalid("polytope is unbounded".into()));
            }
            let s = r[0].clone();
            Ok((0..n)
                .map(|i| {
                    let mut v = p0[i].clone();
                    for (k, t) in kernel.iter().zip(&r[1..]) {
                        v += &k[i] * t / &s;
                    }
                    v
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

#[derive(Clone)]
struct Ray {
    v: Vec<Rational>,
    zeros: Bits,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Scales to a primitive integer vector.
fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let den = crate::numeric::common_denominator(v.iter());
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return ints.into_iter().map(Rational::from_integer).collect();
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}

/// Extreme rays of the pointed cone `{ z : A z >= 0 }`.
fn double_description(
    a: &[Vec<Rational>],
    dim: usize,
    exec: Execution,
) -> Result<Vec<Vec<Rational>>> {
    let m = a.len();
    // Greedy basis of rows for the initial simplicial cone.
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<Vec<Rational>> = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut trial = basis_rows.clone();
        trial.push(row.clone());
        if linalg::rank(&trial) > basis_rows.len() {
            basis_rows = trial;
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    if chosen.len() < dim {
        return Err(Error::Invalid("cone is not pointed".into()));
    }

    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let e: Vec<Rational> = (0..dim)
                .map(|k| {
                    if k == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            let v = linalg::solve(&basis_rows, &e, dim).expect("invertible");
            let mut zeros = Bits::new(m);
            for (k, &row) in chosen.iter().enumerate() {
                if k != j {
                    zeros.set(row);
                }
            }
            Ray {
                v: primitive(v),
                zeros,
            }
        })
        .collect();

    let rest: Vec<usize> = (0..m).filter(|i| !chosen.contains(i)).collect();
    let mut processed: Vec<usize> = chosen.clone();
    for &i in &rest {
        let row = &a[i];
        let vals: Vec<Rational> = rays.iter().map(|r| linalg::dot(row, &r.v)).collect();
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for (k, v) in vals.iter().enumerate() {
            match v.signum() {
                s if Signed::is_positive(&s) => pos.push(k),
                s if Signed::is_negative(&s) => neg.push(k),
                _ => zero.push(k),
            }
        }
        if neg.is_empty() {
            for &k in &zero {
                rays[k].zeros.set(i);
            }
            processed.push(i);
            continue;
        }
        let pairs: Vec<(usize, usize)> = pos
            .iter()
            .copied()
            .cartesian_product(neg.iter().copied())
            .collect();
        let threshold = dim.saturating_sub(2);
        let candidates = par::map(exec, &pairs, |&(p, q)| {
            let common = rays[p].zeros.and(&rays[q].zeros);
            if common.count() < threshold {
                return None;
            }
            let adjacent = rays
                .iter()
                .enumerate()
                .all(|(k, r)| k == p || k == q || !common.subset_of(&r.zeros));
            if !adjacent {
                return None;
            }
            // (a.p) q - (a.q) p lies on the hyperplane a.z = 0.
            let v: Vec<Rational> = rays[q]
                .v
                .iter()
                .zip(&rays[p].v)
                .map(|(qv, pv)| qv * &vals[p] - pv * &vals[q])
                .collect();
            let mut zeros = common;
            zeros.set(i);
            Some(Ray {
                v: primitive(v),
                zeros,
            })
        });
        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + zero.len());
        for &k in &pos {
            next.push(rays[k].clone());
        }
        for &k in &zero {
            let mut r = rays[k].clone();
            r.zeros.set(i);
            next.push(r);
        }
        next.extend(candidates.into_iter().flatten());
        rays = next;
        processed.push(i);
    }
    debug_assert_eq!(processed.len(), m);
    Ok(rays.into_iter().map(|r| r.v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::deterministic_behavior;
    use crate::presets;

    #[test]
    fn chsh_system_shape() {
        let s = Scenario::chsh();
        let sys = ns_constraints(&s);
        assert_eq!(sys.num_coords(), 16);
        // 4 normalizations + 4 alice + 4 bob marginal equalities
        assert_eq!(sys.equalities.len(), 12);
        assert!(sys.contains(&presets::pr_box()));
        for st in enumerate_local_strategies(&s) {
            assert!(sys.contains(&st.behavior(&s).unwrap()));
        }
    }

    #[test]
    fn signaling_behavior_has_residual() {
        let s = Scenario::chsh();
        let p = Behavior::from_fn(s.clone(), |_, y, a, b| {
            if a == y && b == 0 {
                QuadExt::one()
            } else {
                QuadExt::zero()
            }
        });
        let sys = ns_constraints(&s);
        assert!(!sys.contains(&p));
        assert!(sys.residuals(&p).iter().any(|r| r.abs() == QuadExt::one()));
    }

    #[test]
    fn local_strategy_counts() {
        assert_eq!(enumerate_local_strategies(&Scenario::chsh()).len(), 16);
        let vb = Scenario::new(vec![2, 2, 3], vec![2, 2]).unwrap();
        let all = enumerate_local_strategies(&vb);
        assert_eq!(all.len(), 48);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0].alice, vec![0, 0, 0]);
        let one = Scenario::new(vec![1], vec![1]).unwrap();
        assert_eq!(enumerate_local_strategies(&one).len(), 1);
    }

    #[test]
    fn locality() {
        let s = Scenario::chsh();
        let uniform = Behavior::uniform(&s);
        let cert = is_local(&uniform).unwrap();
        assert_eq!(cert.remix(&s).unwrap(), uniform);
        assert!(!is_local(&presets::pr_box()).unwrap().is_local());
        let d = deterministic_behavior(&s, &[1, 0], &[0, 1]).unwrap();
        assert_eq!(is_local(&d).unwrap().remix(&s).unwrap(), d);
    }

    #[test]
    fn vertex_tests() {
        let s = Scenario::chsh();
        assert!(is_vertex(&presets::pr_box(), &s).unwrap());
        assert!(!is_vertex(&Behavior::uniform(&s), &s).unwrap());
        let signaling = Behavior::from_fn(s.clone(), |_, y, a, b| {
            if a == y && b == 0 {
                QuadExt::one()
            } else {
                QuadExt::zero()
            }
        });
        assert!(matches!(
            is_vertex(&signaling, &s),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn trivial_scenario_has_one_vertex() {
        let s = Scenario::new(vec![1], vec![1]).unwrap();
        let list = enumerate_ns_vertices(&s).unwrap();
        assert_eq!(list.vertices.len(), 1);
        assert_eq!(list.vertices[0].classification, VertexClass::Local);
    }

    #[test]
    fn ceiling_is_enforced() {
        let s = Scenario::chsh();
        let opts = VertexOptions {
            ceiling: 10,
            ..Default::default()
        };
        assert!(matches!(
            enumerate_ns_vertices_with(&s, opts),
            Err(Error::TooLarge {
                coords: 16,
                ceiling: 10
            })
        ));
    }

    #[test]
    fn square_vertices() {
        // x + y + s = 1 simplex in 3D has 3 vertices.
        let rows = vec![vec![Rational::one(), Rational::one(), Rational::one()]];
        let v = standard_polytope_vertices(
            &rows,
            &[Rational::one()],
            3,
            &[0, 1, 2],
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(v.len(), 3);
    }
}
