//! Scenarios, Bayesian games, behaviors, priors and their per-type-pair
//! blocks.
//!
//! Tables over a scenario are stored flat in coordinate order: type pairs
//! `(x, y)` lexicographically, and inside each block the actions `(a, b)`
//! lexicographically. [`Scenario::coord`] maps `(x, y, a, b)` to that index.
//! Action counts may differ between types, so blocks are ragged.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::QuadExt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Alice,
    Bob,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Alice => "alice",
            Player::Bob => "bob",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct ScenarioDoc {
    alice_actions: Vec<usize>,
    bob_actions: Vec<usize>,
}

/// Type and action counts of a two-party Bell/Bayesian scenario.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioDoc", into = "ScenarioDoc")]
pub struct Scenario {
    alice_actions: Vec<usize>,
    bob_actions: Vec<usize>,
    offsets: Vec<usize>,
}

impl TryFrom<ScenarioDoc> for Scenario {
    type Error = Error;
    fn try_from(doc: ScenarioDoc) -> Result<Self> {
        Scenario::new(doc.alice_actions, doc.bob_actions)
    }
}

impl From<Scenario> for ScenarioDoc {
    fn from(s: Scenario) -> Self {
        ScenarioDoc {
            alice_actions: s.alice_actions,
            bob_actions: s.bob_actions,
        }
    }
}

impl Scenario {
    pub fn new(alice_actions: Vec<usize>, bob_actions: Vec<usize>) -> Result<Self> {
        if alice_actions.is_empty() || bob_actions.is_empty() {
            return Err(Error::Invalid("each party needs at least one type".into()));
        }
        if alice_actions.iter().chain(&bob_actions).any(|&n| n == 0) {
            return Err(Error::Invalid(
                "every type needs at least one action".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(alice_actions.len() * bob_actions.len() + 1);
        let mut acc = 0;
        for &na in &alice_actions {
            for &nb in &bob_actions {
                offsets.push(acc);
                acc += na * nb;
            }
        }
        offsets.push(acc);
        Ok(Scenario {
            alice_actions,
            bob_actions,
            offsets,
        })
    }

    /// `|X| = |Y| = 2`, two actions everywhere.
    pub fn chsh() -> Self {
        Scenario::new(vec![2, 2], vec![2, 2]).expect("valid")
    }

    pub fn alice_types(&self) -> usize {
        self.alice_actions.len()
    }

    pub fn bob_types(&self) -> usize {
        self.bob_actions.len()
    }

    pub fn types(&self, player: Player) -> usize {
        match player {
            Player::Alice => self.alice_types(),
            Player::Bob => self.bob_types(),
        }
    }

    pub fn alice_actions(&self, x: usize) -> usize {
        self.alice_actions[x]
    }

    pub fn bob_actions(&self, y: usize) -> usize {
        self.bob_actions[y]
    }

    pub fn alice_action_counts(&self) -> &[usize] {
        &self.alice_actions
    }

    pub fn bob_action_counts(&self) -> &[usize] {
        &self.bob_actions
    }

    /// Dimension of the behavior vector.
    pub fn num_coords(&self) -> usize {
        *self.offsets.last().expect("nonempty")
    }

    pub fn block_offset(&self, x: usize, y: usize) -> usize {
        self.offsets[x * self.bob_types() + y]
    }

    pub fn coord(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        debug_assert!(a < self.alice_actions[x] && b < self.bob_actions[y]);
        self.block_offset(x, y) + a * self.bob_actions[y] + b
    }

    pub fn check_block(&self, x: usize, y: usize) -> Result<()> {
        if x >= self.alice_types() || y >= self.bob_types() {
            return Err(Error::OutOfRange(format!(
                "type pair ({x},{y}) outside {}x{}",
                self.alice_types(),
                self.bob_types()
            )));
        }
        Ok(())
    }

    /// All type pairs in storage order.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ny = self.bob_types();
        (0..self.alice_types()).flat_map(move |x| (0..ny).map(move |y| (x, y)))
    }

    /// All `(x, y, a, b)` in storage order.
    pub fn coords(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        self.blocks().flat_map(move |(x, y)| {
            let nb = self.bob_actions[y];
            (0..self.alice_actions[x]).flat_map(move |a| (0..nb).map(move |b| (x, y, a, b)))
        })
    }

    fn expect_same(&self, other: &Scenario, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::ScenarioMismatch(format!(
                "{what}: {:?}/{:?} vs {:?}/{:?}",
                self.alice_actions, self.bob_actions, other.alice_actions, other.bob_actions
            )));
        }
        Ok(())
    }

    pub(crate) fn nest(&self, flat: &[QuadExt]) -> Vec<Vec<Vec<Vec<QuadExt>>>> {
        (0..self.alice_types())
            .map(|x| {
                (0..self.bob_types())
                    .map(|y| {
                        (0..self.alice_actions[x])
                            .map(|a| {
                                (0..self.bob_actions[y])
                                    .map(|b| flat[self.coord(x, y, a, b)].clone())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    pub(crate) fn flatten(
        &self,
        nested: Vec<Vec<Vec<Vec<QuadExt>>>>,
        what: &str,
    ) -> Result<Vec<QuadExt>> {
        let bad = |detail: String| Error::Dimension(format!("{what}: {detail}"));
        if nested.len() != self.alice_types() {
            return Err(bad(format!(
                "expected {} alice types, got {}",
                self.alice_types(),
                nested.len()
            )));
        }
        let mut flat = Vec::with_capacity(self.num_coords());
        for (x, row) in nested.into_iter().enumerate() {
            if row.len() != self.bob_types() {
                return Err(bad(format!(
                    "type {x}: expected {} bob types",
                    self.bob_types()
                )));
            }
            for (y, block) in row.into_iter().enumerate() {
                if block.len() != self.alice_actions[x] {
                    return Err(bad(format!(
                        "block ({x},{y}): expected {} rows",
                        self.alice_actions[x]
                    )));
                }
                for line in block {
                    if line.len() != self.bob_actions[y] {
                        return Err(bad(format!(
                            "block ({x},{y}): expected {} columns",
                            self.bob_actions[y]
                        )));
                    }
                    flat.extend(line);
                }
            }
        }
        Ok(flat)
    }
}

type Nested = Vec<Vec<Vec<Vec<QuadExt>>>>;

/// A deterministic local strategy: one action per type for each party.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl fmt::Display for LocalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={:?} b={:?}", self.alice, self.bob)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GameDoc {
    scenario: Scenario,
    payoff_a: Nested,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payoff_b: Option<Nested>,
}

/// Two-player Bayesian game: payoffs `u_A(a,b,x,y)` and `u_B(a,b,x,y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GameDoc", into = "GameDoc")]
pub struct Game {
    scenario: Scenario,
    payoff_a: Vec<QuadExt>,
    payoff_b: Vec<QuadExt>,
}

impl TryFrom<GameDoc> for Game {
    type Error = Error;
    fn try_from(doc: GameDoc) -> Result<Self> {
        let a = doc.scenario.flatten(doc.payoff_a, "payoff_a")?;
        let b = doc
            .payoff_b
            .map(|b| doc.scenario.flatten(b, "payoff_b"))
            .transpose()?;
        Game::new(doc.scenario, a, b)
    }
}

impl From<Game> for GameDoc {
    fn from(g: Game) -> Self {
        let payoff_b = (!g.is_common_payoff()).then(|| g.scenario.nest(&g.payoff_b));
        GameDoc {
            payoff_a: g.scenario.nest(&g.payoff_a),
            payoff_b,
            scenario: g.scenario,
        }
    }
}

impl Game {
    /// Flat payoff tables in coordinate order; `payoff_b = None` makes the
    /// game common-payoff.
    pub fn new(
        scenario: Scenario,
        payoff_a: Vec<QuadExt>,
        payoff_b: Option<Vec<QuadExt>>,
    ) -> Result<Self> {
        let n = scenario.num_coords();
        let payoff_b = payoff_b.unwrap_or_else(|| payoff_a.clone());
        if payoff_a.len() != n || payoff_b.len() != n {
            return Err(Error::Dimension(format!(
                "payoff tables need {n} entries, got {} and {}",
                payoff_a.len(),
                payoff_b.len()
            )));
        }
        Ok(Game {
            scenario,
            payoff_a,
            payoff_b,
        })
    }

    pub fn common(scenario: Scenario, payoff: Vec<QuadExt>) -> Result<Self> {
        Game::new(scenario, payoff, None)
    }

    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(usize, usize, usize, usize) -> (QuadExt, QuadExt),
    ) -> Self {
        let (a, b) = scenario.coords().map(|(x, y, a, b)| f(x, y, a, b)).unzip();
        Game {
            scenario,
            payoff_a: a,
            payoff_b: b,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn is_common_payoff(&self) -> bool {
        self.payoff_a == self.payoff_b
    }

    pub fn table(&self, player: Player) -> &[QuadExt] {
        match player {
            Player::Alice => &self.payoff_a,
            Player::Bob => &self.payoff_b,
        }
    }

    pub fn payoff(&self, player: Player, x: usize, y: usize, a: usize, b: usize) -> &QuadExt {
        &self.table(player)[self.scenario.coord(x, y, a, b)]
    }

    /// Multiplies every payoff by `k`.
    pub fn scaled(&self, k: &QuadExt) -> Game {
        Game {
            scenario: self.scenario.clone(),
            payoff_a: self.payoff_a.iter().map(|u| u * k).collect(),
            payoff_b: self.payoff_b.iter().map(|u| u * k).collect(),
        }
    }

    pub(crate) fn expect_scenario(&self, other: &Scenario) -> Result<()> {
        self.scenario.expect_same(other, "game vs behavior")
    }
}

/// The strategic-form game of type pair `(x, y)`.
pub fn block_game(game: &Game, x: usize, y: usize) -> Result<StrategicGame> {
    let s = game.scenario();
    s.check_block(x, y)?;
    let (na, nb) = (s.alice_actions(x), s.bob_actions(y));
    let matrix = |p| {
        (0..na)
            .map(|a| {
                (0..nb)
                    .map(|b| game.payoff(p, x, y, a, b).clone())
                    .collect()
            })
            .collect()
    };
    StrategicGame::new(matrix(Player::Alice), matrix(Player::Bob))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct BehaviorDoc {
    scenario: Scenario,
    p: Nested,
}

/// Conditional distribution `P(a,b|x,y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BehaviorDoc", into = "BehaviorDoc")]
pub struct Behavior {
    scenario: Scenario,
    p: Vec<QuadExt>,
}

impl std::hash::Hash for Scenario {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.alice_actions.hash(state);
        self.bob_actions.hash(state);
    }
}

impl TryFrom<BehaviorDoc> for Behavior {
    type Error = Error;
    fn try_from(doc: BehaviorDoc) -> Result<Self> {
        let p = doc.scenario.flatten(doc.p, "p")?;
        Behavior::new(doc.scenario, p)
    }
}

impl From<Behavior> for BehaviorDoc {
    fn from(b: Behavior) -> Self {
        BehaviorDoc {
            p: b.scenario.nest(&b.p),
            scenario: b.scenario,
        }
    }
}

impl Behavior {
    pub fn new(scenario: Scenario, p: Vec<QuadExt>) -> Result<Self> {
        if p.len() != scenario.num_coords() {
            return Err(Error::Dimension(format!(
                "behavior needs {} entries, got {}",
                scenario.num_coords(),
                p.len()
            )));
        }
        Ok(Behavior { scenario, p })
    }

    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(usize, usize, usize, usize) -> QuadExt,
    ) -> Self {
        let p = scenario
            .coords()
            .map(|(x, y, a, b)| f(x, y, a, b))
            .collect();
        Behavior { scenario, p }
    }

    /// Every block uniform.
    pub fn uniform(scenario: &Scenario) -> Self {
        Behavior::from_fn(scenario.clone(), |x, y, _, _| {
            QuadExt::ratio(
                1,
                (scenario.alice_actions(x) * scenario.bob_actions(y)) as i64,
            )
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn entries(&self) -> &[QuadExt] {
        &self.p
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> &QuadExt {
        &self.p[self.scenario.coord(x, y, a, b)]
    }

    /// `lambda * self + (1 - lambda) * other`
    pub fn mix(&self, other: &Behavior, lambda: &QuadExt) -> Result<Behavior> {
        self.scenario.expect_same(&other.scenario, "mixture")?;
        let mu = QuadExt::one() - lambda;
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(u, v)| &(u * lambda) + &(v * &mu))
            .collect();
        Ok(Behavior {
            scenario: self.scenario.clone(),
            p,
        })
    }
}

/// The joint distribution `P(.,.|x,y)` of one block.
pub fn block_distribution(behavior: &Behavior, x: usize, y: usize) -> Result<JointDistribution> {
    let s = behavior.scenario();
    s.check_block(x, y)?;
    let p = (0..s.alice_actions(x))
        .map(|a| {
            (0..s.bob_actions(y))
                .map(|b| behavior.get(x, y, a, b).clone())
                .collect()
        })
        .collect();
    Ok(JointDistribution { p })
}

/// Point-mass behavior of a deterministic local strategy.
pub fn deterministic_behavior(
    scenario: &Scenario,
    alice_map: &[usize],
    bob_map: &[usize],
) -> Result<Behavior> {
    if alice_map.len() != scenario.alice_types() || bob_map.len() != scenario.bob_types() {
        return Err(Error::Dimension(
            "strategy maps must cover every type".into(),
        ));
    }
    for (x, &a) in alice_map.iter().enumerate() {
        if a >= scenario.alice_actions(x) {
            return Err(Error::OutOfRange(format!("alice action {a} at type {x}")));
        }
    }
    for (y, &b) in bob_map.iter().enumerate() {
        if b >= scenario.bob_actions(y) {
            return Err(Error::OutOfRange(format!("bob action {b} at type {y}")));
        }
    }
    Ok(Behavior::from_fn(scenario.clone(), |x, y, a, b| {
        if a == alice_map[x] && b == bob_map[y] {
            QuadExt::one()
        } else {
            QuadExt::zero()
        }
    }))
}

impl LocalStrategy {
    pub fn behavior(&self, scenario: &Scenario) -> Result<Behavior> {
        deterministic_behavior(scenario, &self.alice, &self.bob)
    }
}

/// Nonnegative weights `w(x,y)` over type pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PriorDoc")]
pub struct Prior {
    w: Vec<Vec<QuadExt>>,
}

#[derive(Deserialize)]
struct PriorDoc {
    w: Vec<Vec<QuadExt>>,
}

impl TryFrom<PriorDoc> for Prior {
    type Error = Error;
    fn try_from(doc: PriorDoc) -> Result<Self> {
        Prior::new(doc.w)
    }
}

impl Prior {
    pub fn new(w: Vec<Vec<QuadExt>>) -> Result<Self> {
        let prior = Prior { w };
        prior.check_weights()?;
        Ok(prior)
    }

    fn check_weights(&self) -> Result<()> {
        if self.w.iter().flatten().any(|v| *v < QuadExt::zero()) {
            return Err(Error::Invalid("prior weights must be nonnegative".into()));
        }
        if !self.w.iter().flatten().any(|v| *v > QuadExt::zero()) {
            return Err(Error::Invalid(
                "prior needs at least one positive weight".into(),
            ));
        }
        Ok(())
    }

    /// `1 / (|X| |Y|)` on every pair.
    pub fn uniform(scenario: &Scenario) -> Self {
        let n = (scenario.alice_types() * scenario.bob_types()) as i64;
        Prior::constant(scenario, QuadExt::ratio(1, n))
    }

    /// Weight one on every pair.
    pub fn unit(scenario: &Scenario) -> Self {
        Prior::constant(scenario, QuadExt::one())
    }

    fn constant(scenario: &Scenario, v: QuadExt) -> Self {
        Prior {
            w: vec![vec![v; scenario.bob_types()]; scenario.alice_types()],
        }
    }

    pub fn weight(&self, x: usize, y: usize) -> &QuadExt {
        &self.w[x][y]
    }

    pub fn weights(&self) -> &[Vec<QuadExt>] {
        &self.w
    }

    pub fn check_scenario(&self, scenario: &Scenario) -> Result<()> {
        self.check_weights()?;
        if self.w.len() != scenario.alice_types()
            || self.w.iter().any(|r| r.len() != scenario.bob_types())
        {
            return Err(Error::ScenarioMismatch(format!(
                "prior must be {}x{}",
                scenario.alice_types(),
                scenario.bob_types()
            )));
        }
        Ok(())
    }
}

/// Bimatrix game with `rows` actions for Alice and `cols` for Bob.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StrategicDoc", into = "StrategicDoc")]
pub struct StrategicGame {
    payoff_a: Vec<Vec<QuadExt>>,
    payoff_b: Vec<Vec<QuadExt>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct StrategicDoc {
    payoff_a: Vec<Vec<QuadExt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payoff_b: Option<Vec<Vec<QuadExt>>>,
}

impl TryFrom<StrategicDoc> for StrategicGame {
    type Error = Error;
    fn try_from(doc: StrategicDoc) -> Result<Self> {
        let b = doc.payoff_b.unwrap_or_else(|| doc.payoff_a.clone());
        StrategicGame::new(doc.payoff_a, b)
    }
}

impl From<StrategicGame> for StrategicDoc {
    fn from(g: StrategicGame) -> Self {
        let common = g.payoff_a == g.payoff_b;
        StrategicDoc {
            payoff_a: g.payoff_a,
            payoff_b: (!common).then_some(g.payoff_b),
        }
    }
}

impl StrategicGame {
    pub fn new(payoff_a: Vec<Vec<QuadExt>>, payoff_b: Vec<Vec<QuadExt>>) -> Result<Self> {
        let rows = payoff_a.len();
        let cols = payoff_a.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(
                "bimatrix game needs at least one action each".into(),
            ));
        }
        let rect = |m: &Vec<Vec<QuadExt>>| m.len() == rows && m.iter().all(|r| r.len() == cols);
        if !rect(&payoff_a) || !rect(&payoff_b) {
            return Err(Error::Dimension(format!(
                "payoff matrices must both be {rows}x{cols}"
            )));
        }
        Ok(StrategicGame { payoff_a, payoff_b })
    }

    pub fn common(payoff: Vec<Vec<QuadExt>>) -> Result<Self> {
        StrategicGame::new(payoff.clone(), payoff)
    }

    pub fn rows(&self) -> usize {
        self.payoff_a.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff_a[0].len()
    }

    pub fn payoff_a(&self, a: usize, b: usize) -> &QuadExt {
        &self.payoff_a[a][b]
    }

    pub fn payoff_b(&self, a: usize, b: usize) -> &QuadExt {
        &self.payoff_b[a][b]
    }

    pub fn matrix(&self, player: Player) -> &[Vec<QuadExt>] {
        match player {
            Player::Alice => &self.payoff_a,
            Player::Bob => &self.payoff_b,
        }
    }
}

/// Joint action distribution `p(a,b)` of a bimatrix game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub p: Vec<Vec<QuadExt>>,
}

impl JointDistribution {
    pub fn new(p: Vec<Vec<QuadExt>>) -> Result<Self> {
        let cols = p.first().map_or(0, Vec::len);
        if p.is_empty() || cols == 0 || p.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension(
                "joint distribution must be a nonempty rectangle".into(),
            ));
        }
        Ok(JointDistribution { p })
    }

    pub fn point_mass(rows: usize, cols: usize, a: usize, b: usize) -> Self {
        let mut p = vec![vec![QuadExt::zero(); cols]; rows];
        p[a][b] = QuadExt::one();
        JointDistribution { p }
    }

    /// Independent product `p_a(a) p_b(b)`.
    pub fn product(p_a: &[QuadExt], p_b: &[QuadExt]) -> Self {
        JointDistribution {
            p: p_a
                .iter()
                .map(|u| p_b.iter().map(|v| u * v).collect())
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.p.len()
    }

    pub fn cols(&self) -> usize {
        self.p[0].len()
    }

    pub fn get(&self, a: usize, b: usize) -> &QuadExt {
        &self.p[a][b]
    }

    pub fn total(&self) -> QuadExt {
        self.p.iter().flatten().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Nonnegativity,
    Normalization,
    AliceMarginal,
    BobMarginal,
}

/// One violated constraint of [`validate_behavior`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintFailure {
    pub kind: ConstraintKind,
    pub location: String,
    pub residual: QuadExt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub normalized: bool,
    pub alice_no_signaling: bool,
    pub bob_no_signaling: bool,
    pub failures: Vec<ConstraintFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.normalized && self.alice_no_signaling && self.bob_no_signaling
    }

    /// Whether the no-signaling equalities hold (normalization aside).
    pub fn no_signaling(&self) -> bool {
        self.alice_no_signaling && self.bob_no_signaling
    }
}

fn alice_marginal(behavior: &Behavior, x: usize, y: usize, a: usize) -> QuadExt {
    (0..behavior.scenario().bob_actions(y))
        .map(|b| behavior.get(x, y, a, b))
        .sum()
}

fn bob_marginal(behavior: &Behavior, x: usize, y: usize, b: usize) -> QuadExt {
    (0..behavior.scenario().alice_actions(x))
        .map(|a| behavior.get(x, y, a, b))
        .sum()
}

/// Checks nonnegativity, per-block normalization and both families of
/// no-signaling equalities, each up to `tolerance`.
pub fn validate_behavior(behavior: &Behavior, tolerance: &QuadExt) -> ValidationReport {
    let s = behavior.scenario();
    let mut failures = Vec::new();
    let mut fail = |kind, location: String, residual: QuadExt| {
        if residual > *tolerance {
            failures.push(ConstraintFailure {
                kind,
                location,
                residual,
            });
        }
    };

    for (x, y, a, b) in s.coords() {
        let v = behavior.get(x, y, a, b);
        if *v < QuadExt::zero() {
            fail(
                ConstraintKind::Nonnegativity,
                format!("P({a},{b}|{x},{y})"),
                v.abs(),
            );
        }
    }
    for (x, y) in s.blocks() {
        let total: QuadExt = (0..s.alice_actions(x))
            .flat_map(|a| (0..s.bob_actions(y)).map(move |b| (a, b)))
            .map(|(a, b)| behavior.get(x, y, a, b))
            .sum();
        fail(
            ConstraintKind::Normalization,
            format!("block ({x},{y})"),
            (total - QuadExt::one()).abs(),
        );
    }
    for x in 0..s.alice_types() {
        for a in 0..s.alice_actions(x) {
            for y1 in 0..s.bob_types() {
                for y2 in y1 + 1..s.bob_types() {
                    let d = alice_marginal(behavior, x, y1, a) - alice_marginal(behavior, x, y2, a);
                    fail(
                        ConstraintKind::AliceMarginal,
                        format!("a={a} x={x} y={y1} vs y={y2}"),
                        d.abs(),
                    );
                }
            }
        }
    }
    for y in 0..s.bob_types() {
        for b in 0..s.bob_actions(y) {
            for x1 in 0..s.alice_types() {
                for x2 in x1 + 1..s.alice_types() {
                    let d = bob_marginal(behavior, x1, y, b) - bob_marginal(behavior, x2, y, b);
                    fail(
                        ConstraintKind::BobMarginal,
                        format!("b={b} y={y} x={x1} vs x={x2}"),
                        d.abs(),
                    );
                }
            }
        }
    }

    let has = |k| failures.iter().any(|f: &ConstraintFailure| f.kind == k);
    ValidationReport {
        normalized: !has(ConstraintKind::Nonnegativity) && !has(ConstraintKind::Normalization),
        alice_no_signaling: !has(ConstraintKind::AliceMarginal),
        bob_no_signaling: !has(ConstraintKind::BobMarginal),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> QuadExt {
        QuadExt::ratio(n, d)
    }

    fn ragged() -> Scenario {
        Scenario::new(vec![2, 2, 3], vec![2, 2]).unwrap()
    }

    #[test]
    fn coordinate_layout() {
        let s = ragged();
        assert_eq!(s.num_coords(), 28);
        assert_eq!(s.coord(0, 0, 0, 0), 0);
        assert_eq!(s.coord(0, 1, 1, 1), 7);
        assert_eq!(s.coord(2, 0, 0, 0), 16);
        assert_eq!(s.coord(2, 1, 2, 1), 27);
        let all: Vec<_> = s.coords().collect();
        assert_eq!(all.len(), 28);
        for (i, &(x, y, a, b)) in all.iter().enumerate() {
            assert_eq!(s.coord(x, y, a, b), i);
        }
    }

    #[test]
    fn rejects_degenerate_scenarios() {
        assert!(Scenario::new(vec![], vec![2]).is_err());
        assert!(Scenario::new(vec![2, 0], vec![2]).is_err());
        assert!(
            serde_json::from_str::<Scenario>(r#"{"alice_actions":[1],"bob_actions":[0]}"#).is_err()
        );
    }

    #[test]
    fn block_extraction_reassembles_the_game() {
        let s = ragged();
        let game = Game::from_fn(s.clone(), |x, y, a, b| {
            (
                QuadExt::from((x * 100 + y * 10 + a) as i64),
                QuadExt::from(b as i64 - 7),
            )
        });
        let rebuilt = Game::from_fn(s.clone(), |x, y, a, b| {
            let g = block_game(&game, x, y).unwrap();
            (g.payoff_a(a, b).clone(), g.payoff_b(a, b).clone())
        });
        assert_eq!(rebuilt, game);
        let g = block_game(&game, 2, 1).unwrap();
        assert_eq!((g.rows(), g.cols()), (3, 2));
        assert!(matches!(block_game(&game, 3, 0), Err(Error::OutOfRange(_))));
        assert!(matches!(block_game(&game, 0, 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn uniform_blocks() {
        let s = ragged();
        let u = Behavior::uniform(&s);
        let d = block_distribution(&u, 2, 0).unwrap();
        assert!(d.p.iter().flatten().all(|v| *v == q(1, 6)));
        assert_eq!(d.total(), QuadExt::one());
        assert!(validate_behavior(&u, &QuadExt::zero()).passed());
    }

    #[test]
    fn deterministic_behavior_has_unit_blocks() {
        let s = ragged();
        let d = deterministic_behavior(&s, &[1, 0, 2], &[0, 1]).unwrap();
        for (x, y) in s.blocks() {
            let block = block_distribution(&d, x, y).unwrap();
            let ones = block.p.iter().flatten().filter(|v| v.is_one()).count();
            let zeros = block.p.iter().flatten().filter(|v| v.is_zero()).count();
            assert_eq!(ones, 1);
            assert_eq!(ones + zeros, s.alice_actions(x) * s.bob_actions(y));
        }
        assert!(validate_behavior(&d, &QuadExt::zero()).passed());
        assert!(deterministic_behavior(&s, &[0, 0, 3], &[0, 0]).is_err());
        assert!(deterministic_behavior(&s, &[0, 0], &[0, 0]).is_err());
    }

    #[test]
    fn maximal_signaling_is_reported() {
        let s = Scenario::chsh();
        // Alice outputs 0 when y = 0 and 1 when y = 1.
        let p = Behavior::from_fn(s.clone(), |_, y, a, b| {
            if a == y && b == 0 {
                QuadExt::one()
            } else {
                QuadExt::zero()
            }
        });
        let report = validate_behavior(&p, &QuadExt::zero());
        assert!(report.normalized);
        assert!(!report.alice_no_signaling);
        assert!(report.bob_no_signaling);
        let f = report
            .failures
            .iter()
            .find(|f| f.kind == ConstraintKind::AliceMarginal)
            .unwrap();
        assert_eq!(f.residual, QuadExt::one());
    }

    #[test]
    fn tolerance_absorbs_small_residuals() {
        let s = Scenario::new(vec![1], vec![2]).unwrap();
        let p = Behavior::new(s, vec![q(1, 2), q(50001, 100000)]).unwrap();
        assert!(!validate_behavior(&p, &QuadExt::zero()).normalized);
        assert!(validate_behavior(&p, &q(1, 10000)).normalized);
    }

    #[test]
    fn json_documents() {
        let s = Scenario::chsh();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"alice_actions":[2,2],"bob_actions":[2,2]}"#);

        let g: Game = serde_json::from_str(
            r#"{"scenario":{"alice_actions":[1],"bob_actions":[2]},"payoff_a":[[[["1/2","0+1*sqrt2"]]]]}"#,
        )
        .unwrap();
        assert!(g.is_common_payoff());
        assert_eq!(g.payoff(Player::Bob, 0, 0, 0, 1), &QuadExt::sqrt2());
        let back: Game = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);

        let bad = r#"{"scenario":{"alice_actions":[1],"bob_actions":[2]},"payoff_a":[[[["1"]]]]}"#;
        assert!(serde_json::from_str::<Game>(bad).is_err());

        let prior: Prior = serde_json::from_str(r#"{"w":[["1/4","1/4"],["1/4","1/4"]]}"#).unwrap();
        assert_eq!(prior, Prior::uniform(&s));
        assert!(serde_json::from_str::<Prior>(r#"{"w":[["x"]]}"#).is_err());
    }

    #[test]
    fn prior_validation() {
        assert!(Prior::new(vec![vec![QuadExt::zero()]]).is_err());
        assert!(Prior::new(vec![vec![q(-1, 2), QuadExt::one()]]).is_err());
        let p = Prior::unit(&Scenario::chsh());
        assert!(p.check_scenario(&ragged()).is_err());
    }
}
