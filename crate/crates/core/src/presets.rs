//! Named games, behaviors and priors: the battle of the sexes and the
//! coordination game, the CHSH game with the PR box and the Tsirelson
//! behavior, and the Vértesi–Bene game with its optimal local, optimal
//! no-signaling and quantum behaviors.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{deterministic_behavior, Behavior, Game, Prior, Scenario, StrategicGame};
use crate::numeric::{parse_scalar, QuadExt};

pub const PRESET_NAMES: &[&str] = &[
    "battle_of_sexes",
    "coordination",
    "chsh_game",
    "pr_box",
    "chsh_quantum",
    "chsh_uniform",
    "chsh_prior",
    "vb_game",
    "vb_local_opt",
    "vb_ns_opt",
    "vb_quantum",
    "vb_prior",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Preset {
    Game(Game),
    Behavior(Behavior),
    Strategic(StrategicGame),
    Prior(Prior),
}

impl Preset {
    pub fn kind(&self) -> &'static str {
        match self {
            Preset::Game(_) => "game",
            Preset::Behavior(_) => "behavior",
            Preset::Strategic(_) => "strategic game",
            Preset::Prior(_) => "prior",
        }
    }
}

/// Looks up a preset. `vb_game` needs `c > 0`; other names ignore `c`.
pub fn preset(name: &str, c: Option<&QuadExt>) -> Result<Preset> {
    Ok(match name {
        "battle_of_sexes" => Preset::Strategic(battle_of_sexes()),
        "coordination" => Preset::Strategic(coordination()),
        "chsh_game" => Preset::Game(chsh_game()),
        "pr_box" => Preset::Behavior(pr_box()),
        "chsh_quantum" => Preset::Behavior(chsh_quantum()),
        "chsh_uniform" => Preset::Behavior(Behavior::uniform(&Scenario::chsh())),
        "chsh_prior" => Preset::Prior(Prior::uniform(&Scenario::chsh())),
        "vb_game" => {
            let c = c.ok_or_else(|| Error::Invalid("vb_game needs the parameter c".into()))?;
            Preset::Game(vb_game(c)?)
        }
        "vb_local_opt" => Preset::Behavior(vb_local_opt()),
        "vb_ns_opt" => Preset::Behavior(vb_ns_opt()),
        "vb_quantum" => Preset::Behavior(vb_quantum()),
        "vb_prior" => Preset::Prior(Prior::unit(&vb_scenario())),
        other => return Err(Error::UnknownPreset(other.to_owned())),
    })
}

/// Tolerance at which a preset behavior validates: zero for analytic tables,
/// `2e-4` for the table printed to five decimals.
pub fn declared_tolerance(name: &str) -> QuadExt {
    match name {
        "vb_quantum" => QuadExt::ratio(2, 10_000),
        _ => QuadExt::zero(),
    }
}

fn q(text: &str) -> QuadExt {
    parse_scalar(text).expect("preset literal")
}

fn matrix(rows: &[&[&str]]) -> Vec<Vec<QuadExt>> {
    rows.iter()
        .map(|r| r.iter().map(|s| q(s)).collect())
        .collect()
}

pub fn battle_of_sexes() -> StrategicGame {
    StrategicGame::new(
        matrix(&[&["2", "0"], &["0", "1"]]),
        matrix(&[&["1", "0"], &["0", "2"]]),
    )
    .expect("2x2")
}

pub fn coordination() -> StrategicGame {
    StrategicGame::common(matrix(&[&["1", "0"], &["0", "1"]])).expect("2x2")
}

/// `u = (-1)^(a + b + x y)`, common payoff.
pub fn chsh_game() -> Game {
    Game::from_fn(Scenario::chsh(), |x, y, a, b| {
        let u = if (a ^ b) == (x & y) {
            QuadExt::one()
        } else {
            -QuadExt::one()
        };
        (u.clone(), u)
    })
}

/// `P(a,b|x,y) = 1/2` when `a xor b = x y`.
pub fn pr_box() -> Behavior {
    Behavior::from_fn(Scenario::chsh(), |x, y, a, b| {
        if (a ^ b) == (x & y) {
            QuadExt::ratio(1, 2)
        } else {
            QuadExt::zero()
        }
    })
}

/// `(sqrt2/2) PR + (1 - sqrt2/2) uniform`, which reaches Tsirelson's value.
pub fn chsh_quantum() -> Behavior {
    let lambda = &QuadExt::sqrt2() / &QuadExt::from(2);
    pr_box()
        .mix(&Behavior::uniform(&Scenario::chsh()), &lambda)
        .expect("same scenario")
}

/// Alice has three types, the last with three actions; Bob has two binary
/// types.
pub fn vb_scenario() -> Scenario {
    Scenario::new(vec![2, 2, 3], vec![2, 2]).expect("valid")
}

/// The Vértesi–Bene payoff, common to both players, parameterized by `c > 0`.
pub fn vb_game(c: &QuadExt) -> Result<Game> {
    if *c <= QuadExt::zero() {
        return Err(Error::Invalid(format!("vb_game needs c > 0, got {c}")));
    }
    let half_c = c / &QuadExt::from(2);
    let neg_half_c = -half_c.clone();
    let zero = QuadExt::zero();
    // Rows indexed by a, columns by b, per (x, y) block.
    let block = |x: usize, y: usize| -> Vec<Vec<QuadExt>> {
        match (x, y) {
            (0, 0) => vec![
                vec![zero.clone(), neg_half_c.clone()],
                vec![neg_half_c.clone(), zero.clone()],
            ],
            (0, 1) => vec![
                vec![half_c.clone(), neg_half_c.clone()],
                vec![zero.clone(), zero.clone()],
            ],
            (1, 0) => vec![
                vec![half_c.clone(), zero.clone()],
                vec![neg_half_c.clone(), zero.clone()],
            ],
            (1, 1) => vec![
                vec![-c.clone(), zero.clone()],
                vec![zero.clone(), zero.clone()],
            ],
            (2, 0) => matrix(&[
                &["1/2", "-1/2"],
                &["1/2+1/4*sqrt2", "-1/2+1/4*sqrt2"],
                &["0", "0"],
            ]),
            (2, 1) => matrix(&[
                &["1/2", "-1/2"],
                &["-3/2+1/4*sqrt2", "-1/2+1/4*sqrt2"],
                &["0", "0"],
            ]),
            _ => unreachable!("vb scenario has 3x2 blocks"),
        }
    };
    let blocks: Vec<Vec<Vec<Vec<QuadExt>>>> = (0..3)
        .map(|x| (0..2).map(|y| block(x, y)).collect())
        .collect();
    Ok(Game::from_fn(vb_scenario(), |x, y, a, b| {
        let u = blocks[x][y][a][b].clone();
        (u.clone(), u)
    }))
}

/// The deterministic strategy `a = 0, b = 0` for every type.
pub fn vb_local_opt() -> Behavior {
    deterministic_behavior(&vb_scenario(), &[0, 0, 0], &[0, 0]).expect("in range")
}

/// The no-signaling optimum for `c > 1`: PR-box blocks for Alice's binary
/// types, and mass 1/2 on `(0,0)` and `(2,1)` for her ternary type.
pub fn vb_ns_opt() -> Behavior {
    Behavior::from_fn(vb_scenario(), |x, y, a, b| {
        let hit = match x {
            2 => (a, b) == (0, 0) || (a, b) == (2, 1),
            _ => (a ^ b) == (x & y),
        };
        if hit {
            QuadExt::ratio(1, 2)
        } else {
            QuadExt::zero()
        }
    })
}

/// Quantum behavior with an advantage. Alice's binary types repeat the
/// Tsirelson blocks exactly; the ternary type uses the five-decimal table.
pub fn vb_quantum() -> Behavior {
    let plus = q("1/4+1/8*sqrt2");
    let minus = q("1/4-1/8*sqrt2");
    let ternary = [
        [
            ["0.30602", "0.12925"],
            ["0.18243", "0.11444"],
            ["0.01155", "0.25630"],
        ],
        [
            ["0.41652", "0.01875"],
            ["0.00395", "0.29293"],
            ["0.07953", "0.18832"],
        ],
    ];
    Behavior::from_fn(vb_scenario(), |x, y, a, b| {
        if x == 2 {
            return q(ternary[y][a][b]);
        }
        if (a ^ b) == (x & y) {
            plus.clone()
        } else {
            minus.clone()
        }
    })
}
