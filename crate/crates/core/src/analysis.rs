//! Expected payoffs, local and no-signaling payoff bounds, behavior
//! classification, and the side-by-side gap report.

use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{check_ex_ante, check_ex_post, Verdict};
use crate::error::{Error, Result};
use crate::lp::LpOutcome;
use crate::model::{validate_behavior, Behavior, Game, LocalStrategy, Player, Prior};
use crate::numeric::QuadExt;
use crate::par::{self, Execution};
use crate::polytope::{
    enumerate_local_strategies, is_local_within, is_vertex, ns_constraints, LocalityCertificate,
};

/// `w(x,y) * u_player(a,b,x,y)` in coordinate order.
pub fn payoff_weights(game: &Game, prior: &Prior, player: Player) -> Vec<QuadExt> {
    let s = game.scenario();
    s.coords()
        .map(|(x, y, a, b)| game.payoff(player, x, y, a, b) * prior.weight(x, y))
        .collect()
}

/// Prior-weighted expected payoff of both players.
pub fn expected_payoff(
    game: &Game,
    behavior: &Behavior,
    prior: &Prior,
) -> Result<(QuadExt, QuadExt)> {
    game.expect_scenario(behavior.scenario())?;
    prior.check_scenario(game.scenario())?;
    let value = |player| -> QuadExt {
        payoff_weights(game, prior, player)
            .iter()
            .zip(behavior.entries())
            .filter(|(_, p)| !p.is_zero())
            .map(|(u, p)| u * p)
            .sum()
    };
    Ok((value(Player::Alice), value(Player::Bob)))
}

fn strategy_payoff(game: &Game, prior: &Prior, player: Player, s: &LocalStrategy) -> QuadExt {
    game.scenario()
        .blocks()
        .map(|(x, y)| game.payoff(player, x, y, s.alice[x], s.bob[y]) * prior.weight(x, y))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Strategy(LocalStrategy),
    Behavior(Behavior),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub player: Player,
    pub value: QuadExt,
    pub witness: Witness,
    pub attained_at_vertex: bool,
}

impl BoundResult {
    pub fn witness_behavior(&self, game: &Game) -> Result<Behavior> {
        match &self.witness {
            Witness::Strategy(s) => s.behavior(game.scenario()),
            Witness::Behavior(b) => Ok(b.clone()),
        }
    }
}

/// Maximum of `player`'s expected payoff over the local polytope, by
/// exhaustive search over deterministic strategies. Ties go to the
/// lexicographically first strategy.
pub fn local_bound(game: &Game, prior: &Prior, player: Player) -> Result<BoundResult> {
    local_bound_with(game, prior, player, Execution::default())
}

pub fn local_bound_with(
    game: &Game,
    prior: &Prior,
    player: Player,
    exec: Execution,
) -> Result<BoundResult> {
    prior.check_scenario(game.scenario())?;
    let strategies = enumerate_local_strategies(game.scenario());
    let values = par::map(exec, &strategies, |s| {
        strategy_payoff(game, prior, player, s)
    });
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(BoundResult {
        player,
        value: values[best].clone(),
        witness: Witness::Strategy(strategies[best].clone()),
        attained_at_vertex: true,
    })
}

/// Every deterministic strategy attaining the local bound.
pub fn local_maximizers(game: &Game, prior: &Prior, player: Player) -> Result<Vec<LocalStrategy>> {
    let bound = local_bound(game, prior, player)?;
    Ok(enumerate_local_strategies(game.scenario())
        .into_iter()
        .filter(|s| strategy_payoff(game, prior, player, s) == bound.value)
        .collect())
}

/// Maximum of `player`'s expected payoff over the no-signaling polytope, by
/// exact LP.
pub fn ns_bound(game: &Game, prior: &Prior, player: Player) -> Result<BoundResult> {
    prior.check_scenario(game.scenario())?;
    let system = ns_constraints(game.scenario());
    let lp = system.program(payoff_weights(game, prior, player));
    match lp.solve()? {
        LpOutcome::Optimal { value, point, .. } => {
            let behavior = Behavior::new(game.scenario().clone(), point)?;
            let vertex = is_vertex(&behavior, game.scenario())?;
            Ok(BoundResult {
                player,
                value,
                witness: Witness::Behavior(behavior),
                attained_at_vertex: vertex,
            })
        }
        other => Err(Error::Invalid(format!(
            "no-signaling program ended {}",
            other.status()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorClass {
    Signaling,
    Local,
    NonlocalNs,
}

impl std::fmt::Display for BehaviorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BehaviorClass::Signaling => "signaling",
            BehaviorClass::Local => "local",
            BehaviorClass::NonlocalNs => "nonlocal_ns",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub class: BehaviorClass,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<LocalityCertificate>,
}

/// Signaling, local (with a convex certificate) or nonlocal no-signaling.
pub fn classify_behavior(behavior: &Behavior, tolerance: &QuadExt) -> Result<Classification> {
    let report = validate_behavior(behavior, tolerance);
    if !report.normalized {
        return Err(Error::Invalid(
            "behavior is not a normalized distribution".into(),
        ));
    }
    if !report.no_signaling() {
        return Ok(Classification {
            class: BehaviorClass::Signaling,
            certificate: None,
        });
    }
    let cert = is_local_within(behavior, tolerance)?;
    let class = if cert.is_local() {
        BehaviorClass::Local
    } else {
        BehaviorClass::NonlocalNs
    };
    Ok(Classification {
        class,
        certificate: Some(cert),
    })
}

#[derive(Clone, Debug)]
pub struct GapOptions {
    pub player: Player,
    /// Multiplies every payoff in the report (4 gives the usual CHSH
    /// normalization under the uniform 1/4 prior).
    pub scale: QuadExt,
    pub tolerance: QuadExt,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            player: Player::Alice,
            scale: QuadExt::from(1),
            tolerance: QuadExt::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRow {
    pub name: String,
    pub payoff: QuadExt,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ex_post: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ex_ante: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub player: Player,
    pub scale: QuadExt,
    pub rows: Vec<GapRow>,
}

impl GapReport {
    pub fn row(&self, name: &str) -> Option<&GapRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Plain-text table: name, payoff, ex post verdict, ex ante verdict.
    pub fn render_text(&self, approx: Option<usize>) -> String {
        let cell = |v: &QuadExt| match approx {
            Some(d) => format!("{v} (~{})", v.approx(d)),
            None => v.to_string(),
        };
        let verdict = |v: &Option<Verdict>| v.map_or("-".to_string(), |v| v.to_string());
        let rows: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    cell(&r.payoff),
                    verdict(&r.ex_post),
                    verdict(&r.ex_ante),
                ]
            })
            .collect();
        let header = ["name", "payoff", "ex_post", "ex_ante"].map(String::from);
        let widths: Vec<usize> = (0..4)
            .map(|i| {
                rows.iter()
                    .chain([&header])
                    .map(|r| r[i].len())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for r in std::iter::once(&header).chain(&rows) {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

pub const LOCAL_ROW: &str = "local bound";
pub const NS_ROW: &str = "no-signaling bound";

/// Local bound, each named behavior's payoff with its equilibrium verdicts,
/// and the no-signaling bound.
pub fn gap_report(
    game: &Game,
    prior: &Prior,
    behaviors: &[(String, Behavior)],
    options: &GapOptions,
) -> Result<GapReport> {
    let scale = |v: QuadExt| &v * &options.scale;
    let local = local_bound(game, prior, options.player)?;
    let ns = ns_bound(game, prior, options.player)?;
    let mut rows = vec![GapRow {
        name: LOCAL_ROW.into(),
        payoff: scale(local.value),
        ex_post: None,
        ex_ante: None,
    }];
    for (name, behavior) in behaviors {
        let (ua, ub) = expected_payoff(game, behavior, prior)?;
        let payoff = match options.player {
            Player::Alice => ua,
            Player::Bob => ub,
        };
        let post = check_ex_post(game, behavior, &options.tolerance)?;
        let ante = check_ex_ante(game, behavior, prior, &options.tolerance)?;
        rows.push(GapRow {
            name: name.clone(),
            payoff: scale(payoff),
            ex_post: Some(post.verdict),
            ex_ante: Some(ante.verdict),
        });
    }
    rows.push(GapRow {
        name: NS_ROW.into(),
        payoff: scale(ns.value),
        ex_post: None,
        ex_ante: None,
    });
    Ok(GapReport {
        player: options.player,
        scale: options.scale.clone(),
        rows,
    })
}
