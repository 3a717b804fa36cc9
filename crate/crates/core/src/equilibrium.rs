//! Equilibrium verifiers: pure Nash, mixed profiles and correlated
//! equilibria of bimatrix games, and ex post / ex ante equilibria of
//! behaviors in Bayesian games.
//!
//! Margins are exact. A deviation is a violation when its margin is below
//! `-tolerance`; the tolerance never changes the reported margins.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    block_distribution, block_game, validate_behavior, Behavior, Game, JointDistribution, Player,
    Prior, StrategicGame,
};
use crate::numeric::QuadExt;
use crate::par::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Gain of sticking to `advised` instead of switching to `deviation`.
/// Negative means the switch pays off.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub player: Player,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none", default)]
    pub type_index: Option<usize>,
    pub advised: usize,
    pub deviation: usize,
    pub margin: QuadExt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub verdict: Verdict,
    pub violations: Vec<Deviation>,
    /// Every checked deviation (correlated and ex ante checks only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub margins: Vec<Deviation>,
}

impl EquilibriumReport {
    fn from_margins(margins: Vec<Deviation>, tolerance: &QuadExt, keep_all: bool) -> Self {
        let floor = -tolerance.clone();
        let violations: Vec<Deviation> = margins
            .iter()
            .filter(|d| d.margin < floor)
            .cloned()
            .collect();
        EquilibriumReport {
            verdict: Verdict::from_pass(violations.is_empty()),
            violations,
            margins: if keep_all { margins } else { Vec::new() },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn check_action(n: usize, a: usize, who: &str) -> Result<()> {
    if a >= n {
        return Err(Error::OutOfRange(format!("{who} action {a} of {n}")));
    }
    Ok(())
}

/// Neither player gains by a unilateral pure deviation from `(a, b)`.
pub fn check_pure_nash(game: &StrategicGame, a: usize, b: usize) -> Result<EquilibriumReport> {
    check_action(game.rows(), a, "alice")?;
    check_action(game.cols(), b, "bob")?;
    let mut margins = Vec::new();
    for a2 in (0..game.rows()).filter(|&a2| a2 != a) {
        margins.push(Deviation {
            player: Player::Alice,
            type_index: None,
            advised: a,
            deviation: a2,
            margin: game.payoff_a(a, b) - game.payoff_a(a2, b),
        });
    }
    for b2 in (0..game.cols()).filter(|&b2| b2 != b) {
        margins.push(Deviation {
            player: Player::Bob,
            type_index: None,
            advised: b,
            deviation: b2,
            margin: game.payoff_b(a, b) - game.payoff_b(a, b2),
        });
    }
    Ok(EquilibriumReport::from_margins(
        margins,
        &QuadExt::zero(),
        false,
    ))
}

/// Every pure profile passing [`check_pure_nash`].
pub fn pure_equilibria(game: &StrategicGame) -> Vec<(usize, usize)> {
    (0..game.rows())
        .flat_map(|a| (0..game.cols()).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            check_pure_nash(game, a, b)
                .map(|r| r.passed())
                .unwrap_or(false)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedReport {
    #[serde(flatten)]
    pub report: EquilibriumReport,
    pub payoff_a: QuadExt,
    pub payoff_b: QuadExt,
}

fn check_distribution(p: &[QuadExt], n: usize, tolerance: &QuadExt, who: &str) -> Result<()> {
    if p.len() != n {
        return Err(Error::Dimension(format!(
            "{who} distribution needs {n} entries"
        )));
    }
    let floor = -tolerance.clone();
    let total: QuadExt = p.iter().sum();
    if p.iter().any(|v| *v < floor) || (total - QuadExt::one()).abs() > *tolerance {
        return Err(Error::Invalid(format!(
            "{who} distribution is not a probability vector"
        )));
    }
    Ok(())
}

/// Every action in each player's support is a best response to the other's
/// mixture.
pub fn check_mixed_profile(
    game: &StrategicGame,
    p_a: &[QuadExt],
    p_b: &[QuadExt],
    tolerance: &QuadExt,
) -> Result<MixedReport> {
    check_distribution(p_a, game.rows(), tolerance, "alice")?;
    check_distribution(p_b, game.cols(), tolerance, "bob")?;
    let row_value = |a: usize| -> QuadExt {
        (0..game.cols())
            .map(|b| game.payoff_a(a, b) * &p_b[b])
            .sum()
    };
    let col_value = |b: usize| -> QuadExt {
        (0..game.rows())
            .map(|a| game.payoff_b(a, b) * &p_a[a])
            .sum()
    };

    let mut margins = Vec::new();
    let mut best_response = |player, values: Vec<QuadExt>, support: &[QuadExt]| {
        let (best, best_value) =
            values.iter().enumerate().fold(
                (0, &values[0]),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
        for (i, v) in values.iter().enumerate() {
            if support[i] > QuadExt::zero() && i != best {
                margins.push(Deviation {
                    player,
                    type_index: None,
                    advised: i,
                    deviation: best,
                    margin: v - best_value,
                });
            }
        }
    };
    best_response(
        Player::Alice,
        (0..game.rows()).map(row_value).collect(),
        p_a,
    );
    best_response(Player::Bob, (0..game.cols()).map(col_value).collect(), p_b);

    let joint = JointDistribution::product(p_a, p_b);
    let (payoff_a, payoff_b) = strategic_payoff(game, &joint);
    Ok(MixedReport {
        report: EquilibriumReport::from_margins(margins, tolerance, false),
        payoff_a,
        payoff_b,
    })
}

/// Expected payoffs of a joint distribution.
pub fn strategic_payoff(game: &StrategicGame, joint: &JointDistribution) -> (QuadExt, QuadExt) {
    let mut ua = QuadExt::zero();
    let mut ub = QuadExt::zero();
    for a in 0..game.rows() {
        for b in 0..game.cols() {
            let p = joint.get(a, b);
            if p.is_zero() {
                continue;
            }
            ua += game.payoff_a(a, b) * p;
            ub += game.payoff_b(a, b) * p;
        }
    }
    (ua, ub)
}

/// Obedience constraints of a correlated equilibrium, for every pair of
/// distinct advised and deviating actions.
pub fn check_correlated_eq(
    game: &StrategicGame,
    joint: &JointDistribution,
    tolerance: &QuadExt,
) -> Result<EquilibriumReport> {
    if joint.rows() != game.rows() || joint.cols() != game.cols() {
        return Err(Error::Dimension(format!(
            "joint distribution is {}x{}, game is {}x{}",
            joint.rows(),
            joint.cols(),
            game.rows(),
            game.cols()
        )));
    }
    let floor = -tolerance.clone();
    if joint.p.iter().flatten().any(|v| *v < floor)
        || (joint.total() - QuadExt::one()).abs() > *tolerance
    {
        return Err(Error::Invalid(
            "joint distribution is not normalized within tolerance".into(),
        ));
    }
    Ok(EquilibriumReport::from_margins(
        correlated_margins(game, joint, None),
        tolerance,
        true,
    ))
}

fn correlated_margins(
    game: &StrategicGame,
    joint: &JointDistribution,
    type_index: Option<usize>,
) -> Vec<Deviation> {
    let mut margins = Vec::new();
    let (rows, cols) = (game.rows(), game.cols());
    for a in 0..rows {
        for a2 in (0..rows).filter(|&a2| a2 != a) {
            let margin = (0..cols)
                .filter(|&b| !joint.get(a, b).is_zero())
                .map(|b| &(game.payoff_a(a, b) - game.payoff_a(a2, b)) * joint.get(a, b))
                .sum();
            margins.push(Deviation {
                player: Player::Alice,
                type_index,
                advised: a,
                deviation: a2,
                margin,
            });
        }
    }
    for b in 0..cols {
        for b2 in (0..cols).filter(|&b2| b2 != b) {
            let margin = (0..rows)
                .filter(|&a| !joint.get(a, b).is_zero())
                .map(|a| &(game.payoff_b(a, b) - game.payoff_b(a, b2)) * joint.get(a, b))
                .sum();
            margins.push(Deviation {
                player: Player::Bob,
                type_index,
                advised: b,
                deviation: b2,
                margin,
            });
        }
    }
    margins
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub x: usize,
    pub y: usize,
    #[serde(flatten)]
    pub report: EquilibriumReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExPostReport {
    pub verdict: Verdict,
    pub blocks: Vec<BlockReport>,
}

impl ExPostReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failing_blocks(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .filter(|b| !b.report.passed())
            .map(|b| (b.x, b.y))
            .collect()
    }

    pub fn block(&self, x: usize, y: usize) -> Option<&EquilibriumReport> {
        self.blocks
            .iter()
            .find(|b| b.x == x && b.y == y)
            .map(|b| &b.report)
    }
}

fn check_inputs(game: &Game, behavior: &Behavior, tolerance: &QuadExt) -> Result<()> {
    game.expect_scenario(behavior.scenario())?;
    if !validate_behavior(behavior, tolerance).normalized {
        return Err(Error::Invalid(
            "behavior is not normalized within tolerance".into(),
        ));
    }
    Ok(())
}

/// Each block of the behavior is a correlated equilibrium of the block game.
pub fn check_ex_post(
    game: &Game,
    behavior: &Behavior,
    tolerance: &QuadExt,
) -> Result<ExPostReport> {
    check_ex_post_with(game, behavior, tolerance, Execution::default())
}

pub fn check_ex_post_with(
    game: &Game,
    behavior: &Behavior,
    tolerance: &QuadExt,
    exec: Execution,
) -> Result<ExPostReport> {
    check_inputs(game, behavior, tolerance)?;
    let blocks: Vec<(usize, usize)> = game.scenario().blocks().collect();
    let reports = par::map(exec, &blocks, |&(x, y)| -> Result<BlockReport> {
        let g = block_game(game, x, y)?;
        let joint = block_distribution(behavior, x, y)?;
        Ok(BlockReport {
            x,
            y,
            report: EquilibriumReport::from_margins(
                correlated_margins(&g, &joint, None),
                tolerance,
                true,
            ),
        })
    });
    let blocks: Vec<BlockReport> = reports.into_iter().collect::<Result<_>>()?;
    let pass = blocks.iter().all(|b| b.report.passed());
    Ok(ExPostReport {
        verdict: Verdict::from_pass(pass),
        blocks,
    })
}

/// Interim deviation test: for every player, own type and advised action,
/// switching to another action of that type does not raise the prior-weighted
/// payoff.
pub fn check_ex_ante(
    game: &Game,
    behavior: &Behavior,
    prior: &Prior,
    tolerance: &QuadExt,
) -> Result<EquilibriumReport> {
    check_inputs(game, behavior, tolerance)?;
    let s = game.scenario();
    prior.check_scenario(s)?;
    let mut margins = Vec::new();
    for x in 0..s.alice_types() {
        let n = s.alice_actions(x);
        for a in 0..n {
            for a2 in (0..n).filter(|&a2| a2 != a) {
                let mut margin = QuadExt::zero();
                for y in 0..s.bob_types() {
                    let w = prior.weight(x, y);
                    if w.is_zero() {
                        continue;
                    }
                    for b in 0..s.bob_actions(y) {
                        let p = behavior.get(x, y, a, b);
                        if p.is_zero() {
                            continue;
                        }
                        let gain = game.payoff(Player::Alice, x, y, a, b)
                            - game.payoff(Player::Alice, x, y, a2, b);
                        margin += &(&gain * p) * w;
                    }
                }
                margins.push(Deviation {
                    player: Player::Alice,
                    type_index: Some(x),
                    advised: a,
                    deviation: a2,
                    margin,
                });
            }
        }
    }
    for y in 0..s.bob_types() {
        let n = s.bob_actions(y);
        for b in 0..n {
            for b2 in (0..n).filter(|&b2| b2 != b) {
                let mut margin = QuadExt::zero();
                for x in 0..s.alice_types() {
                    let w = prior.weight(x, y);
                    if w.is_zero() {
                        continue;
                    }
                    for a in 0..s.alice_actions(x) {
                        let p = behavior.get(x, y, a, b);
                        if p.is_zero() {
                            continue;
                        }
                        let gain = game.payoff(Player::Bob, x, y, a, b)
                            - game.payoff(Player::Bob, x, y, a, b2);
                        margin += &(&gain * p) * w;
                    }
                }
                margins.push(Deviation {
                    player: Player::Bob,
                    type_index: Some(y),
                    advised: b,
                    deviation: b2,
                    margin,
                });
            }
        }
    }
    Ok(EquilibriumReport::from_margins(margins, tolerance, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;
    use crate::presets;

    fn q(n: i64, d: i64) -> QuadExt {
        QuadExt::ratio(n, d)
    }

    #[test]
    fn battle_of_sexes_pure() {
        let g = presets::battle_of_sexes();
        assert!(check_pure_nash(&g, 0, 0).unwrap().passed());
        let r = check_pure_nash(&g, 0, 1).unwrap();
        assert!(!r.passed());
        let players: Vec<_> = r
            .violations
            .iter()
            .map(|v| (v.player, v.advised, v.deviation))
            .collect();
        assert_eq!(players, vec![(Player::Alice, 0, 1), (Player::Bob, 1, 0)]);
        assert_eq!(pure_equilibria(&g), vec![(0, 0), (1, 1)]);
        assert!(check_pure_nash(&g, 2, 0).is_err());
    }

    #[test]
    fn one_by_one_game_is_trivially_nash() {
        let g = StrategicGame::common(vec![vec![q(3, 1)]]).unwrap();
        assert!(check_pure_nash(&g, 0, 0).unwrap().passed());
    }

    #[test]
    fn mixed_profiles() {
        let g = presets::battle_of_sexes();
        let r = check_mixed_profile(
            &g,
            &[q(2, 3), q(1, 3)],
            &[q(1, 3), q(2, 3)],
            &QuadExt::zero(),
        )
        .unwrap();
        assert!(r.report.passed());
        assert_eq!((r.payoff_a, r.payoff_b), (q(2, 3), q(2, 3)));

        let pure = check_mixed_profile(
            &g,
            &[q(1, 1), q(0, 1)],
            &[q(1, 1), q(0, 1)],
            &QuadExt::zero(),
        )
        .unwrap();
        assert!(pure.report.passed());

        let half = [q(1, 2), q(1, 2)];
        let r = check_mixed_profile(&g, &half, &half, &QuadExt::zero()).unwrap();
        assert!(!r.report.passed());
        // Alice's rows earn 1 and 1/2 against Bob's uniform mixture.
        assert!(r
            .report
            .violations
            .iter()
            .any(|v| v.player == Player::Alice && v.advised == 1 && v.margin == q(-1, 2)));

        assert!(check_mixed_profile(&g, &[q(1, 2), q(1, 3)], &half, &QuadExt::zero()).is_err());
    }

    #[test]
    fn coordination_correlated() {
        let g = presets::coordination();
        let joint =
            JointDistribution::new(vec![vec![q(1, 2), q(0, 1)], vec![q(0, 1), q(1, 2)]]).unwrap();
        let r = check_correlated_eq(&g, &joint, &QuadExt::zero()).unwrap();
        assert!(r.passed());
        assert_eq!(r.margins.len(), 4);
    }

    #[test]
    fn point_mass_at_nash_is_correlated() {
        let g = presets::battle_of_sexes();
        for a in 0..2 {
            for b in 0..2 {
                let pm = JointDistribution::point_mass(2, 2, a, b);
                assert_eq!(
                    check_pure_nash(&g, a, b).unwrap().passed(),
                    check_correlated_eq(&g, &pm, &QuadExt::zero())
                        .unwrap()
                        .passed()
                );
            }
        }
    }

    #[test]
    fn vb_block_two_zero_fails_with_exact_margin() {
        let game = presets::vb_game(&QuadExt::from(2)).unwrap();
        let g = block_game(&game, 2, 0).unwrap();
        let joint = block_distribution(&presets::vb_ns_opt(), 2, 0).unwrap();
        let r = check_correlated_eq(&g, &joint, &QuadExt::zero()).unwrap();
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!((v.player, v.advised, v.deviation), (Player::Alice, 0, 1));
        assert_eq!(v.margin, -(&QuadExt::sqrt2() / &QuadExt::from(8)));
    }

    #[test]
    fn ex_post_and_ex_ante_on_chsh() {
        let game = presets::chsh_game();
        let prior = Prior::uniform(&Scenario::chsh());
        let pr = presets::pr_box();
        assert!(check_ex_post(&game, &pr, &QuadExt::zero())
            .unwrap()
            .passed());
        assert!(check_ex_ante(&game, &pr, &prior, &QuadExt::zero())
            .unwrap()
            .passed());
        let vb = presets::vb_game(&QuadExt::from(2)).unwrap();
        assert!(matches!(
            check_ex_post(&vb, &pr, &QuadExt::zero()),
            Err(Error::ScenarioMismatch(_))
        ));
    }

    #[test]
    fn single_block_ex_ante_matches_correlated() {
        let s = Scenario::new(vec![3], vec![2]).unwrap();
        let game = Game::from_fn(s.clone(), |_, _, a, b| {
            (
                QuadExt::from((a * 2 + b) as i64 % 3),
                QuadExt::from((a + 2 * b) as i64 % 4),
            )
        });
        let behavior = Behavior::new(
            s.clone(),
            vec![q(1, 6), q(1, 6), q(0, 1), q(1, 3), q(1, 4), q(1, 12)],
        )
        .unwrap();
        let prior = Prior::unit(&s);
        let ante = check_ex_ante(&game, &behavior, &prior, &QuadExt::zero()).unwrap();
        let corr = check_correlated_eq(
            &block_game(&game, 0, 0).unwrap(),
            &block_distribution(&behavior, 0, 0).unwrap(),
            &QuadExt::zero(),
        )
        .unwrap();
        assert_eq!(ante.passed(), corr.passed());
        let strip = |v: &[Deviation]| -> Vec<_> {
            v.iter()
                .map(|d| (d.player, d.advised, d.deviation, d.margin.clone()))
                .collect()
        };
        assert_eq!(strip(&ante.margins), strip(&corr.margins));
    }
}
