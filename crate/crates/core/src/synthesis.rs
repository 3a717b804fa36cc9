//! Game synthesis from a nonlocal no-signaling vertex.
//!
//! Given a vertex `V`, the payoff table `u` (common to both players, boxed
//! in `[-M, M]`) and a gap `eps` are chosen by one LP:
//!
//! * every block of `V` is a correlated equilibrium of the block game;
//! * the prior-weighted payoff of `V` beats every deterministic strategy by
//!   at least `eps`;
//! * optionally, `V` is no worse than any other no-signaling vertex.
//!
//! `eps` is maximized; synthesis succeeds iff the optimum is positive.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{expected_payoff, local_bound, BehaviorClass};
use crate::equilibrium::{check_ex_ante, check_ex_post};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::model::{Behavior, Game, Player, Prior, Scenario};
use crate::numeric::QuadExt;
use crate::polytope::{
    enumerate_local_strategies, enumerate_ns_vertices, is_local, is_vertex, DEFAULT_VERTEX_CEILING,
};

#[derive(Clone, Debug)]
pub struct SynthesisOptions {
    /// Payoffs are constrained to `[-payoff_box, payoff_box]`.
    pub payoff_box: QuadExt,
    pub prior: Prior,
    pub require_ns_optimum: bool,
    /// Fail unless the optimal gap reaches this value.
    pub minimum_gap: Option<QuadExt>,
}

impl SynthesisOptions {
    /// Box `[-1, 1]` and the uniform prior.
    pub fn new(scenario: &Scenario) -> Self {
        SynthesisOptions {
            payoff_box: QuadExt::one(),
            prior: Prior::uniform(scenario),
            require_ns_optimum: false,
            minimum_gap: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesizedGame {
    pub game: Game,
    pub gap: QuadExt,
}

/// The linear constraint system behind [`synthesize_game`]. Variables are
/// the payoff coordinates followed by `eps`.
pub fn synthesis_program(
    vertex: &Behavior,
    options: &SynthesisOptions,
) -> Result<LinearProgram<QuadExt>> {
    let s = vertex.scenario();
    options.prior.check_scenario(s)?;
    if options.payoff_box <= QuadExt::zero() {
        return Err(Error::Invalid("payoff box must be positive".into()));
    }
    let n = s.num_coords();
    let eps = n;
    let mut objective = vec![QuadExt::zero(); n + 1];
    objective[eps] = QuadExt::one();
    let mut lp = LinearProgram::new(n + 1).maximize(objective);
    for j in 0..n {
        lp.set_bounds(
            j,
            Some(-options.payoff_box.clone()),
            Some(options.payoff_box.clone()),
        );
    }
    lp.set_bounds(eps, None, None);

    // Obedience: sum_b (u(a,b) - u(a',b)) p(a,b) >= 0, and Bob's analogue.
    for (x, y) in s.blocks() {
        let (na, nb) = (s.alice_actions(x), s.bob_actions(y));
        for a in 0..na {
            for a2 in (0..na).filter(|&a2| a2 != a) {
                let mut row = vec![QuadExt::zero(); n + 1];
                for b in 0..nb {
                    let p = vertex.get(x, y, a, b);
                    row[s.coord(x, y, a, b)] += p;
                    row[s.coord(x, y, a2, b)] -= p;
                }
                lp.add_ge(row, QuadExt::zero());
            }
        }
        for b in 0..nb {
            for b2 in (0..nb).filter(|&b2| b2 != b) {
                let mut row = vec![QuadExt::zero(); n + 1];
                for a in 0..na {
                    let p = vertex.get(x, y, a, b);
                    row[s.coord(x, y, a, b)] += p;
                    row[s.coord(x, y, a, b2)] -= p;
                }
                lp.add_ge(row, QuadExt::zero());
            }
        }
    }

    let gap_row = |other: &Behavior, with_eps: bool| -> Vec<QuadExt> {
        let mut row: Vec<QuadExt> = s
            .coords()
            .map(|(x, y, a, b)| {
                &(vertex.get(x, y, a, b) - other.get(x, y, a, b)) * options.prior.weight(x, y)
            })
            .collect();
        row.push(if with_eps {
            -QuadExt::one()
        } else {
            QuadExt::zero()
        });
        row
    };
    for strategy in enumerate_local_strategies(s) {
        lp.add_ge(gap_row(&strategy.behavior(s)?, true), QuadExt::zero());
    }
    if options.require_ns_optimum {
        if n > DEFAULT_VERTEX_CEILING {
            return Err(Error::TooLarge {
                coords: n,
                ceiling: DEFAULT_VERTEX_CEILING,
            });
        }
        for v in enumerate_ns_vertices(s)?.vertices {
            if v.behavior != *vertex {
                lp.add_ge(gap_row(&v.behavior, false), QuadExt::zero());
            }
        }
    }
    Ok(lp)
}

/// Builds a common-payoff game in which `vertex` is an ex post equilibrium
/// and beats the local bound by the maximal achievable gap.
pub fn synthesize_game(vertex: &Behavior, options: &SynthesisOptions) -> Result<SynthesizedGame> {
    let s = vertex.scenario();
    if !is_vertex(vertex, s)? {
        return Err(Error::Precondition(
            "behavior is not a no-signaling vertex".into(),
        ));
    }
    if is_local(vertex)?.is_local() {
        return Err(Error::Precondition(format!(
            "behavior is {}, synthesis needs a nonlocal vertex",
            BehaviorClass::Local
        )));
    }
    let lp = synthesis_program(vertex, options)?;
    let n = s.num_coords();
    match lp.solve()? {
        LpOutcome::Optimal { value, point, .. } => {
            let floor = options.minimum_gap.clone().unwrap_or_else(QuadExt::zero);
            if value <= QuadExt::zero() || value < floor {
                return Err(Error::SynthesisInfeasible(format!(
                    "optimal gap {value} is too small"
                )));
            }
            let game = Game::common(s.clone(), point[..n].to_vec())?;
            Ok(SynthesizedGame { game, gap: value })
        }
        other => Err(Error::SynthesisInfeasible(format!(
            "program ended {}",
            other.status()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisCheck {
    pub local_bound: QuadExt,
    pub vertex_payoff: QuadExt,
    pub beats_local: bool,
    pub ex_post: bool,
    pub ex_ante: bool,
    pub passed: bool,
}

/// Re-derives the synthesis guarantees for `(game, vertex, prior)` at zero
/// tolerance.
pub fn verify_synthesis(game: &Game, vertex: &Behavior, prior: &Prior) -> Result<SynthesisCheck> {
    let zero = QuadExt::zero();
    let local = local_bound(game, prior, Player::Alice)?.value;
    let (payoff, _) = expected_payoff(game, vertex, prior)?;
    let ex_post = check_ex_post(game, vertex, &zero)?.passed();
    let ex_ante = check_ex_ante(game, vertex, prior, &zero)?.passed();
    let beats_local = payoff > local;
    Ok(SynthesisCheck {
        local_bound: local,
        vertex_payoff: payoff,
        beats_local,
        ex_post,
        ex_ante,
        passed: beats_local && ex_post && ex_ante,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn pr_box_synthesis() {
        let s = Scenario::chsh();
        let options = SynthesisOptions::new(&s);
        let out = synthesize_game(&presets::pr_box(), &options).unwrap();
        assert!(out.gap > QuadExt::zero());
        assert!(out.game.is_common_payoff());
        let check = verify_synthesis(&out.game, &presets::pr_box(), &options.prior).unwrap();
        assert!(check.passed, "{check:?}");
        assert!(&check.vertex_payoff - &check.local_bound >= out.gap);
    }

    #[test]
    fn chsh_payoff_is_feasible_with_half_gap() {
        let s = Scenario::chsh();
        let lp = synthesis_program(&presets::pr_box(), &SynthesisOptions::new(&s)).unwrap();
        let mut point = presets::chsh_game().table(Player::Alice).to_vec();
        point.push(QuadExt::ratio(1, 2));
        assert!(lp.is_feasible(&point));
        *point.last_mut().unwrap() = QuadExt::ratio(51, 100);
        assert!(!lp.is_feasible(&point));
    }

    #[test]
    fn rejects_local_behaviors() {
        let s = Scenario::chsh();
        let det = crate::model::deterministic_behavior(&s, &[0, 0], &[0, 0]).unwrap();
        assert!(matches!(
            synthesize_game(&det, &SynthesisOptions::new(&s)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            synthesize_game(&Behavior::uniform(&s), &SynthesisOptions::new(&s)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn verification_examples() {
        let s = Scenario::chsh();
        let prior = Prior::uniform(&s);
        let chsh = verify_synthesis(&presets::chsh_game(), &presets::pr_box(), &prior).unwrap();
        assert!(chsh.passed);
        assert_eq!(chsh.local_bound, QuadExt::ratio(1, 2));

        let vb = presets::vb_game(&QuadExt::from(2)).unwrap();
        let unit = Prior::unit(&presets::vb_scenario());
        let r = verify_synthesis(&vb, &presets::vb_ns_opt(), &unit).unwrap();
        assert!(r.beats_local && r.ex_ante && !r.ex_post && !r.passed);

        let zero = Game::common(s, vec![QuadExt::zero(); 16]).unwrap();
        let r = verify_synthesis(&zero, &presets::pr_box(), &prior).unwrap();
        assert!(!r.passed && !r.beats_local);
    }
}
