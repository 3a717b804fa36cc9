mod input;

use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use nlgame::analysis::{
    classify_behavior, expected_payoff, gap_report, local_bound, ns_bound, BehaviorClass,
    BoundResult, GapOptions, Witness,
};
use nlgame::equilibrium::{
    check_ex_ante, check_ex_post, Deviation, EquilibriumReport, ExPostReport,
};
use nlgame::model::validate_behavior;
use nlgame::polytope::{enumerate_ns_vertices, LocalityCertificate, VertexClass};
use nlgame::synthesis::{synthesize_game, verify_synthesis, SynthesisOptions};
use nlgame::{parse_scalar, Behavior, Player, QuadExt};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "nlgame",
    version,
    about = "Exact analysis of Bayesian games with nonlocal resources"
)]
struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Slack allowed in every checked (in)equality, as a scalar literal.
    #[arg(long, global = true, value_parser = parse_scalar, default_value = "0")]
    tolerance: QuadExt,

    /// Also print decimal approximations with this many digits.
    #[arg(long, global = true, value_name = "DIGITS")]
    approx: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check normalization, nonnegativity and no-signaling of a behavior.
    Validate {
        #[arg(long)]
        behavior: String,
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Prior-weighted expected payoff of both players.
    Payoff {
        #[arg(long)]
        game: String,
        #[arg(long)]
        behavior: String,
        #[arg(long, default_value = "uniform")]
        prior: String,
    },
    /// Best payoff over the local and no-signaling polytopes.
    Bounds {
        #[arg(long)]
        game: String,
        #[arg(long, default_value = "uniform")]
        prior: String,
        #[arg(long, value_enum, default_value = "alice")]
        player: PlayerArg,
        /// Multiply both bounds by 4.
        #[arg(long)]
        rescale4: bool,
    },
    /// Ex post and/or ex ante equilibrium check.
    Check {
        #[arg(long)]
        game: String,
        #[arg(long)]
        behavior: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: Mode,
        #[arg(long, default_value = "uniform")]
        prior: String,
    },
    /// Vertices of the no-signaling polytope.
    Vertices {
        #[arg(long)]
        scenario: String,
    },
    /// Signaling, local (with certificate) or nonlocal no-signaling.
    Classify {
        #[arg(long)]
        behavior: String,
    },
    /// Build a common-payoff game rewarding a nonlocal vertex.
    Synthesize {
        #[arg(long)]
        behavior: String,
        /// Payoffs are confined to [-M, M].
        #[arg(long = "box", value_parser = parse_scalar, default_value = "1", value_name = "M")]
        payoff_box: QuadExt,
        #[arg(long, default_value = "uniform")]
        prior: String,
        /// Also require the vertex to be optimal over the no-signaling polytope.
        #[arg(long)]
        require_ns_opt: bool,
    },
    /// Print a named preset as JSON.
    Preset {
        #[arg(long)]
        name: String,
        #[arg(long, value_parser = parse_scalar)]
        c: Option<QuadExt>,
    },
    /// Local bound, behavior payoffs with verdicts, no-signaling bound.
    Report {
        #[arg(long)]
        game: String,
        #[arg(long, default_value = "uniform")]
        prior: String,
        #[arg(long, required = true, num_args = 1..)]
        behavior: Vec<String>,
        #[arg(long, value_enum, default_value = "alice")]
        player: PlayerArg,
        #[arg(long)]
        rescale4: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Expost,
    Exante,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlayerArg {
    Alice,
    Bob,
}

impl From<PlayerArg> for Player {
    fn from(p: PlayerArg) -> Self {
        match p {
            PlayerArg::Alice => Player::Alice,
            PlayerArg::Bob => Player::Bob,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

struct Output {
    json: bool,
    approx: Option<usize>,
}

impl Output {
    fn num(&self, v: &QuadExt) -> String {
        match self.approx {
            Some(d) => format!("{v} (~{})", v.approx(d)),
            None => v.to_string(),
        }
    }

    fn emit(&self, value: &impl Serialize, text: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            print!("{}", text());
        }
        Ok(())
    }
}

fn deviation_line(d: &Deviation, out: &Output) -> String {
    let who = format!("{:?}", d.player).to_lowercase();
    let ty = d
        .type_index
        .map(|t| format!(" type {t}"))
        .unwrap_or_default();
    format!(
        "{who}{ty}: {} -> {} margin {}",
        d.advised,
        d.deviation,
        out.num(&d.margin)
    )
}

fn ex_post_text(r: &ExPostReport, out: &Output) -> String {
    let mut s = format!("ex post: {}\n", r.verdict);
    for b in r.blocks.iter().filter(|b| !b.report.passed()) {
        for d in &b.report.violations {
            let _ = writeln!(s, "  block ({},{}) {}", b.x, b.y, deviation_line(d, out));
        }
    }
    s
}

fn ex_ante_text(r: &EquilibriumReport, out: &Output) -> String {
    let mut s = format!("ex ante: {}\n", r.verdict);
    for d in &r.violations {
        let _ = writeln!(s, "  {}", deviation_line(d, out));
    }
    s
}

fn bound_text(label: &str, b: &BoundResult, value: &QuadExt, out: &Output) -> String {
    let detail = match &b.witness {
        Witness::Strategy(st) => format!("witness alice={:?} bob={:?}", st.alice, st.bob),
        Witness::Behavior(_) => format!(
            "attained at a vertex: {}",
            if b.attained_at_vertex { "yes" } else { "no" }
        ),
    };
    format!("{label}: {} ({detail})\n", out.num(value))
}

fn scale_factor(rescale4: bool) -> QuadExt {
    QuadExt::from(if rescale4 { 4 } else { 1 })
}

fn behavior_table(b: &Behavior, out: &Output) -> String {
    let s = b.scenario();
    let mut text = String::new();
    for (x, y) in s.blocks() {
        let rows: Vec<String> = (0..s.alice_actions(x))
            .map(|a| {
                (0..s.bob_actions(y))
                    .map(|bb| out.num(b.get(x, y, a, bb)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let _ = writeln!(text, "  ({x},{y}): [{}]", rows.join("; "));
    }
    text
}

fn run(cli: Cli) -> Result<u8> {
    let out = Output {
        json: cli.json,
        approx: cli.approx,
    };
    let tol = &cli.tolerance;
    match cli.command {
        Command::Validate { behavior, scenario } => {
            let b = input::behavior(&behavior)?;
            if let Some(reference) = scenario {
                input::ensure_same(&input::scenario(&reference)?, b.scenario(), "behavior")?;
            }
            let report = validate_behavior(&b, tol);
            out.emit(&report, || {
                let mut s = format!("{}\n", if report.passed() { "valid" } else { "invalid" });
                for f in &report.failures {
                    let _ = writeln!(
                        s,
                        "  {:?} at {}: residual {}",
                        f.kind,
                        f.location,
                        out.num(&f.residual)
                    );
                }
                s
            })?;
            Ok(if report.passed() { 0 } else { EXIT_FAIL })
        }
        Command::Payoff {
            game,
            behavior,
            prior,
        } => {
            let g = input::game(&game)?;
            let b = input::behavior(&behavior)?;
            let w = input::prior(&prior, g.scenario())?;
            let (ua, ub) = expected_payoff(&g, &b, &w)?;
            out.emit(&json!({ "alice": ua, "bob": ub }), || {
                format!("alice: {}\nbob: {}\n", out.num(&ua), out.num(&ub))
            })?;
            Ok(0)
        }
        Command::Bounds {
            game,
            prior,
            player,
            rescale4,
        } => {
            let g = input::game(&game)?;
            let w = input::prior(&prior, g.scenario())?;
            let local = local_bound(&g, &w, player.into())?;
            let ns = ns_bound(&g, &w, player.into())?;
            let k = scale_factor(rescale4);
            let (lv, nv) = (&local.value * &k, &ns.value * &k);
            let doc = json!({
                "player": local.player,
                "scale": k,
                "local": { "value": lv, "bound": local },
                "no_signaling": { "value": nv, "bound": ns },
            });
            out.emit(&doc, || {
                bound_text("local", &local, &lv, &out) + &bound_text("no-signaling", &ns, &nv, &out)
            })?;
            Ok(0)
        }
        Command::Check {
            game,
            behavior,
            mode,
            prior,
        } => {
            let g = input::game(&game)?;
            let b = input::behavior(&behavior)?;
            let post = match mode {
                Mode::Expost | Mode::Both => Some(check_ex_post(&g, &b, tol)?),
                Mode::Exante => None,
            };
            let ante = match mode {
                Mode::Exante | Mode::Both => Some(check_ex_ante(
                    &g,
                    &b,
                    &input::prior(&prior, g.scenario())?,
                    tol,
                )?),
                Mode::Expost => None,
            };
            let passed = post.as_ref().is_none_or(|r| r.passed())
                && ante.as_ref().is_none_or(|r| r.passed());
            let doc = json!({
                "verdict": if passed { "pass" } else { "fail" },
                "ex_post": post,
                "ex_ante": ante,
            });
            out.emit(&doc, || {
                post.as_ref()
                    .map(|r| ex_post_text(r, &out))
                    .unwrap_or_default()
                    + &ante
                        .as_ref()
                        .map(|r| ex_ante_text(r, &out))
                        .unwrap_or_default()
            })?;
            Ok(if passed { 0 } else { EXIT_FAIL })
        }
        Command::Vertices { scenario } => {
            let s = input::scenario(&scenario)?;
            let list = enumerate_ns_vertices(&s)?;
            out.emit(&list, || {
                let mut text = format!(
                    "{} vertices ({} local, {} nonlocal)\n",
                    list.vertices.len(),
                    list.count(VertexClass::Local),
                    list.count(VertexClass::Nonlocal)
                );
                for (i, v) in list.vertices.iter().enumerate() {
                    let class = match v.classification {
                        VertexClass::Local => "local",
                        VertexClass::Nonlocal => "nonlocal",
                    };
                    let _ = writeln!(text, "#{i} {class}");
                    text += &behavior_table(&v.behavior, &out);
                }
                text
            })?;
            Ok(0)
        }
        Command::Classify { behavior } => {
            let b = input::behavior(&behavior)?;
            let c = classify_behavior(&b, tol)?;
            out.emit(&c, || {
                let mut text = format!("{}\n", c.class);
                if let Some(LocalityCertificate::Local { weights }) = &c.certificate {
                    for (st, w) in weights {
                        let _ = writeln!(
                            text,
                            "  {} x alice={:?} bob={:?}",
                            out.num(w),
                            st.alice,
                            st.bob
                        );
                    }
                }
                text
            })?;
            Ok(if c.class == BehaviorClass::Signaling {
                EXIT_FAIL
            } else {
                0
            })
        }
        Command::Synthesize {
            behavior,
            payoff_box,
            prior,
            require_ns_opt,
        } => {
            let b = input::behavior(&behavior)?;
            let options = SynthesisOptions {
                payoff_box,
                prior: input::prior(&prior, b.scenario())?,
                require_ns_optimum: require_ns_opt,
                minimum_gap: None,
            };
            let result = synthesize_game(&b, &options)?;
            let check = verify_synthesis(&result.game, &b, &options.prior)?;
            let doc = json!({ "gap": result.gap, "game": result.game, "verification": check });
            out.emit(&doc, || {
                let mut text = format!(
                    "gap: {}\nverification: {}\npayoff:\n",
                    out.num(&result.gap),
                    if check.passed { "pass" } else { "fail" }
                );
                let s = result.game.scenario();
                let table = Behavior::new(s.clone(), result.game.table(Player::Alice).to_vec())
                    .expect("same shape");
                text += &behavior_table(&table, &out);
                text
            })?;
            Ok(if check.passed { 0 } else { EXIT_FAIL })
        }
        Command::Preset { name, c } => {
            let p = input::load_preset(&name, c.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&p)?);
            Ok(0)
        }
        Command::Report {
            game,
            prior,
            behavior,
            player,
            rescale4,
        } => {
            let g = input::game(&game)?;
            let w = input::prior(&prior, g.scenario())?;
            let named: Vec<(String, Behavior)> = behavior
                .iter()
                .map(|r| {
                    Ok((
                        r.strip_prefix("preset:").unwrap_or(r).to_owned(),
                        input::behavior(r)?,
                    ))
                })
                .collect::<Result<_>>()?;
            let options = GapOptions {
                player: player.into(),
                scale: scale_factor(rescale4),
                tolerance: tol.clone(),
            };
            let report = gap_report(&g, &w, &named, &options)?;
            out.emit(&report, || report.render_text(out.approx))?;
            Ok(0)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<nlgame::Error>() {
        Some(nlgame::Error::TooLarge { .. }) => EXIT_LIMIT,
        Some(nlgame::Error::SynthesisInfeasible(_)) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
