use clap::{Args, Subcommand, ValueEnum};
use epinorm::density::density_csv;
use epinorm::dese::{decay_curves_csv, DecayModel, Measuring};
use epinorm::modelspec::StateSetSpec;
use epinorm::normality::World;
use epinorm::scalar::{format_decimal, Probability};
use epinorm::scenarios::continuous::{build_clock, build_weighing, two_sigma_mass};
use epinorm::scenarios::flipping::{build_flipping, evidence_after, FlippingConfig};
use epinorm::scenarios::heading::{default_threshold, heading_checks};
use epinorm::scenarios::lottery::{build_lottery, knows_alice_loses, LotteryConfig};
use epinorm::scenarios::racing::{answer_distribution, summarize, RacingQuestion, TABLE_COLUMNS};
use epinorm::{KnowledgeVariant, Rational, SufficiencyRule};

use crate::output::Output;
use crate::query::{delay_rows, discovery_rows, region_rows, rule_of};
use crate::{default_depth, depth_or, threshold, CliResult, Failure, RuleArg, VariantArg};

#[derive(Subcommand)]
pub enum Scenario {
    /// A coin flipped until it lands heads.
    Flipping(FlippingArgs),
    /// A hundred flips of a coin that may be double-headed.
    Heading {
        #[arg(long = "t", value_parser = threshold)]
        t: Option<Rational>,
    },
    /// Ten coins each flipped until heads, all together.
    Racing(RacingArgs),
    /// Alice holds one ticket fewer than everyone else.
    Lottery(LotteryArgs),
    /// A scale with normal error.
    Weighing(WeighingArgs),
    /// An unmarked clock face read with angular error.
    Clock(ClockArgs),
    /// An atom with exponential lifetime, asked how long until it decays.
    Decay(DecayArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FlipAction {
    Believe,
    Know,
    Typicality,
}

#[derive(Args)]
pub struct FlippingArgs {
    #[arg(value_enum, default_value_t = FlipAction::Believe)]
    action: FlipAction,
    /// Tails seen so far.
    #[arg(long, default_value_t = 0)]
    tails_seen: u32,
    /// Flip on which heads actually comes (default: the next one).
    #[arg(long)]
    state: Option<u32>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long = "t", value_parser = threshold, default_value = ".99")]
    t: Rational,
    /// Sets learned in turn, e.g. `2..` or `1..7`.
    #[arg(long)]
    learn: Vec<String>,
    /// Ask how many more flips are needed instead of which flip lands heads.
    #[arg(long)]
    more_flips: bool,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RacingAction {
    Believe,
    Distribution,
}

#[derive(Args)]
pub struct RacingArgs {
    #[arg(value_enum, default_value_t = RacingAction::Believe)]
    action: RacingAction,
    #[arg(long, default_value = "exact", value_parser = racing_question)]
    question: RacingQuestion,
    #[arg(long = "t", value_parser = threshold, default_value = ".75")]
    t: Rational,
    #[arg(long, default_value_t = 10)]
    coins: usize,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
}

fn racing_question(s: &str) -> Result<RacingQuestion, String> {
    RacingQuestion::parse(s).ok_or_else(|| format!("unknown question {s:?} (exact, shape, tails, duration, together)"))
}

#[derive(Args)]
pub struct LotteryArgs {
    #[arg(long, default_value_t = 1000)]
    entrants: u32,
    #[arg(long, default_value_t = 1000)]
    tickets: u32,
    #[arg(long, default_value_t = 999)]
    alice: u32,
    #[arg(long = "t", value_parser = threshold, default_value = ".99")]
    t: Rational,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DensityAction {
    Believe,
    /// Density samples as CSV.
    Csv,
}

#[derive(Args)]
pub struct WeighingArgs {
    #[arg(value_enum, default_value_t = DensityAction::Believe)]
    action: DensityAction,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Threshold (default: the mass within two standard deviations).
    #[arg(long = "t")]
    t: Option<f64>,
}

#[derive(Args)]
pub struct ClockArgs {
    #[arg(value_enum, default_value_t = DensityAction::Believe)]
    action: DensityAction,
    /// Reading error in radians.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long = "t", default_value_t = 0.95)]
    t: f64,
    /// Apparent orientation of the hand, in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    apparent: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DecayAction {
    Believe,
    /// Beliefs under the question "how many years after creation".
    Contrast,
    /// Density curves as CSV.
    Curves,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasuringArg {
    Index,
    Log,
}

#[derive(Args)]
pub struct DecayArgs {
    #[arg(value_enum, default_value_t = DecayAction::Believe)]
    action: DecayAction,
    #[arg(long, value_enum, default_value_t = MeasuringArg::Log)]
    measuring: MeasuringArg,
    #[arg(long = "t", default_value_t = 0.95)]
    t: f64,
    /// Years since creation.
    #[arg(long, default_value_t = 1.0)]
    now: f64,
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
}

pub fn run(s: Scenario) -> CliResult<Output> {
    match s {
        Scenario::Flipping(a) => flipping(a),
        Scenario::Heading { t } => {
            let r = heading_checks(t.unwrap_or_else(default_threshold))?;
            let yn = |(a, b): (bool, bool)| format!("stalnaker={a} williamson={b}");
            Ok(Output::pairs(vec![
                ("threshold", format_decimal(&r.threshold)),
                ("ratio after all heads", r.ratio_after.to_string()),
                ("ratio before flipping", r.ratio_before.to_string()),
                ("fair all-heads excluded after", yn(r.excluded_after)),
                ("fair all-heads possible before", yn(r.possible_before)),
                ("typicality of fair all-heads", r.tau_c_before.as_f64().to_string()),
                ("same, asking fairness and heads", r.tau_c_before_coarse.as_f64().to_string()),
            ]))
        }
        Scenario::Racing(a) => {
            let depth = match a.depth {
                Some(d) => d,
                None => depth_or(epinorm::scenarios::racing::DEFAULT_DEPTH)?,
            };
            let dist = answer_distribution(a.question, a.coins, depth)?;
            match a.action {
                RacingAction::Believe => {
                    let s = summarize(&dist, &a.t, rule_of(a.rule))?;
                    Ok(Output::table(TABLE_COLUMNS, epinorm::scenarios::racing::table_rows(&[s])))
                }
                RacingAction::Distribution => {
                    let rows = dist
                        .cells
                        .iter()
                        .map(|c| {
                            let total = c.mass.clone() * Rational::from_integer(c.copies.clone().into());
                            [c.label.clone(), c.copies.to_string(), c.mass.as_f64().to_string(), total.as_f64().to_string()]
                        })
                        .collect();
                    Ok(Output::table(["answer", "copies", "probability each", "probability"], rows))
                }
            }
        }
        Scenario::Lottery(a) => {
            let cfg = LotteryConfig {
                entrants: a.entrants,
                tickets_each: a.tickets,
                alice_tickets: a.alice,
                threshold: a.t,
                aggregate: true,
            };
            let ps = build_lottery(&cfg)?;
            let variant: KnowledgeVariant = a.variant.map_or(KnowledgeVariant::Stalnakerian, Into::into);
            let rows = [SufficiencyRule::Sufficiency, SufficiencyRule::SufficiencyPlus]
                .into_iter()
                .map(|r| {
                    let k = knows_alice_loses(&ps, r, variant)?;
                    Ok([epinorm::modelspec::rule_name(r).to_string(), k.to_string()])
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Output::table(["rule", "knows alice loses"], rows))
        }
        Scenario::Weighing(a) => {
            let m = build_weighing(a.mu, a.sigma, a.t.unwrap_or_else(two_sigma_mass))?;
            let r = m.belief_region()?;
            Ok(match a.action {
                DensityAction::Believe => region_rows(&r),
                DensityAction::Csv => {
                    let (lo, hi) = (a.mu - 4.0 * a.sigma, a.mu + 4.0 * a.sigma);
                    Output::Raw(density_csv(m.density(), Some(&r), lo, hi, 201))
                }
            })
        }
        Scenario::Clock(a) => {
            let c = build_clock(a.sigma)?;
            let arc = c.belief_arc(a.apparent, a.t)?;
            Ok(match a.action {
                DensityAction::Believe => Output::pairs(vec![
                    ("center", arc.center.to_string()),
                    ("left", arc.left.to_string()),
                    ("right", arc.right.to_string()),
                    ("mass", arc.mass.to_string()),
                ]),
                DensityAction::Csv => {
                    let d = c.after_looking()?;
                    let r = epinorm::density::belief_region(&d, a.t)?;
                    let pi = std::f64::consts::PI;
                    Output::Raw(density_csv(&d, Some(&r), -pi, pi, 361))
                }
            })
        }
        Scenario::Decay(a) => {
            let measuring = match a.measuring {
                MeasuringArg::Index => Measuring::Index,
                MeasuringArg::Log => Measuring::Logarithmic,
            };
            let m = DecayModel::with_rate(measuring, a.rate, a.t)?;
            match a.action {
                DecayAction::Believe => Ok(delay_rows(&m.belief_interval(a.now)?)),
                DecayAction::Contrast => {
                    let r = epinorm::dese::dedicto_contrast(&m, a.now)?;
                    Ok(Output::pairs(vec![
                        ("de dicto lo", r.dedicto.lo.to_string()),
                        ("de dicto hi", r.dedicto.hi.to_string()),
                        ("de se lo", r.dese.lo.to_string()),
                        ("de se hi", r.dese.hi.to_string()),
                        ("immediate decay possible", r.immediate_decay_possible().to_string()),
                        ("first year", r.first_year.to_string()),
                        ("first year at creation", r.first_year_at_creation.to_string()),
                    ]))
                }
                DecayAction::Curves => Ok(Output::Raw(decay_curves_csv(a.now, -6.0, 4.0, 201)?)),
            }
        }
    }
}

fn flipping(a: FlippingArgs) -> CliResult<Output> {
    let x = a.tails_seen;
    let depth = match a.depth {
        Some(d) => d,
        None => default_depth()?,
    };
    let specs = a.learn.iter().map(|t| StateSetSpec::parse(t)).collect::<Result<Vec<_>, _>>()?;
    let bounded: Vec<(u32, u32)> = specs
        .iter()
        .filter_map(|s| s.closed_range())
        .filter(|&(lo, hi)| lo >= 1 && hi <= depth as u64)
        .map(|(lo, hi)| (lo as u32, hi as u32))
        .collect();
    let cfg = FlippingConfig { depth, threshold: a.t, bounded, more_flips: a.more_flips };
    let ps = build_flipping(&cfg)?;
    let frame = ps.frame();
    let heads_on = a.state.unwrap_or(x + 1);
    if heads_on <= x {
        return Err(Failure::Model(format!("heads cannot come on flip {heads_on} after {x} tails")));
    }
    let s = frame
        .state_by_name(&heads_on.to_string())
        .ok_or_else(|| Failure::Model(format!("flip {heads_on} is beyond the depth {depth}")))?;
    let e = evidence_after(&ps, x)?;
    let rule = rule_of(a.rule);
    let ns = ps.generate(rule)?;
    let mut w = frame.world_id(s, e)?;
    if !a.learn.is_empty() && matches!(a.action, FlipAction::Believe) && !a.more_flips {
        let sets = a
            .learn
            .iter()
            .zip(&specs)
            .map(|(t, s)| Ok((t.clone(), s.resolve(frame)?)))
            .collect::<CliResult<Vec<_>>>()?;
        return discovery_rows(&ns, w, &sets);
    }
    for spec in &specs {
        w = ns.discover(w, &spec.resolve(frame)?)?;
    }
    let here = frame.world(w)?;
    match a.action {
        FlipAction::Believe if a.more_flips => {
            Ok(Output::Set { key: "believed", items: ps.believed_answers(here.evidence, rule)? })
        }
        FlipAction::Believe => Ok(Output::Set { key: "believed", items: ns.doxastic(w)?.state_names(&ns) }),
        FlipAction::Know => {
            let v = a.variant.map_or(KnowledgeVariant::Stalnakerian, Into::into);
            Ok(Output::Set { key: "possible", items: ns.epistemic(w, v)?.state_names(&ns) })
        }
        FlipAction::Typicality => {
            let rows = frame.evidence()[here.evidence.0]
                .members()
                .iter()
                .filter(|&&s| !frame.state(s).tail)
                .map(|&s| {
                    let v = World { state: s, evidence: here.evidence };
                    Ok([
                        frame.state(s).name.clone(),
                        ps.likeliness(v)?.to_string(),
                        ps.typicality(v)?.to_string(),
                    ])
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Output::table(["state", "likeliness", "typicality"], rows))
        }
    }
}
