use epinorm::density::{validate, BeliefRegion};
use epinorm::dese::DelayInterval;
use epinorm::modelspec::{Model, ModelDocument, StateSetSpec};
use epinorm::normality::{Accessible, NormalityStructure};
use epinorm::scalar::format_decimal;
use epinorm::scenarios::racing::{summarize, table_rows, TABLE_COLUMNS};
use epinorm::{KnowledgeVariant, Rational, SufficiencyRule};

use crate::output::Output;
use crate::{default_depth, CliResult, Failure};

struct Discrete {
    ns: NormalityStructure,
    variant: KnowledgeVariant,
}

fn discrete(doc: &ModelDocument, what: &str) -> CliResult<Discrete> {
    match doc.build(default_depth()?)? {
        Model::Discrete { structure, rule, variant } => {
            let ns = structure.generate(rule)?;
            Ok(Discrete { ns, variant })
        }
        _ => Err(Failure::Model(format!("{what} needs a model with states and evidence"))),
    }
}

fn names(ns: &NormalityStructure, a: &Accessible) -> Vec<String> {
    if !a.exact {
        eprintln!("warning: the answer involves the truncated tail; raise the depth to refine it");
    }
    a.state_names(ns)
}

pub fn region_rows(r: &BeliefRegion<f64>) -> Output {
    Output::table(
        ["lo", "hi", "mass"],
        r.intervals.iter().map(|&(a, b)| [a.to_string(), b.to_string(), r.mass.to_string()]).collect(),
    )
}

pub fn delay_rows(i: &DelayInterval<f64>) -> Output {
    Output::table(
        ["lo", "lo open", "hi", "mass"],
        vec![[i.lo.to_string(), i.lo_open.to_string(), i.hi.to_string(), i.mass.to_string()]],
    )
}

pub fn believe(doc: &ModelDocument, at: Option<&str>) -> CliResult<Output> {
    match doc.build(default_depth()?)? {
        Model::Discrete { structure, rule, .. } => match at {
            Some(at) => {
                let ns = structure.generate(rule)?;
                let w = ns.frame().parse_world(at)?;
                Ok(Output::Set { key: "believed", items: names(&ns, &ns.doxastic(w)?) })
            }
            None => {
                let frame = structure.frame();
                let rows = frame
                    .evidence()
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let b = structure.believed_answers(epinorm::normality::EvidenceId(i), rule)?;
                        Ok([e.name.clone(), b.join(" ")])
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(Output::table(["evidence", "believed"], rows))
            }
        },
        Model::Racing { distribution, threshold, rule } => {
            let s = summarize(&distribution, &threshold, rule)?;
            Ok(Output::table(TABLE_COLUMNS, table_rows(&[s])))
        }
        Model::Density(d) => Ok(region_rows(&d.belief_region()?)),
        Model::Decay { model, now } => Ok(delay_rows(&model.belief_interval(now)?)),
    }
}

pub fn know(doc: &ModelDocument, at: &str, variant: Option<KnowledgeVariant>) -> CliResult<Output> {
    let d = discrete(doc, "know")?;
    let w = d.ns.frame().parse_world(at)?;
    let k = d.ns.epistemic(w, variant.unwrap_or(d.variant))?;
    Ok(Output::Set { key: "possible", items: names(&d.ns, &k) })
}

/// Follows each learned set from `w`, one row per step.
pub fn discovery_rows(
    ns: &NormalityStructure,
    mut w: epinorm::WorldId,
    learn: &[(String, Vec<epinorm::normality::StateId>)],
) -> CliResult<Output> {
    let frame = ns.frame();
    let mut rows =
        vec![[frame.world_name(w), "-".to_string(), names(ns, &ns.doxastic(w)?).join(" "), "-".into(), "-".into()]];
    for (text, p) in learn {
        let r = ns.revision_report(w, p)?;
        w = r.discovered;
        rows.push([
            frame.world_name(w),
            text.clone(),
            names(ns, &ns.doxastic(w)?).join(" "),
            r.agm_inclusion_holds.to_string(),
            r.agm_preservation_holds.to_string(),
        ]);
    }
    Ok(Output::table(["world", "learned", "believed", "inclusion", "preservation"], rows))
}

pub fn discover(doc: &ModelDocument, at: &str, learn: &[String]) -> CliResult<Output> {
    let d = discrete(doc, "discover")?;
    let w = d.ns.frame().parse_world(at)?;
    let sets = learn
        .iter()
        .map(|t| Ok((t.clone(), StateSetSpec::parse(t)?.resolve(d.ns.frame())?)))
        .collect::<CliResult<Vec<_>>>()?;
    discovery_rows(&d.ns, w, &sets)
}

fn verdict(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

/// Runs every check; the flag is false when any fails.
pub fn check(doc: &ModelDocument) -> CliResult<(Output, bool)> {
    let mut rows: Vec<[String; 3]> = Vec::new();
    match doc.build(default_depth()?)? {
        Model::Discrete { structure, rule, .. } => {
            rows.push(["prior".into(), verdict(true), "sums to 1".into()]);
            match structure.generate(rule) {
                Err(e) => rows.push(["axioms".into(), verdict(false), e.to_string()]),
                Ok(ns) => {
                    rows.push(["axioms".into(), verdict(true), "preorder, well-founded, nested".into()]);
                    let tr = structure.check_threshold(rule)?;
                    let detail = tr.witness.map_or_else(|| format!("t = {}", format_decimal(structure.threshold())), |w| {
                        format!("fails at {}", ns.frame().world_name(w))
                    });
                    rows.push(["threshold".into(), verdict(tr.holds), detail]);
                    let mut bad = None;
                    for i in 0..ns.frame().world_count() {
                        if let Some(v) = ns.invariant_violation(epinorm::WorldId(i))? {
                            bad = Some(format!("{}: {v}", ns.frame().world_name(epinorm::WorldId(i))));
                            break;
                        }
                    }
                    rows.push(["invariants".into(), verdict(bad.is_none()), bad.unwrap_or_default()]);
                }
            }
        }
        Model::Racing { distribution, .. } => {
            let total = distribution.total();
            let one = Rational::from_integer(1.into());
            rows.push(["prior".into(), verdict(total == one), format!("total {}", format_decimal(&total))]);
        }
        Model::Density(d) => {
            let mass = validate(d.density(), 1e-6)?;
            rows.push(["density".into(), verdict(true), format!("mass {mass}")]);
        }
        Model::Decay { model, now } => {
            let mass = validate(&model.measured_density(now)?, 1e-6)?;
            rows.push(["density".into(), verdict(true), format!("mass {mass}")]);
        }
    }
    let ok = rows.iter().all(|r| r[1] == "pass");
    Ok((Output::table(["check", "result", "detail"], rows), ok))
}

pub fn rule_of(r: Option<crate::RuleArg>) -> SufficiencyRule {
    r.map_or(SufficiencyRule::Sufficiency, Into::into)
}
