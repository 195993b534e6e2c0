//! One function per subcommand, each returning a [`TrialReport`].

use std::collections::BTreeMap;
use std::path::Path;

use robcert::adversary::{self, Adversary, FiniteExhaustive, ThresholdEndpoints};
use robcert::certify::{self, WitnessSet};
use robcert::constructions;
use robcert::games::{self, CertifierStrategy, RandomStrategy, Refutation, ScriptedStrategy};
use robcert::learners::{self, FiniteClassCompressor, ProperCompressor, ThresholdCompressor};
use robcert::oracles::{ClassOracle, LabelOracle};
use robcert::rational::{self, Rational};
use robcert::task::Task;
use robcert::{bounds, loss, trials, vc, Error, Hypothesis, HypothesisClass, Norm, Perturbation, Point};
use serde_json::{json, Value};

use crate::args::*;
use crate::report::{Row, Status, TrialReport};
use crate::Failure;

fn row(v: Value) -> Row {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("rows are built from object literals"),
    }
}

fn collect<T>(results: Vec<robcert::Result<T>>) -> Result<Vec<T>, Failure> {
    results.into_iter().map(|r| r.map_err(Failure::from)).collect()
}

fn check_unit(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Failure::Config(format!("--{name} must lie in (0, 1), got {v}")))
    }
}

fn ball_radius(u: &Perturbation, norm: Norm) -> Result<Rational, Failure> {
    match u {
        Perturbation::Ball { norm: n, radius } if *n == norm => Ok(radius.clone()),
        _ => Err(Failure::Config(format!("this mode needs a {norm:?} ball perturbation"))),
    }
}

fn hidden_of(task: &Task, name: Option<&str>) -> Result<Hypothesis, Failure> {
    match name {
        None => Ok(task.hidden()?.clone()),
        Some(n) => task
            .finite_class()?
            .get(n)
            .cloned()
            .ok_or_else(|| Failure::Config(format!("the class has no member named {n:?}"))),
    }
}

fn describe(task: &Task, h: &Hypothesis) -> String {
    if let HypothesisClass::Finite(c) = &task.class {
        if let Some(name) = c.name_of(h) {
            return name.to_string();
        }
    }
    serde_json::to_string(h).unwrap_or_default()
}

fn exact_row(pairs: &[(&str, &Rational)]) -> Row {
    pairs
        .iter()
        .flat_map(|(k, v)| {
            [(k.to_string(), json!(rational::format(v))), (format!("{k}_f64"), json!(rational::to_f64(v)))]
        })
        .collect()
}

pub fn certify(task: &Task, a: &CertifyArgs, seed: u64, n: usize) -> Result<TrialReport, Failure> {
    check_unit("eps", a.eps)?;
    check_unit("delta", a.delta)?;
    let hidden = hidden_of(task, a.hidden.as_deref())?;
    let u = &task.perturbation;
    let dist = &task.distribution;
    let m = match a.m {
        Some(m) => m,
        None => bounds::hoeffding_size(a.eps, a.delta)?,
    };
    let inner = loss::true_loss(&hidden, dist, Some(u))?;
    let mut outer = inner.clone();

    let rows = match a.mode {
        CertifyMode::L1 => {
            let r = ball_radius(u, Norm::L1)?;
            trials::run(seed, n, |_, rng| {
                let s = dist.sample_with(m, rng);
                certify::certify_halfspace_l1(&mut LabelOracle::new(hidden.clone()), &s, &r)
            })
        }
        CertifyMode::Witness => {
            let class = task.finite_class()?;
            let witnesses: BTreeMap<Point, WitnessSet> = task
                .domain
                .iter()
                .map(|x| Ok((x.clone(), certify::build_witness_set(class, u, x)?)))
                .collect::<robcert::Result<_>>()?;
            trials::run(seed, n, |_, rng| {
                let s = dist.sample_with(m, rng);
                let (xs, ys): (Vec<Point>, Vec<bool>) = s.into_iter().unzip();
                let lookup =
                    |x: &Point| witnesses.get(x).cloned().ok_or_else(|| Error::PointOutsideDomain(Box::new(x.clone())));
                certify::certify_witness(&mut LabelOracle::new(hidden.clone()), &xs, lookup, &ys, a.eps, a.delta)
            })
        }
        CertifyMode::Tolerant => {
            let r = ball_radius(u, Norm::L2)?;
            let gamma = rational::parse(a.gamma.as_deref().unwrap_or("1/10"))?;
            let v = Perturbation::ball(Norm::L2, &r * (rational::one() + &gamma))?;
            outer = loss::true_loss(&hidden, dist, Some(&v))?;
            trials::run(seed, n, |_, rng| {
                let s = dist.sample_with(m, rng);
                certify::certify_tolerant_l2(&mut LabelOracle::new(hidden.clone()), &s, &r, &gamma, a.eps, a.delta)
            })
        }
    };
    let (lo, hi) = (rational::to_f64(&inner) - a.eps, rational::to_f64(&outer) + a.eps);
    let rows = collect(rows)?
        .into_iter()
        .enumerate()
        .map(|(i, rep)| {
            row(json!({
                "trial": i,
                "estimate": rational::format(&rep.estimate),
                "estimate_f64": rep.estimate_f64,
                "m_used": rep.m_used,
                "q_used": rep.q_used,
                "q_budget": rep.q_budget,
                "success": rep.estimate_f64 >= lo && rep.estimate_f64 <= hi,
            }))
        })
        .collect();
    let exact = if a.mode == CertifyMode::Tolerant {
        exact_row(&[("robust_loss_inner", &inner), ("robust_loss_outer", &outer)])
    } else {
        exact_row(&[("robust_loss", &inner)])
    };
    Ok(TrialReport::new("certify", rows, exact, Vec::new(), &["estimate_f64", "q_used"]))
}

pub fn attack(task: &Task, a: &AttackArgs, seed: u64, n: usize) -> Result<TrialReport, Failure> {
    let hidden = hidden_of(task, a.hidden.as_deref())?;
    let u = &task.perturbation;
    let adv: Box<dyn Adversary> = match a.adversary {
        AdversaryName::Threshold => Box::new(ThresholdEndpoints),
        AdversaryName::Exhaustive => Box::new(FiniteExhaustive),
    };
    let adv = adv.as_ref();
    let results = trials::run(seed, n, |_, rng| {
        let xs = task.distribution.sample_marginal_with(a.sample, rng);
        let s = xs.iter().map(|x| Ok((x.clone(), hidden.eval(x)?))).collect::<robcert::Result<Vec<_>>>()?;
        let res = adversary::attack(adv, &mut LabelOracle::new(hidden.clone()), &s, u)?;
        let ok = adversary::is_admissible_attack(&res.perturbed_points(), &xs, &hidden, u)?;
        Ok((res, ok))
    });
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (i, (res, ok)) in collect(results)?.into_iter().enumerate() {
        rows.push(row(json!({
            "trial": i,
            "sample_size": a.sample,
            "returned": res.perturbed.len(),
            "queries_used": res.queries.queries_used,
            "transcript_hash": res.queries.transcript_hash,
            "success": ok,
        })));
        details.push(serde_json::to_value(&res).map_err(Error::from)?);
    }
    let mut exact = Row::new();
    exact.insert("adversary".into(), json!(adv.name()));
    exact.insert("declared_per_point".into(), json!(adv.per_point_bound(u)));
    let mut report = TrialReport::new("attack", rows, exact, details, &["queries_used", "returned"]);
    if report.rows.iter().any(|r| r["success"] == json!(false)) {
        report.status = Status::ContractViolation;
    }
    Ok(report)
}

fn class_vc(task: &Task) -> Result<usize, Failure> {
    Ok(match &task.class {
        HypothesisClass::Finite(c) => vc::class_vc_dimension(c, &task.domain)?,
        HypothesisClass::Thresholds => 1,
        HypothesisClass::Halfspaces => 3,
    })
}

pub fn learn(task: &Task, a: &LearnArgs, seed: u64, n: usize) -> Result<TrialReport, Failure> {
    check_unit("eps", a.eps)?;
    check_unit("delta", a.delta)?;
    let u = &task.perturbation;
    let dist = &task.distribution;
    let needs_finite = !matches!(a.algo, Algo::Erm | Algo::Compress);
    if needs_finite {
        task.finite_class()?;
    }
    let (m, m_u) = match a.algo {
        Algo::SslMargin | Algo::SslUnlabeled => {
            let sizes = learners::ssl_sample_sizes(task.finite_class()?, u, &task.domain, a.eps, a.delta)?;
            (a.m.unwrap_or(sizes.labeled), a.m_unlabeled.unwrap_or(sizes.unlabeled))
        }
        _ => {
            let m = match a.m {
                Some(m) => m,
                None => bounds::eps_net_size(class_vc(task)?.max(1), a.eps, a.delta)?,
            };
            (m, a.m_unlabeled.unwrap_or(0))
        }
    };
    let compressor: Option<(Box<dyn Adversary>, Box<dyn ProperCompressor>)> = match (a.algo, &task.class) {
        (Algo::Compress, HypothesisClass::Thresholds) => {
            Some((Box::new(ThresholdEndpoints), Box::new(ThresholdCompressor)))
        }
        (Algo::Compress, HypothesisClass::Finite(c)) => {
            Some((Box::new(FiniteExhaustive), Box::new(FiniteClassCompressor { class: c.clone() })))
        }
        (Algo::Compress, HypothesisClass::Halfspaces) => {
            return Err(Failure::Config("no compressor for halfspace classes".into()))
        }
        _ => None,
    };
    let support = dist.support_points();

    let results = trials::run(seed, n, |_, rng| -> robcert::Result<(Hypothesis, Option<usize>)> {
        let s = dist.sample_with(m, rng);
        let h = match a.algo {
            Algo::Erm => learners::erm_robust(&task.class, &s, u)?,
            Algo::SslMargin => {
                let class = task.finite_class()?;
                let oracle = ClassOracle::new(class, dist, u);
                learners::ssl_margin_prune(class, &s, |h| oracle.margin(h))?
            }
            Algo::SslUnlabeled => {
                let t = dist.sample_marginal_with(m_u, rng);
                learners::ssl_unlabeled_prune(task.finite_class()?, &s, &t, u)?
            }
            Algo::ExtOracle => {
                let class = task.finite_class()?;
                let oracle = ClassOracle::new(class, dist, u);
                learners::extended_oracle_learner(class, &s, |h, e| oracle.extended(h, e))?.hypothesis
            }
            Algo::Cluster => learners::cluster_learner(task.finite_class()?, &s, &support, u)?.hypothesis,
            Algo::Compress => {
                let (adv, comp) = compressor.as_ref().expect("compressor chosen above");
                let (h, cs) = learners::compression_learner(&s, u, adv.as_ref(), comp.as_ref())?;
                return Ok((h, Some(cs.len())));
            }
        };
        Ok((h, None))
    });
    let two_eps = 2.0 * a.eps;
    let mut rows = Vec::new();
    for (i, (h, size)) in collect(results)?.into_iter().enumerate() {
        let l = loss::true_loss(&h, dist, Some(u))?;
        let lf = rational::to_f64(&l);
        let mut r = row(json!({
            "trial": i,
            "m": m,
            "hypothesis": describe(task, &h),
            "robust_loss": rational::format(&l),
            "robust_loss_f64": lf,
            "success": lf <= two_eps,
        }));
        if a.m_unlabeled.is_some() || matches!(a.algo, Algo::SslUnlabeled) {
            r.insert("m_unlabeled".into(), json!(m_u));
        }
        if let Some(size) = size {
            r.insert("compressed_size".into(), json!(size));
        }
        rows.push(r);
    }
    let mut exact = Row::new();
    if let Some(h) = &task.hidden {
        exact = exact_row(&[("hidden_robust_loss", &loss::true_loss(h, dist, Some(u))?)]);
    }
    Ok(TrialReport::new("learn", rows, exact, Vec::new(), &["robust_loss_f64"]))
}

fn parse_plane(s: &str) -> Result<Point, Failure> {
    let (x, y) = s.split_once(',').ok_or_else(|| Failure::Config(format!("expected a point `x,y`, got {s:?}")))?;
    Ok(Point::plane(rational::parse(x)?, rational::parse(y)?))
}

pub fn game(a: &GameArgs, seed: u64, n: usize) -> Result<(TrialReport, usize), Failure> {
    let r = rational::parse(&a.r)?;
    let gamma = rational::parse(&a.gamma)?;
    let x0 = parse_plane(&a.x0)?;
    let play = |s: &dyn CertifierStrategy| -> robcert::Result<Refutation> {
        match a.kind {
            GameKindArg::L2 => games::run_l2_game(s),
            GameKindArg::Tolerant => games::run_tolerant_singleton_game(s, &x0, &r, &gamma),
        }
    };
    let (refutations, n) = if a.strategy == "random" {
        if a.max_queries > games::MAX_STRATEGY_QUERIES {
            return Err(Failure::Config(format!("--max-queries above {}", games::MAX_STRATEGY_QUERIES)));
        }
        let seeds: Vec<u64> = (0..n as u64).map(|i| trials::trial_seed(seed, i)).collect();
        (trials::map(&seeds, |&s| play(&RandomStrategy::new(s, a.max_queries))), n)
    } else {
        let text = std::fs::read_to_string(&a.strategy).map_err(|e| Failure::Config(format!("{}: {e}", a.strategy)))?;
        let script: ScriptedStrategy = serde_json::from_str(&text).map_err(|e| Failure::Config(e.to_string()))?;
        (vec![play(&script)], 1)
    };
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (i, rf) in collect(refutations)?.into_iter().enumerate() {
        rows.push(row(json!({
            "trial": i,
            "queries": rf.transcript.len(),
            "verdict": rf.verdict,
            "estimate": rational::format(&rf.verdict.estimate()),
            "loss_inner": rational::format(&rf.loss_inner),
            "loss_outer": rational::format(&rf.loss_outer),
            "splits": rf.splits,
            "success": rf.verify().is_ok(),
        })));
        details.push(serde_json::to_value(&rf).map_err(Error::from)?);
    }
    let report = TrialReport::new("game", rows, Row::new(), details, &["queries"]);
    Ok((report, n))
}

pub fn verify_constructions(a: &VerifyArgs) -> Result<TrialReport, Failure> {
    let names: &[&str] = match a.which {
        Which::Thm32 => &["thm32"],
        Which::Thm36 => &["thm36"],
        Which::All => &["thm32", "thm36"],
    };
    if let Some(dir) = &a.export {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    }
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for name in names {
        let ci = constructions::by_name(name)?;
        let rep = constructions::verify_indistinguishability(&ci)?;
        let failed = rep.failures().count();
        rows.push(row(json!({
            "construction": name,
            "checks": rep.checks.len(),
            "failed": failed,
            "success": failed == 0,
        })));
        details.push(serde_json::to_value(&rep).map_err(Error::from)?);
        if let Some(dir) = &a.export {
            for which in [1u8, 2] {
                let t = Task::from_construction(&ci, which)?;
                let path = dir.join(format!("{name}-p{which}.json"));
                write_file(&path, &t.to_json()?)?;
            }
        }
    }
    let mut report = TrialReport::new("verify-constructions", rows, Row::new(), details, &[]);
    if report.rows.iter().any(|r| r["success"] == json!(false)) {
        report.status = Status::InternalFailure;
    }
    Ok(report)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}
