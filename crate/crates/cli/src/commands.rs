//! Subcommand implementations. Each returns a JSON report and a one-line summary.

use std::sync::Arc;

use serde_json::{json, Value};

use gradalg::cocycles::{bicharacter_cocycle, Cocycle};
use gradalg::corpus::{self, CorpusConfig};
use gradalg::embed::{construct, decide, separate, separator_case};
use gradalg::envelope::{alpha_envelope, round_trip};
use gradalg::galg::{AlphaDoc, HomDoc, Presentation, StructureAlgebra};
use gradalg::identities::{inclusion_bounded, Budget, IdentityError};
use gradalg::semisimple::{blocks_orthogonal, embed_into_power, minimal_set, SemisimpleError, SemisimplePresentation};

use crate::doc::{CliError, Command, InstanceDoc, Job, JobArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The question asked has a negative answer.
    VerdictFalse,
    /// The run completed but found a defect, such as an unsound corpus instance.
    Failure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::VerdictFalse => 2,
            Status::Failure => 1,
        }
    }

    fn of(verdict: bool) -> Status {
        if verdict {
            Status::Success
        } else {
            Status::VerdictFalse
        }
    }
}

pub struct Outcome {
    pub report: Value,
    pub status: Status,
    pub summary: String,
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn single<'a>(doc: &'a InstanceDoc, names: &[String], key: &str) -> Result<(&'a str, &'a Presentation), CliError> {
    match names {
        [n] => {
            let (name, p) = doc.presentations.get_key_value(n).ok_or_else(|| {
                CliError::validation(format!("arguments.{key}"), format!("unknown presentation '{n}'"))
            })?;
            Ok((name.as_str(), p))
        }
        [] => Err(CliError::Usage(format!("argument '{key}' is required"))),
        _ => Err(CliError::Usage(format!("argument '{key}' takes exactly one presentation"))),
    }
}

fn components(doc: &InstanceDoc, names: &[String], key: &str) -> Result<Vec<Presentation>, CliError> {
    if names.is_empty() {
        return Err(CliError::Usage(format!("argument '{key}' is required")));
    }
    names.iter().map(|n| doc.presentation(n, &format!("arguments.{key}")).cloned()).collect()
}

/// The algebra named by one presentation, or the direct sum of several.
fn algebra(doc: &InstanceDoc, names: &[String], key: &str) -> Result<Arc<StructureAlgebra>, CliError> {
    let comps = components(doc, names, key)?;
    if comps.len() == 1 {
        return Ok(comps[0].algebra().clone());
    }
    let s = SemisimplePresentation::new(comps).map_err(|e| CliError::module("semisimple", e))?;
    Ok(s.algebra().clone())
}

pub fn run_job(doc: &InstanceDoc, job: &Job) -> Result<Outcome, CliError> {
    let budget = job.budget.resolve();
    let args = &job.args;
    match job.command {
        Command::Decide => decide_cmd(doc, args),
        Command::Construct => construct_cmd(doc, args, &budget),
        Command::Verify => verify_cmd(doc, args),
        Command::IdentityInclusion => inclusion_cmd(doc, args, &budget),
        Command::Envelope => envelope_cmd(doc, args),
        Command::SemisimpleEmbed => semisimple_cmd(doc, args),
    }
}

fn decide_cmd(doc: &InstanceDoc, args: &JobArgs) -> Result<Outcome, CliError> {
    let (an, a) = single(doc, &args.a, "a")?;
    let (bn, b) = single(doc, &args.b, "b")?;
    let d = decide(a, b).map_err(|e| CliError::module("embed", e))?;
    let summary = format!(
        "decide {an} -> {bn}: {} ({:?}, d = {}, shift {})",
        d.verdict,
        d.case,
        d.trace.d,
        d.trace.shift.map_or("none".into(), |x| x.to_string())
    );
    Ok(Outcome {
        report: json!({
            "command": "decide",
            "a": an,
            "b": bn,
            "verdict": d.verdict,
            "case": to_json(&d.case),
            "trace": to_json(&d.trace),
        }),
        status: Status::of(d.verdict),
        summary,
    })
}

fn construct_cmd(doc: &InstanceDoc, args: &JobArgs, budget: &Budget) -> Result<Outcome, CliError> {
    let (an, a) = single(doc, &args.a, "a")?;
    let (bn, b) = single(doc, &args.b, "b")?;
    let d = decide(a, b).map_err(|e| CliError::module("embed", e))?;
    let mut report = json!({
        "command": "construct",
        "a": an,
        "b": bn,
        "verdict": d.verdict,
        "case": to_json(&d.case),
        "trace": to_json(&d.trace),
    });
    let summary;
    if d.verdict {
        let c = construct(a, b, &d).map_err(|e| CliError::module("embed", e))?;
        report["construction"] = json!({
            "via_envelope": c.via_envelope,
            "source_dim": a.dim(),
            "target_dim": b.dim(),
            "certificate": to_json(&c.certificate),
            "hom": to_json(&c.hom.to_doc()),
        });
        summary = format!("construct {an} -> {bn}: embedding of dimension {} into {} certified", a.dim(), b.dim());
    } else {
        let case = separator_case(&d);
        match separate(a, b, &d, budget) {
            Ok(rep) => {
                report["separation"] = json!({
                    "case": to_json(&case),
                    "status": "verified",
                    "polynomial": to_json(&rep.poly.to_doc()),
                    "in_b": {"holds": rep.in_b.holds, "assignments": rep.in_b.assignments},
                    "in_a": {"holds": rep.in_a.holds, "witness": rep.in_a.witness},
                });
                summary = format!("construct {an} -> {bn}: no embedding; separating identity verified");
            }
            Err(IdentityError::NotFoundWithinBudget) => {
                report["separation"] = json!({"case": to_json(&case), "status": "inconclusive_witness"});
                summary = format!("construct {an} -> {bn}: no embedding; no separator within budget");
            }
            Err(e) => return Err(CliError::module("identities", e)),
        }
    }
    Ok(Outcome { report, status: Status::of(d.verdict), summary })
}

fn verify_cmd(doc: &InstanceDoc, args: &JobArgs) -> Result<Outcome, CliError> {
    let source = algebra(doc, &args.a, "a")?;
    let mut target = algebra(doc, &args.b, "b")?;
    let power = args.power.unwrap_or(1);
    if power == 0 {
        return Err(CliError::validation("arguments.power", "must be positive"));
    }
    if power > 1 {
        target = Arc::new(target.power(power));
    }
    let hom: HomDoc = args.hom.clone().ok_or_else(|| CliError::Usage("argument 'hom' is required".into()))?;
    let hom = hom
        .into_hom(source, target)
        .ok_or_else(|| CliError::validation("arguments.hom", "dimensions do not match the named algebras"))?;
    let cert = hom.verify();
    let ok = cert.is_embedding();
    Ok(Outcome {
        report: json!({"command": "verify", "embedding": ok, "certificate": to_json(&cert)}),
        status: Status::of(ok),
        summary: format!("verify: graded {}, multiplicative {}, injective {}", cert.graded, cert.multiplicative, cert.injective),
    })
}

fn inclusion_cmd(doc: &InstanceDoc, args: &JobArgs, budget: &Budget) -> Result<Outcome, CliError> {
    let a = algebra(doc, &args.a, "a")?;
    let b = algebra(doc, &args.b, "b")?;
    let max_len = args.max_len.unwrap_or(budget.max_len);
    let rep = inclusion_bounded(&b, &a, max_len, budget).map_err(|e| CliError::module("identities", e))?;
    let mut report = json!({
        "command": "identity-inclusion",
        "a": args.a,
        "b": args.b,
        "max_len": max_len,
        "holds": rep.holds,
        "multidegrees_checked": rep.multidegrees_checked,
    });
    if let Some(v) = &rep.violation {
        report["violation"] = json!({
            "multidegree": v.degrees,
            "target": v.target,
            "polynomial": to_json(&v.separator.to_doc()),
        });
    }
    let summary = if rep.holds {
        format!("identity-inclusion: Id(B) in Id(A) at all {} multidegrees up to length {}", rep.multidegrees_checked, max_len)
    } else {
        format!("identity-inclusion: fails at multidegree {:?}", rep.violation.as_ref().map(|v| &v.degrees))
    };
    Ok(Outcome { report, status: Status::of(rep.holds), summary })
}

fn ambient_cocycle(doc: &InstanceDoc, c: &AlphaDoc) -> Result<Cocycle, CliError> {
    let bad = |e: &dyn std::fmt::Display| CliError::validation("arguments.cocycle", e);
    let alpha = match c {
        AlphaDoc::Bicharacter { bicharacter } => bicharacter_cocycle(&doc.group, bicharacter).map_err(|e| bad(&e))?,
        AlphaDoc::Table(t) => Cocycle::from_doc(&doc.group, t).map_err(|e| bad(&e))?,
    };
    if alpha.domain().order() != doc.group.order() {
        return Err(bad(&"cocycle must be defined on the whole group"));
    }
    Ok(alpha)
}

fn envelope_cmd(doc: &InstanceDoc, args: &JobArgs) -> Result<Outcome, CliError> {
    let (bn, b) = single(doc, &args.b, "b")?;
    let c = args.cocycle.as_ref().ok_or_else(|| CliError::Usage("argument 'cocycle' is required".into()))?;
    let alpha = ambient_cocycle(doc, c)?;
    let env = alpha_envelope(b, &alpha).map_err(|e| CliError::module("envelope", e))?;
    let (back, back_cert) = round_trip(b.algebra(), &alpha).map_err(|e| CliError::module("envelope", e))?;
    let bijective = back_cert.is_embedding() && back.source.dim() == b.dim();
    let ok = env.certificate.is_embedding() && bijective;
    Ok(Outcome {
        report: json!({
            "command": "envelope",
            "b": bn,
            "presentation": to_json(&env.presentation.to_doc()),
            "carrier_dim": env.carrier.dim(),
            "psi_certificate": to_json(&env.certificate),
            "signs": env.signs,
            "round_trip": {"bijective": bijective, "certificate": to_json(&back_cert)},
        }),
        status: Status::of(ok),
        summary: format!(
            "envelope of {bn}: dimension {}, isomorphism certified {}, round trip certified {}",
            env.carrier.dim(),
            env.certificate.is_embedding(),
            bijective
        ),
    })
}

fn semisimple_cmd(doc: &InstanceDoc, args: &JobArgs) -> Result<Outcome, CliError> {
    let ac = components(doc, &args.a, "a")?;
    let bc = components(doc, &args.b, "b")?;
    let ma = minimal_set(&ac).map_err(|e| CliError::module("semisimple", e))?;
    let mb = minimal_set(&bc).map_err(|e| CliError::module("semisimple", e))?;
    let names = |v: &[usize], all: &[String]| v.iter().map(|&i| all[i].clone()).collect::<Vec<_>>();
    let removals = |log: &[gradalg::semisimple::Removal], all: &[String]| {
        log.iter().map(|r| json!({"removed": all[r.removed], "absorbed_by": all[r.absorbed_by]})).collect::<Vec<_>>()
    };
    let mut report = json!({
        "command": "semisimple-embed",
        "a": args.a,
        "b": args.b,
        "minimal_a": {"kept": names(&ma.kept, &args.a), "removed": removals(&ma.log, &args.a)},
        "minimal_b": {"kept": names(&mb.kept, &args.b), "removed": removals(&mb.log, &args.b)},
    });
    let a = SemisimplePresentation::new(ac).map_err(|e| CliError::module("semisimple", e))?;
    let b = SemisimplePresentation::new(bc).map_err(|e| CliError::module("semisimple", e))?;
    match embed_into_power(&a, &b) {
        Ok(p) => {
            report["embeds"] = json!(true);
            report["n"] = json!(p.n);
            report["dimension_bound"] = json!(p.dimension_bound);
            report["source_dim"] = json!(a.dim());
            report["target_dim"] = json!(p.target.dim());
            report["slots"] = p
                .slots
                .iter()
                .enumerate()
                .map(|(i, &(copy, j))| json!({"component": args.a[i], "copy": copy, "into": args.b[j]}))
                .collect();
            report["blocks_orthogonal"] = json!(blocks_orthogonal(&a, &p));
            report["certificate"] = to_json(&p.certificate);
            report["hom"] = to_json(&p.hom.to_doc());
            let summary = format!("semisimple-embed: A embeds in B^{} (dimension {} into {})", p.n, a.dim(), p.target.dim());
            Ok(Outcome { report, status: Status::Success, summary })
        }
        Err(SemisimpleError::NoMatch(i)) => {
            report["embeds"] = json!(false);
            report["unmatched"] = json!(args.a[i]);
            let summary = format!("semisimple-embed: component {} embeds in no component of B", args.a[i]);
            Ok(Outcome { report, status: Status::VerdictFalse, summary })
        }
        Err(e) => Err(CliError::module("semisimple", e)),
    }
}

pub struct CorpusArgs {
    pub config: CorpusConfig,
    pub inclusion_len: usize,
    pub workers: usize,
    pub budget: Budget,
}

pub fn corpus_run(args: &CorpusArgs) -> Outcome {
    let inst = corpus::generate(&args.config);
    let out = corpus::par_map(&inst, args.workers, |i| corpus::run_instance(i, args.inclusion_len, &args.budget));
    let s = corpus::summarize(&out);
    let cfg = &args.config;
    let status = if s.unsound > 0 || s.errors > 0 || s.fast_path_disagreements > 0 { Status::Failure } else { Status::Success };
    let summary = format!(
        "corpus-run seed {}: {} instances, {} true ({} certified), {} false ({} separated, {} inconclusive), {} unsound, {} errors",
        cfg.seed, s.instances, s.decided_true, s.constructed, s.decided_false, s.separated, s.inconclusive, s.unsound, s.errors
    );
    Outcome {
        report: json!({
            "command": "corpus-run",
            "config": {
                "seed": cfg.seed,
                "order_bound": cfg.order_bound,
                "count": cfg.count,
                "max_tuple_len": cfg.max_tuple_len,
                "inclusion_len": args.inclusion_len,
            },
            "summary": to_json(&s),
            "instances": to_json(&out),
        }),
        status,
        summary,
    }
}

/// Runs every job of the document in order.
pub fn run_all(doc: &InstanceDoc) -> Outcome {
    let mut reports = Vec::with_capacity(doc.jobs.len());
    let mut lines = Vec::new();
    let (mut errors, mut negatives) = (0, 0);
    for (i, job) in doc.jobs.iter().enumerate() {
        match run_job(doc, job) {
            Ok(o) => {
                match o.status {
                    Status::VerdictFalse => negatives += 1,
                    Status::Failure => errors += 1,
                    Status::Success => {}
                }
                lines.push(format!("  [{i}] {}", o.summary));
                reports.push(json!({"job": i, "command": job.command.name(), "report": o.report}));
            }
            Err(e) => {
                errors += 1;
                lines.push(format!("  [{i}] error: {e}"));
                reports.push(json!({"job": i, "command": job.command.name(), "error": e.to_json()}));
            }
        }
    }
    let status = if errors > 0 {
        Status::Failure
    } else if negatives > 0 {
        Status::VerdictFalse
    } else {
        Status::Success
    };
    let summary = format!("run: {} jobs, {} negative, {} failed\n{}", doc.jobs.len(), negatives, errors, lines.join("\n"));
    Outcome { report: json!({"command": "run", "jobs": reports}), status, summary }
}
