//! Instance documents: parsing and validation with JSON paths in errors.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use gradalg::galg::{AlphaDoc, GalgError, HomDoc, Presentation, PresentationDoc};
use gradalg::groups::{FiniteGroup, Group, GroupSpec, Subgroup};
use gradalg::identities::Budget;

pub const VERSION: &str = "gradalg/1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Parse(String),
    Validation { path: String, reason: String },
    Usage(String),
    Io(String),
    /// An error raised by one of the library modules.
    Module { module: &'static str, kind: String, message: String },
}

impl CliError {
    pub fn validation(path: impl Into<String>, reason: impl ToString) -> CliError {
        CliError::Validation { path: path.into(), reason: reason.to_string() }
    }

    pub fn module<E: std::fmt::Debug + std::fmt::Display>(module: &'static str, e: E) -> CliError {
        CliError::Module { module, kind: variant_name(&e), message: e.to_string() }
    }

    pub fn code(&self) -> String {
        match self {
            CliError::Parse(_) => "cli.parse".into(),
            CliError::Validation { .. } => "cli.validation".into(),
            CliError::Usage(_) => "cli.usage".into(),
            CliError::Io(_) => "cli.io".into(),
            CliError::Module { module, kind, .. } => format!("{module}.{kind}"),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("code".into(), self.code().into());
        m.insert("message".into(), self.to_string().into());
        if let CliError::Validation { path, reason } = self {
            m.insert("path".into(), path.clone().into());
            m.insert("reason".into(), reason.clone().into());
        }
        Value::Object(m)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation { path, reason } => write!(f, "invalid document at {path}: {reason}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Module { message, .. } => write!(f, "{message}"),
        }
    }
}

/// `CocycleIdentityViolated(1, 2, 3)` → `cocycle_identity_violated`. Transparent
/// wrappers are unwrapped to the innermost variant.
fn variant_name(e: &dyn std::fmt::Debug) -> String {
    let dbg = format!("{e:?}");
    let mut rest = dbg.as_str();
    let mut name = "";
    loop {
        let end = rest.find(|c: char| !c.is_alphanumeric() && c != '_').unwrap_or(rest.len());
        let head = &rest[..end];
        if head.is_empty() {
            break;
        }
        name = head;
        let next = &rest[end..];
        match next.strip_prefix('(') {
            Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) => rest = inner,
            _ => break,
        }
    }
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// Operations a document job or a subcommand can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Decide,
    Construct,
    Verify,
    IdentityInclusion,
    Envelope,
    SemisimpleEmbed,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        Some(match s {
            "decide" => Command::Decide,
            "construct" => Command::Construct,
            "verify" => Command::Verify,
            "identity-inclusion" => Command::IdentityInclusion,
            "envelope" => Command::Envelope,
            "semisimple-embed" => Command::SemisimpleEmbed,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::Decide => "decide",
            Command::Construct => "construct",
            Command::Verify => "verify",
            Command::IdentityInclusion => "identity-inclusion",
            Command::Envelope => "envelope",
            Command::SemisimpleEmbed => "semisimple-embed",
        }
    }
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    })
}

/// Arguments of a job. `a` and `b` name presentations; a list stands for
/// their direct sum.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobArgs {
    #[serde(default, deserialize_with = "one_or_many")]
    pub a: Vec<String>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub b: Vec<String>,
    pub max_len: Option<usize>,
    pub cocycle: Option<AlphaDoc>,
    pub hom: Option<HomDoc>,
    /// Number of copies of the target direct sum, for `verify`.
    pub power: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetDoc {
    pub max_len: Option<usize>,
    pub max_evals: Option<u64>,
}

impl BudgetDoc {
    /// Defaults, then these overrides, then `GRADALG_BUDGET`.
    pub fn resolve(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(l) = self.max_len {
            b.max_len = l;
        }
        if let Some(e) = self.max_evals {
            b.max_evals = e;
        }
        if let Some(e) = Budget::from_env_override() {
            b.max_evals = e;
        }
        b
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobDoc {
    command: String,
    #[serde(default)]
    arguments: JobArgs,
    #[serde(default)]
    budget: BudgetDoc,
}

#[derive(Debug, Clone)]
pub struct Job {
    pub command: Command,
    pub args: JobArgs,
    pub budget: BudgetDoc,
}

/// A validated instance document.
#[derive(Debug, Clone)]
pub struct InstanceDoc {
    pub group: Group,
    pub presentations: BTreeMap<String, Presentation>,
    pub jobs: Vec<Job>,
}

impl InstanceDoc {
    pub fn presentation(&self, name: &str, path: &str) -> Result<&Presentation, CliError> {
        self.presentations.get(name).ok_or_else(|| CliError::validation(path, format!("unknown presentation '{name}'")))
    }
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, CliError> {
    obj.get(key).ok_or_else(|| CliError::validation(path, format!("missing field '{key}'")))
}

fn presentation(g: &Group, spec: &GroupSpec, v: &Value, path: &str) -> Result<Presentation, CliError> {
    let doc: PresentationDoc = serde_json::from_value(v.clone()).map_err(|e| CliError::validation(path, e))?;
    if let Some(amb) = &doc.ambient {
        if amb != spec {
            return Err(CliError::validation(format!("{path}.ambient"), "differs from the document group"));
        }
    }
    Subgroup::new(g, &doc.h.elements).map_err(|e| CliError::validation(format!("{path}.H"), e))?;
    if doc.s.entries.is_empty() {
        return Err(CliError::validation(format!("{path}.s"), "tuple must be nonempty"));
    }
    for (i, &x) in doc.s.entries.iter().enumerate() {
        g.check_element(x).map_err(|e| CliError::validation(format!("{path}.s[{i}]"), e))?;
    }
    Presentation::from_doc(g, &doc).map_err(|e| match e {
        GalgError::Cocycle(c) => CliError::validation(format!("{path}.alpha"), c),
        GalgError::MismatchedParent => CliError::validation(format!("{path}.alpha"), "cocycle domain differs from H"),
        other => CliError::validation(path, other),
    })
}

/// Parses and fully validates an instance document.
pub fn parse(text: &str) -> Result<InstanceDoc, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| CliError::validation("$", "document must be an object"))?;
    for key in obj.keys() {
        if !["version", "group", "presentations", "jobs"].contains(&key.as_str()) {
            return Err(CliError::validation(key.clone(), "unknown field"));
        }
    }
    match field(obj, "version", "$")?.as_str() {
        Some(VERSION) => {}
        Some(other) => return Err(CliError::validation("version", format!("unsupported version '{other}', expected '{VERSION}'"))),
        None => return Err(CliError::validation("version", "must be a string")),
    }
    let group_spec: GroupSpec =
        serde_json::from_value(field(obj, "group", "$")?.clone()).map_err(|e| CliError::validation("group", e))?;
    let group = FiniteGroup::build(&group_spec).map_err(|e| CliError::validation("group", e))?;

    let mut presentations = BTreeMap::new();
    if let Some(p) = obj.get("presentations") {
        let p = p.as_object().ok_or_else(|| CliError::validation("presentations", "must be an object"))?;
        for (name, v) in p {
            let path = format!("presentations.{name}");
            presentations.insert(name.clone(), presentation(&group, &group_spec, v, &path)?);
        }
    }

    let mut jobs = Vec::new();
    if let Some(js) = obj.get("jobs") {
        let js = js.as_array().ok_or_else(|| CliError::validation("jobs", "must be an array"))?;
        for (i, j) in js.iter().enumerate() {
            let path = format!("jobs[{i}]");
            let doc: JobDoc = serde_json::from_value(j.clone()).map_err(|e| CliError::validation(&path, e))?;
            let command = Command::parse(&doc.command)
                .ok_or_else(|| CliError::validation(format!("{path}.command"), format!("unknown command '{}'", doc.command)))?;
            for (key, names) in [("a", &doc.arguments.a), ("b", &doc.arguments.b)] {
                for n in names {
                    if !presentations.contains_key(n) {
                        return Err(CliError::validation(
                            format!("{path}.arguments.{key}"),
                            format!("unknown presentation '{n}'"),
                        ));
                    }
                }
            }
            jobs.push(Job { command, args: doc.arguments, budget: doc.budget });
        }
    }
    Ok(InstanceDoc { group, presentations, jobs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names() {
        use gradalg::cocycles::CocycleError;
        use gradalg::embed::EmbedError;
        assert_eq!(variant_name(&EmbedError::DecisionFalse), "decision_false");
        assert_eq!(variant_name(&CocycleError::CocycleIdentityViolated(1, 2, 3)), "cocycle_identity_violated");
        assert_eq!(variant_name(&EmbedError::Cocycle(CocycleError::NotTransversal)), "not_transversal");
        assert_eq!(variant_name(&EmbedError::NotApplicable("x".into())), "not_applicable");
    }

    #[test]
    fn minimal_document() {
        let d = parse(r#"{"version":"gradalg/1","group":{"kind":"cyclic","n":3},"presentations":{"A":{"H":{"elements":[0]},"s":[0,1]}}}"#)
            .unwrap();
        assert_eq!(d.presentations["A"].dim(), 4);
        assert!(d.jobs.is_empty());
    }

    #[test]
    fn structural_errors() {
        let bad = |t: &str| match parse(t) {
            Err(CliError::Validation { path, .. }) => path,
            other => panic!("{other:?}"),
        };
        assert!(matches!(parse("{"), Err(CliError::Parse(_))));
        assert_eq!(bad(r#"{"version":"gradalg/0","group":{"kind":"cyclic","n":3}}"#), "version");
        assert_eq!(bad(r#"{"version":"gradalg/1","group":{"kind":"cyclic","n":0}}"#), "group");
        assert_eq!(
            bad(r#"{"version":"gradalg/1","group":{"kind":"cyclic","n":4},"presentations":{"A":{"H":{"elements":[0,1]},"s":[0]}}}"#),
            "presentations.A.H"
        );
        assert_eq!(
            bad(r#"{"version":"gradalg/1","group":{"kind":"cyclic","n":4},"presentations":{"A":{"H":{"elements":[0]},"s":[0,7]}}}"#),
            "presentations.A.s[1]"
        );
        assert_eq!(
            bad(r#"{"version":"gradalg/1","group":{"kind":"cyclic","n":4},"presentations":{"A":{"H":{"elements":[0]},"s":[0]}},"jobs":[{"command":"decide","arguments":{"a":"A","b":"C"}}]}"#),
            "jobs[0].arguments.b"
        );
        assert_eq!(
            bad(r#"{"version":"gradalg/1","group":{"kind":"cyclic","n":4},"jobs":[{"command":"frobnicate"}]}"#),
            "jobs[0].command"
        );
    }

    #[test]
    fn bad_cocycle_cites_triple() {
        // Z/2 with α(1,1) = -1 and α(0,1) = -1 is not a cocycle
        let one = r#"{"conductor":1,"coeffs":[["1","1"]]}"#;
        let neg = r#"{"conductor":1,"coeffs":[["-1","1"]]}"#;
        let t = format!(
            r#"{{"version":"gradalg/1","group":{{"kind":"cyclic","n":2}},"presentations":{{"A":{{"H":{{"elements":[0,1]}},"alpha":{{"group":{{"elements":[0,1]}},"values":[[{one},{neg}],[{one},{neg}]]}},"s":[0]}}}}}}"#
        );
        match parse(&t) {
            Err(CliError::Validation { path, reason }) => {
                assert_eq!(path, "presentations.A.alpha");
                assert!(reason.contains("fails at ("), "{reason}");
            }
            other => panic!("{other:?}"),
        }
    }
    #[test]
    fn example_fixture_supports() {
        let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/z10_power.json")).unwrap();
        let d = parse(&text).unwrap();
        let sup = |n: &str| d.presentations[n].support().into_iter().collect::<Vec<_>>();
        assert_eq!(sup("A1"), vec![0, 1, 9]);
        assert_eq!(sup("A2"), vec![0, 2, 8]);
        assert_eq!(d.jobs.len(), 4);
        assert_eq!(d.jobs[2].args.a, vec!["A1", "A2"]);
    }
}
