//! JSON run configurations.
//!
//! Rationals may be written as integers or as strings `"a/b"`. Matrices are
//! nested row arrays or a flat row-major array of square length.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;
use stlab_core::endo_galois::{EndAlgebra, GaloisTwistGroup};
use stlab_core::equidist::Policy;
use stlab_core::frobenius::{CurveSpec, GENUS2_DEFAULT_P_LIMIT};
use stlab_core::haar::{CompactGroup, CompactGroupId, Component};
use stlab_core::lefschetz::{CompositeSpec, LefschetzData, SearchConfig};
use stlab_core::linalg::RationalMatrix;
use stlab_core::pairing::PolarizedSpace;
use thiserror::Error;

/// A configuration problem, anchored to the line of the offending key when
/// one can be found.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Lefschetz,
    HaarMoments,
    Count,
    Analyze,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lefschetz => "lefschetz",
            Self::HaarMoments => "haar-moments",
            Self::Count => "count",
            Self::Analyze => "analyze",
            Self::Selftest => "selftest",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Self::Lefschetz, Self::HaarMoments, Self::Count, Self::Analyze, Self::Selftest]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethodChoice {
    Mc,
    Quad,
}

impl FromStr for MomentMethodChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mc" => Ok(Self::Mc),
            "quad" | "quadrature" => Ok(Self::Quad),
            _ => Err(format!("unknown method `{s}` (expected mc or quad)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HaarRequest {
    pub id: CompactGroupId,
    pub method: MomentMethodChoice,
    pub k_max: usize,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct LefschetzRequest {
    pub data: LefschetzData,
    pub composites: Vec<CompositeSpec>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub curve: Option<CurveSpec>,
    /// Field descriptor used to label primes by Frobenius class.
    pub descriptor: Option<Vec<i64>>,
    pub p_max: Option<u64>,
    pub genus2_p_limit: u64,
    pub policy: Policy,
    pub catalog: Vec<CompactGroupId>,
    pub hypothesis: Option<BTreeMap<String, CompactGroupId>>,
    pub lefschetz: Option<LefschetzRequest>,
    pub search: SearchConfig,
    pub haar: Option<HaarRequest>,
    pub traces: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for a command with no configuration file.
    pub fn bare(command: Command) -> Self {
        Self {
            command,
            seed: 0,
            curve: None,
            descriptor: None,
            p_max: None,
            genus2_p_limit: GENUS2_DEFAULT_P_LIMIT,
            policy: Policy::default(),
            catalog: default_catalog(),
            hypothesis: None,
            lefschetz: None,
            search: SearchConfig::default(),
            haar: None,
            traces: None,
            out: None,
        }
    }

    /// The labeling group implied by the descriptor (trivial action, since
    /// only the class labels are used).
    pub fn label_group(&self) -> Option<GaloisTwistGroup> {
        self.descriptor.as_ref().map(|d| {
            let actions = vec![RationalMatrix::identity(1); 1 << d.len()];
            GaloisTwistGroup::multi_quadratic(d, actions).expect("descriptor validated at parse time")
        })
    }
}

pub fn default_catalog() -> Vec<CompactGroupId> {
    CompactGroup::ALL.into_iter().map(CompactGroupId::whole).collect()
}

/// Parsing context: the original text, for line anchoring.
struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line_of(&self, key: &str) -> Option<usize> {
        let needle = format!("\"{key}\"");
        self.text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.line_of(key),
            message: message.into(),
        }
    }

    fn u64(&self, obj: &Value, key: &str) -> Result<Option<u64>, ConfigError> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| self.err(key, format!("`{key}` must be a non-negative integer"))),
        }
    }

    fn f64(&self, obj: &Value, key: &str) -> Result<Option<f64>, ConfigError> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| self.err(key, format!("`{key}` must be a number"))),
        }
    }

    fn str<'v>(&self, obj: &'v Value, key: &str) -> Result<Option<&'v str>, ConfigError> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| self.err(key, format!("`{key}` must be a string"))),
        }
    }

    fn int_list(&self, v: &Value, key: &str) -> Result<Vec<i64>, ConfigError> {
        v.as_array()
            .and_then(|a| a.iter().map(Value::as_i64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| self.err(key, format!("`{key}` must be an array of integers")))
    }

    fn rational(&self, v: &Value, key: &str) -> Result<BigRational, ConfigError> {
        parse_rational(v).ok_or_else(|| self.err(key, format!("`{key}`: cannot read {v} as a rational")))
    }

    fn matrix(&self, v: &Value, key: &str) -> Result<RationalMatrix, ConfigError> {
        let arr = v
            .as_array()
            .ok_or_else(|| self.err(key, format!("`{key}` must be a matrix")))?;
        if arr.iter().all(Value::is_array) {
            let rows = arr
                .iter()
                .map(|row| {
                    row.as_array()
                        .unwrap()
                        .iter()
                        .map(|x| self.rational(x, key))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let width = rows.first().map_or(0, Vec::len);
            if rows.is_empty() || rows.iter().any(|r| r.len() != width) {
                return Err(self.err(key, format!("`{key}`: rows have unequal lengths")));
            }
            return Ok(RationalMatrix::from_rows(rows));
        }
        let flat = arr.iter().map(|x| self.rational(x, key)).collect::<Result<Vec<_>, _>>()?;
        let n = (flat.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != flat.len() {
            return Err(self.err(key, format!("`{key}`: flat matrix length {} is not a square", flat.len())));
        }
        Ok(RationalMatrix::from_flat(n, n, flat))
    }

    fn matrices(&self, v: &Value, key: &str) -> Result<Vec<RationalMatrix>, ConfigError> {
        v.as_array()
            .ok_or_else(|| self.err(key, format!("`{key}` must be an array of matrices")))?
            .iter()
            .map(|m| self.matrix(m, key))
            .collect()
    }
}

pub fn parse_rational(v: &Value) -> Option<BigRational> {
    match v {
        Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(BigInt::from(i))),
        Value::String(s) => {
            let s = s.trim();
            match s.split_once('/') {
                Some((a, b)) => {
                    let (a, b): (BigInt, BigInt) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
                    if b == BigInt::from(0) {
                        None
                    } else {
                        Some(BigRational::new(a, b))
                    }
                }
                None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
            }
        }
        _ => None,
    }
}

pub fn parse_group_id(s: &str) -> Result<CompactGroupId, String> {
    let (g, c) = match s.split_once('/') {
        Some((g, c)) => (g, c.parse::<Component>().map_err(|e| e.to_string())?),
        None => (s, Component::Mixture),
    };
    let g: CompactGroup = g.parse().map_err(|e: stlab_core::haar::HaarError| e.to_string())?;
    CompactGroupId::new(g, c).map_err(|e| e.to_string())
}

const KNOWN_KEYS: [&str; 23] = [
    "command",
    "seed",
    "curve",
    "descriptor",
    "p_max",
    "genus2_p_limit",
    "k_max",
    "z_threshold",
    "max_discrepancy",
    "catalog",
    "hypothesis",
    "space",
    "endomorphisms",
    "galois",
    "composites",
    "budget",
    "search",
    "group",
    "component",
    "method",
    "n",
    "traces",
    "out",
];

/// Parses and validates a configuration. Every structural invariant
/// (antisymmetric pairing, nonzero discriminant, valid Galois action) is
/// checked here.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_as(text, None)
}

/// As [`parse_config`], for a file handed to a subcommand: `command` may be
/// omitted, and must match the subcommand when present.
pub fn parse_config_as(text: &str, expected: Option<Command>) -> Result<RunConfig, ConfigError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ConfigError {
        line: Some(e.line()),
        message: format!("malformed JSON: {e}"),
    })?;
    let ctx = Ctx { text };
    let obj = root.as_object().ok_or_else(|| ConfigError {
        line: Some(1),
        message: "configuration must be a JSON object".into(),
    })?;
    for key in obj.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(ctx.err(key, format!("unknown key `{key}`")));
        }
    }
    let command = match (ctx.str(&root, "command")?, expected) {
        (Some(c), _) => c.parse::<Command>().map_err(|_| ctx.err("command", format!("unknown command `{c}`")))?,
        (None, Some(e)) => e,
        (None, None) => return Err(ctx.err("command", "missing `command`")),
    };
    if let Some(e) = expected.filter(|e| *e != command) {
        return Err(ctx.err("command", format!("configuration is for `{command}`, not `{e}`")));
    }
    let mut cfg = RunConfig::bare(command);
    cfg.seed = ctx.u64(&root, "seed")?.unwrap_or(0);
    cfg.search.seed = cfg.seed;

    if let Some(curve) = root.get("curve") {
        let genus = ctx
            .u64(curve, "genus")?
            .ok_or_else(|| ctx.err("curve", "curve needs `genus`"))?;
        let f = curve.get("f").ok_or_else(|| ctx.err("curve", "curve needs `f`"))?;
        let f = ctx.int_list(f, "f")?;
        let genus = u8::try_from(genus).map_err(|_| ctx.err("genus", "genus must be 1 or 2"))?;
        cfg.curve = Some(CurveSpec::new(genus, &f).map_err(|e| ctx.err("f", e.to_string()))?);
    }
    if let Some(d) = root.get("descriptor") {
        let d = ctx.int_list(d, "descriptor")?;
        let actions = vec![RationalMatrix::identity(1); 1usize.checked_shl(d.len() as u32).unwrap_or(0).max(1)];
        GaloisTwistGroup::multi_quadratic(&d, actions).map_err(|e| ctx.err("descriptor", e.to_string()))?;
        cfg.descriptor = Some(d);
    }
    cfg.p_max = ctx.u64(&root, "p_max")?;
    if let Some(p) = cfg.p_max {
        if p < 3 {
            return Err(ctx.err("p_max", "p_max must be at least 3"));
        }
    }
    if let Some(limit) = ctx.u64(&root, "genus2_p_limit")? {
        cfg.genus2_p_limit = limit;
    }
    if let (Some(c), Some(p)) = (&cfg.curve, cfg.p_max) {
        if c.genus() == 2 && p > cfg.genus2_p_limit {
            return Err(ctx.err(
                "p_max",
                format!("genus-2 p_max {p} exceeds genus2_p_limit {}", cfg.genus2_p_limit),
            ));
        }
    }
    if let Some(k) = ctx.u64(&root, "k_max")? {
        if !(1..=32).contains(&k) {
            return Err(ctx.err("k_max", "k_max must lie in 1..=32"));
        }
        cfg.policy.k_max = k as usize;
    }
    if let Some(z) = ctx.f64(&root, "z_threshold")? {
        if !(z > 0.0 && z.is_finite()) {
            return Err(ctx.err("z_threshold", "z_threshold must be positive"));
        }
        cfg.policy.z_threshold = z;
    }
    cfg.policy.max_discrepancy = ctx.f64(&root, "max_discrepancy")?;
    if let Some(cat) = root.get("catalog") {
        let names = cat
            .as_array()
            .ok_or_else(|| ctx.err("catalog", "`catalog` must be an array of group names"))?;
        cfg.catalog = names
            .iter()
            .map(|n| {
                n.as_str()
                    .ok_or_else(|| ctx.err("catalog", "catalog entries must be strings"))
                    .and_then(|s| parse_group_id(s).map_err(|e| ctx.err("catalog", e)))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(h) = root.get("hypothesis") {
        let map = h
            .as_object()
            .ok_or_else(|| ctx.err("hypothesis", "`hypothesis` maps class labels to groups"))?;
        let mut out = BTreeMap::new();
        for (class, g) in map {
            let g = g
                .as_str()
                .ok_or_else(|| ctx.err(class, "hypothesis values must be strings like \"NU1/nontrivial\""))?;
            out.insert(class.clone(), parse_group_id(g).map_err(|e| ctx.err(class, e))?);
        }
        let order = 1usize << cfg.descriptor.as_ref().map_or(0, Vec::len);
        let group = cfg.label_group().unwrap_or_else(|| GaloisTwistGroup::trivial(1));
        for class in out.keys() {
            if group.element(class).is_err() {
                return Err(ctx.err(class, format!("class `{class}` is not in a group of order {order}")));
            }
        }
        cfg.hypothesis = Some(out);
    }

    if let Some(b) = ctx.u64(&root, "budget")? {
        cfg.search.budget = b as usize;
    }
    if let Some(s) = root.get("search") {
        if let Some(it) = ctx.u64(s, "max_iterations")? {
            cfg.search.max_iterations = it as usize;
        }
        if let Some(t) = ctx.f64(s, "tolerance")? {
            cfg.search.tolerance = t;
        }
    }
    if root.get("space").is_some() {
        cfg.lefschetz = Some(parse_lefschetz(&ctx, &root)?);
    }

    if let Some(g) = ctx.str(&root, "group")? {
        let group: CompactGroup = g.parse().map_err(|e: stlab_core::haar::HaarError| ctx.err("group", e.to_string()))?;
        let component = match ctx.str(&root, "component")? {
            Some(c) => c.parse().map_err(|e: stlab_core::haar::HaarError| ctx.err("component", e.to_string()))?,
            None => Component::Mixture,
        };
        let id = CompactGroupId::new(group, component).map_err(|e| ctx.err("component", e.to_string()))?;
        let method = match ctx.str(&root, "method")? {
            Some(m) => m.parse().map_err(|e: String| ctx.err("method", e))?,
            None => MomentMethodChoice::Quad,
        };
        cfg.haar = Some(HaarRequest {
            id,
            method,
            k_max: cfg.policy.k_max,
            samples: ctx.u64(&root, "n")?.unwrap_or(100_000) as usize,
        });
    }
    cfg.traces = ctx.str(&root, "traces")?.map(PathBuf::from);
    cfg.out = ctx.str(&root, "out")?.map(PathBuf::from);

    match cfg.command {
        Command::Count if cfg.curve.is_none() || cfg.p_max.is_none() => {
            Err(ctx.err("command", "`count` needs `curve` and `p_max`"))
        }
        Command::Lefschetz if cfg.lefschetz.is_none() => Err(ctx.err("command", "`lefschetz` needs `space`")),
        Command::HaarMoments if cfg.haar.is_none() => Err(ctx.err("command", "`haar-moments` needs `group`")),
        _ => Ok(cfg),
    }
}

fn parse_space(ctx: &Ctx<'_>, v: &Value) -> Result<PolarizedSpace, ConfigError> {
    let weight = ctx.u64(v, "weight")?.unwrap_or(1) as u32;
    let pairing = match v.get("pairing") {
        Some(Value::String(s)) if s == "standard" => {
            let dim = ctx
                .u64(v, "dim")?
                .ok_or_else(|| ctx.err("pairing", "standard pairing needs `dim`"))?;
            if dim == 0 || dim % 2 == 1 {
                return Err(ctx.err("dim", "standard pairing needs a positive even `dim`"));
            }
            stlab_core::pairing::standard_symplectic_matrix(dim as usize / 2)
        }
        Some(m) => ctx.matrix(m, "pairing")?,
        None => return Err(ctx.err("space", "space needs `pairing`")),
    };
    PolarizedSpace::new(weight, pairing).map_err(|e| ctx.err("pairing", e.to_string()))
}

fn parse_data(ctx: &Ctx<'_>, v: &Value) -> Result<LefschetzData, ConfigError> {
    let space = parse_space(ctx, v.get("space").ok_or_else(|| ctx.err("space", "missing `space`"))?)?;
    let n = space.dim();
    let algebra = match v.get("endomorphisms") {
        Some(gens) => {
            let gens = ctx.matrices(gens, "endomorphisms")?;
            EndAlgebra::from_generators(n, &gens).map_err(|e| ctx.err("endomorphisms", e.to_string()))?
        }
        None => EndAlgebra::scalars(n),
    };
    let group = match v.get("galois") {
        None => GaloisTwistGroup::trivial(algebra.dim()),
        Some(g) => {
            let actions = match g.get("actions") {
                Some(a) => ctx.matrices(a, "actions")?,
                None => return Err(ctx.err("galois", "`galois` needs `actions`")),
            };
            if let Some(d) = g.get("descriptor") {
                let d = ctx.int_list(d, "descriptor")?;
                GaloisTwistGroup::multi_quadratic(&d, actions).map_err(|e| ctx.err("galois", e.to_string()))?
            } else {
                let labels: Vec<String> = g
                    .get("labels")
                    .and_then(Value::as_array)
                    .and_then(|a| a.iter().map(|s| s.as_str().map(String::from)).collect())
                    .ok_or_else(|| ctx.err("galois", "`galois` needs `descriptor` or `labels` with `table`"))?;
                let table: Vec<Vec<usize>> = g
                    .get("table")
                    .and_then(Value::as_array)
                    .and_then(|rows| {
                        rows.iter()
                            .map(|r| r.as_array()?.iter().map(|x| x.as_u64().map(|x| x as usize)).collect())
                            .collect()
                    })
                    .ok_or_else(|| ctx.err("table", "`table` must be a square array of element indices"))?;
                GaloisTwistGroup::from_table(labels, table, actions).map_err(|e| ctx.err("galois", e.to_string()))?
            }
        }
    };
    LefschetzData::new(space, algebra, group).map_err(|e| ctx.err("galois", e.to_string()))
}

fn parse_lefschetz(ctx: &Ctx<'_>, root: &Value) -> Result<LefschetzRequest, ConfigError> {
    let data = parse_data(ctx, root)?;
    let mut composites = Vec::new();
    if let Some(list) = root.get("composites") {
        let list = list
            .as_array()
            .ok_or_else(|| ctx.err("composites", "`composites` must be an array"))?;
        for item in list {
            let spec = if let Some(s) = ctx.u64(item, "power")? {
                if s == 0 {
                    return Err(ctx.err("power", "power must be at least 1"));
                }
                CompositeSpec::Power(s as usize)
            } else if let Some(parts) = item.get("direct_sum") {
                let parts = parts
                    .as_array()
                    .ok_or_else(|| ctx.err("direct_sum", "`direct_sum` must be an array of triples"))?;
                CompositeSpec::DirectSum(parts.iter().map(|p| parse_data(ctx, p)).collect::<Result<_, _>>()?)
            } else if let Some(m) = item.get("mixed") {
                let base_power = ctx.u64(m, "base_power")?.unwrap_or(1) as usize;
                let others = m
                    .get("others")
                    .and_then(Value::as_array)
                    .ok_or_else(|| ctx.err("mixed", "`mixed` needs `others`"))?
                    .iter()
                    .map(|o| {
                        let power = ctx.u64(o, "power")?.unwrap_or(1) as usize;
                        Ok((parse_data(ctx, o)?, power))
                    })
                    .collect::<Result<_, ConfigError>>()?;
                CompositeSpec::Mixed { base_power, others }
            } else {
                return Err(ctx.err("composites", "composite must have `power`, `direct_sum` or `mixed`"));
            };
            composites.push(spec);
        }
    }
    Ok(LefschetzRequest { data, composites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_config_is_valid() {
        let cfg = parse_config(r#"{"command":"count","curve":{"genus":1,"f":[0,1,0,1]},"p_max":100}"#).unwrap();
        assert_eq!(cfg.command, Command::Count);
        assert_eq!(cfg.curve.unwrap().coeffs(), &[0, 1, 0, 1]);
    }

    #[test]
    fn singular_curve_is_rejected_on_its_line() {
        let text = "{\n  \"command\": \"count\",\n  \"curve\": {\"genus\": 1,\n    \"f\": [0, 0, 0, 1]},\n  \"p_max\": 100\n}";
        let err = parse_config(text).unwrap_err();
        assert!(err.message.contains("singular model"), "{err}");
        assert_eq!(err.line, Some(4));
    }

    #[test]
    fn unknown_command() {
        let err = parse_config(r#"{"command":"fly"}"#).unwrap_err();
        assert!(err.to_string().contains("unknown command"));
    }

    #[test]
    fn malformed_json_reports_line() {
        let err = parse_config("{\n\"command\": \"count\",\n oops\n}").unwrap_err();
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn rationals_and_matrices() {
        assert_eq!(parse_rational(&Value::from("-3/6")), Some(BigRational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational(&Value::from(4)), Some(BigRational::from_integer(4.into())));
        assert_eq!(parse_rational(&Value::from("1/0")), None);
        let text = r#"{"command":"lefschetz","space":{"weight":1,"pairing":[0,1,-1,0]},
            "endomorphisms":[[["0","-1"],["1","0"]]],
            "galois":{"descriptor":[-1],"actions":[[[1,0],[0,1]],[[1,0],[0,-1]]]},
            "composites":[{"power":2}]}"#;
        let cfg = parse_config(text).unwrap();
        let req = cfg.lefschetz.unwrap();
        assert_eq!(req.data.algebra.dim(), 2);
        assert_eq!(req.composites.len(), 1);
    }

    #[test]
    fn invalid_structures_are_rejected() {
        let sym = r#"{"command":"lefschetz","space":{"pairing":[[0,1],[1,0]]}}"#;
        assert!(parse_config(sym).is_err());
        let bad_action = r#"{"command":"lefschetz","space":{"pairing":"standard","dim":2},
            "endomorphisms":[[[0,-1],[1,0]]],
            "galois":{"descriptor":[-1],"actions":[[[1,0],[0,1]],[[1,1],[0,-1]]]}}"#;
        assert!(parse_config(bad_action).is_err());
        assert!(parse_config(r#"{"command":"count","curve":{"genus":1,"f":[0,1,0,1]},"p_max":100,"colour":1}"#).is_err());
        assert!(parse_config(r#"{"command":"analyze","curve":{"genus":1,"f":[0,1,0,1]},"p_max":100,
            "descriptor":[-1],"hypothesis":{"s2":"U1"}}"#).is_err());
    }

    #[test]
    fn group_ids() {
        assert_eq!(parse_group_id("NU1/nontrivial").unwrap().component(), Component::Nontrivial);
        assert!(parse_group_id("SU2/nontrivial").is_err());
        assert_eq!(parse_group_id("usp4").unwrap().group(), CompactGroup::USp4);
    }
}
