//! Experiment configuration files.
//!
//! The format is TOML restricted to a flat set of dotted keys, with arms
//! written as inline tagged records:
//!
//! ```toml
//! label = "fig3a"
//! seed = 1
//! horizon = 100000
//! runs = 100
//! arm_labels = ["safe", "risky"]
//! arms = [
//!   {kind = "point", value = 0.0},
//!   {kind = "uniform", lo = -1.0, hi = 1.0},
//! ]
//! policy.variant = "reweighted"
//! epsilon.c = 1.0
//! epsilon.p = 0.49
//! ```
//!
//! Optional keys: `checkpoints`, `interval` (`normal` or `wilson`),
//! `confidence`, `policy.rho`, `epsilon.floor`. Parsing reports every
//! problem it finds, not just the first.

use std::fmt::Write as _;

use toml::{Table, Value};

use crate::distributions::{Law, RewardDistribution};
use crate::error::{Error, Result, Violation};
use crate::harness::{
    log_checkpoints, ExperimentConfig, IntervalMethod, DEFAULT_CONFIDENCE, DEFAULT_HORIZON,
    DEFAULT_RUNS,
};
use crate::policies::{PolicySpec, Variant};
use crate::schedules::Schedule;

const TOP_LEVEL: &[&str] = &[
    "label",
    "seed",
    "horizon",
    "runs",
    "checkpoints",
    "interval",
    "confidence",
    "arm_labels",
    "arms",
    "policy",
    "epsilon",
];
const POLICY_KEYS: &[&str] = &["variant", "rho"];
const EPSILON_KEYS: &[&str] = &["c", "p", "floor"];

struct Collector<'t> {
    text: &'t str,
    violations: Vec<Violation>,
}

impl<'t> Collector<'t> {
    fn push(&mut self, key: &str, message: impl Into<String>) {
        let mut v = Violation::new(key, message);
        v.line = locate_line(self.text, key);
        self.violations.push(v);
    }

    fn float(&mut self, key: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.push(key, format!("expected a number, got {}", other.type_str()));
                None
            }
        }
    }

    fn uint(&mut self, key: &str, v: &Value) -> Option<u64> {
        match v {
            Value::Integer(i) if *i >= 0 => Some(*i as u64),
            Value::Integer(i) => {
                self.push(key, format!("expected a non-negative integer, got {i}"));
                None
            }
            Value::Float(f) if f.fract() == 0.0 && *f >= 0.0 && *f < 9.007_199_254_740_992e15 => {
                Some(*f as u64)
            }
            other => {
                self.push(key, format!("expected a non-negative integer, got {other}"));
                None
            }
        }
    }

    fn string<'v>(&mut self, key: &str, v: &'v Value) -> Option<&'v str> {
        match v {
            Value::String(s) => Some(s),
            other => {
                self.push(key, format!("expected a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn table<'v>(&mut self, key: &str, v: &'v Value, allowed: &[&str]) -> Option<&'v Table> {
        match v {
            Value::Table(t) => {
                for k in t.keys() {
                    if !allowed.contains(&k.as_str()) {
                        self.push(&format!("{key}.{k}"), "unknown key");
                    }
                }
                Some(t)
            }
            other => {
                self.push(key, format!("expected a table, got {}", other.type_str()));
                None
            }
        }
    }

    fn distribution(&mut self, key: &str, v: &Value) -> Option<RewardDistribution> {
        let Value::Table(rec) = v else {
            self.push(key, format!("expected an inline record, got {}", v.type_str()));
            return None;
        };
        let Some(kind) = rec.get("kind") else {
            self.push(key, "missing `kind`");
            return None;
        };
        let kind = self.string(&format!("{key}.kind"), kind)?;
        let fields: &[&str] = match kind {
            "point" => &["value"],
            "uniform" => &["lo", "hi"],
            "exp" => &["mean", "shift"],
            "normal" => &["mean", "sd"],
            "rademacher" => &[],
            "sum" => &["parts"],
            other => {
                self.push(
                    &format!("{key}.kind"),
                    format!("unknown distribution kind `{other}` (expected point, uniform, exp, normal, rademacher or sum)"),
                );
                return None;
            }
        };
        for k in rec.keys() {
            if k != "kind" && !fields.contains(&k.as_str()) {
                self.push(&format!("{key}.{k}"), format!("unknown field for `{kind}`"));
            }
        }
        let num = |this: &mut Self, name: &str, default: Option<f64>| -> Option<f64> {
            match rec.get(name) {
                Some(v) => this.float(&format!("{key}.{name}"), v),
                None => {
                    if default.is_none() {
                        this.push(key, format!("`{kind}` requires `{name}`"));
                    }
                    default
                }
            }
        };
        let law = match kind {
            "point" => Law::PointMass {
                value: num(self, "value", None)?,
            },
            "uniform" => {
                let lo = num(self, "lo", None);
                let hi = num(self, "hi", None);
                Law::Uniform { lo: lo?, hi: hi? }
            }
            "exp" => {
                let mean = num(self, "mean", None);
                let shift = num(self, "shift", Some(0.0));
                Law::Exponential {
                    mean: mean?,
                    shift: shift?,
                }
            }
            "normal" => {
                let mean = num(self, "mean", Some(0.0));
                let sd = num(self, "sd", None);
                Law::Normal {
                    mean: mean?,
                    sd: sd?,
                }
            }
            "rademacher" => Law::Rademacher,
            _ => {
                let Some(parts) = rec.get("parts") else {
                    self.push(key, "`sum` requires `parts`");
                    return None;
                };
                let Value::Array(parts) = parts else {
                    self.push(&format!("{key}.parts"), "expected an array of records");
                    return None;
                };
                let parsed: Vec<_> = parts
                    .iter()
                    .enumerate()
                    .map(|(i, p)| self.distribution(&format!("{key}.parts[{i}]"), p))
                    .collect();
                Law::Sum {
                    parts: parsed.into_iter().collect::<Option<Vec<_>>>()?,
                }
            }
        };
        match RewardDistribution::new(law) {
            Ok(d) => Some(d),
            Err(e) => {
                self.push(key, e.to_string());
                None
            }
        }
    }
}

/// Best-effort 1-based line of a dotted key in `text`.
fn locate_line(text: &str, key: &str) -> Option<usize> {
    let base = key.split('[').next().unwrap_or(key);
    let mut segments = base.split('.');
    let head = segments.next()?;
    let tail: Vec<&str> = segments.collect();
    let starts_key = |line: &str, k: &str| {
        let line = line.trim_start();
        line.strip_prefix(k)
            .map(|rest| rest.trim_start().starts_with('=') || rest.starts_with('.'))
            .unwrap_or(false)
    };
    let lines: Vec<&str> = text.lines().collect();
    // Dotted form: `epsilon.p = ...`
    if !tail.is_empty() {
        let dotted = base;
        if let Some(i) = lines.iter().position(|l| starts_key(l, dotted)) {
            return Some(i + 1);
        }
        // Table form: `[epsilon]` then `p = ...`
        let header = format!("[{head}]");
        if let Some(h) = lines.iter().position(|l| l.trim() == header) {
            for (i, l) in lines.iter().enumerate().skip(h + 1) {
                if l.trim_start().starts_with('[') {
                    break;
                }
                if starts_key(l, tail[0]) {
                    return Some(i + 1);
                }
            }
            return Some(h + 1);
        }
    }
    lines
        .iter()
        .position(|l| starts_key(l, head))
        .map(|i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates an experiment config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map(|s| line_of_offset(text, s.start));
        Error::InvalidConfig(vec![Violation {
            key: "<syntax>".into(),
            line,
            message: e.message().trim().to_string(),
        }])
    })?;
    let mut c = Collector {
        text,
        violations: Vec::new(),
    };
    for k in table.keys() {
        if !TOP_LEVEL.contains(&k.as_str()) {
            c.push(k, "unknown key");
        }
    }

    let label = match table.get("label") {
        Some(v) => c.string("label", v).unwrap_or_default().to_string(),
        None => "experiment".to_string(),
    };
    let master_seed = match table.get("seed") {
        None => 0,
        Some(Value::String(s)) => s.parse::<u64>().unwrap_or_else(|_| {
            c.push("seed", format!("malformed seed `{s}`"));
            0
        }),
        Some(v) => c.uint("seed", v).unwrap_or(0),
    };
    let horizon = match table.get("horizon") {
        None => Some(DEFAULT_HORIZON),
        Some(v) => c.uint("horizon", v),
    };
    let runs = match table.get("runs") {
        None => Some(DEFAULT_RUNS),
        Some(v) => c.uint("runs", v),
    };
    let confidence = match table.get("confidence") {
        None => Some(DEFAULT_CONFIDENCE),
        Some(v) => c.float("confidence", v),
    };
    // Range checks that need no other key, so they surface alongside type errors.
    if horizon == Some(0) {
        c.push("horizon", "horizon must be ≥ 1");
    }
    if runs == Some(0) {
        c.push("runs", "runs must be ≥ 1");
    }
    if confidence.is_some_and(|x| !(x > 0.0 && x < 1.0)) {
        c.push("confidence", "confidence level must lie in (0, 1)");
    }
    let interval = match table.get("interval").map(|v| (v, c.string("interval", v))) {
        None => IntervalMethod::Normal,
        Some((_, Some("normal"))) => IntervalMethod::Normal,
        Some((_, Some("wilson"))) => IntervalMethod::Wilson,
        Some((_, Some(other))) => {
            c.push("interval", format!("unknown interval method `{other}`"));
            IntervalMethod::Normal
        }
        Some((_, None)) => IntervalMethod::Normal,
    };

    let arms: Option<Vec<RewardDistribution>> = match table.get("arms") {
        None => {
            c.push("arms", "missing required key");
            None
        }
        Some(Value::Array(items)) => {
            let parsed: Vec<_> = items
                .iter()
                .enumerate()
                .map(|(i, v)| c.distribution(&format!("arms[{i}]"), v))
                .collect();
            parsed.into_iter().collect()
        }
        Some(other) => {
            c.push("arms", format!("expected an array, got {}", other.type_str()));
            None
        }
    };

    let arm_labels: Option<Vec<String>> = match table.get("arm_labels") {
        None => None,
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| c.string(&format!("arm_labels[{i}]"), v).map(str::to_string))
            .collect(),
        Some(other) => {
            c.push("arm_labels", format!("expected an array, got {}", other.type_str()));
            None
        }
    };

    let checkpoints: Option<Vec<u64>> = match table.get("checkpoints") {
        None => None,
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| c.uint(&format!("checkpoints[{i}]"), v))
            .collect(),
        Some(other) => {
            c.push("checkpoints", format!("expected an array, got {}", other.type_str()));
            None
        }
    };

    let (mut variant, mut rho) = (None, 0.0);
    match table.get("policy") {
        None => c.push("policy.variant", "missing required key"),
        Some(v) => {
            if let Some(t) = c.table("policy", v, POLICY_KEYS) {
                match t.get("variant") {
                    None => c.push("policy.variant", "missing required key"),
                    Some(v) => {
                        if let Some(s) = c.string("policy.variant", v) {
                            match s.parse::<Variant>() {
                                Ok(x) => variant = Some(x),
                                Err(e) => c.push("policy.variant", e.to_string()),
                            }
                        }
                    }
                }
                if let Some(v) = t.get("rho") {
                    rho = c.float("policy.rho", v).unwrap_or(f64::NAN);
                }
            }
        }
    }

    let (mut ec, mut ep, mut ef) = (1.0, 1.0, 0.0);
    if let Some(v) = table.get("epsilon") {
        if let Some(t) = c.table("epsilon", v, EPSILON_KEYS) {
            if let Some(v) = t.get("c") {
                ec = c.float("epsilon.c", v).unwrap_or(f64::NAN);
            }
            if let Some(v) = t.get("p") {
                ep = c.float("epsilon.p", v).unwrap_or(f64::NAN);
            }
            if let Some(v) = t.get("floor") {
                ef = c.float("epsilon.floor", v).unwrap_or(f64::NAN);
            }
        }
    }
    let schedule = {
        let mut ok = true;
        if !(ec.is_finite() && ec > 0.0) {
            c.push("epsilon.c", "coefficient must be > 0");
            ok = false;
        }
        if ep.is_nan() || !(ep >= 0.0) {
            c.push("epsilon.p", "exponent must be ≥ 0");
            ok = false;
        }
        if !(0.0..=1.0).contains(&ef) {
            c.push("epsilon.floor", "floor must lie in [0, 1]");
            ok = false;
        }
        if ok {
            Schedule::new(ec, ep, ef).ok()
        } else {
            None
        }
    };

    let policy = match (variant, schedule) {
        (Some(variant), Some(schedule)) => match PolicySpec::new(variant, rho, schedule) {
            Ok(p) => Some(p),
            Err(e) => {
                c.push("policy.rho", e.to_string());
                None
            }
        },
        _ => None,
    };

    let (Some(arms), Some(policy), Some(horizon), Some(runs), Some(confidence)) =
        (arms, policy, horizon, runs, confidence)
    else {
        return Err(Error::InvalidConfig(c.violations));
    };
    let mut cfg = ExperimentConfig::new(label, arms, policy);
    cfg.horizon = horizon;
    cfg.runs = runs;
    cfg.master_seed = master_seed;
    cfg.interval = interval;
    cfg.confidence = confidence;
    cfg.checkpoints = checkpoints.unwrap_or_else(|| log_checkpoints(horizon));
    if let Some(labels) = arm_labels {
        cfg.arm_labels = labels;
    }
    for mut v in cfg.violations() {
        if !c.violations.iter().any(|w| w.key == v.key && w.message == v.message) {
            v.line = locate_line(text, &v.key);
            c.violations.push(v);
        }
    }
    if c.violations.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::InvalidConfig(c.violations))
    }
}

/// Parses a single inline distribution record such as
/// `{kind = "uniform", lo = -1.0, hi = 1.0}`.
pub fn parse_distribution(text: &str) -> Result<RewardDistribution> {
    let wrapped = format!("d = {text}");
    let table: Table = wrapped.parse().map_err(|e: toml::de::Error| {
        Error::InvalidDistribution(format!("malformed record `{text}`: {}", e.message().trim()))
    })?;
    let mut c = Collector {
        text: &wrapped,
        violations: Vec::new(),
    };
    match c.distribution("increments", &table["d"]) {
        Some(d) if c.violations.is_empty() => Ok(d),
        _ => Err(Error::InvalidConfig(c.violations)),
    }
}

fn fmt_float(x: f64) -> String {
    // `{:?}` always keeps a decimal point or exponent, which TOML needs.
    format!("{x:?}")
}

/// Inline record for a distribution.
pub fn distribution_record(d: &RewardDistribution) -> String {
    match d.law() {
        Law::PointMass { value } => format!("{{kind = \"point\", value = {}}}", fmt_float(*value)),
        Law::Uniform { lo, hi } => format!(
            "{{kind = \"uniform\", lo = {}, hi = {}}}",
            fmt_float(*lo),
            fmt_float(*hi)
        ),
        Law::Exponential { mean, shift } => format!(
            "{{kind = \"exp\", mean = {}, shift = {}}}",
            fmt_float(*mean),
            fmt_float(*shift)
        ),
        Law::Normal { mean, sd } => format!(
            "{{kind = \"normal\", mean = {}, sd = {}}}",
            fmt_float(*mean),
            fmt_float(*sd)
        ),
        Law::Rademacher => "{kind = \"rademacher\"}".to_string(),
        Law::Sum { parts } => {
            let inner: Vec<String> = parts.iter().map(distribution_record).collect();
            format!("{{kind = \"sum\", parts = [{}]}}", inner.join(", "))
        }
    }
}

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

/// Serializes a config in the same format [`parse_config`] reads.
pub fn emit_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "label = {}", quote(&cfg.label));
    if cfg.master_seed <= i64::MAX as u64 {
        let _ = writeln!(out, "seed = {}", cfg.master_seed);
    } else {
        let _ = writeln!(out, "seed = \"{}\"", cfg.master_seed);
    }
    let _ = writeln!(out, "horizon = {}", cfg.horizon);
    let _ = writeln!(out, "runs = {}", cfg.runs);
    if cfg.checkpoints != log_checkpoints(cfg.horizon) {
        let cps: Vec<String> = cfg.checkpoints.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "checkpoints = [{}]", cps.join(", "));
    }
    if cfg.interval != IntervalMethod::Normal {
        let _ = writeln!(out, "interval = \"{}\"", cfg.interval.as_str());
    }
    if cfg.confidence != DEFAULT_CONFIDENCE {
        let _ = writeln!(out, "confidence = {}", fmt_float(cfg.confidence));
    }
    let labels: Vec<String> = cfg.arm_labels.iter().map(|l| quote(l)).collect();
    let _ = writeln!(out, "arm_labels = [{}]", labels.join(", "));
    out.push_str("arms = [\n");
    for a in &cfg.arms {
        let _ = writeln!(out, "  {},", distribution_record(a));
    }
    out.push_str("]\n");
    let _ = writeln!(out, "policy.variant = \"{}\"", cfg.policy.variant);
    let _ = writeln!(out, "policy.rho = {}", fmt_float(cfg.policy.rho));
    let s = &cfg.policy.schedule;
    let _ = writeln!(out, "epsilon.c = {}", fmt_float(s.coefficient()));
    let _ = writeln!(out, "epsilon.p = {}", fmt_float(s.exponent()));
    let _ = writeln!(out, "epsilon.floor = {}", fmt_float(s.floor()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"
arms = [{kind = "point", value = 0.0}, {kind = "uniform", lo = -1.0, hi = 1.0}]
policy.variant = "plain"
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.runs, 100);
        assert_eq!(cfg.horizon, 100_000);
        assert_eq!(cfg.checkpoints, log_checkpoints(100_000));
        assert_eq!(cfg.policy.variant, Variant::Plain);
        assert_eq!(cfg.policy.schedule.epsilon(4), 0.25);
        assert_eq!(cfg.arm_labels, vec!["1{0}", "U[-1, 1]"]);
    }

    #[test]
    fn negative_exponent_rejected() {
        let text = format!("{MINIMAL}epsilon.p = -1\n");
        let err = parse_config(&text).unwrap_err();
        let v = err.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].key, "epsilon.p");
        assert_eq!(v[0].line, Some(4));
        assert!(v[0].message.contains("exponent must be ≥ 0"));
    }

    #[test]
    fn reports_all_violations() {
        let text = r#"
runs = 0
bogus = 3
horizon = "long"
arms = [{kind = "uniform", lo = 1.0, hi = -1.0}, {kind = "cauchy"}]

[policy]
variant = "optimistic"
colour = "red"

[epsilon]
p = -2
"#;
        let err = parse_config(text).unwrap_err();
        let keys: Vec<&str> = err.violations().iter().map(|v| v.key.as_str()).collect();
        for k in ["bogus", "horizon", "arms[0]", "arms[1].kind", "policy.colour", "epsilon.p"] {
            assert!(keys.contains(&k), "missing {k} in {keys:?}");
        }
        let colour = err.violations().iter().find(|v| v.key == "policy.colour").unwrap();
        assert_eq!(colour.line, Some(9));
    }

    #[test]
    fn structural_checks_after_parsing() {
        let text = format!("{MINIMAL}runs = 0\ncheckpoints = [10, 5]\n");
        let err = parse_config(&text).unwrap_err();
        let keys: Vec<&str> = err.violations().iter().map(|v| v.key.as_str()).collect();
        assert!(keys.contains(&"runs") && keys.contains(&"checkpoints"), "{keys:?}");
    }

    #[test]
    fn optimistic_requires_rho() {
        let text = MINIMAL.replace("plain", "optimistic");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.violations()[0].key, "policy.rho");
        assert!(parse_config(&format!("{text}policy.rho = 2\n")).is_ok());
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = parse_config("arms = [\n  {kind = \n").unwrap_err();
        assert_eq!(err.violations()[0].key, "<syntax>");
        assert!(err.violations()[0].line.is_some());
    }

    #[test]
    fn malformed_number() {
        let text = MINIMAL.replace("value = 0.0", "value = \"zero\"");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.violations()[0].key, "arms[0].value");
    }

    #[test]
    fn sum_records_and_inline_parse() {
        let d = parse_distribution(
            r#"{kind = "sum", parts = [{kind = "exp", mean = 2.0}, {kind = "normal", sd = 1.0}]}"#,
        )
        .unwrap();
        assert_eq!(d.mean(), 2.0);
        assert_eq!(parse_distribution(r#"{kind="rademacher"}"#).unwrap().variance(), 1.0);
        assert!(parse_distribution(r#"{kind="exp", mean=-1}"#).is_err());
        assert!(parse_distribution("not a record").is_err());
    }

    fn dist_strategy() -> impl Strategy<Value = RewardDistribution> {
        let leaf = prop_oneof![
            (-5.0f64..5.0).prop_map(|v| RewardDistribution::point(v).unwrap()),
            (-5.0f64..5.0, 0.01f64..5.0).prop_map(|(lo, w)| RewardDistribution::uniform(lo, lo + w).unwrap()),
            (0.01f64..20.0, -3.0f64..3.0).prop_map(|(m, s)| RewardDistribution::exponential(m, s).unwrap()),
            (-3.0f64..3.0, 0.0f64..3.0).prop_map(|(m, s)| RewardDistribution::normal(m, s).unwrap()),
            Just(RewardDistribution::rademacher()),
        ];
        leaf.prop_recursive(2, 6, 3, |inner| {
            prop::collection::vec(inner, 1..3).prop_map(|p| RewardDistribution::sum(p).unwrap())
        })
    }

    proptest! {
        #[test]
        fn emit_then_parse_round_trips(
            arms in prop::collection::vec(dist_strategy(), 2..5),
            variant in prop::sample::select(Variant::ALL.to_vec()),
            rho in 0.01f64..5.0,
            c in 0.01f64..3.0,
            p in 0.0f64..2.0,
            horizon in 1u64..1_000_000,
            runs in 1u64..500,
            seed: u64,
            wilson: bool,
        ) {
            let schedule = Schedule::new(c, p, 0.0).unwrap();
            let policy = PolicySpec::new(variant, rho, schedule).unwrap();
            let mut cfg = ExperimentConfig::new("round \"trip\"", arms, policy)
                .with_horizon(horizon)
                .with_runs(runs)
                .with_seed(seed);
            if wilson {
                cfg.interval = IntervalMethod::Wilson;
                cfg.checkpoints = vec![horizon];
            }
            let text = emit_config(&cfg);
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
