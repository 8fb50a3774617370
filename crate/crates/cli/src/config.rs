//! Flat key-value config with section headers. A config fully determines
//! a rebuild; functions are never serialized.
//!
//! ```text
//! [set]
//! domain = 0 1
//! kind = diagonal            # or: graph 0,1 1,0   or: dyadic 3
//!
//! [function]
//! source = gallery pow_limit # or: gallery arctan_step 0.5
//!                            # or: const 0.5
//!                            # or: piecewise 0,0 0.5,1 1,0.25
//!
//! [build]
//! case = x1                  # x1 | y1 | e | pseudocompact
//! tol = 1e-6
//! initial_terms = 15
//! max_terms = 60
//! n0_cap = 100000
//! cauchy_max_stages = 4096
//! seed = 42
//! ```

use sepcont::engine::{CaseTag, Policy};
use std::fmt;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "config line {}: {}", self.line, self.message)
        } else {
            write!(f, "config: {}", self.message)
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetDescription {
    Diagonal,
    Graph(Vec<(f64, f64)>),
    Dyadic(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSource {
    Gallery { name: String, arg: Option<f64> },
    Const(f64),
    Piecewise(Vec<(f64, f64)>),
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub domain: (f64, f64),
    pub set: SetDescription,
    pub function: FunctionSource,
    pub case: CaseTag,
    pub tol: f64,
    pub policy: Policy,
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            domain: (0.0, 1.0),
            set: SetDescription::Diagonal,
            function: FunctionSource::Gallery {
                name: "pow_limit".to_string(),
                arg: None,
            },
            case: CaseTag::FunctionallyClosedX1,
            tol: 1e-6,
            policy: Policy::default(),
            seed: 0,
        }
    }
}

fn parse_f64(line: usize, s: &str) -> Result<f64, ConfigError> {
    s.parse::<f64>()
        .map_err(|_| err(line, format!("expected a number, got `{s}`")))
}

fn parse_pairs(line: usize, parts: &[&str]) -> Result<Vec<(f64, f64)>, ConfigError> {
    if parts.is_empty() {
        return Err(err(line, "expected coordinate pairs `x,y`"));
    }
    parts
        .iter()
        .map(|p| {
            let (x, y) = p
                .split_once(',')
                .ok_or_else(|| err(line, format!("expected `x,y`, got `{p}`")))?;
            Ok((parse_f64(line, x.trim())?, parse_f64(line, y.trim())?))
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<BuildConfig, ConfigError> {
    let mut cfg = BuildConfig::default();
    let mut section = String::new();
    let mut saw_source = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line_no, "unterminated section header"))?;
            match name {
                "set" | "function" | "build" => section = name.to_string(),
                other => return Err(err(line_no, format!("unknown section `[{other}]`"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let words: Vec<&str> = value.split_whitespace().collect();
        match (section.as_str(), key) {
            ("set", "domain") => {
                if words.len() != 2 {
                    return Err(err(line_no, "domain takes two numbers `lo hi`"));
                }
                let lo = parse_f64(line_no, words[0])?;
                let hi = parse_f64(line_no, words[1])?;
                if lo.is_nan() || hi.is_nan() || lo >= hi {
                    return Err(err(line_no, "domain must satisfy lo < hi"));
                }
                cfg.domain = (lo, hi);
            }
            ("set", "kind") => {
                cfg.set = match words.first().copied() {
                    Some("diagonal") => SetDescription::Diagonal,
                    Some("graph") => SetDescription::Graph(parse_pairs(line_no, &words[1..])?),
                    Some("dyadic") => {
                        let depth = words
                            .get(1)
                            .and_then(|w| w.parse::<u32>().ok())
                            .ok_or_else(|| err(line_no, "dyadic takes a depth, e.g. `dyadic 3`"))?;
                        SetDescription::Dyadic(depth)
                    }
                    _ => {
                        return Err(err(
                            line_no,
                            "kind must be `diagonal`, `graph <pairs>` or `dyadic <depth>`",
                        ))
                    }
                };
            }
            ("function", "source") => {
                saw_source = true;
                cfg.function = match words.first().copied() {
                    Some("gallery") => {
                        let name = words
                            .get(1)
                            .ok_or_else(|| err(line_no, "gallery takes an entry name"))?;
                        let arg = match words.get(2) {
                            Some(w) => Some(parse_f64(line_no, w)?),
                            None => None,
                        };
                        FunctionSource::Gallery {
                            name: name.to_string(),
                            arg,
                        }
                    }
                    Some("const") => {
                        let c = words
                            .get(1)
                            .ok_or_else(|| err(line_no, "const takes a value"))?;
                        FunctionSource::Const(parse_f64(line_no, c)?)
                    }
                    Some("piecewise") => {
                        FunctionSource::Piecewise(parse_pairs(line_no, &words[1..])?)
                    }
                    _ => {
                        return Err(err(
                            line_no,
                            "source must be `gallery <name> [arg]`, `const <c>` or `piecewise <pairs>`",
                        ))
                    }
                };
            }
            ("build", "case") => {
                cfg.case = match value {
                    "x1" => CaseTag::FunctionallyClosedX1,
                    "y1" => CaseTag::FunctionallyClosedY1,
                    "e" => CaseTag::FunctionallyClosedE,
                    "pseudocompact" => CaseTag::PseudocompactE,
                    other => {
                        return Err(err(
                            line_no,
                            format!("unknown case `{other}` (x1 | y1 | e | pseudocompact)"),
                        ))
                    }
                };
            }
            ("build", "tol") => {
                let tol = parse_f64(line_no, value)?;
                if tol.is_nan() || tol <= 0.0 {
                    return Err(err(line_no, "tol must be positive"));
                }
                cfg.tol = tol;
            }
            ("build", "initial_terms") => {
                cfg.policy.initial_terms = value
                    .parse()
                    .map_err(|_| err(line_no, "initial_terms must be a positive integer"))?;
            }
            ("build", "max_terms") => {
                cfg.policy.max_terms = value
                    .parse()
                    .map_err(|_| err(line_no, "max_terms must be a positive integer"))?;
            }
            ("build", "n0_cap") => {
                cfg.policy.n0_cap = value
                    .parse()
                    .map_err(|_| err(line_no, "n0_cap must be a positive integer"))?;
            }
            ("build", "cauchy_max_stages") => {
                cfg.policy.cauchy_max_stages = value
                    .parse()
                    .map_err(|_| err(line_no, "cauchy_max_stages must be a positive integer"))?;
            }
            ("build", "seed") => {
                cfg.seed = value
                    .parse()
                    .map_err(|_| err(line_no, "seed must be a nonnegative integer"))?;
            }
            ("", key) => return Err(err(line_no, format!("key `{key}` outside any section"))),
            (section, key) => {
                return Err(err(
                    line_no,
                    format!("unknown key `{key}` in section `[{section}]`"),
                ))
            }
        }
    }
    if !saw_source {
        return Err(err(0, "missing `[function] source = ...`"));
    }
    if cfg.policy.initial_terms == 0 || cfg.policy.max_terms < cfg.policy.initial_terms {
        return Err(err(0, "need 0 < initial_terms <= max_terms"));
    }
    Ok(cfg)
}

/// Short human-readable description of the configured set.
pub fn describe_set(cfg: &BuildConfig) -> String {
    match &cfg.set {
        SetDescription::Diagonal => {
            format!("diagonal on [{}, {}]", cfg.domain.0, cfg.domain.1)
        }
        SetDescription::Graph(bps) => {
            let pts: Vec<String> = bps.iter().map(|(x, y)| format!("({x}, {y})")).collect();
            format!("graph through {}", pts.join(" "))
        }
        SetDescription::Dyadic(depth) => format!("dyadic family, depth {depth}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo
[set]
domain = 0 1
kind = diagonal

[function]
source = gallery pow_limit

[build]
case = x1
tol = 1e-6
seed = 42
";

    #[test]
    fn parses_a_full_config() {
        let cfg = parse_config(SAMPLE).unwrap();
        assert_eq!(cfg.domain, (0.0, 1.0));
        assert_eq!(cfg.set, SetDescription::Diagonal);
        assert_eq!(cfg.case, CaseTag::FunctionallyClosedX1);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn parses_graph_and_piecewise() {
        let text = "\
[set]
kind = graph 0,1 1,0
[function]
source = piecewise 0,0 0.5,1 1,0.25
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.set, SetDescription::Graph(vec![(0.0, 1.0), (1.0, 0.0)]));
        assert_eq!(
            cfg.function,
            FunctionSource::Piecewise(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.25)])
        );
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(parse_config("[nope]\n").is_err());
        assert!(parse_config("[set]\nwhat = 3\n[function]\nsource = const 1\n").is_err());
        assert!(parse_config("kind = diagonal\n").is_err());
    }

    #[test]
    fn requires_a_function_source() {
        assert!(parse_config("[set]\nkind = diagonal\n").is_err());
    }
}
