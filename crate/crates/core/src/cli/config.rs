//! Run configuration assembled from an optional key=value file and flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::potentials::{builtin_shape, expression_shape, load_table, PotentialShape};
use crate::quadrature::Resolution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Md,
    Csv,
    Json,
}

impl Format {
    fn parse(text: &str) -> Result<Self> {
        match text {
            "md" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format '{other}' (md, csv, json)"))),
        }
    }
}

/// A method family selectable with `--methods`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodChoice {
    Trace,
    Glaser,
    Hoelder,
    Sufficient,
    ExactEigen,
    ExactShooting,
    ClosedForm,
}

impl MethodChoice {
    pub const DEFAULT: [MethodChoice; 5] = [
        MethodChoice::Trace,
        MethodChoice::Glaser,
        MethodChoice::Hoelder,
        MethodChoice::Sufficient,
        MethodChoice::ExactEigen,
    ];

    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text {
            "trace" | "trace_n" => MethodChoice::Trace,
            "glaser" => MethodChoice::Glaser,
            "hoelder" | "holder" => MethodChoice::Hoelder,
            "sufficient" => MethodChoice::Sufficient,
            "exact" | "eigen" | "exact_eigen" => MethodChoice::ExactEigen,
            "shooting" | "exact_shooting" => MethodChoice::ExactShooting,
            "closed_form" => MethodChoice::ClosedForm,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown method '{other}' (trace, glaser, hoelder, sufficient, exact, shooting, closed_form)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSource {
    Builtin { name: String, params: Vec<(String, f64)> },
    Expression { text: String, params: Vec<(String, f64)> },
    File(PathBuf),
}

impl PotentialSource {
    pub fn build(&self) -> Result<PotentialShape> {
        match self {
            PotentialSource::Builtin { name, params } => {
                let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                builtin_shape(name, &refs)
            }
            PotentialSource::Expression { text, params } => {
                let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                expression_shape(text, &refs)
            }
            PotentialSource::File(path) => load_table(path),
        }
    }
}

impl fmt::Display for PotentialSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSource::Builtin { name, .. } => write!(f, "{name}"),
            PotentialSource::Expression { text, .. } => write!(f, "{text}"),
            PotentialSource::File(path) => write!(f, "{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Option<PotentialSource>,
    pub ells: Vec<u32>,
    pub ns: Vec<usize>,
    pub methods: Vec<MethodChoice>,
    pub resolution: Resolution,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub keep_going: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: None,
            ells: vec![0],
            ns: vec![1, 2, 3, 4],
            methods: MethodChoice::DEFAULT.to_vec(),
            resolution: Resolution::default(),
            format: Format::Md,
            output: None,
            keep_going: false,
        }
    }
}

/// Every key accepted in a config file; each mirrors the flag of the same
/// name.
pub const KEYS: [&str; 14] = [
    "builtin",
    "param",
    "potential-expr",
    "potential-file",
    "ell",
    "n",
    "methods",
    "panels",
    "points-per-panel",
    "tail-eps",
    "format",
    "output",
    "keep-going",
    "config",
];

/// Raw settings: scalar keys keep their last value, `param` accumulates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub values: BTreeMap<String, String>,
    pub params: Vec<String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut out = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidParameter(format!(
                    "config line {}: expected key = value",
                    lineno + 1
                )));
            };
            let key = key.trim().replace('_', "-");
            let value = value.trim().to_string();
            if !KEYS.contains(&key.as_str()) || key == "config" {
                return Err(Error::InvalidParameter(format!(
                    "config line {}: unknown key '{key}'",
                    lineno + 1
                )));
            }
            if key == "param" {
                out.params.push(value);
            } else {
                out.values.insert(key, value);
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_file(&text)
    }

    /// `self` overridden by `flags`; flag params replace file params.
    pub fn overridden_by(mut self, flags: Settings) -> Settings {
        self.values.extend(flags.values);
        if !flags.params.is_empty() {
            self.params = flags.params;
        }
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn into_config(self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        let params = self.params.iter().map(|p| parse_param(p)).collect::<Result<Vec<_>>>()?;
        let sources = [
            self.get("builtin").map(|name| PotentialSource::Builtin {
                name: name.to_string(),
                params: params.clone(),
            }),
            self.get("potential-expr").map(|text| PotentialSource::Expression {
                text: text.to_string(),
                params: params.clone(),
            }),
            self.get("potential-file").map(|p| PotentialSource::File(PathBuf::from(p))),
        ];
        let mut given = sources.into_iter().flatten();
        config.source = given.next();
        if given.next().is_some() {
            return Err(Error::InvalidParameter(
                "give exactly one of --builtin, --potential-expr, --potential-file".into(),
            ));
        }
        if matches!(config.source, Some(PotentialSource::File(_))) && !params.is_empty() {
            return Err(Error::InvalidParameter("--param does not apply to tabulated potentials".into()));
        }
        if let Some(list) = self.get("ell") {
            config.ells = parse_list(list, "ell")?;
        }
        if let Some(list) = self.get("n") {
            config.ns = parse_list::<usize>(list, "n")?;
            if config.ns.iter().any(|&n| n == 0 || n > crate::kernel::MAX_TRACE_POWER) {
                return Err(Error::InvalidParameter(format!(
                    "--n entries must lie in 1..={}",
                    crate::kernel::MAX_TRACE_POWER
                )));
            }
        }
        if let Some(list) = self.get("methods") {
            let mut methods = Vec::new();
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let m = MethodChoice::parse(item)?;
                if !methods.contains(&m) {
                    methods.push(m);
                }
            }
            config.methods = methods;
        }
        if config.methods.is_empty() {
            return Err(Error::InvalidParameter("method set is empty".into()));
        }
        if config.ns.is_empty() && config.methods.contains(&MethodChoice::Trace) {
            return Err(Error::InvalidParameter("--n is empty but trace limits were requested".into()));
        }
        if let Some(v) = self.get("panels") {
            config.resolution.panels = parse_scalar(v, "panels")?;
        }
        if let Some(v) = self.get("points-per-panel") {
            config.resolution.points_per_panel = parse_scalar(v, "points-per-panel")?;
        }
        if let Some(v) = self.get("tail-eps") {
            config.resolution.tail_eps = parse_scalar(v, "tail-eps")?;
        }
        config.resolution.validate()?;
        if let Some(v) = self.get("format") {
            config.format = Format::parse(v)?;
        }
        config.output = self.get("output").map(PathBuf::from);
        if let Some(v) = self.get("keep-going") {
            config.keep_going = match v {
                "true" | "yes" | "1" | "" => true,
                "false" | "no" | "0" => false,
                other => return Err(Error::InvalidParameter(format!("keep-going = '{other}'"))),
            };
        }
        Ok(config)
    }
}

fn parse_param(text: &str) -> Result<(String, f64)> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("--param '{text}' is not k=v")))?;
    Ok((k.trim().to_string(), parse_scalar(v.trim(), k.trim())?))
}

fn parse_scalar<T: std::str::FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{what}: cannot parse '{text}'")))
}

/// Comma-separated values, each either a number or an inclusive range `a-b`.
pub fn parse_list<T>(text: &str, what: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + Copy + PartialEq + TryFrom<u64>,
{
    let mut out: Vec<T> = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) => {
                let a: u64 = parse_scalar(a, what)?;
                let b: u64 = parse_scalar(b, what)?;
                if a > b {
                    return Err(Error::InvalidParameter(format!("{what}: empty range '{item}'")));
                }
                for k in a..=b {
                    let v = T::try_from(k).map_err(|_| Error::InvalidParameter(format!("{what}: {k}")))?;
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            None => {
                let v: T = parse_scalar(item, what)?;
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(format!("{what}: empty list")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Settings::parse_file("# run\nbuiltin = exponential\nell = 0-2\nparam=a=1\nformat=csv\n").unwrap();
        let mut flags = Settings::default();
        flags.values.insert("ell".into(), "3,1".into());
        let merged = file.overridden_by(flags);
        let cfg = merged.clone().into_config();
        // the exponential takes no parameters
        assert!(cfg.is_ok());
        let cfg = cfg.unwrap();
        assert_eq!(cfg.ells, vec![3, 1]);
        assert_eq!(cfg.format, Format::Csv);
        assert!(Settings::parse_file("bogus = 1").is_err());
        assert!(Settings::parse_file("no equals sign").is_err());
    }

    #[test]
    fn exactly_one_source() {
        let mut s = Settings::default();
        s.values.insert("builtin".into(), "square_well".into());
        s.values.insert("potential-expr".into(), "exp(-r)".into());
        assert!(s.into_config().is_err());
        assert_eq!(Settings::default().into_config().unwrap().source, None);
    }

    #[test]
    fn lists_and_methods() {
        assert_eq!(parse_list::<u32>("0-2,5,1", "ell").unwrap(), vec![0, 1, 2, 5]);
        assert!(parse_list::<u32>("3-1", "ell").is_err());
        assert!(parse_list::<u32>("", "ell").is_err());
        let mut s = Settings::default();
        s.values.insert("methods".into(), "trace,exact,eigen".into());
        assert_eq!(
            s.into_config().unwrap().methods,
            vec![MethodChoice::Trace, MethodChoice::ExactEigen]
        );
        let mut s = Settings::default();
        s.values.insert("methods".into(), "".into());
        assert!(s.into_config().is_err());
    }
}
