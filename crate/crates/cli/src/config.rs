//! Line-based `key = value` scenario files.
//!
//! Values are numbers (`0.2`, `inf`), bare words (`green`, `true`), lists
//! (`[1, 2+0.5i]`) or matrices (`[[1+0i, 0+0i],[0+0i, 2+0i]]`). `#` starts a
//! comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::CliError;
use crate::scenario::{Kind, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    List(Vec<Complex64>),
    Matrix(Vec<Vec<Complex64>>),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Text(_) => "word",
            Value::List(_) => "list",
            Value::Matrix(_) => "matrix",
        }
    }
}

/// Syntactically valid document: ordered keys with parsed values.
pub type Document = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub values: Document,
}

enum Node {
    Atom(String),
    List(Vec<Node>),
}

fn parse_nodes(s: &str) -> Result<Node, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut pos = 0;
    let node = parse_node(&chars, &mut pos)?;
    while pos < chars.len() && chars[pos].is_whitespace() {
        pos += 1;
    }
    if pos != chars.len() {
        return Err(format!("unexpected trailing text '{}'", chars[pos..].iter().collect::<String>()));
    }
    Ok(node)
}

fn parse_node(c: &[char], pos: &mut usize) -> Result<Node, String> {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
    if *pos >= c.len() {
        return Err("missing value".into());
    }
    if c[*pos] == '[' {
        *pos += 1;
        let mut items = Vec::new();
        loop {
            while *pos < c.len() && c[*pos].is_whitespace() {
                *pos += 1;
            }
            if *pos >= c.len() {
                return Err("unclosed '['".into());
            }
            if c[*pos] == ']' {
                *pos += 1;
                if !items.is_empty() {
                    // only reached for "[]" or a trailing comma
                    return Err("trailing comma before ']'".into());
                }
                return Ok(Node::List(items));
            }
            items.push(parse_node(c, pos)?);
            while *pos < c.len() && c[*pos].is_whitespace() {
                *pos += 1;
            }
            match c.get(*pos) {
                Some(',') => *pos += 1,
                Some(']') => {
                    *pos += 1;
                    return Ok(Node::List(items));
                }
                Some(ch) => return Err(format!("expected ',' or ']', found '{ch}'")),
                None => return Err("unclosed '['".into()),
            }
        }
    }
    let start = *pos;
    while *pos < c.len() && !matches!(c[*pos], ',' | ']' | '[') {
        *pos += 1;
    }
    let atom: String = c[start..*pos].iter().collect::<String>().trim().to_string();
    if atom.is_empty() {
        return Err("empty entry".into());
    }
    Ok(Node::Atom(atom))
}

fn parse_real(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(x)
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, `a+i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("'{s}' is not a complex number");
    let Some(body) = t.strip_suffix('i') else {
        let re = parse_real(&t)?;
        if !re.is_finite() {
            return Err(bad());
        }
        return Ok(Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => parse_real(p),
        }
    };
    let z = match split {
        Some(k) => Complex64::new(parse_real(&body[..k]).map_err(|_| bad())?, imag(&body[k..]).map_err(|_| bad())?),
        None => Complex64::new(0.0, imag(body).map_err(|_| bad())?),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(bad());
    }
    Ok(z)
}

fn node_to_value(node: Node) -> Result<Value, String> {
    match node {
        Node::Atom(a) => Ok(match a.parse::<f64>() {
            Ok(x) if x.is_nan() => return Err("NaN is not allowed".into()),
            Ok(x) => Value::Number(x),
            Err(_) => {
                if !a.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '/')) {
                    return Err(format!("unrecognized value '{a}'"));
                }
                Value::Text(a)
            }
        }),
        Node::List(items) => {
            if items.iter().all(|n| matches!(n, Node::Atom(_))) {
                let list = items
                    .into_iter()
                    .map(|n| match n {
                        Node::Atom(a) => parse_complex(&a),
                        Node::List(_) => unreachable!(),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok(Value::List(list));
            }
            let mut rows = Vec::new();
            for n in items {
                match n {
                    Node::List(row) => {
                        let row = row
                            .into_iter()
                            .map(|n| match n {
                                Node::Atom(a) => parse_complex(&a),
                                Node::List(_) => Err("matrices nest at most two levels".into()),
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        rows.push(row);
                    }
                    Node::Atom(_) => return Err("mixed scalars and rows in a matrix".into()),
                }
            }
            let width = rows[0].len();
            if width == 0 || rows.iter().any(|r| r.len() != width) {
                return Err("matrix rows must be nonempty and of equal length".into());
            }
            Ok(Value::Matrix(rows))
        }
    }
}

/// Parses the document syntax without any scenario-specific checks.
pub fn parse_document(text: &str) -> Result<Document, CliError> {
    let mut doc = Document::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Syntax {
                line: line_no,
                message: "expected 'key = value'".into(),
            });
        };
        let key = key.trim();
        if key.is_empty()
            || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
        {
            return Err(CliError::Syntax {
                line: line_no,
                message: format!("invalid key '{key}'"),
            });
        }
        let value = parse_nodes(value.trim())
            .and_then(node_to_value)
            .map_err(|message| CliError::Syntax {
                line: line_no,
                message: format!("{key}: {message}"),
            })?;
        if doc.insert(key.to_string(), value).is_some() {
            return Err(CliError::Syntax {
                line: line_no,
                message: format!("duplicate key '{key}'"),
            });
        }
    }
    Ok(doc)
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    ScenarioConfig::from_document(parse_document(text)?, None)
}

fn hermiticity_defect(rows: &[Vec<Complex64>]) -> Option<f64> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut worst: f64 = 0.0;
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            worst = worst.max((z - rows[j][i].conj()).norm());
        }
    }
    Some(worst)
}

impl ScenarioConfig {
    /// Validates a document; `scenario` replaces the file's own choice.
    pub fn from_document(mut doc: Document, scenario: Option<Scenario>) -> Result<Self, CliError> {
        let named = match doc.remove("scenario") {
            Some(Value::Text(name)) => Some(name),
            Some(other) => {
                return Err(CliError::invalid("scenario", format!("expected a name, got a {}", other.describe())))
            }
            None => None,
        };
        let scenario = match (scenario, named) {
            (Some(s), _) => s,
            (None, Some(name)) => Scenario::from_name(&name)?,
            (None, None) => return Err(CliError::invalid("scenario", "missing scenario name")),
        };
        let cfg = Self { scenario, values: doc };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let schema = self.scenario.schema();
        for (key, value) in &self.values {
            if let Some(check) = key.strip_prefix("tol.") {
                if !self.scenario.check_names().contains(&check) {
                    return Err(CliError::invalid(key, format!("no check named '{check}' in scenario {}", self.scenario.name())));
                }
                match value {
                    Value::Number(x) if x.is_finite() && *x >= 0.0 => continue,
                    _ => return Err(CliError::invalid(key, "tolerance must be a finite number >= 0")),
                }
            }
            let Some(field) = schema.iter().find(|f| f.key == key) else {
                return Err(CliError::invalid(key, format!("unknown key for scenario {}", self.scenario.name())));
            };
            check_kind(key, field.kind, value)?;
        }
        for field in schema.iter().filter(|f| f.required) {
            if !self.values.contains_key(field.key) {
                return Err(CliError::invalid(field.key, "required key missing"));
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Number(x)) => Ok(Some(*x)),
            Some(v) => Err(CliError::invalid(key, format!("expected a number, got a {}", v.describe()))),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn require_number(&self, key: &str) -> Result<f64, CliError> {
        self.number(key)?.ok_or_else(|| CliError::invalid(key, "required key missing"))
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.number(key)? {
            None => Ok(None),
            Some(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e15 => Ok(Some(x as usize)),
            Some(x) => Err(CliError::invalid(key, format!("expected a nonnegative integer, got {x}"))),
        }
    }

    pub fn require_count(&self, key: &str) -> Result<usize, CliError> {
        self.count(key)?.ok_or_else(|| CliError::invalid(key, "required key missing"))
    }

    pub fn text(&self, key: &str) -> Result<Option<&str>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Text(s)) => Ok(Some(s)),
            Some(v) => Err(CliError::invalid(key, format!("expected a word, got a {}", v.describe()))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.text(key)? {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(other) => Err(CliError::invalid(key, format!("expected true or false, got {other}"))),
        }
    }

    pub fn complex_list(&self, key: &str) -> Result<Option<Vec<Complex64>>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::List(v)) => Ok(Some(v.clone())),
            Some(Value::Number(x)) => Ok(Some(vec![Complex64::new(*x, 0.0)])),
            Some(v) => Err(CliError::invalid(key, format!("expected a list, got a {}", v.describe()))),
        }
    }

    pub fn real_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(list) = self.complex_list(key)? else {
            return Ok(None);
        };
        if list.iter().any(|z| z.im != 0.0) {
            return Err(CliError::invalid(key, "expected real entries"));
        }
        Ok(Some(list.into_iter().map(|z| z.re).collect()))
    }

    pub fn matrix(&self, key: &str) -> Result<Option<Vec<Vec<Complex64>>>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Matrix(m)) => Ok(Some(m.clone())),
            Some(v) => Err(CliError::invalid(key, format!("expected a matrix, got a {}", v.describe()))),
        }
    }

    /// Override for the tolerance of a named check.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        match self.values.get(&format!("tol.{check}")) {
            Some(Value::Number(x)) => *x,
            _ => default,
        }
    }

    pub fn with_value(&self, key: &str, value: Value) -> Result<Self, CliError> {
        let mut values = self.values.clone();
        values.insert(key.to_string(), value);
        let cfg = Self {
            scenario: self.scenario,
            values,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_kind(key: &str, kind: Kind, value: &Value) -> Result<(), CliError> {
    let ok = match (kind, value) {
        (Kind::Number, Value::Number(_)) => true,
        (Kind::Count, Value::Number(x)) => *x >= 0.0 && x.fract() == 0.0,
        (Kind::Word(options), Value::Text(s)) => options.is_empty() || options.contains(&s.as_str()),
        (Kind::RealList, Value::List(l)) => l.iter().all(|z| z.im == 0.0),
        (Kind::RealList, Value::Number(_)) => true,
        (Kind::ComplexList, Value::List(_) | Value::Number(_)) => true,
        (Kind::Matrix, Value::Matrix(_)) => true,
        (Kind::Hermitian, Value::Matrix(m)) => {
            return match hermiticity_defect(m) {
                None => Err(CliError::invalid(key, "matrix must be square")),
                Some(d) if d > 1e-12 => Err(CliError::invalid(key, format!("matrix is not Hermitian (defect {d:e})"))),
                Some(_) => Ok(()),
            }
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        let expected = match kind {
            Kind::Number => "a number".to_string(),
            Kind::Count => "a nonnegative integer".to_string(),
            Kind::Word(options) => format!("one of {options:?}"),
            Kind::RealList => "a list of reals".to_string(),
            Kind::ComplexList => "a list".to_string(),
            Kind::Matrix | Kind::Hermitian => "a matrix".to_string(),
        };
        Err(CliError::invalid(key, format!("expected {expected}, got a {}", value.describe())))
    }
}

fn format_real(x: f64) -> String {
    format!("{x:?}")
}

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", format_real(z.re), format_real(z.im.abs()))
}

fn format_value(v: &Value) -> String {
    match v {
        Value::Number(x) => format_real(*x),
        Value::Text(s) => s.clone(),
        Value::List(l) => format!("[{}]", l.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(", ")),
        Value::Matrix(m) => format!(
            "[{}]",
            m.iter()
                .map(|r| format!("[{}]", r.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

/// Writes a document back in the file syntax; parsing the output yields
/// the same document.
pub fn serialize_document(doc: &Document) -> String {
    let mut out = String::new();
    for (k, v) in doc {
        let _ = writeln!(out, "{k} = {}", format_value(v));
    }
    out
}

pub fn serialize(cfg: &ScenarioConfig) -> String {
    format!("scenario = {}\n{}", cfg.scenario.name(), serialize_document(&cfg.values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        let c = |s| parse_complex(s).unwrap();
        assert_eq!(c("1+0i"), Complex64::new(1.0, 0.0));
        assert_eq!(c("-0.5-2i"), Complex64::new(-0.5, -2.0));
        assert_eq!(c("2i"), Complex64::new(0.0, 2.0));
        assert_eq!(c("-i"), Complex64::new(0.0, -1.0));
        assert_eq!(c("3+i"), Complex64::new(3.0, 1.0));
        assert_eq!(c("1e-3+2.5e+2i"), Complex64::new(1e-3, 250.0));
        assert_eq!(c("-1e-5-2e-3i"), Complex64::new(-1e-5, -2e-3));
        assert_eq!(c("4"), Complex64::new(4.0, 0.0));
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("inf+0i").is_err());
    }

    #[test]
    fn document_syntax() {
        let doc = parse_document(
            "# header\nscenario = green  # trailing\nes = [1, 2]\nhS = [[1+0i, 0+0i],[0+0i, 2+0i]]\nomega = inf\nempty = []\n",
        )
        .unwrap();
        assert_eq!(doc["scenario"], Value::Text("green".into()));
        assert_eq!(doc["es"], Value::List(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]));
        assert!(matches!(&doc["hS"], Value::Matrix(m) if m.len() == 2));
        assert_eq!(doc["omega"], Value::Number(f64::INFINITY));
        assert_eq!(doc["empty"], Value::List(vec![]));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        for (text, line) in [
            ("a = 1\nb 2\n", 2),
            ("a = 1\n\nb = [1, 2\n", 3),
            ("a = 1\na = 2\n", 2),
            ("x = [[1, 2], [3]]\n", 1),
            ("x = nan\n", 1),
        ] {
            match parse_document(text) {
                Err(CliError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn minimal_green_config() {
        let cfg = parse_config("scenario = green\nes = [1]\nj0 = 0.2\nt1 = 10\nsteps = 1000\n").unwrap();
        assert_eq!(cfg.scenario, Scenario::Green);
        assert_eq!(cfg.number_or("t0", 0.0).unwrap(), 0.0);
        assert_eq!(cfg.require_count("steps").unwrap(), 1000);
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        let err = parse_config("scenario = green\nes = [1]\nj0 = 0.2\nt1 = 10\nsteps = 10\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, CliError::Invalid { ref key, .. } if key == "bogus"));
        let err = parse_config("scenario = green\nes = [1]\nt1 = 10\nsteps = 10\n").unwrap_err();
        assert!(matches!(err, CliError::Invalid { ref key, .. } if key == "j0"));
        let err = parse_config("scenario = green\nes = [1]\nj0 = 1\nt1 = 10\nsteps = 10\ntol.nothing = 1\n").unwrap_err();
        assert!(matches!(err, CliError::Invalid { ref key, .. } if key == "tol.nothing"));
    }

    #[test]
    fn rejects_non_hermitian_matrix_by_key() {
        let text = "scenario = divisibility\nd_s = 2\nd_e = 1\nhS = [[1+0i, 1+0i],[0+0i, 2+0i]]\nhE = [[0]]\nhSE = [[1, 0],[0, 1]]\nc = [1, 0]\n";
        let err = parse_config(text).unwrap_err();
        assert!(matches!(err, CliError::Invalid { ref key, .. } if key == "hS"), "{err:?}");
    }

    #[test]
    fn serialization_round_trip() {
        let text = "scenario = divisibility\nd_s = 2\nd_e = 1\nhS = [[1+0i, 0.5-0.25i],[0.5+0.25i, 2+0i]]\nhE = [[0.3]]\nhSE = [[1, 0],[0, -1]]\nc = [0.6, 0.8i]\ncoupling_strength = 1e-3\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&serialize(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }
}
