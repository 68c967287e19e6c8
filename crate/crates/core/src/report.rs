//! Structured pass/fail reports and their deterministic JSON rendering.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    /// Signed slack of the inequality being checked; positive when it holds.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    /// A check that passes iff `margin > 0`.
    pub fn from_margin(id: impl Into<String>, margin: f64, witness: Option<Value>) -> Self {
        Check { id: id.into(), pass: margin > 0.0, margin, witness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    pub artifact: String,
    pub config: BTreeMap<String, String>,
}

impl Default for Versions {
    fn default() -> Self {
        Versions { artifact: crate::VERSION.to_string(), config: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub values: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub versions: Versions,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            values: BTreeMap::new(),
            checks: Vec::new(),
            versions: Versions::default(),
        }
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl Serialize) -> &mut Self {
        self.values.insert(key.into(), serde_json::to_value(v).expect("report values serialize"));
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    /// Appends the checks and values of `other`, prefixing ids with its suite.
    pub fn absorb(&mut self, other: Report) {
        for mut c in other.checks {
            c.id = format!("{}.{}", other.suite, c.id);
            self.checks.push(c);
        }
        for (k, v) in other.values {
            self.values.insert(format!("{}.{}", other.suite, k), v);
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Pretty printer that writes every float with 15 significant digits in
/// exponent form (non-finite values become `null`).
struct SignificantDigits<'a> {
    inner: PrettyFormatter<'a>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for SignificantDigits<'_> {
    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }

    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.14e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Renders any serializable value as pretty JSON with full-precision floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let fmt = SignificantDigits { inner: PrettyFormatter::with_indent(b"  ") };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_fifteen_digits() {
        let mut r = Report::new("t");
        r.value("x", 4.0).value("y", std::f64::consts::PI).value("nan", f64::NAN);
        let s = r.to_json();
        assert!(s.contains("\"x\": 4.00000000000000e0"), "{s}");
        assert!(s.contains("3.14159265358979e0"), "{s}");
        assert!(s.contains("\"nan\": null"), "{s}");
        let parsed: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["values"]["x"].as_f64(), Some(4.0));
    }

    #[test]
    fn pass_status_and_absorb() {
        let mut a = Report::new("outer");
        let mut b = Report::new("inner");
        b.check(Check::from_margin("ok", 1.0, None));
        b.check(Check::from_margin("bad", -1.0, None));
        a.absorb(b);
        assert!(!a.passed());
        assert_eq!(a.first_failure().unwrap().id, "inner.bad");
    }

    #[test]
    fn rendering_is_stable() {
        let mut r = Report::new("s");
        r.value("b", 1.5).value("a", vec![1.0, 2.0]);
        r.check(Check::from_margin("c", 0.25, Some(serde_json::json!({"t": 0.5}))));
        assert_eq!(r.to_json(), r.clone().to_json());
        let s = r.to_json();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }
}
