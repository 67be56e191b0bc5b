//! Flat `key = value` report documents with a stable field order.
//!
//! Floats use Rust's shortest round-trip formatting, so a document is a
//! deterministic function of the values it holds.

use std::fmt::Write as _;

use num_complex::Complex64;

/// `a+bi` / `a-bi` with shortest round-trip components.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    lines: Vec<Line>,
}

#[derive(Debug, Clone, PartialEq)]
enum Line {
    Section(String),
    Entry(String, String),
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts a `[name]` section; later entries belong to it.
    pub fn section(&mut self, name: &str) -> &mut Self {
        self.lines.push(Line::Section(name.to_string()));
        self
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        let v: String = value.into();
        self.lines
            .push(Line::Entry(key.to_string(), v.replace('\n', " ")));
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, fmt_f64(value))
    }

    pub fn complex(&mut self, key: &str, value: Complex64) -> &mut Self {
        self.text(key, fmt_complex(value))
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.text(key, if value { "true" } else { "false" })
    }

    pub fn integer(&mut self, key: &str, value: usize) -> &mut Self {
        self.text(key, value.to_string())
    }

    pub fn reals(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let v: Vec<String> = values.iter().map(|x| fmt_f64(*x)).collect();
        self.text(key, v.join(", "))
    }

    pub fn append(&mut self, other: &Document) -> &mut Self {
        self.lines.extend(other.lines.iter().cloned());
        self
    }

    /// Value of the first entry named `key`, in any section.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find_map(|l| match l {
            Line::Entry(k, v) if k == key => Some(v.as_str()),
            _ => None,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, line) in self.lines.iter().enumerate() {
            match line {
                Line::Section(name) => {
                    if i > 0 {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "[{name}]");
                }
                Line::Entry(k, v) => {
                    let _ = writeln!(out, "{k} = {v}");
                }
            }
        }
        out
    }
}
