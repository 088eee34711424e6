//! Tiny call-syntax used by config files: `box(lower=[0, 0], upper=[1, 1])`.
//!
//! Values are numbers, bare identifiers, bracketed lists, or nested calls.
//! Arguments may be named (`key=value`) or positional.

use std::fmt;

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Ident(String),
    List(Vec<Value>),
    Call(Call),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Call {
    pub name: String,
    pub args: Vec<(Option<String>, Value)>,
}

impl Value {
    pub fn parse(text: &str) -> Result<Value> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let v = p.value()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(invalid(format!(
                "trailing input after column {} in '{}'",
                p.pos + 1,
                text.trim()
            )));
        }
        Ok(v)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Ident(s) => match s.as_str() {
                "inf" | "infinity" => Some(f64::INFINITY),
                "nan" | "NaN" => Some(f64::NAN),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_ident(&self) -> Option<&str> {
        match self {
            Value::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64_list(&self) -> Option<Vec<f64>> {
        match self {
            Value::List(items) => items.iter().map(Value::as_f64).collect(),
            Value::Number(v) => Some(vec![*v]),
            _ => None,
        }
    }

    /// Accepts either a bare identifier or a call; returns it as a call.
    pub fn as_call(&self) -> Option<Call> {
        match self {
            Value::Call(c) => Some(c.clone()),
            Value::Ident(s) => Some(Call {
                name: s.clone(),
                args: Vec::new(),
            }),
            _ => None,
        }
    }
}

impl Call {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.args
            .iter()
            .find(|(k, _)| k.as_deref() == Some(key))
            .map(|(_, v)| v)
    }

    pub fn positional(&self) -> impl Iterator<Item = &Value> {
        self.args
            .iter()
            .filter(|(k, _)| k.is_none())
            .map(|(_, v)| v)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| invalid(format!("{}: '{key}' must be a number", self.name))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?
            .ok_or_else(|| invalid(format!("{}: missing '{key}'", self.name)))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.f64(key)? {
            None => Ok(default),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
            Some(v) => Err(invalid(format!(
                "{}: '{key}' must be a non-negative integer, got {v}",
                self.name
            ))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        Ok(self.usize_or(key, default as usize)? as u64)
    }

    pub fn require_list(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)
            .ok_or_else(|| invalid(format!("{}: missing '{key}'", self.name)))?
            .as_f64_list()
            .ok_or_else(|| invalid(format!("{}: '{key}' must be a list of numbers", self.name)))
    }

    pub fn ident(&self, key: &str) -> Result<Option<&str>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_ident()
                .map(Some)
                .ok_or_else(|| invalid(format!("{}: '{key}' must be a name", self.name))),
        }
    }

    /// Rejects any named argument not in `allowed`.
    pub fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.args {
            if let Some(k) = k {
                if !allowed.contains(&k.as_str()) {
                    return Err(invalid(format!(
                        "{}: unknown argument '{k}' (expected one of: {})",
                        self.name,
                        allowed.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Ident(s) => f.write_str(s),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Call(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, (k, v)) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if let Some(k) = k {
                write!(f, "{k}=")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Formats a float list the way the parser reads it back.
pub(crate) fn fmt_list(xs: &[f64]) -> String {
    Value::List(xs.iter().map(|&v| Value::Number(v)).collect()).to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> crate::error::Error {
        let found = self
            .src
            .get(self.pos)
            .map(|&c| format!("'{}'", c as char))
            .unwrap_or_else(|| "end of input".to_string());
        invalid(format!("{what} at column {}, found {found}", self.pos + 1))
    }

    fn value(&mut self) -> Result<Value> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Value::List(items));
                        }
                        _ => return Err(self.err("expected ',' or ']'")),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let name = self.ident();
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let args = self.args()?;
                    Ok(Value::Call(Call { name, args }))
                } else {
                    Ok(Value::Ident(name))
                }
            }
            _ => Err(self.err("expected a value")),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric()
                || self.src[self.pos] == b'_'
                || self.src[self.pos] == b'-')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<Value> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let exp_sign = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit()
                || c == b'.'
                || c == b'e'
                || c == b'E'
                || exp_sign
                || self.pos == start
            {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        // allow "-inf"
        if (text == "-" || text == "+") && self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            let word = self.ident();
            if word == "inf" || word == "infinity" {
                let v = if text == "-" {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
                return Ok(Value::Number(v));
            }
            return Err(invalid(format!("bad number '{text}{word}'")));
        }
        text.parse::<f64>()
            .map(Value::Number)
            .map_err(|_| invalid(format!("bad number '{text}'")))
    }

    fn args(&mut self) -> Result<Vec<(Option<String>, Value)>> {
        let mut args = Vec::new();
        if self.peek() == Some(b')') {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            let save = self.pos;
            let mut key = None;
            if self
                .peek()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == b'_')
            {
                let name = self.ident();
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    key = Some(name);
                } else {
                    self.pos = save;
                }
            }
            let v = self.value()?;
            args.push((key, v));
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return Err(self.err("expected ',' or ')'")),
            }
        }
    }
}
