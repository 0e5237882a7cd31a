//! Parser for the `name(arg, key=value, ...)` descriptor grammar used by
//! configuration files.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor {
    pub name: String,
    pub positional: Vec<String>,
    pub named: Vec<(String, String)>,
    source: String,
}

impl Descriptor {
    pub fn parse(s: &str) -> Result<Self> {
        let src = s.trim();
        let (name, body) = match src.find('(') {
            None => (src, None),
            Some(i) => {
                if !src.ends_with(')') {
                    return Err(Error::Parse(format!("'{src}': missing closing parenthesis")));
                }
                (&src[..i], Some(&src[i + 1..src.len() - 1]))
            }
        };
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("'{src}': bad descriptor name")));
        }
        let mut positional = Vec::new();
        let mut named = Vec::new();
        if let Some(body) = body {
            if !body.trim().is_empty() {
                for part in body.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        return Err(Error::Parse(format!("'{src}': empty argument")));
                    }
                    match part.split_once('=') {
                        Some((k, v)) => named.push((k.trim().to_string(), v.trim().to_string())),
                        None => {
                            if !named.is_empty() {
                                return Err(Error::Parse(format!(
                                    "'{src}': positional argument after keyword argument"
                                )));
                            }
                            positional.push(part.to_string())
                        }
                    }
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            positional,
            named,
            source: src.to_string(),
        })
    }

    pub fn expect_arity(&self, n: usize) -> Result<()> {
        if self.positional.len() != n || !self.named.is_empty() {
            return Err(Error::Parse(format!(
                "'{}': expected {n} positional arguments",
                self.source
            )));
        }
        Ok(())
    }

    fn at(&self, i: usize) -> Result<&str> {
        self.positional
            .get(i)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::Parse(format!("'{}': missing argument {}", self.source, i + 1)))
    }

    pub fn usize_at(&self, i: usize) -> Result<usize> {
        let s = self.at(i)?;
        s.parse()
            .map_err(|_| Error::Parse(format!("'{}': '{s}' is not an integer", self.source)))
    }

    pub fn f64_at(&self, i: usize) -> Result<f64> {
        let s = self.at(i)?;
        parse_f64(s).map_err(|_| Error::Parse(format!("'{}': '{s}' is not a number", self.source)))
    }

    /// Number with a mandatory `dB` suffix.
    pub fn db_at(&self, i: usize) -> Result<f64> {
        let s = self.at(i)?;
        let v = s
            .strip_suffix("dB")
            .or_else(|| s.strip_suffix("db"))
            .ok_or_else(|| Error::Parse(format!("'{}': '{s}' needs a dB suffix", self.source)))?;
        parse_f64(v.trim()).map_err(|_| Error::Parse(format!("'{}': '{s}' is not a level", self.source)))
    }

    /// Keyword argument, rejecting unknown keys.
    pub fn keyword(&self, key: &str) -> Option<&str> {
        self.named.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn f64_kw(&self, key: &str) -> Result<f64> {
        let v = self
            .keyword(key)
            .ok_or_else(|| Error::Parse(format!("'{}': missing '{key}='", self.source)))?;
        parse_f64(v).map_err(|_| Error::Parse(format!("'{}': {key}='{v}' is not a number", self.source)))
    }

    pub fn usize_kw(&self, key: &str) -> Result<usize> {
        let v = self
            .keyword(key)
            .ok_or_else(|| Error::Parse(format!("'{}': missing '{key}='", self.source)))?;
        v.parse()
            .map_err(|_| Error::Parse(format!("'{}': {key}='{v}' is not an integer", self.source)))
    }

    /// Errors on any keyword outside `allowed` or any positional argument.
    pub fn only_keywords(&self, allowed: &[&str]) -> Result<()> {
        if !self.positional.is_empty() {
            return Err(Error::Parse(format!(
                "'{}': expected keyword arguments only",
                self.source
            )));
        }
        for (k, _) in &self.named {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse(format!("'{}': unknown key '{k}'", self.source)));
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, std::num::ParseFloatError> {
    let v: f64 = s.parse()?;
    if v.is_finite() {
        Ok(v)
    } else {
        "x".parse()
    }
}
