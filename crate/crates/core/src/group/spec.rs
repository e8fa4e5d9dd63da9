//! Textual backend descriptions such as `free_product(cyclic(3),cyclic(3))`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use super::{finite::parse_table, GroupBackend};
use crate::error::{Error, Result};
use crate::presets;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendSpec {
    Free(usize),
    Cyclic(usize),
    Symmetric3,
    /// Multiplication table read from a text file.
    Table(PathBuf),
    FreeProduct(Box<BackendSpec>, Box<BackendSpec>),
    DirectProduct(Box<BackendSpec>, Box<BackendSpec>),
    /// Finite normal part, free base, one index permutation per base generator.
    Semidirect(Box<BackendSpec>, Box<BackendSpec>, Vec<Vec<u32>>),
    Preset(String),
}

pub fn make_backend(spec: &BackendSpec) -> Result<Arc<GroupBackend>> {
    match spec {
        BackendSpec::Free(rank) => GroupBackend::free(*rank),
        BackendSpec::Cyclic(n) => GroupBackend::cyclic(*n, "a"),
        BackendSpec::Symmetric3 => GroupBackend::symmetric3(),
        BackendSpec::Table(path) => {
            let text = std::fs::read_to_string(path)?;
            GroupBackend::finite(parse_table(&text)?, None, None)
        }
        BackendSpec::FreeProduct(l, r) => GroupBackend::free_product(make_backend(l)?, make_backend(r)?),
        BackendSpec::DirectProduct(l, r) => GroupBackend::direct_product(make_backend(l)?, make_backend(r)?),
        BackendSpec::Semidirect(n, b, action) => {
            GroupBackend::semidirect(make_backend(n)?, make_backend(b)?, action.clone())
        }
        BackendSpec::Preset(name) => presets::preset(name),
    }
}

impl fmt::Display for BackendSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendSpec::Free(r) => write!(f, "free({r})"),
            BackendSpec::Cyclic(n) => write!(f, "cyclic({n})"),
            BackendSpec::Symmetric3 => write!(f, "s3"),
            BackendSpec::Table(p) => write!(f, "table({})", p.display()),
            BackendSpec::FreeProduct(l, r) => write!(f, "free_product({l},{r})"),
            BackendSpec::DirectProduct(l, r) => write!(f, "direct_product({l},{r})"),
            BackendSpec::Semidirect(n, b, action) => {
                write!(f, "semidirect({n},{b},[")?;
                for (i, phi) in action.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    let items: Vec<String> = phi.iter().map(u32::to_string).collect();
                    write!(f, "[{}]", items.join(","))?;
                }
                write!(f, "])")
            }
            BackendSpec::Preset(name) => write!(f, "{name}"),
        }
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Config(format!("backend spec `{}`: {what} at offset {}", self.s, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.s[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn peek(&mut self, c: char) -> bool {
        self.skip_ws();
        self.s[self.pos..].starts_with(c)
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.s[self.pos..].chars().next() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        &self.s[start..self.pos]
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.ident();
        tok.parse().map_err(|_| self.err("expected a number"))
    }

    fn until_close(&mut self) -> &'a str {
        let start = self.pos;
        let end = self.s[start..].find(')').map_or(self.s.len(), |i| start + i);
        self.pos = end;
        self.s[start..end].trim()
    }

    fn action(&mut self) -> Result<Vec<Vec<u32>>> {
        self.eat('[')?;
        let mut maps = Vec::new();
        while !self.peek(']') {
            self.eat('[')?;
            let mut phi = Vec::new();
            while !self.peek(']') {
                phi.push(self.number()? as u32);
                if !self.peek(']') {
                    self.eat(',')?;
                }
            }
            self.eat(']')?;
            maps.push(phi);
            if !self.peek(']') {
                self.eat(',')?;
            }
        }
        self.eat(']')?;
        Ok(maps)
    }

    fn spec(&mut self) -> Result<BackendSpec> {
        let name = self.ident();
        if name.is_empty() {
            return Err(self.err("expected a backend name"));
        }
        if !self.peek('(') {
            return Ok(match name {
                "s3" => BackendSpec::Symmetric3,
                _ => BackendSpec::Preset(name.to_string()),
            });
        }
        self.eat('(')?;
        let out = match name {
            "free" => BackendSpec::Free(self.number()?),
            "cyclic" => BackendSpec::Cyclic(self.number()?),
            "table" => BackendSpec::Table(PathBuf::from(self.until_close())),
            "free_product" | "direct_product" => {
                let l = Box::new(self.spec()?);
                self.eat(',')?;
                let r = Box::new(self.spec()?);
                if name == "free_product" {
                    BackendSpec::FreeProduct(l, r)
                } else {
                    BackendSpec::DirectProduct(l, r)
                }
            }
            "semidirect" => {
                let n = Box::new(self.spec()?);
                self.eat(',')?;
                let b = Box::new(self.spec()?);
                self.eat(',')?;
                BackendSpec::Semidirect(n, b, self.action()?)
            }
            other => return Err(self.err(&format!("unknown backend kind `{other}`"))),
        };
        self.eat(')')?;
        Ok(out)
    }
}

impl FromStr for BackendSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<BackendSpec> {
        let mut p = Parser { s, pos: 0 };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_specs_and_displays_them_back() {
        for text in [
            "free(2)",
            "cyclic(3)",
            "s3",
            "free_product(cyclic(3),cyclic(3))",
            "direct_product(cyclic(3),free(2))",
            "semidirect(cyclic(3),free(2),[[0,2,1],[0,1,2]])",
            "paper-example-3",
        ] {
            let spec: BackendSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        let spaced: BackendSpec = " free_product( cyclic(3) , free(1) ) ".parse().unwrap();
        assert_eq!(spaced.to_string(), "free_product(cyclic(3),free(1))");
    }

    #[test]
    fn spec_built_semidirect_matches_preset() {
        let a = make_backend(&"semidirect(cyclic(3),free(2),[[0,2,1],[0,1,2]])".parse().unwrap()).unwrap();
        let b = make_backend(&BackendSpec::Preset("paper-example-3".into())).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn malformed_specs_are_config_errors() {
        for text in ["free(", "free(x)", "wobble(2)", "free(2) junk", ""] {
            let err = text.parse::<BackendSpec>().unwrap_err();
            assert_eq!(err.exit_code(), 3, "{text}");
        }
    }
}
