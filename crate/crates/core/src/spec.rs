//! Distribution spec grammar.
//!
//! ```text
//! spec    := '@' path | family '(' args ')' | 'mix' '(' weighted (',' weighted)* ')'
//! weighted:= number ':' spec
//! family  := pois | binom | geom | nbinom | hyper | unif | point
//! ```
//!
//! Whitespace is ignored everywhere except inside a path. Positions in
//! errors are byte offsets into the original text.

use std::fs::File;
use std::io::BufReader;

use crate::error::{HdrError, Result};
use crate::mass::{Family, MassFunction, MixtureSpec};

/// Parses a distribution spec such as `binom(10, 0.5)` or
/// `mix(0.3:pois(12), 0.7:pois(40))`. `@<path>` loads a mass table file.
pub fn parse_dist_spec(text: &str) -> Result<MassFunction> {
    parse_dist_spec_with(text, false)
}

/// As [`parse_dist_spec`], optionally renormalizing mass tables whose total
/// is not one.
pub fn parse_dist_spec_with(text: &str, renormalize_tables: bool) -> Result<MassFunction> {
    let mut p = Parser {
        src: text,
        pos: 0,
        renormalize_tables,
    };
    let mf = p.spec(true)?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(mf)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    renormalize_tables: bool,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> HdrError {
        HdrError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a distribution name"));
        }
        let start = self.pos;
        self.pos += len;
        Ok(&self.src[start..self.pos])
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '+')))
            .unwrap_or(self.rest().len());
        let tok = &self.rest()[..len];
        let v: f64 = tok
            .parse()
            .map_err(|_| self.error(format!("expected a number, got {tok:?}")))?;
        self.pos += len;
        Ok(v)
    }

    fn spec(&mut self, top_level: bool) -> Result<MassFunction> {
        if self.peek() == Some('@') {
            self.pos += 1;
            return self.table(top_level);
        }
        let name_pos = self.pos;
        let name = self.ident()?.to_ascii_lowercase();
        self.expect('(')?;
        if name == "mix" {
            return self.mixture();
        }
        let args_pos = self.pos;
        let mut args = Vec::new();
        if self.peek() != Some(')') {
            loop {
                args.push(self.number()?);
                if self.peek() == Some(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(')')?;
        let at = |message: String| HdrError::Parse {
            position: args_pos,
            message,
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(at(format!(
                    "{name} takes {n} argument(s), got {}",
                    args.len()
                )))
            }
        };
        let count = |v: f64, what: &str| -> Result<u64> {
            if v >= 0.0 && v.fract() == 0.0 && v < 9.0e15 {
                Ok(v as u64)
            } else {
                Err(at(format!(
                    "{what} must be a non-negative integer, got {v}"
                )))
            }
        };
        let int = |v: f64, what: &str| -> Result<i64> {
            if v.fract() == 0.0 && v.abs() < 9.0e15 {
                Ok(v as i64)
            } else {
                Err(at(format!("{what} must be an integer, got {v}")))
            }
        };
        let family = match name.as_str() {
            "pois" => {
                arity(1)?;
                Family::poisson(args[0])
            }
            "binom" => {
                arity(2)?;
                Family::binomial(count(args[0], "n")?, args[1])
            }
            "geom" => {
                arity(1)?;
                Family::geometric(args[0])
            }
            "nbinom" => {
                arity(2)?;
                Family::negative_binomial(args[0], args[1])
            }
            "hyper" => {
                arity(3)?;
                Family::hypergeometric(
                    count(args[0], "N")?,
                    count(args[1], "K")?,
                    count(args[2], "n")?,
                )
            }
            "unif" => {
                arity(2)?;
                Family::uniform(int(args[0], "a")?, int(args[1], "b")?)
            }
            "point" => {
                arity(1)?;
                Ok(Family::point(int(args[0], "x")?))
            }
            _ => {
                return Err(HdrError::Parse {
                    position: name_pos,
                    message: format!("unknown distribution family `{name}`"),
                })
            }
        };
        family.map(MassFunction::family).map_err(|e| match e {
            HdrError::Spec(message) => at(message),
            other => other,
        })
    }

    fn mixture(&mut self) -> Result<MassFunction> {
        let start = self.pos;
        let mut spec = MixtureSpec::new();
        loop {
            let w = self.number()?;
            self.expect(':')?;
            let component = self.spec(false)?;
            spec = spec.with(w, component);
            match self.peek() {
                Some(',') => self.pos += 1,
                _ => break,
            }
        }
        self.expect(')')?;
        MassFunction::mixture(spec).map_err(|e| match e {
            HdrError::Spec(message) => HdrError::Parse {
                position: start,
                message,
            },
            other => other,
        })
    }

    fn table(&mut self, top_level: bool) -> Result<MassFunction> {
        let start = self.pos;
        let len = if top_level {
            self.rest().len()
        } else {
            self.rest().find([',', ')']).unwrap_or(self.rest().len())
        };
        let path = self.src[start..start + len].trim();
        if path.is_empty() {
            return Err(self.error("expected a file path after `@`"));
        }
        self.pos = start + len;
        let file = File::open(path).map_err(|e| HdrError::Parse {
            position: start,
            message: format!("cannot open {path}: {e}"),
        })?;
        Ok(
            MassFunction::load_pmf_table(BufReader::new(file), self.renormalize_tables)?
                .with_label(path.to_string()),
        )
    }
}
