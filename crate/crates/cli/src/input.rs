//! Spec and position arguments shared by the subcommands.

use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use necklace_core::descriptor::family_from_tag;
use necklace_core::{Descriptor, Error, Family, GameSpec, Position};

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// NN, PN, CN, NNG, NIM, MOORE or SET.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub c: Option<usize>,
    /// Move sets for SET, 1-based: "1,2;2,3;3".
    #[arg(long)]
    pub sets: Option<String>,
    /// JSON descriptor file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PosArgs {
    /// "4,20,0,3", an inline JSON array or object, or a file of JSON values
    /// (one per line, or a single document).
    #[arg(long)]
    pub pos: String,
}

/// Accepted JSON position shapes.
#[derive(Deserialize)]
#[serde(untagged)]
enum PosJson {
    Heights(Vec<u64>),
    Record { pos: Vec<u64> },
    Descriptor(Descriptor),
}

fn parse_sets(s: &str) -> Result<Vec<Vec<usize>>, Error> {
    s.split(';')
        .map(|set| {
            set.split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Parameter(format!("bad vertex {v:?} in --sets")))
                })
                .collect()
        })
        .collect()
}

fn read_json_values(text: &str) -> Result<Vec<PosJson>, Error> {
    let bad = |e: serde_json::Error| Error::Position(format!("unreadable position JSON: {e}"));
    let trimmed = text.trim();
    if let Ok(one) = serde_json::from_str::<PosJson>(trimmed) {
        return Ok(vec![one]);
    }
    trimmed
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(bad))
        .collect()
}

impl PosArgs {
    /// Positions in input order, plus a descriptor if the input carried one.
    pub fn read(&self) -> Result<(Vec<Position>, Option<Descriptor>), Error> {
        let raw = self.pos.trim();
        let values = if raw.starts_with('[') || raw.starts_with('{') {
            read_json_values(raw)?
        } else if raw.chars().all(|c| c.is_ascii_digit() || c == ',' || c.is_whitespace()) {
            return Ok((vec![raw.parse()?], None));
        } else {
            let text = std::fs::read_to_string(raw)
                .map_err(|e| Error::Position(format!("cannot read {raw}: {e}")))?;
            read_json_values(&text)?
        };
        let mut descriptor = None;
        let mut out = Vec::new();
        for v in values {
            match v {
                PosJson::Heights(h) | PosJson::Record { pos: h } => out.push(Position::new(h)),
                PosJson::Descriptor(d) => {
                    let h = d
                        .heights
                        .clone()
                        .ok_or_else(|| Error::Position("descriptor has no heights".into()))?;
                    out.push(Position::new(h));
                    descriptor.get_or_insert(d);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Position("no positions given".into()));
        }
        Ok((out, descriptor))
    }

    pub fn read_one(&self) -> Result<(Position, Option<Descriptor>), Error> {
        let (mut all, d) = self.read()?;
        if all.len() != 1 {
            return Err(Error::Position(format!("expected one position, got {}", all.len())));
        }
        Ok((all.remove(0), d))
    }
}

impl SpecArgs {
    /// Builds the spec from the flags, falling back to `--spec` and then to a
    /// descriptor that came with the position.
    pub fn build(&self, from_pos: Option<&Descriptor>) -> Result<GameSpec, Error> {
        let file = match &self.spec {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
                Some(
                    serde_json::from_str::<Descriptor>(&text)
                        .map_err(|e| Error::Parameter(format!("bad descriptor {}: {e}", path.display())))?,
                )
            }
            None => None,
        };
        let base = file.or_else(|| from_pos.cloned());
        let family = self
            .family
            .clone()
            .or_else(|| base.as_ref().map(|d| d.family.clone()))
            .ok_or_else(|| Error::Parameter("--family is required".into()))?;
        let n = self
            .n
            .or(base.as_ref().map(|d| d.n))
            .ok_or_else(|| Error::Parameter("--n is required".into()))?;
        let k = self.k.or(base.as_ref().and_then(|d| d.k));
        let c = self.c.or(base.as_ref().and_then(|d| d.c));
        match family_from_tag(&family, n, k, c)? {
            Family::Generic => {
                let sets = match &self.sets {
                    Some(s) => parse_sets(s)?,
                    None => base
                        .and_then(|d| d.move_sets)
                        .ok_or_else(|| Error::Parameter("family SET needs --sets".into()))?,
                };
                GameSpec::generic(n, &sets)
            }
            f => GameSpec::build(f),
        }
    }
}
