//! Plain-text medium files.
//!
//! Two formats share the same lexical rules: whitespace-separated ASCII
//! decimals, `#` starts a comment, blank lines are ignored.
//!
//! ```text
//! taur v1 M=1
//! 1.0 0.5
//! 1.0 -0.25
//! tail 0.5
//! ```
//!
//! ```text
//! phys v1 M=1
//! depths 0 1 2 2.5
//! rho 1 1 1
//! K 1 9 9
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{Medium, PhysicalProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumFormat {
    TauR,
    Physical,
}

/// Reads a medium file of either format, converting physical profiles.
pub fn read_medium(path: impl AsRef<Path>) -> Result<Medium> {
    let text = std::fs::read_to_string(path)?;
    read_medium_str(&text)
}

pub fn read_medium_str(text: &str) -> Result<Medium> {
    let lines = content_lines(text);
    match detect(&lines)? {
        MediumFormat::TauR => parse_taur(&lines),
        MediumFormat::Physical => Medium::from_physical(&parse_physical(&lines)?),
    }
}

/// Reads a physical-format file without converting it.
pub fn read_physical_str(text: &str) -> Result<PhysicalProfile> {
    let lines = content_lines(text);
    match detect(&lines)? {
        MediumFormat::Physical => parse_physical(&lines),
        MediumFormat::TauR => Err(Error::Parse {
            line: lines[0].0,
            message: "expected a `phys v1` header".into(),
        }),
    }
}

pub fn detect_format(text: &str) -> Result<MediumFormat> {
    detect(&content_lines(text))
}

/// Serializes in the tau-R format. Values use the shortest decimal form that
/// parses back to the same `f64`, so `read(write(m)) == m`.
pub fn write_medium(medium: &Medium) -> String {
    let mut out = format!("taur v1 M={}\n", medium.layers());
    for (tau, r) in medium.layer_taus().iter().zip(medium.reflections()) {
        let _ = writeln!(out, "{tau:?} {r:?}");
    }
    let _ = writeln!(out, "tail {:?}", medium.tail_tau());
    out
}

pub fn write_physical(profile: &PhysicalProfile) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
    format!(
        "phys v1 M={}\ndepths {}\nrho {}\nK {}\n",
        profile.layers(),
        join(&profile.depths),
        join(&profile.densities),
        join(&profile.bulk_moduli)
    )
}

type Line<'a> = (usize, Vec<&'a str>);

fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = line.split_whitespace().collect();
            (!tokens.is_empty()).then_some((i + 1, tokens))
        })
        .collect()
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn detect(lines: &[Line<'_>]) -> Result<MediumFormat> {
    let Some((line, tokens)) = lines.first() else {
        return Err(parse_error(1, "empty medium file"));
    };
    match tokens.first().copied() {
        Some("taur") => Ok(MediumFormat::TauR),
        Some("phys") => Ok(MediumFormat::Physical),
        _ => Err(parse_error(*line, "expected a `taur v1` or `phys v1` header")),
    }
}

fn parse_header(line: &Line<'_>, magic: &str) -> Result<usize> {
    let (no, tokens) = line;
    if tokens.len() != 3 || tokens[0] != magic || tokens[1] != "v1" {
        return Err(parse_error(*no, format!("expected header `{magic} v1 M=<int>`")));
    }
    let m = tokens[2]
        .strip_prefix("M=")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| parse_error(*no, format!("bad layer count `{}`", tokens[2])))?;
    if m < 1 {
        return Err(parse_error(*no, "M must be at least 1"));
    }
    Ok(m)
}

fn number(line: usize, token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| parse_error(line, format!("not a number: `{token}`")))
}

fn parse_taur(lines: &[Line<'_>]) -> Result<Medium> {
    let m = parse_header(&lines[0], "taur")?;
    let body = &lines[1..];
    if body.len() < m + 1 {
        let line = body.last().map_or(lines[0].0, |l| l.0);
        return Err(parse_error(
            line,
            format!("expected {} `<tau> <R>` lines, found {}", m + 1, body.len()),
        ));
    }
    let mut taus = Vec::with_capacity(m + 1);
    let mut refl = Vec::with_capacity(m + 1);
    for (no, tokens) in &body[..=m] {
        if tokens.len() != 2 {
            return Err(parse_error(*no, "expected `<tau> <R>`"));
        }
        taus.push(number(*no, tokens[0])?);
        refl.push(number(*no, tokens[1])?);
    }
    let mut tail = 0.0;
    match &body[m + 1..] {
        [] => {}
        [(no, tokens)] => {
            if tokens.len() != 2 || tokens[0] != "tail" {
                return Err(parse_error(*no, "expected `tail <tau>`"));
            }
            tail = number(*no, tokens[1])?;
        }
        [_, (no, _), ..] => {
            return Err(parse_error(*no, "unexpected trailing content"));
        }
    }
    Medium::new(taus, tail, refl)
}

fn parse_physical(lines: &[Line<'_>]) -> Result<PhysicalProfile> {
    let m = parse_header(&lines[0], "phys")?;
    let mut depths = None;
    let mut rho = None;
    let mut k = None;
    for (no, tokens) in &lines[1..] {
        let values = tokens[1..]
            .iter()
            .map(|t| number(*no, t))
            .collect::<Result<Vec<_>>>()?;
        let (slot, expected): (_, &[usize]) = match tokens[0] {
            "depths" => (&mut depths, &[m + 2, m + 3]),
            "rho" => (&mut rho, &[m + 2]),
            "K" => (&mut k, &[m + 2]),
            other => return Err(parse_error(*no, format!("unknown record `{other}`"))),
        };
        if slot.is_some() {
            return Err(parse_error(*no, format!("duplicate `{}` line", tokens[0])));
        }
        if !expected.contains(&values.len()) {
            return Err(parse_error(
                *no,
                format!(
                    "`{}` needs {:?} values for M = {m}, got {}",
                    tokens[0],
                    expected,
                    values.len()
                ),
            ));
        }
        *slot = Some(values);
    }
    let last = lines.last().map_or(1, |l| l.0);
    let profile = PhysicalProfile {
        depths: depths.ok_or_else(|| parse_error(last, "missing `depths` line"))?,
        densities: rho.ok_or_else(|| parse_error(last, "missing `rho` line"))?,
        bulk_moduli: k.ok_or_else(|| parse_error(last, "missing `K` line"))?,
    };
    profile.validate()?;
    Ok(profile)
}
