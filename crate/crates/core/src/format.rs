//! Text and JSON family formats.
//!
//! Text: one member per line, element ids separated by commas and/or
//! whitespace, `-` for the empty set, `#` to end-of-line is a comment, blank
//! lines are skipped. JSON: `{"universe_size": m, "members": [[..], ..]}`.

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::mask::{self, elements, Mask};

/// Result of parsing a text family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedFamily {
    pub family: SetFamily,
    /// 1-based line numbers whose set had already appeared.
    pub duplicate_lines: Vec<usize>,
}

pub fn parse_text(input: &str) -> Result<ParsedFamily> {
    let mut masks: Vec<Mask> = Vec::new();
    let mut duplicate_lines = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let set = if line == "-" {
            0
        } else {
            let mut ids = Vec::new();
            for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
                if tok.is_empty() {
                    continue;
                }
                let id: u64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("expected an element id, found {tok:?}"),
                })?;
                if id >= mask::MAX_UNIVERSE as u64 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: Error::ElementCapacity(id).to_string(),
                    });
                }
                ids.push(id as u32);
            }
            if ids.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "no element ids (use '-' for the empty set)".into(),
                });
            }
            mask::from_elements(ids)?
        };
        if !seen.insert(set) {
            duplicate_lines.push(line_no);
        }
        masks.push(set);
    }
    Ok(ParsedFamily {
        family: SetFamily::from_masks(masks),
        duplicate_lines,
    })
}

/// Canonical text rendering. Only the universe implied by the members is
/// recoverable from this format; padded universes need JSON.
pub fn to_text(f: &SetFamily) -> String {
    let mut out = String::new();
    for &a in f.members() {
        if a == 0 {
            out.push('-');
        } else {
            let ids: Vec<String> = elements(a).map(|x| x.to_string()).collect();
            out.push_str(&ids.join(" "));
        }
        out.push('\n');
    }
    out
}

pub fn parse_json(input: &str) -> Result<SetFamily> {
    Ok(serde_json::from_str(input)?)
}

/// Compact single-line JSON.
pub fn to_json(f: &SetFamily) -> String {
    serde_json::to_string(f).expect("family serialization is infallible")
}

/// Reads a family in either format: JSON if the first non-blank character is `{`.
pub fn parse_any(input: &str) -> Result<ParsedFamily> {
    if input.trim_start().starts_with('{') {
        Ok(ParsedFamily {
            family: parse_json(input)?,
            duplicate_lines: Vec::new(),
        })
    } else {
        parse_text(input)
    }
}

/// Newline-delimited JSON corpus, one family per line.
pub fn to_ndjson<'a, I: IntoIterator<Item = &'a SetFamily>>(families: I) -> String {
    let mut out = String::new();
    for f in families {
        out.push_str(&to_json(f));
        out.push('\n');
    }
    out
}

pub fn parse_ndjson(input: &str) -> Result<Vec<SetFamily>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_json(l).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}
