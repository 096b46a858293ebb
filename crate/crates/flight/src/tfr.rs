use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::aircraft::Level;

/// What a literal talks about. Sets are unions: a vertex literal over
/// `A,B` holds if the route visits A or B.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Subject {
    Vertex(Vec<String>),
    Segment(Vec<(String, String)>),
    Departure(Vec<String>),
    Arrival(Vec<String>),
}

impl Subject {
    pub fn is_graph(&self) -> bool {
        matches!(self, Subject::Vertex(_) | Subject::Segment(_))
    }

    fn kind(&self) -> &'static str {
        match self {
            Subject::Vertex(_) => "vertex",
            Subject::Segment(_) => "segment",
            Subject::Departure(_) => "dep",
            Subject::Arrival(_) => "arr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TfrLiteral {
    pub subject: Subject,
    /// Inclusive level band; `None` means every level.
    pub levels: Option<(Level, Level)>,
    pub negated: bool,
}

/// A named restriction in disjunctive normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tfr {
    pub name: String,
    pub dnf: Vec<Vec<TfrLiteral>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct TfrParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for TfrLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.subject.kind())?;
        let ids: Vec<String> = match &self.subject {
            Subject::Segment(s) => s.iter().map(|(u, v)| format!("{u}>{v}")).collect(),
            Subject::Vertex(ids) | Subject::Departure(ids) | Subject::Arrival(ids) => ids.clone(),
        };
        write!(f, "{}", ids.join(","))?;
        if let Some((lo, hi)) = self.levels {
            write!(f, ":{lo}-{hi}")?;
        }
        if self.negated {
            write!(f, ":neg")?;
        }
        Ok(())
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.contains([',', ':', '>', '|', '#']) && !id.chars().any(char::is_whitespace)
}

impl FromStr for TfrLiteral {
    type Err = String;

    /// `kind:ids[:lmin-lmax][:neg]` with comma-separated ids; segments are
    /// written `TAIL>HEAD`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let ids: Vec<&str> = parts.next().ok_or("missing element ids")?.split(',').collect();
        if let Some(bad) = ids.iter().find(|id| !valid_id(id) && !(kind == "segment" && id.contains('>'))) {
            return Err(format!("invalid element id {bad:?}"));
        }
        let names = || ids.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let subject = match kind {
            "vertex" => Subject::Vertex(names()),
            "dep" => Subject::Departure(names()),
            "arr" => Subject::Arrival(names()),
            "segment" => Subject::Segment(
                ids.iter()
                    .map(|id| match id.split_once('>') {
                        Some((u, v)) if valid_id(u) && valid_id(v) => Ok((u.to_string(), v.to_string())),
                        _ => Err(format!("invalid segment {id:?}, expected TAIL>HEAD")),
                    })
                    .collect::<Result<_, _>>()?,
            ),
            other => return Err(format!("unknown literal kind {other:?}")),
        };
        let mut levels = None;
        let mut negated = false;
        for p in parts {
            if p == "neg" && !negated {
                negated = true;
            } else if levels.is_none() && !negated {
                let (lo, hi) = p.split_once('-').ok_or_else(|| format!("invalid level interval {p:?}"))?;
                let lo: Level = lo.parse().map_err(|_| format!("invalid level {lo:?}"))?;
                let hi: Level = hi.parse().map_err(|_| format!("invalid level {hi:?}"))?;
                if lo == 0 || lo > hi {
                    return Err(format!("empty level interval {p:?}"));
                }
                levels = Some((lo, hi));
            } else {
                return Err(format!("unexpected field {p:?}"));
            }
        }
        Ok(TfrLiteral {
            subject,
            levels,
            negated,
        })
    }
}

impl fmt::Display for Tfr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, clause) in self.dnf.iter().enumerate() {
            if i > 0 {
                write!(f, " |")?;
            }
            for l in clause {
                write!(f, " {l}")?;
            }
        }
        Ok(())
    }
}

/// One restriction per line: a name followed by literals, with `|`
/// separating the conjunctions. Blank lines and `#` comments are skipped.
pub fn parse_tfrs(text: &str) -> Result<Vec<Tfr>, TfrParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or_default();
        let mut tokens = tokens_with_columns(content);
        let Some((_, name)) = tokens.next() else {
            continue;
        };
        let err = |column: usize, message: String| TfrParseError {
            line: ln + 1,
            column,
            message,
        };
        if !valid_id(name) {
            return Err(err(1, format!("invalid restriction name {name:?}")));
        }
        let mut dnf = vec![Vec::new()];
        let mut last_col = name.len() + 1;
        for (col, tok) in tokens {
            last_col = col;
            if tok == "|" {
                if dnf.last().is_some_and(Vec::is_empty) {
                    return Err(err(col, "empty conjunction".into()));
                }
                dnf.push(Vec::new());
            } else {
                let lit = tok.parse::<TfrLiteral>().map_err(|m| err(col, m))?;
                dnf.last_mut().unwrap().push(lit);
            }
        }
        if dnf.last().is_some_and(Vec::is_empty) {
            return Err(err(last_col, "empty conjunction".into()));
        }
        out.push(Tfr {
            name: name.to_string(),
            dnf,
        });
    }
    Ok(out)
}

pub fn write_tfrs(tfrs: &[Tfr]) -> String {
    tfrs.iter().map(|t| format!("{t}\n")).collect()
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let len = rest[start..].find(char::is_whitespace).unwrap_or(rest.len() - start);
        let tok = &rest[start..start + len];
        let col = line[..offset + start].chars().count() + 1;
        offset += start + len;
        rest = &rest[start + len..];
        Some((col, tok))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_forms() {
        let l: TfrLiteral = "segment:A>B,B>C:3-5:neg".parse().unwrap();
        assert_eq!(l.subject, Subject::Segment(vec![("A".into(), "B".into()), ("B".into(), "C".into())]));
        assert_eq!(l.levels, Some((3, 5)));
        assert!(l.negated);
        assert_eq!(l.to_string(), "segment:A>B,B>C:3-5:neg");
        let v: TfrLiteral = "vertex:X".parse().unwrap();
        assert_eq!(v, TfrLiteral { subject: Subject::Vertex(vec!["X".into()]), levels: None, negated: false });
        assert!("dep:EDDF:neg".parse::<TfrLiteral>().unwrap().negated);
    }

    #[test]
    fn literal_errors() {
        for bad in ["vertex", "foo:A", "vertex:A:5-3", "vertex:A:neg:2-3", "segment:AB", "vertex:A:x", "vertex:"] {
            assert!(bad.parse::<TfrLiteral>().is_err(), "{bad}");
        }
    }

    #[test]
    fn file_round_trip() {
        let text = "T1 vertex:B:2-3 segment:A>B | arr:EDDF:neg\nT2 dep:EGLL\n";
        let tfrs = parse_tfrs(text).unwrap();
        assert_eq!(tfrs.len(), 2);
        assert_eq!(tfrs[0].dnf.len(), 2);
        assert_eq!(write_tfrs(&tfrs), text);
    }

    #[test]
    fn errors_carry_location() {
        let e = parse_tfrs("\nT1 vertex:A  bogus:B\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 14));
        let e = parse_tfrs("T1 vertex:A |\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_tfrs("T1\n").is_err());
        assert!(parse_tfrs("# only a comment\n\n").unwrap().is_empty());
    }
}
