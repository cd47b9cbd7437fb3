//! Line-oriented plain-text format for structures and certificates.
//!
//! ```text
//! # comment
//! variant k=2 cap=1,2
//! strict=1
//! vertex a
//! param b
//! edge 1 a b
//! rho 2 b a
//! ```
//!
//! Identifiers match `[A-Za-z0-9_]+`. Serialization is canonical: sorted
//! identifiers, edges with the smaller endpoint first. Parsing a serialized
//! structure gives the structure back; serializing a parsed file
//! canonicalizes it.

use std::fmt;

use thiserror::Error;

use crate::error::CoreError;
use crate::forest::VertexId;
use crate::independence::{FamilyCertificate, ForkingCertificate};
use crate::structure::{Structure, StructureBuilder};
use crate::variant::{Color, TheoryVariant};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn core_message(e: &CoreError) -> String {
    match e {
        CoreError::SelfEdge(_) | CoreError::DuplicateEdge(_, _) => format!("{e} (C1)"),
        CoreError::WouldCycle(_, _) => format!("{e} (C2)"),
        CoreError::MissingRho { .. } => format!("{e} (C3)"),
        CoreError::NotCopacetic(_) => format!("{e} (C4)"),
        _ => e.to_string(),
    }
}

/// Meaningful lines with their 1-based numbers: comments and blanks gone.
fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = stripped.trim();
        if trimmed.is_empty() {
            None
        } else {
            Some((i + 1, trimmed))
        }
    })
}

fn parse_header(line: usize, text: &str) -> Result<TheoryVariant, ParseError> {
    let rest = text
        .strip_prefix("variant")
        .ok_or_else(|| err(line, "expected `variant k=<k> cap=<c1,..,ck>` header"))?
        .trim();
    let mut k: Option<usize> = None;
    let mut caps: Option<Vec<usize>> = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("k=") {
            k = Some(
                v.parse()
                    .map_err(|_| err(line, format!("bad color count `{v}`")))?,
            );
        } else if let Some(v) = field.strip_prefix("cap=") {
            let parsed: Result<Vec<usize>, _> = v.split(',').map(str::parse).collect();
            caps = Some(parsed.map_err(|_| err(line, format!("bad capacity list `{v}`")))?);
        } else {
            return Err(err(line, format!("unknown header field `{field}`")));
        }
    }
    let k = k.ok_or_else(|| err(line, "header is missing k="))?;
    let caps = caps.ok_or_else(|| err(line, "header is missing cap="))?;
    if caps.len() != k {
        return Err(err(line, format!("k={k} but {} capacities", caps.len())));
    }
    TheoryVariant::new(caps).map_err(|e| err(line, e.to_string()))
}

fn parse_color(line: usize, text: &str) -> Result<Color, ParseError> {
    let value: u8 = text
        .parse()
        .map_err(|_| err(line, format!("bad color `{text}`")))?;
    Color::new(value).map_err(|e| err(line, e.to_string()))
}

/// Parse a structure file. C1-C3 are enforced unconditionally; the header's
/// strict flag decides whether capacity violations are rejected here or
/// left to the verifiers.
pub fn parse_structure(text: &str) -> Result<Structure, ParseError> {
    parse_structure_with(text, None)
}

/// Like [`parse_structure`], with the strict flag overridden; verifiers use
/// a lenient parse so they have something to report on.
pub fn parse_structure_with(
    text: &str,
    strict_override: Option<bool>,
) -> Result<Structure, ParseError> {
    let mut lines = meaningful_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty input: missing variant header"))?;
    let variant = parse_header(header_line, header)?;

    let mut strict = strict_override.unwrap_or(true);
    let mut builder: Option<StructureBuilder> = None;
    let mut last_line = header_line;
    for (line, text) in lines {
        last_line = line;
        if let Some(v) = text.strip_prefix("strict=") {
            if builder.is_some() {
                return Err(err(line, "strict flag must precede the body"));
            }
            strict = match v.trim() {
                "0" => false,
                "1" => true,
                other => return Err(err(line, format!("bad strict flag `{other}`"))),
            };
            if let Some(forced) = strict_override {
                strict = forced;
            }
            continue;
        }
        let b = builder
            .take()
            .unwrap_or_else(|| StructureBuilder::new(variant.clone()).strict(strict));
        let fields: Vec<&str> = text.split_whitespace().collect();
        let built = match fields.as_slice() {
            ["vertex", id] => b.vertex(*id),
            ["param", id] => b.param(*id),
            ["edge", color, u, v] => {
                let color = parse_color(line, color)?;
                b.edge(color.get(), *u, *v)
            }
            ["rho", color, p, v] => {
                let color = parse_color(line, color)?;
                b.rho(color.get(), *p, *v)
            }
            _ => return Err(err(line, format!("unrecognized line `{text}`"))),
        };
        builder = Some(built.map_err(|e| err(line, core_message(&e)))?);
    }
    let builder =
        builder.unwrap_or_else(|| StructureBuilder::new(variant.clone()).strict(strict));
    builder
        .build()
        .map_err(|e| err(last_line, core_message(&e)))
}

/// Canonical text form: header, sorted vertices, sorted params, edges with
/// the smaller endpoint first in ascending order, rho rows in ascending
/// (param, vertex) order.
pub fn serialize_structure(s: &Structure) -> String {
    let mut out = String::new();
    let caps: Vec<String> = s
        .variant()
        .capacities()
        .iter()
        .map(|c| c.to_string())
        .collect();
    out.push_str(&format!(
        "variant k={} cap={}\n",
        s.variant().color_count(),
        caps.join(",")
    ));
    out.push_str(&format!("strict={}\n", if s.strict() { 1 } else { 0 }));
    for v in s.forest().vertices() {
        out.push_str(&format!("vertex {v}\n"));
    }
    for p in s.params() {
        out.push_str(&format!("param {p}\n"));
    }
    for (u, v, c) in s.forest().edges() {
        out.push_str(&format!("edge {c} {u} {v}\n"));
    }
    for p in s.params() {
        for (v, c) in s.rho_row(p).unwrap() {
            out.push_str(&format!("rho {c} {p} {v}\n"));
        }
    }
    out
}

/// Certificate text form:
///
/// ```text
/// certificate target=o radius=2
/// family color=1 center=u degree=2 members=o,o2
/// ```
pub fn serialize_certificate(cert: &ForkingCertificate) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "certificate target={} radius={}\n",
        cert.target, cert.radius
    ));
    for fam in &cert.families {
        let members: Vec<&str> = fam.members.iter().map(|v| v.as_str()).collect();
        out.push_str(&format!(
            "family color={} center={} degree={} members={}\n",
            fam.color,
            fam.center,
            fam.degree,
            members.join(",")
        ));
    }
    out
}

pub fn parse_certificate(text: &str) -> Result<ForkingCertificate, ParseError> {
    let mut lines = meaningful_lines(text);
    let (first_line, first) = lines
        .next()
        .ok_or_else(|| err(1, "empty input: missing certificate header"))?;
    let rest = first
        .strip_prefix("certificate")
        .ok_or_else(|| err(first_line, "expected `certificate` header"))?
        .trim();
    let mut target: Option<VertexId> = None;
    let mut radius: Option<u32> = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("target=") {
            target = Some(VertexId::new(v));
        } else if let Some(v) = field.strip_prefix("radius=") {
            radius = Some(
                v.parse()
                    .map_err(|_| err(first_line, format!("bad radius `{v}`")))?,
            );
        } else {
            return Err(err(first_line, format!("unknown field `{field}`")));
        }
    }
    let target = target.ok_or_else(|| err(first_line, "missing target="))?;
    let radius = radius.ok_or_else(|| err(first_line, "missing radius="))?;

    let mut families = Vec::new();
    for (line, text) in lines {
        let rest = text
            .strip_prefix("family")
            .ok_or_else(|| err(line, format!("unrecognized line `{text}`")))?
            .trim();
        let mut color: Option<Color> = None;
        let mut center: Option<VertexId> = None;
        let mut degree: Option<usize> = None;
        let mut members = None;
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("color=") {
                color = Some(parse_color(line, v)?);
            } else if let Some(v) = field.strip_prefix("center=") {
                center = Some(VertexId::new(v));
            } else if let Some(v) = field.strip_prefix("degree=") {
                degree = Some(
                    v.parse()
                        .map_err(|_| err(line, format!("bad degree `{v}`")))?,
                );
            } else if let Some(v) = field.strip_prefix("members=") {
                members = Some(v.split(',').map(VertexId::new).collect());
            } else {
                return Err(err(line, format!("unknown field `{field}`")));
            }
        }
        families.push(FamilyCertificate {
            color: color.ok_or_else(|| err(line, "missing color="))?,
            center: center.ok_or_else(|| err(line, "missing center="))?,
            members: members.ok_or_else(|| err(line, "missing members="))?,
            degree: degree.ok_or_else(|| err(line, "missing degree="))?,
        });
    }
    Ok(ForkingCertificate {
        target,
        radius,
        families,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::verify_copacetic;
    use crate::independence::existence_failure_certificate;

    const GADGET: &str = "\
# six-vertex gadget
variant k=2 cap=1,2
strict=1
vertex o
vertex o2
vertex u
vertex v
vertex w1
vertex w2
edge 1 o u
edge 1 o2 u
edge 2 o v
edge 2 v w1
edge 2 v w2
";

    #[test]
    fn parses_empty_body() {
        let s = parse_structure("variant k=2 cap=1,2\nstrict=1\n").unwrap();
        assert_eq!(s.vertex_count(), 0);
        assert_eq!(s.param_count(), 0);
        // strict line is optional.
        let s2 = parse_structure("variant k=2 cap=1,2\n").unwrap();
        assert!(s2.strict());
    }

    #[test]
    fn parses_gadget_and_round_trips() {
        let s = parse_structure(GADGET).unwrap();
        assert!(verify_copacetic(&s).is_empty());
        let text = serialize_structure(&s);
        let s2 = parse_structure(&text).unwrap();
        assert_eq!(s, s2);
        // Serialization of a parse is canonical.
        assert_eq!(serialize_structure(&s2), text);
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let reordered = "\
variant k=2 cap=1,2
vertex u
vertex o2
vertex o
vertex w2
vertex w1
vertex v
edge 2 v w2
edge 2 o v
edge 1 o u
edge 2 v w1
edge 1 o2 u
";
        let a = parse_structure(GADGET).unwrap();
        let b = parse_structure(reordered).unwrap();
        assert_eq!(serialize_structure(&a), serialize_structure(&b));
    }

    #[test]
    fn cycle_error_names_the_axiom() {
        let text = "\
variant k=2 cap=1,2
vertex a
vertex b
vertex c
edge 1 a b
edge 1 b c
edge 2 c a
";
        let e = parse_structure(text).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.message.contains("(C2)"), "{}", e.message);
    }

    #[test]
    fn missing_rho_and_unknown_lines() {
        let text = "variant k=2 cap=1,2\nvertex a\nparam b\n";
        let e = parse_structure(text).unwrap_err();
        assert!(e.message.contains("(C3)"), "{}", e.message);
        let e2 = parse_structure("variant k=2 cap=1,2\nfrobnicate\n").unwrap_err();
        assert_eq!(e2.line, 2);
    }

    #[test]
    fn strict_flag_gates_capacity_enforcement() {
        let violating = "\
variant k=2 cap=1,2
strict=STRICT
vertex u
vertex a1
vertex a2
param b
edge 1 u a1
edge 1 u a2
rho 2 b u
rho 1 b a1
rho 1 b a2
";
        let lenient = parse_structure(&violating.replace("STRICT", "0")).unwrap();
        assert!(!verify_copacetic(&lenient).is_empty());
        let e = parse_structure(&violating.replace("STRICT", "1")).unwrap_err();
        assert!(e.message.contains("(C4)"), "{}", e.message);
    }

    #[test]
    fn certificate_round_trip() {
        let s = parse_structure(GADGET).unwrap();
        let cert = existence_failure_certificate(&s, &VertexId::new("o"), 2).unwrap();
        let text = serialize_certificate(&cert);
        let parsed = parse_certificate(&text).unwrap();
        assert_eq!(parsed, cert);
    }
}
