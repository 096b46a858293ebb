//! Plain-text instance format.
//!
//! ```text
//! vertices 3
//! source 0
//! target 2
//! arc 0 0 1 1
//! arc 1 1 2 1
//! arc 2 0 2 5
//! p cnf 4 2
//! 3 4 0
//! 3 -4 0
//! map 1 0
//! map 2 1
//! map 3 2
//! ```
//!
//! Variables use DIMACS numbering (from 1). Mapped variables are graph
//! variables, the rest are free. Optional lines: `def <var> and|or <lits> 0`
//! for variables defined by compilation, `scale <units>` for the weight
//! unit, and `h <vertex> <value>` for a heuristic covering every vertex.
//! Lines starting with `c` are comments and are not preserved.

use std::fmt::Write as _;
use std::str::FromStr;

use lcsp_core::dag::{Dag, DagError};
use lcsp_core::logic::{ClauseVarMap, CnfFormula, Definition, Lit, Var, VarKind};
use lcsp_core::solver::{Instance, InstanceError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefKind {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefLine {
    pub var: u32,
    pub kind: DefKind,
    pub lits: Vec<i64>,
}

/// Syntactic content of an instance file, kept close to the text so that
/// writing a parsed file reproduces it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LcspFile {
    pub num_vertices: usize,
    pub source: usize,
    pub target: usize,
    /// `(tail, head, weight)` indexed by arc id.
    pub arcs: Vec<(usize, usize, i64)>,
    pub num_vars: usize,
    /// DIMACS literals.
    pub clauses: Vec<Vec<i64>>,
    /// `(variable, arc)` with 1-based variables.
    pub map: Vec<(u32, usize)>,
    pub defs: Vec<DefLine>,
    pub scale: Option<f64>,
    pub heuristic: Option<Vec<i64>>,
}

struct Cursor<'a> {
    line: usize,
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push((text[..s].chars().count() + 1, &text[s..i]));
                    start = None;
                }
                _ => {}
            }
        }
        Cursor { line, tokens, pos: 0 }
    }

    fn err_at(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn column(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or(self.tokens.last())
            .map_or(1, |t| t.0 + if self.pos >= self.tokens.len() { t.1.len() } else { 0 })
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<(usize, T), ParseError> {
        let col = self.column();
        let (col, tok) = *self.tokens.get(self.pos).ok_or_else(|| self.err_at(col, format!("expected {what}")))?;
        self.pos += 1;
        tok.parse()
            .map(|v| (col, v))
            .map_err(|_| self.err_at(col, format!("invalid {what} {tok:?}")))
    }

    fn end(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(&(col, tok)) => Err(self.err_at(col, format!("unexpected {tok:?}"))),
        }
    }

    /// Signed literals up to a terminating 0.
    fn lits(&mut self, num_vars: usize) -> Result<Vec<i64>, ParseError> {
        let mut out = Vec::new();
        loop {
            let (col, v): (usize, i64) = self.next("literal")?;
            if v == 0 {
                return Ok(out);
            }
            if v.unsigned_abs() as usize > num_vars {
                return Err(self.err_at(col, format!("literal {v} exceeds {num_vars} variables")));
            }
            out.push(v);
        }
    }
}

impl LcspFile {
    pub fn parse(text: &str) -> Result<LcspFile, ParseError> {
        let mut f = LcspFile::default();
        let mut seen_vertices = None;
        let mut seen = (false, false);
        let mut header: Option<(usize, usize)> = None;
        let mut heuristic: Vec<Option<i64>> = Vec::new();
        let mut arc_ids: Vec<Option<(usize, usize, i64)>> = Vec::new();
        let mut last_line = 0;
        let mut map_locations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let mut c = Cursor::new(i + 1, raw);
            last_line = i + 1;
            let Some(&(col, kw)) = c.tokens.first() else {
                continue;
            };
            if kw == "c" {
                continue;
            }
            let need_vertices = |c: &Cursor| seen_vertices.ok_or_else(|| c.err_at(col, "`vertices` must come first"));
            let vertex = |c: &mut Cursor, n: usize| -> Result<usize, ParseError> {
                let (col, v): (usize, usize) = c.next("vertex")?;
                if v >= n {
                    return Err(c.err_at(col, format!("vertex {v} out of range 0..{n}")));
                }
                Ok(v)
            };
            if kw.starts_with(|ch: char| ch == '-' || ch.is_ascii_digit()) {
                let (nv, _) = header.ok_or_else(|| c.err_at(col, "clause before `p cnf` header"))?;
                f.clauses.push(c.lits(nv)?);
                c.end()?;
                continue;
            }
            c.pos = 1;
            match kw {
                "vertices" => {
                    if seen_vertices.is_some() {
                        return Err(c.err_at(col, "duplicate `vertices` line"));
                    }
                    let (_, n) = c.next("vertex count")?;
                    seen_vertices = Some(n);
                    f.num_vertices = n;
                    heuristic = vec![None; n];
                }
                "source" => {
                    let n = need_vertices(&c)?;
                    f.source = vertex(&mut c, n)?;
                    seen.0 = true;
                }
                "target" => {
                    let n = need_vertices(&c)?;
                    f.target = vertex(&mut c, n)?;
                    seen.1 = true;
                }
                "arc" => {
                    let n = need_vertices(&c)?;
                    let (idc, id): (usize, usize) = c.next("arc id")?;
                    let tail = vertex(&mut c, n)?;
                    let head = vertex(&mut c, n)?;
                    let (wc, w): (usize, i64) = c.next("weight")?;
                    if w < 0 {
                        return Err(c.err_at(wc, "negative weight"));
                    }
                    if id >= arc_ids.len() {
                        arc_ids.resize(id + 1, None);
                    }
                    if arc_ids[id].replace((tail, head, w)).is_some() {
                        return Err(c.err_at(idc, format!("duplicate arc id {id}")));
                    }
                }
                "p" => {
                    let (fc, fmt): (usize, String) = c.next("format")?;
                    if fmt != "cnf" {
                        return Err(c.err_at(fc, "expected `p cnf`"));
                    }
                    if header.is_some() {
                        return Err(c.err_at(col, "duplicate `p cnf` header"));
                    }
                    let (_, nv) = c.next("variable count")?;
                    let (_, nc) = c.next("clause count")?;
                    header = Some((nv, nc));
                    f.num_vars = nv;
                }
                "map" => {
                    let (nv, _) = header.ok_or_else(|| c.err_at(col, "`map` before `p cnf` header"))?;
                    let (vc, v): (usize, u32) = c.next("variable")?;
                    if v == 0 || v as usize > nv {
                        return Err(c.err_at(vc, format!("variable {v} out of range 1..={nv}")));
                    }
                    let (ac, a): (usize, usize) = c.next("arc id")?;
                    f.map.push((v, a));
                    // arcs may appear later; checked at the end with this location
                    map_locations.push((i + 1, ac));
                }
                "def" => {
                    let (nv, _) = header.ok_or_else(|| c.err_at(col, "`def` before `p cnf` header"))?;
                    let (vc, v): (usize, u32) = c.next("variable")?;
                    if v == 0 || v as usize > nv {
                        return Err(c.err_at(vc, format!("variable {v} out of range 1..={nv}")));
                    }
                    let (kc, k): (usize, String) = c.next("definition kind")?;
                    let kind = match k.as_str() {
                        "and" => DefKind::And,
                        "or" => DefKind::Or,
                        _ => return Err(c.err_at(kc, format!("unknown definition kind {k:?}"))),
                    };
                    let lits = c.lits(nv)?;
                    f.defs.push(DefLine { var: v, kind, lits });
                }
                "scale" => {
                    let (sc, s): (usize, f64) = c.next("scale")?;
                    if !(s.is_finite() && s > 0.0) {
                        return Err(c.err_at(sc, "scale must be positive"));
                    }
                    f.scale = Some(s);
                }
                "h" => {
                    let n = need_vertices(&c)?;
                    let v = vertex(&mut c, n)?;
                    let (_, value) = c.next("heuristic value")?;
                    heuristic[v] = Some(value);
                }
                _ => return Err(c.err_at(col, format!("unknown keyword {kw:?}"))),
            }
            c.end()?;
        }
        let eof = |message: String| ParseError {
            line: last_line.max(1),
            column: 1,
            message,
        };
        if seen_vertices.is_none() || !seen.0 || !seen.1 {
            return Err(eof("missing `vertices`, `source` or `target`".into()));
        }
        if let Some(gap) = arc_ids.iter().position(Option::is_none) {
            return Err(eof(format!("arc ids must be contiguous, {gap} is missing")));
        }
        f.arcs = arc_ids.into_iter().map(Option::unwrap).collect();
        if let Some((_, nc)) = header.filter(|&(_, nc)| nc != f.clauses.len()) {
            return Err(eof(format!("header announces {nc} clauses, found {}", f.clauses.len())));
        }
        let mut var_used = vec![false; f.num_vars + 1];
        let mut arc_used = vec![false; f.arcs.len()];
        for (&(v, a), &(line, column)) in f.map.iter().zip(&map_locations) {
            let err = |m: String| ParseError { line, column, message: m };
            if a >= f.arcs.len() {
                return Err(err(format!("arc {a} does not exist")));
            }
            if std::mem::replace(&mut var_used[v as usize], true) || std::mem::replace(&mut arc_used[a], true) {
                return Err(err(format!("variable {v} or arc {a} mapped twice")));
            }
        }
        if heuristic.iter().any(Option::is_some) {
            if let Some(v) = heuristic.iter().position(Option::is_none) {
                return Err(eof(format!("heuristic is missing vertex {v}")));
            }
            f.heuristic = Some(heuristic.into_iter().map(Option::unwrap).collect());
        }
        Ok(f)
    }
}

fn write_lits(out: &mut String, lits: &[i64]) {
    for l in lits {
        let _ = write!(out, "{l} ");
    }
    out.push_str("0\n");
}

impl LcspFile {
    /// Canonical text; `parse(write(f)) == f`.
    pub fn write(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vertices {}", self.num_vertices);
        let _ = writeln!(out, "source {}", self.source);
        let _ = writeln!(out, "target {}", self.target);
        for (id, (u, v, w)) in self.arcs.iter().enumerate() {
            let _ = writeln!(out, "arc {id} {u} {v} {w}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            write_lits(&mut out, c);
        }
        for (v, a) in &self.map {
            let _ = writeln!(out, "map {v} {a}");
        }
        for d in &self.defs {
            let kind = match d.kind {
                DefKind::And => "and",
                DefKind::Or => "or",
            };
            let _ = write!(out, "def {} {kind} ", d.var);
            write_lits(&mut out, &d.lits);
        }
        if let Some(s) = self.scale {
            let _ = writeln!(out, "scale {s}");
        }
        if let Some(h) = &self.heuristic {
            for (v, x) in h.iter().enumerate() {
                let _ = writeln!(out, "h {v} {x}");
            }
        }
        out
    }

    pub fn to_instance(&self) -> Result<Instance<i64>, BuildError> {
        let mut dag = Dag::from_triples(self.num_vertices, self.arcs.iter().copied(), self.source, self.target)?;
        let mut kinds = vec![VarKind::Free; self.num_vars];
        for &(v, a) in &self.map {
            kinds[v as usize - 1] = VarKind::Graph;
            dag.map_arc(a, Var(v - 1))?;
        }
        let mut formula = CnfFormula::with_vars(kinds);
        let lit = |x: i64| Lit::from_dimacs(x).expect("validated literal");
        for c in &self.clauses {
            formula.add_clause(c.iter().map(|&x| lit(x)));
        }
        let mut defs = ClauseVarMap::new();
        for d in &self.defs {
            let lits = d.lits.iter().map(|&x| lit(x)).collect();
            let def = match d.kind {
                DefKind::And => Definition::And(lits),
                DefKind::Or => Definition::Or(lits),
            };
            defs.insert(Var(d.var - 1), def);
        }
        let mut inst = Instance::new(dag, formula, defs)?;
        if let Some(h) = &self.heuristic {
            inst = inst.with_heuristic(h.clone())?;
        }
        if let Some(s) = self.scale {
            inst = inst.with_unit_scale(s);
        }
        Ok(inst)
    }

    pub fn from_instance(inst: &Instance<i64>) -> LcspFile {
        let dag = inst.dag();
        let formula = inst.formula();
        LcspFile {
            num_vertices: dag.num_vertices(),
            source: dag.source(),
            target: dag.target(),
            arcs: dag.arcs().iter().map(|a| (a.tail, a.head, a.weight)).collect(),
            num_vars: formula.num_vars(),
            clauses: formula
                .clauses()
                .iter()
                .map(|c| c.lits().iter().map(|l| l.to_dimacs()).collect())
                .collect(),
            map: dag.mapping().map(|(a, v)| (v.0 + 1, a)).collect(),
            defs: inst
                .definitions()
                .iter()
                .map(|(v, d)| DefLine {
                    var: v.0 + 1,
                    kind: match d {
                        Definition::And(_) => DefKind::And,
                        Definition::Or(_) => DefKind::Or,
                    },
                    lits: d.lits().iter().map(|l| l.to_dimacs()).collect(),
                })
                .collect(),
            scale: (inst.unit_scale() != 1.0).then(|| inst.unit_scale()),
            heuristic: inst.heuristic().map(<[i64]>::to_vec),
        }
    }
}
