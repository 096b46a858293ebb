use std::fmt;
use std::ops::Not;

/// A propositional variable, dense ids starting at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn lit(self, polarity: bool) -> Lit {
        Lit::new(self, polarity)
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Literal encoded as `var << 1 | negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, polarity: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!polarity))
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index usable for per-literal tables.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Signed 1-based DIMACS encoding.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(value: i64) -> Option<Lit> {
        if value == 0 {
            return None;
        }
        let var = u32::try_from(value.unsigned_abs() - 1).ok()?;
        Some(Lit::new(Var(var), value > 0))
    }
}

impl Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "{}", self.var())
        } else {
            write!(f, "¬{}", self.var())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Mapped to an arc of the routing graph.
    Graph,
    /// Not mapped to any arc (e.g. Tseitin or aggregate variables).
    Free,
}

pub type ClauseId = usize;

/// A disjunction of literals without duplicates. Literal order is kept as
/// given, it matters for the clause branching rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Removes duplicate literals. Returns `None` for tautologies.
    pub fn normalize(lits: impl IntoIterator<Item = Lit>) -> Option<Clause> {
        let mut out: Vec<Lit> = Vec::new();
        for lit in lits {
            if out.contains(&!lit) {
                return None;
            }
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Some(Clause { lits: out })
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }
}

/// Clause database with a per-literal occurrence index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    kinds: Vec<VarKind>,
    clauses: Vec<Clause>,
    occurs: Vec<Vec<ClauseId>>,
    dropped_tautologies: usize,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(kinds: impl IntoIterator<Item = VarKind>) -> Self {
        let mut f = Self::new();
        for k in kinds {
            f.add_var(k);
        }
        f
    }

    pub fn add_var(&mut self, kind: VarKind) -> Var {
        let v = Var(self.kinds.len() as u32);
        self.kinds.push(kind);
        self.occurs.push(Vec::new());
        self.occurs.push(Vec::new());
        v
    }

    /// Adds a clause, dropping duplicate literals. Tautologies are dropped
    /// with a warning and `None` is returned.
    ///
    /// Panics if a literal references an undeclared variable.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) -> Option<ClauseId> {
        let lits: Vec<Lit> = lits.into_iter().collect();
        for l in &lits {
            assert!(
                l.var().index() < self.kinds.len(),
                "literal {l} references an undeclared variable"
            );
        }
        let Some(clause) = Clause::normalize(lits) else {
            log::warn!("dropping tautological clause");
            self.dropped_tautologies += 1;
            return None;
        };
        let id = self.clauses.len();
        for l in clause.lits() {
            self.occurs[l.index()].push(id);
        }
        self.clauses.push(clause);
        Some(id)
    }

    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn kind(&self, var: Var) -> VarKind {
        self.kinds[var.index()]
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.clauses[id]
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clauses containing `lit`, in increasing id order.
    pub fn occurrences(&self, lit: Lit) -> &[ClauseId] {
        &self.occurs[lit.index()]
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.kinds.len() as u32).map(Var)
    }

    pub fn free_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.vars().filter(|v| self.kind(*v) == VarKind::Free)
    }

    pub fn graph_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.vars().filter(|v| self.kind(*v) == VarKind::Graph)
    }

    pub fn dropped_tautologies(&self) -> usize {
        self.dropped_tautologies
    }

    /// Evaluates a full assignment (`values[v]` is the value of `v`).
    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.lits()
                .iter()
                .any(|l| values[l.var().index()] == l.is_positive())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_is_an_involution() {
        let l = Var(7).neg();
        assert_eq!(!!l, l);
        assert_ne!(!l, l);
        assert_eq!((!l).var(), Var(7));
        assert!((!l).is_positive());
    }

    #[test]
    fn dimacs_codes() {
        assert_eq!(Lit::from_dimacs(1), Some(Var(0).pos()));
        assert_eq!(Lit::from_dimacs(-2), Some(Var(1).neg()));
        assert_eq!(Lit::from_dimacs(0), None);
        assert_eq!(Var(4).neg().to_dimacs(), -5);
    }

    #[test]
    fn tautologies_dropped_duplicates_kept() {
        let mut f = CnfFormula::with_vars([VarKind::Free; 2]);
        let a = Var(0);
        let b = Var(1);
        assert_eq!(f.add_clause([a.pos(), a.neg()]), None);
        assert_eq!(f.dropped_tautologies(), 1);
        let c0 = f.add_clause([a.pos(), b.pos(), a.pos()]).unwrap();
        let c1 = f.add_clause([a.pos(), b.pos()]).unwrap();
        assert_eq!(f.clause(c0).lits(), &[a.pos(), b.pos()]);
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.occurrences(a.pos()), &[c0, c1]);
        assert!(f.occurrences(a.neg()).is_empty());
    }
}
