use super::formula::{Lit, Var};

/// Why a literal entered the trail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    Decision,
    UnitPropagation,
    PureLiteral,
    Enforcement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrailMark(pub usize);

/// A contradiction-free, ordered set of literals with per-entry reasons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trail {
    entries: Vec<(Lit, Reason)>,
    values: Vec<Option<bool>>,
}

impl Trail {
    pub fn new(num_vars: usize) -> Self {
        Trail {
            entries: Vec::new(),
            values: vec![None; num_vars],
        }
    }

    /// Builds a trail of decisions. Returns `None` if `lits` is contradictory.
    pub fn from_lits(num_vars: usize, lits: impl IntoIterator<Item = Lit>) -> Option<Self> {
        let mut t = Trail::new(num_vars);
        for l in lits {
            match t.value(l.var()) {
                Some(v) if v != l.is_positive() => return None,
                Some(_) => {}
                None => {
                    t.push(l, Reason::Decision);
                }
            }
        }
        Some(t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn mark(&self) -> TrailMark {
        TrailMark(self.entries.len())
    }

    pub fn entries(&self) -> &[(Lit, Reason)] {
        &self.entries
    }

    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.entries.iter().map(|(l, _)| *l)
    }

    #[inline]
    pub fn value(&self, var: Var) -> Option<bool> {
        self.values[var.index()]
    }

    /// `Some(true)` if `lit` is in the trail, `Some(false)` if its negation is.
    #[inline]
    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.values[lit.var().index()].map(|v| v == lit.is_positive())
    }

    #[inline]
    pub fn is_assigned(&self, var: Var) -> bool {
        self.values[var.index()].is_some()
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    /// Appends an unassigned literal.
    ///
    /// Panics if the variable is already assigned; callers only extend the
    /// trail with unassigned literals.
    pub(crate) fn push(&mut self, lit: Lit, reason: Reason) {
        let slot = &mut self.values[lit.var().index()];
        assert!(slot.is_none(), "variable {} assigned twice", lit.var());
        *slot = Some(lit.is_positive());
        self.entries.push((lit, reason));
    }

    pub(crate) fn pop(&mut self) -> Option<(Lit, Reason)> {
        let e = self.entries.pop()?;
        self.values[e.0.var().index()] = None;
        Some(e)
    }
}
