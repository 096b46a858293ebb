use std::collections::BTreeMap;

use super::formula::{CnfFormula, Lit, Var, VarKind};
use super::LogicError;

/// A restriction in disjunctive normal form: a disjunction of conjunctions.
pub type DnfRestriction = Vec<Vec<Lit>>;

/// What a defined free variable stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Definition {
    /// Tseitin variable of a DNF clause: true iff all literals hold.
    And(Vec<Lit>),
    /// Aggregate variable: true iff some literal holds.
    Or(Vec<Lit>),
}

impl Definition {
    pub fn lits(&self) -> &[Lit] {
        match self {
            Definition::And(l) | Definition::Or(l) => l,
        }
    }

    /// Three-valued evaluation under a partial assignment of the operands.
    pub fn evaluate(&self, mut value: impl FnMut(Lit) -> Option<bool>) -> Option<bool> {
        let (absorbing, lits) = match self {
            Definition::And(l) => (false, l),
            Definition::Or(l) => (true, l),
        };
        let mut unknown = false;
        for &l in lits {
            match value(l) {
                Some(v) if v == absorbing => return Some(absorbing),
                Some(_) => {}
                None => unknown = true,
            }
        }
        if unknown {
            None
        } else {
            Some(!absorbing)
        }
    }
}

/// Maps each variable introduced by compilation to the sub-formula it
/// represents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClauseVarMap {
    defs: BTreeMap<Var, Definition>,
}

impl ClauseVarMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: Var, def: Definition) -> Option<Definition> {
        self.defs.insert(var, def)
    }

    pub fn get(&self, var: Var) -> Option<&Definition> {
        self.defs.get(&var)
    }

    pub fn contains(&self, var: Var) -> bool {
        self.defs.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Definition)> {
        self.defs.iter().map(|(v, d)| (*v, d))
    }

    /// Checks that every defined variable exists and is free.
    pub fn validate(&self, formula: &CnfFormula) -> Result<(), LogicError> {
        for (v, def) in self.iter() {
            if v.index() >= formula.num_vars() {
                return Err(LogicError::UnknownVariable(v.0));
            }
            if formula.kind(v) == VarKind::Graph {
                return Err(LogicError::DefinedGraphVariable(v.0));
            }
            if let Some(l) = def.lits().iter().find(|l| l.var().index() >= formula.num_vars()) {
                return Err(LogicError::UnknownVariable(l.var().0));
            }
        }
        Ok(())
    }
}

/// Appends Tseitin encodings of DNF restrictions to a formula.
///
/// For a restriction `(l11 ∧ … ∧ l1k1) ∨ … ∨ (lr1 ∧ … ∧ lrkr)` fresh free
/// variables `C1..Cr` are created, and the clauses `{C1,…,Cr}`,
/// `{Ci, ¬li1, …, ¬liki}` and `{¬Ci, lij}` are added, so `Ci ⇔ (li1 ∧ … ∧ liki)`.
pub struct TseitinEncoder<'a> {
    formula: &'a mut CnfFormula,
    map: &'a mut ClauseVarMap,
}

impl<'a> TseitinEncoder<'a> {
    pub fn new(formula: &'a mut CnfFormula, map: &'a mut ClauseVarMap) -> Self {
        TseitinEncoder { formula, map }
    }

    /// Encodes one restriction, returning its clause variables. `index` is
    /// only used for error reporting.
    pub fn encode(&mut self, index: usize, restriction: &[Vec<Lit>]) -> Result<Vec<Var>, LogicError> {
        if let Some(pos) = restriction.iter().position(|c| c.is_empty()) {
            return Err(LogicError::EmptyDnfClause {
                restriction: index,
                clause: pos,
            });
        }
        for l in restriction.iter().flatten() {
            if l.var().index() >= self.formula.num_vars() {
                return Err(LogicError::UnknownVariable(l.var().0));
            }
        }
        let vars: Vec<Var> = restriction
            .iter()
            .map(|_| self.formula.add_var(VarKind::Free))
            .collect();
        self.formula.add_clause(vars.iter().map(|v| v.pos()));
        for (c, conj) in vars.iter().zip(restriction) {
            self.formula
                .add_clause(std::iter::once(c.pos()).chain(conj.iter().map(|&l| !l)));
            for &l in conj {
                self.formula.add_clause([c.neg(), l]);
            }
            self.map.insert(*c, Definition::And(conj.clone()));
        }
        Ok(vars)
    }
}

/// Compiles a conjunction of DNF restrictions over the graph variables
/// `0..num_graph_vars` into an equisatisfiable CNF.
pub fn compile_dnf_restrictions(
    num_graph_vars: usize,
    restrictions: &[DnfRestriction],
) -> Result<(CnfFormula, ClauseVarMap), LogicError> {
    let mut formula = CnfFormula::with_vars(vec![VarKind::Graph; num_graph_vars]);
    let mut map = ClauseVarMap::new();
    let mut enc = TseitinEncoder::new(&mut formula, &mut map);
    for (i, r) in restrictions.iter().enumerate() {
        enc.encode(i, r)?;
    }
    Ok((formula, map))
}
