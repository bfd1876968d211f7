use std::fmt;
use std::sync::Arc;

/// A symbol: either a dual-basis coordinate `x<i>` (1-based) or a named
/// scalar parameter such as `p`, `q`, `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Coord(u32),
    Param(char),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Coord(i) => write!(f, "x{i}"),
            Var::Param(c) => write!(f, "{c}"),
        }
    }
}

/// An ordered list of symbols fixing the exponent-vector layout of every
/// polynomial built over it. Coordinates come first (ascending index),
/// then parameters (ascending name); [`VarSet::new`] enforces the order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSet {
    vars: Arc<Vec<Var>>,
}

impl VarSet {
    /// Builds a variable set, sorting into the canonical coordinate-then-
    /// parameter order and dropping duplicates.
    pub fn new(mut vars: Vec<Var>) -> Self {
        vars.sort();
        vars.dedup();
        VarSet { vars: Arc::new(vars) }
    }

    /// Coordinates `x1..xn` followed by the given parameters.
    pub fn coords_and_params(n: u32, params: &[char]) -> Self {
        let mut v: Vec<Var> = (1..=n).map(Var::Coord).collect();
        v.extend(params.iter().copied().map(Var::Param));
        VarSet::new(v)
    }

    pub fn params_only(params: &[char]) -> Self {
        VarSet::new(params.iter().copied().map(Var::Param).collect())
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn index_of(&self, v: Var) -> Option<usize> {
        self.vars.binary_search(&v).ok()
    }

    pub fn var_at(&self, i: usize) -> Var {
        self.vars[i]
    }

    /// True when `other` contains every variable of `self`.
    pub fn subset_of(&self, other: &VarSet) -> bool {
        self.vars.iter().all(|v| other.index_of(*v).is_some())
    }

    /// Union of two variable sets.
    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut v: Vec<Var> = self.vars.iter().chain(other.vars.iter()).copied().collect();
        v.sort();
        v.dedup();
        VarSet { vars: Arc::new(v) }
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.vars.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_coords_then_params() {
        let vs = VarSet::new(vec![Var::Param('q'), Var::Coord(3), Var::Param('p'), Var::Coord(1)]);
        assert_eq!(
            vs.vars(),
            &[Var::Coord(1), Var::Coord(3), Var::Param('p'), Var::Param('q')]
        );
    }

    #[test]
    fn index_lookup() {
        let vs = VarSet::coords_and_params(3, &['p']);
        assert_eq!(vs.index_of(Var::Coord(2)), Some(1));
        assert_eq!(vs.index_of(Var::Param('p')), Some(3));
        assert_eq!(vs.index_of(Var::Param('r')), None);
    }
}
