use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::vars::{Var, VarSet};
use crate::Q;

/// Exponent vector aligned with a [`VarSet`]. Ordered graded-lexicographically
/// so the maximum key of a term map is the leading monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn unit(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Componentwise division; `None` when some exponent would go negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u16>>>()
            .map(Monomial)
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with arbitrary-precision rational
/// coefficients. Zero coefficients are never stored, so structural equality
/// is semantic equality over a common [`VarSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: VarSet,
    terms: BTreeMap<Monomial, Q>,
}

impl MultiPoly {
    pub fn zero(vars: &VarSet) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &VarSet, c: Q) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        MultiPoly::constant(vars, Q::one())
    }

    /// The polynomial `v`, which must belong to the variable set.
    pub fn var(vars: &VarSet, v: Var) -> Self {
        let idx = vars.index_of(v).expect("variable not in VarSet");
        let mut e = vec![0u16; vars.len()];
        e[idx] = 1;
        let mut p = MultiPoly::zero(vars);
        p.terms.insert(Monomial(e), Q::one());
        p
    }

    pub fn monomial(vars: &VarSet, exps: Vec<u16>, c: Q) -> Self {
        assert_eq!(exps.len(), vars.len());
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_unit())
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            Some(Q::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u16 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    /// Leading term under graded lex.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    fn insert_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "VarSet mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, other.vars, "VarSet mismatch");
        let mut out = MultiPoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.clone() * c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to the variable `v`.
    pub fn derivative(&self, v: Var) -> MultiPoly {
        let idx = match self.vars.index_of(v) {
            Some(i) => i,
            None => return MultiPoly::zero(&self.vars),
        };
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut me = m.clone();
            me.0[idx] = e - 1;
            out.insert_term(me, c * Q::from_integer(e.into()));
        }
        out
    }

    /// Full evaluation; `vals` aligned with the variable set.
    pub fn eval(&self, vals: &[Q]) -> Q {
        assert_eq!(vals.len(), self.vars.len());
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &vals[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes values for a subset of the variables, returning a
    /// polynomial over the same variable set with those exponents zeroed.
    pub fn eval_partial(&self, assignment: &BTreeMap<Var, Q>) -> MultiPoly {
        let idxs: Vec<(usize, Q)> = assignment
            .iter()
            .filter_map(|(v, q)| self.vars.index_of(*v).map(|i| (i, q.clone())))
            .collect();
        if idxs.is_empty() {
            return self.clone();
        }
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut me = m.clone();
            for (i, q) in &idxs {
                for _ in 0..me.0[*i] {
                    coeff *= q;
                }
                me.0[*i] = 0;
            }
            out.insert_term(me, coeff);
        }
        out
    }

    /// Re-embeds the polynomial into a larger variable set.
    pub fn extend_to(&self, target: &VarSet) -> MultiPoly {
        if &self.vars == target {
            return self.clone();
        }
        let map: Vec<usize> = self
            .vars
            .vars()
            .iter()
            .map(|v| target.index_of(*v).expect("target VarSet must contain all variables"))
            .collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; target.len()];
            for (i, &exp) in m.0.iter().enumerate() {
                e[map[i]] = exp;
            }
            out.insert_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact multivariate division. Returns `None` when `self` is not an
    /// exact multiple of `d`.
    pub fn divide_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert_eq!(self.vars, d.vars, "VarSet mismatch");
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(Q::one() / c)));
        }
        let (dm, dc) = d.leading().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            let t = MultiPoly::monomial(&self.vars, qm.0.clone(), qc);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(d));
        }
        Some(quot)
    }

    /// Rational content: gcd of coefficient numerators over lcm of
    /// denominators, carrying the sign of the leading coefficient. The
    /// primitive part `self / content` has integer coefficients with
    /// positive leading coefficient.
    pub fn content(&self) -> Q {
        if self.is_zero() {
            return Q::one();
        }
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let mut content = Q::new(num, den);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        content
    }

    pub fn primitive_part(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.content()))
    }

    /// Highest variable index that actually occurs, if any.
    fn main_var_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate().rev() {
                if e > 0 {
                    best = Some(best.map_or(i, |b| b.max(i)));
                    break;
                }
            }
        }
        best
    }

    /// Views the polynomial as univariate in variable index `idx`, with
    /// coefficients over the same VarSet (exponent of `idx` zeroed).
    fn univariate_in(&self, idx: usize) -> BTreeMap<u16, MultiPoly> {
        let mut out: BTreeMap<u16, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[idx];
            let mut me = m.clone();
            me.0[idx] = 0;
            out.entry(e)
                .or_insert_with(|| MultiPoly::zero(&self.vars))
                .insert_term(me, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Content with respect to variable `idx`: gcd of the univariate
    /// coefficients.
    fn content_wrt(&self, idx: usize) -> MultiPoly {
        let uni = self.univariate_in(idx);
        let mut acc = MultiPoly::zero(&self.vars);
        for p in uni.values() {
            acc = MultiPoly::gcd(&acc, p);
            if let Some(c) = acc.as_constant() {
                if c.is_one() {
                    break;
                }
            }
        }
        acc
    }

    /// Pseudo-remainder of `self` by `d`, both viewed as univariate in `idx`.
    fn pseudo_rem(&self, d: &MultiPoly, idx: usize) -> MultiPoly {
        let du = d.univariate_in(idx);
        let dd = *du.keys().next_back().expect("divisor must be nonzero");
        let lc_d = du[&dd].clone();
        let mut r = self.clone();
        loop {
            if r.is_zero() {
                return r;
            }
            let ru = r.univariate_in(idx);
            let dr = *ru.keys().next_back().unwrap();
            if dr < dd {
                return r;
            }
            let lc_r = ru[&dr].clone();
            // r := lc_d * r - lc_r * x^(dr-dd) * d
            let mut shift = vec![0u16; self.vars.len()];
            shift[idx] = dr - dd;
            let shifted = MultiPoly::monomial(&self.vars, shift, Q::one()).mul(d).mul(&lc_r);
            r = r.mul(&lc_d).sub(&shifted);
        }
    }

    /// Multivariate gcd by content-and-primitive-part recursion with a
    /// primitive pseudo-remainder sequence. The result is normalized to
    /// integer-primitive coefficients and positive leading coefficient.
    pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        assert_eq!(a.vars, b.vars, "VarSet mismatch");
        if a.is_zero() {
            return b.primitive_part();
        }
        if b.is_zero() {
            return a.primitive_part();
        }
        if a.is_constant() || b.is_constant() {
            return MultiPoly::one(&a.vars);
        }
        let ia = a.main_var_index().unwrap();
        let ib = b.main_var_index().unwrap();
        if ia != ib {
            // The higher variable occurs in only one argument: the gcd is a
            // polynomial in the lower variables, dividing that argument's
            // content with respect to its main variable.
            return if ia > ib {
                MultiPoly::gcd(&a.content_wrt(ia), b)
            } else {
                MultiPoly::gcd(a, &b.content_wrt(ib))
            };
        }
        let idx = ia;
        let cont_a = a.content_wrt(idx);
        let cont_b = b.content_wrt(idx);
        let cont = MultiPoly::gcd(&cont_a, &cont_b);
        let pp_a = a.divide_exact(&cont_a).expect("content divides");
        let pp_b = b.divide_exact(&cont_b).expect("content divides");

        let (mut f, mut g) = if pp_a.degree_in(idx) >= pp_b.degree_in(idx) {
            (pp_a, pp_b)
        } else {
            (pp_b, pp_a)
        };
        loop {
            let r = f.pseudo_rem(&g, idx);
            if r.is_zero() {
                break;
            }
            let rc = r.content_wrt(idx);
            let r = r.divide_exact(&rc).expect("content divides");
            f = g;
            g = r;
            if g.degree_in(idx) == 0 {
                g = MultiPoly::one(&a.vars);
                break;
            }
        }
        cont.mul(&g).primitive_part()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_unit() {
                factors.push(mag.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = self.vars.var_at(i);
                if e == 1 {
                    factors.push(v.to_string());
                } else {
                    factors.push(format!("{v}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
