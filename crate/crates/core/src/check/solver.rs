// Copyright 2026 The tpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Subtyping constraint solving over a finite ground type system.
//!
//! Variables are grouped into connected components by the constraints that
//! mention them. Within a component, variables with a (transitive) ground
//! lower bound receive the least value they take in any solution; the
//! remaining variables then receive the greatest value compatible with
//! that choice. A component without any ground bound gets the top type.

use std::collections::BTreeSet;

use crate::diag::Span;
use crate::types::{GroundTypeSystem, TypeId};

/// Ground bounds of one variable with the constraint each came from.
type Bounds = Vec<(TypeId, Span)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Ground(TypeId),
    Var(VarId),
}

/// `lower ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub lower: Term,
    pub upper: Term,
    pub span: Span,
}

impl Constraint {
    pub fn new(lower: Term, upper: Term, span: Span) -> Self {
        Constraint { lower, upper, span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveError {
    /// No assignment satisfies the component. `lower ≰ upper` are two
    /// ground bounds that cannot be reconciled; `span` locates a constraint
    /// on the offending chain.
    Incompatible {
        lower: TypeId,
        upper: TypeId,
        /// `None` for a constraint between two ground types.
        var: Option<VarId>,
        span: Span,
    },
    /// Several incomparable candidates remain for `var`.
    Ambiguous { var: VarId, candidates: Vec<TypeId> },
    /// Nothing constrains `var` and the type system has no top type.
    NoTop { var: VarId },
}

impl SolveError {
    pub fn var(&self) -> Option<VarId> {
        match self {
            SolveError::Incompatible { var, .. } => *var,
            SolveError::Ambiguous { var, .. } | SolveError::NoTop { var } => Some(*var),
        }
    }
}

/// Solves `constraints` over variables `0..var_count`.
pub fn solve(
    sys: &dyn GroundTypeSystem,
    var_count: usize,
    constraints: &[Constraint],
) -> Result<Vec<TypeId>, Vec<SolveError>> {
    let mut solution = vec![TypeId(0); var_count];
    let mut errors = Vec::new();
    for comp in components(var_count, constraints) {
        match solve_component(sys, &comp, constraints) {
            Ok(values) => {
                for (v, t) in comp.iter().zip(values) {
                    solution[v.index()] = t;
                }
            }
            Err(e) => errors.push(e),
        }
    }
    // Ground-only constraints belong to no component.
    for c in constraints {
        if let (Term::Ground(a), Term::Ground(b)) = (c.lower, c.upper) {
            if !sys.is_subtype(a, b) {
                errors.push(SolveError::Incompatible {
                    lower: a,
                    upper: b,
                    var: None,
                    span: c.span,
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(solution)
    } else {
        Err(errors)
    }
}

fn components(var_count: usize, constraints: &[Constraint]) -> Vec<Vec<VarId>> {
    let mut parent: Vec<usize> = (0..var_count).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let next = p[x];
            p[x] = r;
            x = next;
        }
        r
    }
    for c in constraints {
        if let (Term::Var(a), Term::Var(b)) = (c.lower, c.upper) {
            let (ra, rb) = (find(&mut parent, a.index()), find(&mut parent, b.index()));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<VarId>> = Vec::new();
    let mut slot = vec![usize::MAX; var_count];
    for v in 0..var_count {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(VarId(v as u32));
    }
    groups
}

/// A component rewritten over local indices `0..n`.
struct Problem<'a> {
    sys: &'a dyn GroundTypeSystem,
    vars: &'a [VarId],
    types: Vec<TypeId>,
    /// `(var, ground)` meaning `ground ≤ var`.
    lower: Vec<(usize, TypeId, Span)>,
    /// `(var, ground)` meaning `var ≤ ground`.
    upper: Vec<(usize, TypeId, Span)>,
    /// `(a, b)` meaning `a ≤ b`.
    edges: Vec<(usize, usize, Span)>,
}

type Domains = Vec<BTreeSet<TypeId>>;

impl<'a> Problem<'a> {
    fn new(sys: &'a dyn GroundTypeSystem, vars: &'a [VarId], cs: &[Constraint]) -> Self {
        let local = |v: VarId| vars.iter().position(|x| *x == v);
        let mut p = Problem {
            sys,
            vars,
            types: sys.predefined_types(),
            lower: Vec::new(),
            upper: Vec::new(),
            edges: Vec::new(),
        };
        for c in cs {
            match (c.lower, c.upper) {
                (Term::Ground(g), Term::Var(v)) => {
                    if let Some(i) = local(v) {
                        p.lower.push((i, g, c.span));
                    }
                }
                (Term::Var(v), Term::Ground(g)) => {
                    if let Some(i) = local(v) {
                        p.upper.push((i, g, c.span));
                    }
                }
                (Term::Var(a), Term::Var(b)) => {
                    if let (Some(i), Some(j)) = (local(a), local(b)) {
                        p.edges.push((i, j, c.span));
                    }
                }
                (Term::Ground(_), Term::Ground(_)) => {}
            }
        }
        p
    }

    fn leq(&self, a: TypeId, b: TypeId) -> bool {
        self.sys.is_subtype(a, b)
    }

    /// Initial domains from the direct ground bounds.
    fn initial_domains(&self) -> Domains {
        let mut d: Domains = vec![self.types.iter().copied().collect(); self.vars.len()];
        for &(v, g, _) in &self.lower {
            d[v].retain(|t| self.leq(g, *t));
        }
        for &(v, g, _) in &self.upper {
            d[v].retain(|t| self.leq(*t, g));
        }
        d
    }

    /// Arc consistency over the var-var edges. Returns false if a domain
    /// becomes empty.
    fn tighten(&self, d: &mut Domains) -> bool {
        loop {
            let mut changed = false;
            for &(a, b, _) in &self.edges {
                let before = d[a].len();
                let db = d[b].clone();
                d[a].retain(|x| db.iter().any(|y| self.leq(*x, *y)));
                changed |= d[a].len() != before;
                let before = d[b].len();
                let da = d[a].clone();
                d[b].retain(|y| da.iter().any(|x| self.leq(*x, *y)));
                changed |= d[b].len() != before;
            }
            if d.iter().any(BTreeSet::is_empty) {
                return false;
            }
            if !changed {
                return true;
            }
        }
    }

    /// Any full assignment drawn from `d` satisfying every edge.
    fn search(&self, d: &Domains) -> Option<Vec<TypeId>> {
        let mut d = d.clone();
        if !self.tighten(&mut d) {
            return None;
        }
        let Some(v) = (0..d.len()).find(|&i| d[i].len() > 1) else {
            return Some(d.iter().map(|s| *s.iter().next().unwrap()).collect());
        };
        for t in d[v].clone() {
            let mut next = d.clone();
            next[v] = BTreeSet::from([t]);
            if let Some(sol) = self.search(&next) {
                return Some(sol);
            }
        }
        None
    }

    fn satisfiable_with(&self, d: &Domains, v: usize, t: TypeId) -> bool {
        let mut next = d.clone();
        next[v] = BTreeSet::from([t]);
        self.search(&next).is_some()
    }

    /// Variables reachable from a ground lower bound along edges.
    fn lower_bounded(&self) -> Vec<bool> {
        let mut lb = vec![false; self.vars.len()];
        for &(v, _, _) in &self.lower {
            lb[v] = true;
        }
        loop {
            let mut changed = false;
            for &(a, b, _) in &self.edges {
                if lb[a] && !lb[b] {
                    lb[b] = true;
                    changed = true;
                }
            }
            if !changed {
                return lb;
            }
        }
    }

    /// Ground bounds reaching each variable transitively, with the span of
    /// the constraint that introduced them.
    fn transitive_bounds(&self) -> (Vec<Bounds>, Vec<Bounds>) {
        let n = self.vars.len();
        let mut lows: Vec<Vec<(TypeId, Span)>> = vec![Vec::new(); n];
        let mut ups: Vec<Vec<(TypeId, Span)>> = vec![Vec::new(); n];
        for &(v, g, s) in &self.lower {
            lows[v].push((g, s));
        }
        for &(v, g, s) in &self.upper {
            ups[v].push((g, s));
        }
        loop {
            let mut changed = false;
            for &(a, b, _) in &self.edges {
                for (g, s) in lows[a].clone() {
                    if !lows[b].iter().any(|(h, _)| *h == g) {
                        lows[b].push((g, s));
                        changed = true;
                    }
                }
                for (g, s) in ups[b].clone() {
                    if !ups[a].iter().any(|(h, _)| *h == g) {
                        ups[a].push((g, s));
                        changed = true;
                    }
                }
            }
            if !changed {
                return (lows, ups);
            }
        }
    }

    fn incompatibility(&self) -> SolveError {
        let (lows, ups) = self.transitive_bounds();
        for v in 0..self.vars.len() {
            for &(l, _) in &lows[v] {
                for &(u, span) in &ups[v] {
                    if !self.leq(l, u) {
                        return self.incompatible(l, u, v, span);
                    }
                }
            }
        }
        // Pairwise consistent bounds that still admit no common value: two
        // lower bounds without a usable join, or two upper bounds without a
        // usable meet.
        for v in 0..self.vars.len() {
            for bounds in [&lows[v], &ups[v]] {
                if let [(a, _), (b, span), ..] = bounds.as_slice() {
                    return self.incompatible(*a, *b, v, *span);
                }
            }
        }
        let (v, g, span) = self
            .lower
            .first()
            .or(self.upper.first())
            .copied()
            .expect("unsatisfiable component has a ground bound");
        self.incompatible(g, g, v, span)
    }

    fn incompatible(&self, lower: TypeId, upper: TypeId, v: usize, span: Span) -> SolveError {
        SolveError::Incompatible {
            lower,
            upper,
            var: Some(self.vars[v]),
            span,
        }
    }

    fn extremes(&self, set: &[TypeId], minimal: bool) -> Vec<TypeId> {
        set.iter()
            .copied()
            .filter(|&a| {
                !set.iter().any(|&b| {
                    b != a
                        && if minimal {
                            self.leq(b, a)
                        } else {
                            self.leq(a, b)
                        }
                })
            })
            .collect()
    }

    /// Fixes every variable in `which` to its least (or greatest) feasible
    /// value under `d`.
    fn fix_extremes(
        &self,
        d: &mut Domains,
        which: &[usize],
        minimal: bool,
    ) -> Result<(), SolveError> {
        let mut chosen = Vec::new();
        for &v in which {
            let feasible: Vec<TypeId> = d[v]
                .iter()
                .copied()
                .filter(|&t| self.satisfiable_with(d, v, t))
                .collect();
            let ext = self.extremes(&feasible, minimal);
            match ext.as_slice() {
                [one] => chosen.push((v, *one)),
                _ => {
                    return Err(SolveError::Ambiguous {
                        var: self.vars[v],
                        candidates: ext,
                    })
                }
            }
        }
        for &(v, t) in &chosen {
            d[v] = BTreeSet::from([t]);
        }
        if self.search(d).is_none() {
            // Each choice is individually optimal but they exclude each other.
            let (v, _) = chosen[0];
            return Err(SolveError::Ambiguous {
                var: self.vars[v],
                candidates: chosen.iter().map(|c| c.1).collect(),
            });
        }
        Ok(())
    }
}

fn solve_component(
    sys: &dyn GroundTypeSystem,
    vars: &[VarId],
    cs: &[Constraint],
) -> Result<Vec<TypeId>, SolveError> {
    let p = Problem::new(sys, vars, cs);
    if p.lower.is_empty() && p.upper.is_empty() {
        return match sys.top_type() {
            Some(top) => Ok(vec![top; vars.len()]),
            None => Err(SolveError::NoTop { var: vars[0] }),
        };
    }
    let mut d = p.initial_domains();
    if !p.tighten(&mut d) || p.search(&d).is_none() {
        return Err(p.incompatibility());
    }
    let lb = p.lower_bounded();
    let (low, rest): (Vec<usize>, Vec<usize>) = (0..vars.len()).partition(|&v| lb[v]);
    p.fix_extremes(&mut d, &low, true)?;
    p.fix_extremes(&mut d, &rest, false)?;
    Ok(p.search(&d).expect("fixed assignment checked satisfiable"))
}
