//! Linear constraints that force every embedded in-out subgraph of a composed
//! instance to be entered once and traversed along its canonical path.
//!
//! Per subgraph `S` with pairs `(i_j, o_j)` and canonical paths `P_j`, where
//! sums over `v` range over host vertices outside `S`:
//!
//! * in: `sum_j sum_v x(v, i_j) = 1`
//! * out: `sum_j sum_v x(o_j, v) = 1`
//! * pair `j`: `sum_v x(v, i_j) - sum_v x(o_j, v) = 0`
//! * path `j`: `|P_j| * sum_v x(v, i_j) - sum_{e in P_j} x(e) <= 0`
//! * gate `e`: `x(e) - sum_{j : e in P_j} sum_v x(v, i_j) = 0` for each arc of `S`
//!
//! Only arcs present in the host instance appear as variables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::construct::{build_inout, canonical_path};
use crate::error::{Error, Result};
use crate::graph::{Arc, Vertex};
use crate::gtsp::{AtspInstance, ConversionMap, GroupEmbedding, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// Constraint family; the derived order is the emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    In,
    Out,
    Pair { j: usize },
    PathForce { j: usize },
    PathGate { arc: Arc },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    /// 1-based group index of the subgraph.
    pub subgraph: usize,
    pub family: Family,
    /// Sorted by arc, one entry per variable, no zero coefficients.
    pub terms: Vec<(i64, Arc)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl LinearConstraint {
    fn new(
        subgraph: usize,
        family: Family,
        terms: impl IntoIterator<Item = (i64, Arc)>,
        relation: Relation,
        rhs: i64,
    ) -> Self {
        let mut summed: BTreeMap<Arc, i64> = BTreeMap::new();
        for (c, a) in terms {
            *summed.entry(a).or_default() += c;
        }
        let terms = summed.into_iter().filter(|&(_, c)| c != 0).map(|(a, c)| (c, a)).collect();
        LinearConstraint { subgraph, family, terms, relation, rhs }
    }

    pub fn name(&self) -> String {
        let s = self.subgraph;
        match self.family {
            Family::In => format!("c_s{s}_in"),
            Family::Out => format!("c_s{s}_out"),
            Family::Pair { j } => format!("c_s{s}_pair_{j}"),
            Family::PathForce { j } => format!("c_s{s}_path_{j}"),
            Family::PathGate { arc: (u, w) } => format!("c_s{s}_gate_{u}_{w}"),
        }
    }

    /// Left-hand side under `incidence`.
    pub fn lhs(&self, incidence: &HashMap<Arc, bool>) -> Result<i64> {
        self.terms.iter().try_fold(0, |acc, &(c, a)| {
            let x = incidence.get(&a).ok_or(Error::MissingVariable(a.0, a.1))?;
            Ok(acc + c * i64::from(*x))
        })
    }

    pub fn holds(&self, incidence: &HashMap<Arc, bool>) -> Result<bool> {
        let lhs = self.lhs(incidence)?;
        Ok(match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LpConstraintSet {
    /// Sorted by subgraph, then family.
    pub constraints: Vec<LinearConstraint>,
    pub subgraphs: Vec<GroupEmbedding>,
    /// Objective `sum weight * x`, sorted by arc, zero weights omitted.
    pub objective: Vec<(Weight, Arc)>,
    pub warnings: Vec<String>,
}

impl LpConstraintSet {
    /// Constraints of one subgraph whose family satisfies `pred`.
    pub fn count(&self, subgraph: usize, pred: impl Fn(&Family) -> bool) -> usize {
        self.constraints.iter().filter(|c| c.subgraph == subgraph && pred(&c.family)).count()
    }

    /// Every variable named by a constraint or the objective, sorted.
    pub fn variables(&self) -> BTreeSet<Arc> {
        self.constraints
            .iter()
            .flat_map(|c| c.terms.iter().map(|t| t.1))
            .chain(self.objective.iter().map(|t| t.1))
            .collect()
    }
}

/// Emits all constraint families for every subgraph recorded in `map`.
pub fn emit_constraints(host: &AtspInstance, map: &ConversionMap) -> Result<LpConstraintSet> {
    if host.order != map.total_order() {
        return Err(Error::InvalidMap(format!(
            "map covers {} vertices, instance has {}",
            map.total_order(),
            host.order
        )));
    }
    let mut internal: Vec<BTreeSet<Arc>> = vec![BTreeSet::new(); map.groups.len()];
    let mut entering: Vec<BTreeMap<Vertex, Vec<Arc>>> = vec![BTreeMap::new(); map.groups.len()];
    let mut leaving: Vec<BTreeMap<Vertex, Vec<Arc>>> = vec![BTreeMap::new(); map.groups.len()];
    let slot = |v: Vertex| map.groups.iter().position(|g| g.contains(v)).expect("orders match");
    for a in &host.arcs {
        let (gu, gw) = (slot(a.from), slot(a.to));
        if gu == gw {
            internal[gu].insert((a.from, a.to));
        } else {
            leaving[gu].entry(a.from).or_default().push((a.from, a.to));
            entering[gw].entry(a.to).or_default().push((a.from, a.to));
        }
    }

    let mut set = LpConstraintSet::default();
    let mut groups: Vec<(usize, &GroupEmbedding)> = map.groups.iter().enumerate().collect();
    groups.sort_by_key(|(_, g)| g.group);
    for (idx, g) in groups {
        let s = g.group;
        let canonical = build_inout(g.k)?;
        let shift = |xs: &[Vertex]| xs.iter().map(|&v| v + g.offset).collect::<Vec<_>>();
        let expected: BTreeSet<Arc> = g.internal_arcs().into_iter().collect();
        if canonical.order() != g.order
            || shift(&canonical.incoming) != g.incoming
            || shift(&canonical.outgoing) != g.outgoing
            || internal[idx] != expected
        {
            return Err(Error::NonCanonicalSubgraph(s));
        }
        let into = |v: Vertex| entering[idx].get(&v).map(Vec::as_slice).unwrap_or(&[]);
        let out_of = |v: Vertex| leaving[idx].get(&v).map(Vec::as_slice).unwrap_or(&[]);

        let all_in: Vec<(i64, Arc)> = g.incoming.iter().flat_map(|&v| into(v)).map(|&a| (1, a)).collect();
        let all_out: Vec<(i64, Arc)> = g.outgoing.iter().flat_map(|&v| out_of(v)).map(|&a| (1, a)).collect();
        if all_in.is_empty() {
            set.warnings.push(format!("subgraph {s} has no incoming arcs: c_s{s}_in cannot be satisfied"));
        }
        if all_out.is_empty() {
            set.warnings.push(format!("subgraph {s} has no outgoing arcs: c_s{s}_out cannot be satisfied"));
        }
        set.constraints.push(LinearConstraint::new(s, Family::In, all_in, Relation::Eq, 1));
        set.constraints.push(LinearConstraint::new(s, Family::Out, all_out, Relation::Eq, 1));

        let paths: Vec<Vec<Arc>> = (1..=g.k)
            .map(|j| {
                canonical_path(g.k, j)
                    .map(|p| p.arcs().into_iter().map(|(u, w)| (u + g.offset, w + g.offset)).collect())
            })
            .collect::<Result<_>>()?;
        for j in 1..=g.k {
            let ins = into(g.incoming[j - 1]).iter().map(|&a| (1, a));
            let outs = out_of(g.outgoing[j - 1]).iter().map(|&a| (-1, a));
            set.constraints.push(LinearConstraint::new(s, Family::Pair { j }, ins.chain(outs), Relation::Eq, 0));
        }
        for (j, path) in (1..=g.k).zip(&paths) {
            let len = path.len() as i64;
            let ins = into(g.incoming[j - 1]).iter().map(|&a| (len, a));
            let arcs = path.iter().map(|&e| (-1, e));
            set.constraints.push(LinearConstraint::new(s, Family::PathForce { j }, ins.chain(arcs), Relation::Le, 0));
        }
        for &e in &expected {
            let gates = (1..=g.k)
                .filter(|&j| paths[j - 1].contains(&e))
                .flat_map(|j| into(g.incoming[j - 1]).iter().map(|&a| (-1, a)));
            let terms = std::iter::once((1, e)).chain(gates);
            set.constraints.push(LinearConstraint::new(s, Family::PathGate { arc: e }, terms, Relation::Eq, 0));
        }
        set.subgraphs.push(g.clone());
    }
    set.constraints.sort_by_key(|a| (a.subgraph, a.family));
    set.objective = host.arcs.iter().filter(|a| a.weight > 0).map(|a| (a.weight, (a.from, a.to))).collect();
    Ok(set)
}

/// First violated constraint, if any.
pub fn check_constraints(
    set: &LpConstraintSet,
    incidence: &HashMap<Arc, bool>,
) -> Result<(bool, Option<LinearConstraint>)> {
    for c in &set.constraints {
        if !c.holds(incidence)? {
            return Ok((false, Some(c.clone())));
        }
    }
    Ok((true, None))
}

/// Every violated constraint.
pub fn violations(set: &LpConstraintSet, incidence: &HashMap<Arc, bool>) -> Result<Vec<LinearConstraint>> {
    let mut out = Vec::new();
    for c in &set.constraints {
        if !c.holds(incidence)? {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// 0/1 value for every host arc: 1 exactly on the arcs of the cycle `tour`.
pub fn incidence_from_tour(host: &AtspInstance, tour: &[Vertex]) -> Result<HashMap<Arc, bool>> {
    let mut x: HashMap<Arc, bool> = host.arcs.iter().map(|a| ((a.from, a.to), false)).collect();
    for i in 0..tour.len() {
        let a = (tour[i], tour[(i + 1) % tour.len()]);
        match x.get_mut(&a) {
            Some(v) => *v = true,
            None => return Err(Error::InvalidTour(format!("arc ({},{}) is not in the instance", a.0, a.1))),
        }
    }
    Ok(x)
}

fn var(a: Arc) -> String {
    format!("x_{}_{}", a.0, a.1)
}

fn write_terms<C: Copy + Into<i128>>(out: &mut String, terms: &[(C, Arc)]) {
    for (i, &(c, a)) in terms.iter().enumerate() {
        let c: i128 = c.into();
        let sign = if c < 0 { "-" } else { "+" };
        match (i, c.abs()) {
            (0, 1) if c < 0 => out.push('-'),
            (0, 1) => {}
            (0, m) if c < 0 => {
                let _ = write!(out, "-{m} ");
            }
            (0, m) => {
                let _ = write!(out, "{m} ");
            }
            (_, 1) => {
                let _ = write!(out, " {sign} ");
            }
            (_, m) => {
                let _ = write!(out, " {sign} {m} ");
            }
        }
        out.push_str(&var(a));
    }
}

/// CPLEX LP text. Rows whose left-hand side has no variables are kept as
/// comments so the row count per subgraph stays visible.
pub fn write_lp(set: &LpConstraintSet) -> String {
    let mut out = String::from("\\ in-out subgraph constraints\n");
    for g in &set.subgraphs {
        let _ = writeln!(
            out,
            "\\ subgraph {}: S_{} on global vertices {}..{}",
            g.group,
            g.k,
            g.offset + 1,
            g.offset as usize + g.order
        );
        let local: Vec<String> = (1..=g.order as Vertex).map(|v| format!("{v}->{}", v + g.offset)).collect();
        let _ = writeln!(out, "\\   local->global: {}", local.join(" "));
        let pairs: Vec<String> = g
            .incoming
            .iter()
            .zip(&g.outgoing)
            .enumerate()
            .map(|(j, (i, o))| format!("i_{0}={i} o_{0}={o}", j + 1))
            .collect();
        let _ = writeln!(out, "\\   pairs: {}", pairs.join(", "));
    }
    out.push_str("Minimize\n obj:");
    if !set.objective.is_empty() {
        out.push(' ');
        write_terms(&mut out, &set.objective);
    }
    out.push_str("\nSubject To\n");
    for c in &set.constraints {
        if c.terms.is_empty() {
            let _ = writeln!(out, "\\ {}: 0 {} {} (no variables)", c.name(), c.relation, c.rhs);
            continue;
        }
        let _ = write!(out, " {}: ", c.name());
        write_terms(&mut out, &c.terms);
        let _ = writeln!(out, " {} {}", c.relation, c.rhs);
    }
    out.push_str("Binary\n");
    for a in set.variables() {
        let _ = writeln!(out, " {}", var(a));
    }
    out.push_str("End\n");
    out
}
