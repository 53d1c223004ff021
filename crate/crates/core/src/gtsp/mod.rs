//! Generalized TSP to sparse asymmetric TSP via in-out subgraphs.
//!
//! Every group `V_i` of size `k` becomes a copy of `S_k` with zero-weight
//! arcs. An original arc `(u, w)` from the `s`-th vertex of `V_i` to the
//! `r`-th vertex of `V_j` becomes an arc from `o_s` of the copy for `V_i` to
//! `i_r` of the copy for `V_j`, keeping its weight. No weight larger than an
//! input weight is ever introduced.

mod brute;
mod format;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

pub use brute::{
    brute_force_atsp, brute_force_gtsp, hamiltonian_cycles, random_instance, RandomParams, ATSP_BRUTE_CAP,
    GTSP_BRUTE_CAP,
};
pub use format::{parse_atsp, parse_gtsp, write_atsp, write_gtsp, write_tsplib_matrix, ParsedGtsp};

use crate::construct::build_inout;
use crate::error::{Error, Result};
use crate::graph::{Arc, Vertex};

pub type Weight = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeightedArc {
    pub from: Vertex,
    pub to: Vertex,
    pub weight: Weight,
}

/// GTSP instance on vertices `1..=n`, partitioned into ordered groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtspInstance {
    pub name: String,
    pub n: usize,
    /// Group members in input order; a vertex's position in its list is the
    /// index `s` used by the conversion.
    pub groups: Vec<Vec<Vertex>>,
    /// Arcs between distinct groups, sorted.
    pub arcs: Vec<WeightedArc>,
}

impl GtspInstance {
    /// Validates the partition and drops intra-group arcs. Returns the
    /// instance together with one warning per dropped arc.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        groups: Vec<Vec<Vertex>>,
        arcs: Vec<WeightedArc>,
    ) -> Result<(Self, Vec<String>)> {
        let group_of = group_index(n, &groups)?;
        let mut warnings = Vec::new();
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for a in arcs {
            for v in [a.from, a.to] {
                if v == 0 || v as usize > n {
                    return Err(Error::InvalidGraph(format!("arc ({},{}) outside 1..={n}", a.from, a.to)));
                }
            }
            if a.from == a.to {
                return Err(Error::InvalidGraph(format!("self-loop at {}", a.from)));
            }
            if !seen.insert((a.from, a.to)) {
                return Err(Error::InvalidGraph(format!("duplicate arc ({},{})", a.from, a.to)));
            }
            if group_of[a.from as usize].0 == group_of[a.to as usize].0 {
                warnings.push(format!(
                    "dropped arc ({},{}): both endpoints in group {}",
                    a.from,
                    a.to,
                    group_of[a.from as usize].0 + 1
                ));
                continue;
            }
            kept.push(a);
        }
        kept.sort();
        Ok((GtspInstance { name: name.into(), n, groups, arcs: kept }, warnings))
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// `(group index, position)` of every vertex, both 0-based; slot 0 unused.
    pub fn locate(&self) -> Vec<(usize, usize)> {
        group_index(self.n, &self.groups).expect("validated at construction")
    }

    /// Number of groups with exactly three vertices (the `m` of `2n - g + m`).
    pub fn groups_of_three(&self) -> usize {
        self.groups.iter().filter(|g| g.len() == 3).count()
    }

    pub fn max_weight(&self) -> Weight {
        self.arcs.iter().map(|a| a.weight).max().unwrap_or(0)
    }
}

fn group_index(n: usize, groups: &[Vec<Vertex>]) -> Result<Vec<(usize, usize)>> {
    const UNSET: (usize, usize) = (usize::MAX, usize::MAX);
    let mut at = vec![UNSET; n + 1];
    if groups.is_empty() {
        return Err(Error::InvalidGraph("at least one group is required".into()));
    }
    for (gi, group) in groups.iter().enumerate() {
        if group.is_empty() {
            return Err(Error::InvalidGraph(format!("group {} is empty", gi + 1)));
        }
        for (pos, &v) in group.iter().enumerate() {
            if v == 0 || v as usize > n {
                return Err(Error::InvalidGraph(format!("group {} lists vertex {v} outside 1..={n}", gi + 1)));
            }
            if at[v as usize] != UNSET {
                return Err(Error::InvalidGraph(format!("vertex {v} appears in more than one group")));
            }
            at[v as usize] = (gi, pos);
        }
    }
    if let Some(v) = (1..=n).find(|&v| at[v] == UNSET) {
        return Err(Error::InvalidGraph(format!("vertex {v} belongs to no group")));
    }
    Ok(at)
}

/// Sparse ATSP instance: arcs not listed cannot be used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtspInstance {
    pub name: String,
    pub order: usize,
    /// Sorted and free of duplicates.
    pub arcs: Vec<WeightedArc>,
}

impl AtspInstance {
    pub fn new(name: impl Into<String>, order: usize, mut arcs: Vec<WeightedArc>) -> Result<Self> {
        arcs.sort();
        let mut seen = HashSet::new();
        for a in &arcs {
            if a.from == 0 || a.to == 0 || a.from as usize > order || a.to as usize > order || a.from == a.to {
                return Err(Error::InvalidGraph(format!("arc ({},{}) invalid for order {order}", a.from, a.to)));
            }
            if !seen.insert((a.from, a.to)) {
                return Err(Error::InvalidGraph(format!("duplicate arc ({},{})", a.from, a.to)));
            }
        }
        Ok(AtspInstance { name: name.into(), order, arcs })
    }

    pub fn max_weight(&self) -> Weight {
        self.arcs.iter().map(|a| a.weight).max().unwrap_or(0)
    }

    pub fn weights(&self) -> HashMap<Arc, Weight> {
        self.arcs.iter().map(|a| ((a.from, a.to), a.weight)).collect()
    }
}

/// Placement of one group's in-out subgraph inside the converted instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupEmbedding {
    /// 1-based group index.
    pub group: usize,
    /// Local vertex `v` of `S_k` is global vertex `offset + v`.
    pub offset: Vertex,
    pub k: usize,
    pub order: usize,
    /// Global ids of `i_1..i_k`.
    pub incoming: Vec<Vertex>,
    /// Global ids of `o_1..o_k`.
    pub outgoing: Vec<Vertex>,
}

impl GroupEmbedding {
    pub fn contains(&self, v: Vertex) -> bool {
        v > self.offset && v as usize <= self.offset as usize + self.order
    }

    /// Global arcs of the embedded `S_k`.
    pub fn internal_arcs(&self) -> Vec<Arc> {
        let g = build_inout(self.k).expect("k >= 1 for stored groups");
        g.graph.arcs().iter().map(|&(u, w)| (u + self.offset, w + self.offset)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEmbedding {
    pub vertex: Vertex,
    /// 1-based group index.
    pub group: usize,
    /// 1-based position `s` within the group.
    pub position: usize,
    /// Global id of `i_s`.
    pub entry: Vertex,
    /// Global id of `o_s`.
    pub exit: Vertex,
}

/// Inter-subgraph arc and the original arc it encodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcLink {
    pub from: Vertex,
    pub to: Vertex,
    pub orig_from: Vertex,
    pub orig_to: Vertex,
    pub weight: Weight,
}

/// Bidirectional record tying the converted instance back to the original.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConversionMap {
    pub groups: Vec<GroupEmbedding>,
    pub vertices: Vec<VertexEmbedding>,
    pub arcs: Vec<ArcLink>,
}

/// One line of the JSON-lines map file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MapRecord {
    Group(GroupEmbedding),
    Vertex(VertexEmbedding),
    Arc(ArcLink),
}

impl ConversionMap {
    /// Group embedding containing global vertex `v`.
    pub fn group_of(&self, v: Vertex) -> Option<&GroupEmbedding> {
        // Groups are stored by increasing offset.
        let idx = self.groups.partition_point(|g| g.offset < v);
        idx.checked_sub(1).map(|i| &self.groups[i]).filter(|g| g.contains(v))
    }

    pub fn total_order(&self) -> usize {
        self.groups.iter().map(|g| g.order).sum()
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let records = self
            .groups
            .iter()
            .cloned()
            .map(MapRecord::Group)
            .chain(self.vertices.iter().cloned().map(MapRecord::Vertex))
            .chain(self.arcs.iter().cloned().map(MapRecord::Arc));
        for r in records {
            out.push_str(&serde_json::to_string(&r).expect("map records serialise"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Self> {
        let mut map = ConversionMap::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let record: MapRecord =
                serde_json::from_str(line).map_err(|e| Error::parse(no + 1, format!("bad map record: {e}")))?;
            match record {
                MapRecord::Group(g) => map.groups.push(g),
                MapRecord::Vertex(v) => map.vertices.push(v),
                MapRecord::Arc(a) => map.arcs.push(a),
            }
        }
        map.groups.sort_by_key(|g| g.offset);
        let mut next = 0;
        for g in &map.groups {
            if g.offset as usize != next || g.k == 0 || g.incoming.len() != g.k || g.outgoing.len() != g.k {
                return Err(Error::InvalidMap(format!("group {} has an inconsistent layout", g.group)));
            }
            next += g.order;
        }
        Ok(map)
    }
}

/// Builds the sparse ATSP instance and the map back to `inst`.
pub fn convert(inst: &GtspInstance) -> Result<(AtspInstance, ConversionMap)> {
    let mut map = ConversionMap::default();
    let mut arcs = Vec::new();
    let mut offset: Vertex = 0;
    for (gi, members) in inst.groups.iter().enumerate() {
        let k = members.len();
        let s = build_inout(k)?;
        let shift = |xs: &[Vertex]| xs.iter().map(|&v| v + offset).collect::<Vec<_>>();
        let emb = GroupEmbedding {
            group: gi + 1,
            offset,
            k,
            order: s.order(),
            incoming: shift(&s.incoming),
            outgoing: shift(&s.outgoing),
        };
        arcs.extend(s.graph.arcs().iter().map(|&(u, w)| WeightedArc { from: u + offset, to: w + offset, weight: 0 }));
        for (pos, &v) in members.iter().enumerate() {
            map.vertices.push(VertexEmbedding {
                vertex: v,
                group: gi + 1,
                position: pos + 1,
                entry: emb.incoming[pos],
                exit: emb.outgoing[pos],
            });
        }
        offset += s.order() as Vertex;
        map.groups.push(emb);
    }
    map.vertices.sort_by_key(|v| v.vertex);
    for a in &inst.arcs {
        let from = map.vertices[a.from as usize - 1].exit;
        let to = map.vertices[a.to as usize - 1].entry;
        arcs.push(WeightedArc { from, to, weight: a.weight });
        map.arcs.push(ArcLink { from, to, orig_from: a.from, orig_to: a.to, weight: a.weight });
    }
    map.arcs.sort_by_key(|l| (l.from, l.to));
    let atsp = AtspInstance::new(format!("{}.atsp", inst.name), offset as usize, arcs)?;
    Ok((atsp, map))
}

/// Preflight notes about instances whose converted form cannot have a tour.
pub fn preflight_warnings(inst: &GtspInstance) -> Vec<String> {
    let mut w = Vec::new();
    if inst.group_count() < 2 {
        w.push("instance has a single group: no tour can cross between groups".to_string());
    }
    let locate = inst.locate();
    let mut enters = vec![false; inst.group_count()];
    let mut leaves = vec![false; inst.group_count()];
    for a in &inst.arcs {
        leaves[locate[a.from as usize].0] = true;
        enters[locate[a.to as usize].0] = true;
    }
    for gi in 0..inst.group_count() {
        if inst.group_count() >= 2 && !(enters[gi] && leaves[gi]) {
            w.push(format!(
                "group {} is not both entered and left by any arc: converted instance is infeasible",
                gi + 1
            ));
        }
    }
    w
}

/// A GTSP tour: one vertex per group in visiting order, cycle implied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtspTour {
    pub vertices: Vec<Vertex>,
    pub cost: Weight,
}

/// Translates a Hamiltonian cycle of the converted instance into the GTSP
/// tour it encodes. The result starts in the group of lowest index.
pub fn map_tour_back(tour: &[Vertex], map: &ConversionMap) -> Result<GtspTour> {
    let order = map.total_order();
    if map.groups.len() < 2 {
        return Err(Error::InvalidTour("a cycle needs >= 2 groups with arcs between them".into()));
    }
    if tour.len() != order {
        return Err(Error::InvalidTour(format!("tour has {} vertices, instance has {order}", tour.len())));
    }
    let mut seen = vec![false; order + 1];
    for &v in tour {
        if v == 0 || v as usize > order || std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::InvalidTour(format!("vertex {v} is out of range or repeated")));
        }
    }
    let links: BTreeMap<Arc, &ArcLink> = map.arcs.iter().map(|l| ((l.from, l.to), l)).collect();
    let internal: HashSet<Arc> = map.groups.iter().flat_map(|g| g.internal_arcs()).collect();
    let position_of = |gid: usize, v: Vertex, list: fn(&GroupEmbedding) -> &Vec<Vertex>| {
        let g = &map.groups[gid];
        list(g).iter().position(|&x| x == v)
    };

    // (arc link, group entered) in cycle order.
    let mut crossings = Vec::new();
    for i in 0..tour.len() {
        let (a, b) = (tour[i], tour[(i + 1) % tour.len()]);
        let ga = map.group_of(a).ok_or_else(|| Error::InvalidTour(format!("vertex {a} is in no group")))?;
        let gb = map.group_of(b).ok_or_else(|| Error::InvalidTour(format!("vertex {b} is in no group")))?;
        if ga.group == gb.group {
            if !internal.contains(&(a, b)) {
                return Err(Error::InvalidTour(format!("arc ({a},{b}) is not in the instance")));
            }
        } else {
            let link = links
                .get(&(a, b))
                .ok_or_else(|| Error::InvalidTour(format!("arc ({a},{b}) is not in the instance")))?;
            crossings.push((*link, gb.group - 1));
        }
    }
    let mut visits = vec![0usize; map.groups.len()];
    for &(_, g) in &crossings {
        visits[g] += 1;
    }
    if let Some(g) = visits.iter().position(|&c| c != 1) {
        return Err(Error::InvalidTour(format!("group {} entered {} times", g + 1, visits[g])));
    }
    // Each group must be left through the outgoing vertex paired with the
    // incoming vertex it was entered at.
    for i in 0..crossings.len() {
        let (enter, g) = crossings[i];
        let (leave, _) = crossings[(i + 1) % crossings.len()];
        let s_in = position_of(g, enter.to, |e| &e.incoming);
        let s_out = position_of(g, leave.from, |e| &e.outgoing);
        if s_in.is_none() || s_in != s_out {
            return Err(Error::InvalidTour(format!("group {} entered and left through unpaired vertices", g + 1)));
        }
    }
    let start = crossings.iter().enumerate().min_by_key(|(_, (_, g))| *g).map(|(i, _)| i).unwrap_or(0);
    crossings.rotate_left(start);
    Ok(GtspTour {
        vertices: crossings.iter().map(|(l, _)| l.orig_to).collect(),
        cost: crossings.iter().map(|(l, _)| l.weight).sum(),
    })
}

/// Cost of a GTSP tour, or `None` when an arc is missing or a group is
/// visited other than once.
pub fn gtsp_tour_cost(inst: &GtspInstance, tour: &[Vertex]) -> Option<Weight> {
    let locate = inst.locate();
    let mut visited = vec![false; inst.group_count()];
    for &v in tour {
        if v == 0 || v as usize > inst.n || std::mem::replace(&mut visited[locate[v as usize].0], true) {
            return None;
        }
    }
    if visited.iter().any(|&x| !x) || tour.len() < 2 {
        return None;
    }
    let weights: HashMap<Arc, Weight> = inst.arcs.iter().map(|a| ((a.from, a.to), a.weight)).collect();
    (0..tour.len()).map(|i| weights.get(&(tour[i], tour[(i + 1) % tour.len()])).copied()).sum()
}
