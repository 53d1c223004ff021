//! Directed graph substrate shared by every other module.
//!
//! Vertices are labelled `1..=order`. An undirected edge is stored as the two
//! arcs `(u, w)` and `(w, u)`, and arc counts always count directed arcs.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = u32;
pub type Arc = (Vertex, Vertex);

/// Immutable simple directed graph on vertices `1..=order`.
#[derive(Debug, Clone)]
pub struct DiGraph {
    order: usize,
    arcs: Vec<Arc>,
    lookup: HashSet<Arc>,
    succ: Vec<Vec<Vertex>>,
    pred: Vec<Vec<Vertex>>,
}

impl PartialEq for DiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.arcs == other.arcs
    }
}

impl Eq for DiGraph {}

impl DiGraph {
    /// Builds a graph, rejecting self-loops, out-of-range endpoints and
    /// duplicate arcs.
    pub fn new(order: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidGraph("order must be at least 1".into()));
        }
        let mut set = BTreeSet::new();
        for (u, w) in arcs {
            if u == 0 || w == 0 || u as usize > order || w as usize > order {
                return Err(Error::InvalidGraph(format!("arc ({u},{w}) outside 1..={order}")));
            }
            if u == w {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if !set.insert((u, w)) {
                return Err(Error::InvalidGraph(format!("duplicate arc ({u},{w})")));
            }
        }
        Ok(Self::from_sorted(order, set.into_iter().collect()))
    }

    fn from_sorted(order: usize, arcs: Vec<Arc>) -> Self {
        let mut succ = vec![Vec::new(); order + 1];
        let mut pred = vec![Vec::new(); order + 1];
        for &(u, w) in &arcs {
            succ[u as usize].push(w);
            pred[w as usize].push(u);
        }
        let lookup = arcs.iter().copied().collect();
        DiGraph { order, arcs, lookup, succ, pred }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn has_arc(&self, u: Vertex, w: Vertex) -> bool {
        self.lookup.contains(&(u, w))
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v as usize]
    }

    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.pred[v as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.order as Vertex
    }

    /// Copy of the graph without the arc `(u, w)`.
    pub fn without_arc(&self, u: Vertex, w: Vertex) -> DiGraph {
        let arcs = self.arcs.iter().copied().filter(|&a| a != (u, w)).collect();
        Self::from_sorted(self.order, arcs)
    }

    /// Neighbours of `v` when arcs are read as undirected edges.
    pub fn undirected_neighbours(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.succ[v as usize].iter().chain(self.pred[v as usize].iter()).copied()
    }

    /// Undirected edges `{u, w}` with `u < w`, each reported once.
    pub fn undirected_edges(&self) -> Vec<Arc> {
        let set: BTreeSet<Arc> = self.arcs.iter().map(|&(u, w)| (u.min(w), u.max(w))).collect();
        set.into_iter().collect()
    }

    pub fn is_weakly_connected(&self) -> bool {
        let mut seen = vec![false; self.order + 1];
        let mut queue = VecDeque::from([1]);
        seen[1] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for w in self.undirected_neighbours(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.order
    }
}

/// A graph with `k` ordered incoming vertices `i_1..i_k` and `k` ordered
/// outgoing vertices `o_1..o_k`. The two lists may share vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InOutGraph {
    pub graph: DiGraph,
    pub incoming: Vec<Vertex>,
    pub outgoing: Vec<Vertex>,
}

impl InOutGraph {
    pub fn new(graph: DiGraph, incoming: Vec<Vertex>, outgoing: Vec<Vertex>) -> Result<Self> {
        if incoming.is_empty() || incoming.len() != outgoing.len() {
            return Err(Error::InvalidGraph(format!(
                "need k >= 1 incoming and outgoing vertices, got {} and {}",
                incoming.len(),
                outgoing.len()
            )));
        }
        for (name, list) in [("incoming", &incoming), ("outgoing", &outgoing)] {
            let mut seen = BTreeSet::new();
            for &v in list.iter() {
                if v == 0 || v as usize > graph.order() {
                    return Err(Error::InvalidGraph(format!("{name} vertex {v} out of range")));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidGraph(format!("{name} vertex {v} listed twice")));
                }
            }
        }
        Ok(InOutGraph { graph, incoming, outgoing })
    }

    pub fn k(&self) -> usize {
        self.incoming.len()
    }

    pub fn order(&self) -> usize {
        self.graph.order()
    }

    pub fn is_incoming(&self, v: Vertex) -> bool {
        self.incoming.contains(&v)
    }

    pub fn is_outgoing(&self, v: Vertex) -> bool {
        self.outgoing.contains(&v)
    }

    /// Parses the plain-text graph format:
    ///
    /// ```text
    /// v k
    /// i_1 .. i_k
    /// o_1 .. o_k
    /// u w        (one arc per line)
    /// ```
    ///
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let mut next_numbers = |what: &str| -> Result<(usize, Vec<i64>)> {
            let (no, line) = lines.next().ok_or_else(|| Error::parse(0, format!("missing {what}")))?;
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| Error::parse(no, format!("bad integer {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok((no, nums))
        };

        let (no, header) = next_numbers("header line `v k`")?;
        let [v, k] = header[..] else {
            return Err(Error::parse(no, "header must be `v k`"));
        };
        if v < 1 || k < 1 {
            return Err(Error::parse(no, "v and k must be positive"));
        }
        let to_vertices = |no: usize, nums: Vec<i64>, what: &str| -> Result<Vec<Vertex>> {
            if nums.len() != k as usize {
                return Err(Error::parse(no, format!("expected {k} {what} vertices, got {}", nums.len())));
            }
            nums.into_iter()
                .map(|x| Vertex::try_from(x).map_err(|_| Error::parse(no, format!("bad vertex {x}"))))
                .collect()
        };
        let (no, inc) = next_numbers("incoming list")?;
        let incoming = to_vertices(no, inc, "incoming")?;
        let (no, out) = next_numbers("outgoing list")?;
        let outgoing = to_vertices(no, out, "outgoing")?;

        let mut arcs = Vec::new();
        for (no, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [a, b] = parts[..] else {
                return Err(Error::parse(no, "arc lines must be `u w`"));
            };
            let parse = |t: &str| t.parse::<Vertex>().map_err(|_| Error::parse(no, format!("bad vertex {t:?}")));
            arcs.push((parse(a)?, parse(b)?));
        }
        let graph = DiGraph::new(v as usize, arcs)?;
        InOutGraph::new(graph, incoming, outgoing)
    }

    /// Writes the plain-text graph format read by [`InOutGraph::parse`].
    pub fn to_text(&self) -> String {
        let join = |xs: &[Vertex]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!("{} {}\n{}\n{}\n", self.order(), self.k(), join(&self.incoming), join(&self.outgoing));
        for &(u, w) in self.graph.arcs() {
            let _ = writeln!(out, "{u} {w}");
        }
        out
    }
}

/// Four-way split of the vertices of an in-out graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    /// Incoming only.
    pub incoming_only: BTreeSet<Vertex>,
    /// Outgoing only.
    pub outgoing_only: BTreeSet<Vertex>,
    /// Both incoming and outgoing.
    pub both: BTreeSet<Vertex>,
    /// Neither.
    pub neither: BTreeSet<Vertex>,
}

impl VertexPartition {
    /// `a = |I|`.
    pub fn a(&self) -> usize {
        self.incoming_only.len()
    }

    /// `b = |B|`.
    pub fn b(&self) -> usize {
        self.both.len()
    }

    /// `c = |N|`.
    pub fn c(&self) -> usize {
        self.neither.len()
    }

    pub fn total(&self) -> usize {
        self.incoming_only.len() + self.outgoing_only.len() + self.both.len() + self.neither.len()
    }
}

pub fn classify_vertices(g: &InOutGraph) -> VertexPartition {
    let mut p = VertexPartition {
        incoming_only: BTreeSet::new(),
        outgoing_only: BTreeSet::new(),
        both: BTreeSet::new(),
        neither: BTreeSet::new(),
    };
    for v in g.graph.vertices() {
        match (g.is_incoming(v), g.is_outgoing(v)) {
            (true, false) => p.incoming_only.insert(v),
            (false, true) => p.outgoing_only.insert(v),
            (true, true) => p.both.insert(v),
            (false, false) => p.neither.insert(v),
        };
    }
    p
}

/// Two-colouring of the underlying undirected graph. `part1` always contains
/// vertex 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    pub part1: BTreeSet<Vertex>,
    pub part2: BTreeSet<Vertex>,
}

/// Returns `Ok(None)` when the graph is not bipartite and
/// [`Error::Disconnected`] when the colouring would be ambiguous.
pub fn bipartition(g: &DiGraph) -> Result<Option<Bipartition>> {
    if !g.is_weakly_connected() {
        return Err(Error::Disconnected);
    }
    let mut colour = vec![None::<bool>; g.order() + 1];
    colour[1] = Some(false);
    let mut queue = VecDeque::from([1 as Vertex]);
    while let Some(v) = queue.pop_front() {
        let cv = colour[v as usize].expect("queued vertices are coloured");
        for w in g.undirected_neighbours(v) {
            match colour[w as usize] {
                None => {
                    colour[w as usize] = Some(!cv);
                    queue.push_back(w);
                }
                Some(cw) if cw == cv => return Ok(None),
                Some(_) => {}
            }
        }
    }
    let (mut part1, mut part2) = (BTreeSet::new(), BTreeSet::new());
    for v in g.vertices() {
        if colour[v as usize] == Some(false) {
            part1.insert(v);
        } else {
            part2.insert(v);
        }
    }
    Ok(Some(Bipartition { part1, part2 }))
}

/// Bipartite with `|V1| = |V2| + 1` and every incoming and outgoing vertex
/// in `V1`. A true result certifies the single visit condition.
pub fn satisfies_bipartite_shortcut(g: &InOutGraph) -> bool {
    let Ok(Some(bp)) = bipartition(&g.graph) else {
        return false;
    };
    let check = |part: &BTreeSet<Vertex>, other: &BTreeSet<Vertex>| {
        part.len() == other.len() + 1 && g.incoming.iter().chain(&g.outgoing).all(|v| part.contains(v))
    };
    // The larger side need not be the one holding vertex 1.
    check(&bp.part1, &bp.part2) || check(&bp.part2, &bp.part1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> InOutGraph {
        let g = DiGraph::new(3, [(1, 2), (2, 1), (2, 3), (3, 2)]).unwrap();
        InOutGraph::new(g, vec![1, 3], vec![3, 1]).unwrap()
    }

    fn set(xs: &[Vertex]) -> BTreeSet<Vertex> {
        xs.iter().copied().collect()
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(DiGraph::new(3, [(1, 1)]).is_err());
        assert!(DiGraph::new(3, [(1, 4)]).is_err());
        assert!(DiGraph::new(3, [(1, 2), (1, 2)]).is_err());
        assert!(DiGraph::new(0, []).is_err());
        let g = DiGraph::new(3, [(1, 2)]).unwrap();
        assert!(InOutGraph::new(g.clone(), vec![1, 1], vec![2, 3]).is_err());
        assert!(InOutGraph::new(g.clone(), vec![1], vec![2, 3]).is_err());
        assert!(InOutGraph::new(g, vec![], vec![]).is_err());
    }

    #[test]
    fn classify_s2() {
        let p = classify_vertices(&s2());
        assert!(p.incoming_only.is_empty() && p.outgoing_only.is_empty());
        assert_eq!(p.both, set(&[1, 3]));
        assert_eq!(p.neither, set(&[2]));
        assert_eq!(p.total(), 3);
    }

    #[test]
    fn classify_s3_labels() {
        let g = DiGraph::new(6, [(1, 2)]).unwrap();
        let g = InOutGraph::new(g, vec![1, 3, 6], vec![6, 4, 3]).unwrap();
        let p = classify_vertices(&g);
        assert_eq!(p.incoming_only, set(&[1]));
        assert_eq!(p.outgoing_only, set(&[4]));
        assert_eq!(p.both, set(&[3, 6]));
        assert_eq!(p.neither, set(&[2, 5]));
    }

    #[test]
    fn bipartition_of_path() {
        let bp = bipartition(&s2().graph).unwrap().unwrap();
        assert_eq!(bp.part1, set(&[1, 3]));
        assert_eq!(bp.part2, set(&[2]));
        assert!(satisfies_bipartite_shortcut(&s2()));
    }

    #[test]
    fn bipartition_errors_and_odd_cycles() {
        let disconnected = DiGraph::new(3, [(1, 2)]).unwrap();
        assert!(matches!(bipartition(&disconnected), Err(Error::Disconnected)));
        let triangle = DiGraph::new(3, [(1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(bipartition(&triangle).unwrap(), None);
        let single = DiGraph::new(1, []).unwrap();
        let bp = bipartition(&single).unwrap().unwrap();
        assert_eq!(bp.part1, set(&[1]));
        assert!(bp.part2.is_empty());
    }

    #[test]
    fn text_format_round_trip() {
        let g = s2();
        let text = g.to_text();
        assert_eq!(text, "3 2\n1 3\n3 1\n1 2\n2 1\n2 3\n3 2\n");
        assert_eq!(InOutGraph::parse(&text).unwrap(), g);
    }

    #[test]
    fn text_format_errors_carry_line_numbers() {
        let err = InOutGraph::parse("3 2\n1 3\n3 1\n1 2 9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = InOutGraph::parse("# comment\n3 2\n1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(InOutGraph::parse("3 2\n1 3\n3 1\n1 x\n").is_err());
    }
}
