//! TSPLIB-style text formats for GTSP input and ATSP output.

use std::fmt::Write as _;

use super::{AtspInstance, GtspInstance, Weight, WeightedArc};
use crate::error::{Error, Result};
use crate::graph::Vertex;

/// A parsed instance plus the non-fatal notes produced while validating it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedGtsp {
    pub instance: GtspInstance,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    EdgeData,
    EdgeWeight,
    Sets,
    Done,
}

fn section_keyword(word: &str) -> Option<Section> {
    match word {
        "EDGE_DATA_SECTION" => Some(Section::EdgeData),
        "EDGE_WEIGHT_SECTION" => Some(Section::EdgeWeight),
        "GTSP_SET_SECTION" => Some(Section::Sets),
        "EOF" => Some(Section::Done),
        _ => None,
    }
}

/// Splits `KEY : value` (the colon may touch either side).
fn header_pair(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once(':')?;
    Some((k.trim(), v.trim()))
}

fn parse_int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::parse(line, format!("expected {what}, found {tok:?}")))
}

fn parse_weight(tok: &str, line: usize) -> Result<Weight> {
    if tok.starts_with('-') {
        return Err(Error::parse(line, format!("negative weight {tok}")));
    }
    parse_int(tok, line, "a non-negative integer weight")
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    kind: Option<String>,
    dimension: Option<usize>,
    sets: Option<usize>,
    weight_format: Option<String>,
}

fn read_header(h: &mut Header, key: &str, value: &str, line: usize) -> Result<()> {
    match key {
        "NAME" => h.name = Some(value.to_string()),
        "TYPE" => h.kind = Some(value.to_string()),
        "DIMENSION" => h.dimension = Some(parse_int(value, line, "a dimension")?),
        "GTSP_SETS" => h.sets = Some(parse_int(value, line, "a set count")?),
        "EDGE_WEIGHT_FORMAT" => h.weight_format = Some(value.to_string()),
        _ => {}
    }
    Ok(())
}

/// Parses the GTSP text format. Arc lists come from `EDGE_DATA_SECTION` or a
/// `FULL_MATRIX` `EDGE_WEIGHT_SECTION`; group `s` lists members in order.
pub fn parse_gtsp(text: &str) -> Result<ParsedGtsp> {
    let mut h = Header::default();
    let mut section = Section::Header;
    let mut arcs: Vec<WeightedArc> = Vec::new();
    let mut matrix: Vec<(usize, &str)> = Vec::new();
    let mut set_tokens: Vec<(usize, &str)> = Vec::new();
    let mut saw_arcs = false;
    let mut saw_sets = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let first = line.split_whitespace().next().unwrap_or("");
        if let Some(next) = section_keyword(first.trim_end_matches(':')) {
            match next {
                Section::EdgeData | Section::EdgeWeight => saw_arcs = true,
                Section::Sets => saw_sets = true,
                _ => {}
            }
            section = next;
            continue;
        }
        if first.ends_with("_SECTION") {
            return Err(Error::parse(line_no, format!("unsupported section {first}")));
        }
        match section {
            Section::Done => break,
            Section::Header | Section::EdgeData if header_pair(line).is_some() => {
                let (k, v) = header_pair(line).expect("checked");
                read_header(&mut h, k, v, line_no)?;
                section = Section::Header;
            }
            Section::Header => return Err(Error::parse(line_no, format!("unexpected line {line:?}"))),
            Section::EdgeData => {
                if line == "-1" {
                    section = Section::Header;
                    continue;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::parse(line_no, "expected `u w weight`"));
                }
                let n = h.dimension.ok_or_else(|| Error::parse(line_no, "DIMENSION must precede arc data"))?;
                let u: Vertex = parse_int(toks[0], line_no, "a vertex id")?;
                let w: Vertex = parse_int(toks[1], line_no, "a vertex id")?;
                for v in [u, w] {
                    if v == 0 || v as usize > n {
                        return Err(Error::parse(line_no, format!("vertex {v} outside 1..={n}")));
                    }
                }
                if u == w {
                    return Err(Error::parse(line_no, format!("self-loop at {u}")));
                }
                if arcs.iter().any(|a| a.from == u && a.to == w) {
                    return Err(Error::parse(line_no, format!("duplicate arc ({u},{w})")));
                }
                arcs.push(WeightedArc { from: u, to: w, weight: parse_weight(toks[2], line_no)? });
            }
            Section::EdgeWeight => matrix.extend(line.split_whitespace().map(|t| (line_no, t))),
            Section::Sets => set_tokens.extend(line.split_whitespace().map(|t| (line_no, t))),
        }
    }

    let end = text.lines().count().max(1);
    if let Some(kind) = &h.kind {
        if kind != "GTSP" {
            return Err(Error::parse(1, format!("TYPE is {kind:?}, expected GTSP")));
        }
    }
    let n = h.dimension.ok_or_else(|| Error::parse(end, "missing DIMENSION"))?;
    if n == 0 {
        return Err(Error::parse(end, "DIMENSION must be positive"));
    }
    if !saw_arcs {
        return Err(Error::parse(end, "missing EDGE_DATA_SECTION or EDGE_WEIGHT_SECTION"));
    }
    if !saw_sets {
        return Err(Error::parse(end, "missing GTSP_SET_SECTION"));
    }
    if !matrix.is_empty() {
        if let Some(fmt) = &h.weight_format {
            if fmt != "FULL_MATRIX" {
                return Err(Error::parse(end, format!("unsupported EDGE_WEIGHT_FORMAT {fmt}")));
            }
        }
        if matrix.len() != n * n {
            let line = matrix.last().map(|t| t.0).unwrap_or(end);
            return Err(Error::parse(line, format!("full matrix has {} entries, expected {}", matrix.len(), n * n)));
        }
        for (i, &(line, tok)) in matrix.iter().enumerate() {
            let (u, w) = (i / n + 1, i % n + 1);
            if u != w {
                arcs.push(WeightedArc { from: u as Vertex, to: w as Vertex, weight: parse_weight(tok, line)? });
            }
        }
    }

    let groups = parse_sets(&set_tokens, h.sets, n, end)?;
    let (instance, warnings) = GtspInstance::new(h.name.unwrap_or_default(), n, groups, arcs).map_err(|e| match e {
        Error::InvalidGraph(msg) => Error::parse(end, msg),
        other => other,
    })?;
    Ok(ParsedGtsp { instance, warnings })
}

fn parse_sets(tokens: &[(usize, &str)], declared: Option<usize>, n: usize, end: usize) -> Result<Vec<Vec<Vertex>>> {
    let mut sets: Vec<(usize, usize, Vec<Vertex>)> = Vec::new();
    let mut iter = tokens.iter();
    let mut owner: Vec<Option<usize>> = vec![None; n + 1];
    while let Some(&(line, tok)) = iter.next() {
        let id: usize = parse_int(tok, line, "a set id")?;
        let mut members = Vec::new();
        loop {
            let &(mline, mtok) =
                iter.next().ok_or_else(|| Error::parse(end, format!("set {id} is not terminated by -1")))?;
            if mtok == "-1" {
                break;
            }
            let v: Vertex = parse_int(mtok, mline, "a vertex id")?;
            if v == 0 || v as usize > n {
                return Err(Error::parse(mline, format!("vertex {v} outside 1..={n}")));
            }
            if let Some(other) = owner[v as usize] {
                return Err(Error::parse(mline, format!("vertex {v} is in both set {other} and set {id}")));
            }
            owner[v as usize] = Some(id);
            members.push(v);
        }
        if members.is_empty() {
            return Err(Error::parse(line, format!("set {id} is empty")));
        }
        if sets.iter().any(|s| s.0 == id) {
            return Err(Error::parse(line, format!("set {id} defined twice")));
        }
        sets.push((id, line, members));
    }
    sets.sort_by_key(|s| s.0);
    if let Some(g) = declared {
        if sets.len() != g {
            return Err(Error::parse(end, format!("GTSP_SETS is {g} but {} sets were given", sets.len())));
        }
    }
    for (expected, (id, line, _)) in sets.iter().enumerate() {
        if *id != expected + 1 {
            return Err(Error::parse(*line, format!("set ids must be 1..={}, found {id}", sets.len())));
        }
    }
    if let Some(v) = (1..=n).find(|&v| owner[v].is_none()) {
        return Err(Error::parse(end, format!("vertex {v} belongs to no set")));
    }
    Ok(sets.into_iter().map(|s| s.2).collect())
}

/// Writes a GTSP instance in the `EDGE_DATA_SECTION` form read by
/// [`parse_gtsp`].
pub fn write_gtsp(inst: &GtspInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {}", inst.name);
    let _ = writeln!(out, "TYPE: GTSP");
    let _ = writeln!(out, "DIMENSION: {}", inst.n);
    let _ = writeln!(out, "GTSP_SETS: {}", inst.group_count());
    let _ = writeln!(out, "EDGE_DATA_FORMAT: EDGE_LIST");
    out.push_str("EDGE_DATA_SECTION\n");
    for a in &inst.arcs {
        let _ = writeln!(out, "{} {} {}", a.from, a.to, a.weight);
    }
    out.push_str("-1\nGTSP_SET_SECTION\n");
    for (i, g) in inst.groups.iter().enumerate() {
        let members: Vec<String> = g.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{} {} -1", i + 1, members.join(" "));
    }
    out.push_str("EOF\n");
    out
}

/// Sparse ATSP arc-list format.
pub fn write_atsp(inst: &AtspInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {}", inst.name);
    let _ = writeln!(out, "TYPE: ATSP");
    let _ = writeln!(out, "DIMENSION: {}", inst.order);
    let _ = writeln!(out, "EDGE_COUNT: {}", inst.arcs.len());
    let _ = writeln!(out, "EDGE_DATA_FORMAT: EDGE_LIST");
    out.push_str("EDGE_DATA_SECTION\n");
    for a in &inst.arcs {
        let _ = writeln!(out, "{} {} {}", a.from, a.to, a.weight);
    }
    out.push_str("-1\nEOF\n");
    out
}

pub fn parse_atsp(text: &str) -> Result<AtspInstance> {
    let mut name = String::new();
    let mut order: Option<usize> = None;
    let mut in_data = false;
    let mut arcs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if line == "EDGE_DATA_SECTION" {
            in_data = true;
            continue;
        }
        if in_data {
            if line == "-1" {
                in_data = false;
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::parse(line_no, "expected `u w weight`"));
            }
            arcs.push(WeightedArc {
                from: parse_int(toks[0], line_no, "a vertex id")?,
                to: parse_int(toks[1], line_no, "a vertex id")?,
                weight: parse_weight(toks[2], line_no)?,
            });
            continue;
        }
        let (k, v) = header_pair(line).ok_or_else(|| Error::parse(line_no, format!("unexpected line {line:?}")))?;
        match k {
            "NAME" => name = v.to_string(),
            "TYPE" if v != "ATSP" => return Err(Error::parse(line_no, format!("TYPE is {v:?}, expected ATSP"))),
            "DIMENSION" => order = Some(parse_int(v, line_no, "a dimension")?),
            _ => {}
        }
    }
    let end = text.lines().count().max(1);
    let order = order.ok_or_else(|| Error::parse(end, "missing DIMENSION"))?;
    AtspInstance::new(name, order, arcs).map_err(|e| match e {
        Error::InvalidGraph(msg) => Error::parse(end, msg),
        other => other,
    })
}

/// Dense TSPLIB `FULL_MATRIX` rendering. Absent arcs and the diagonal get
/// `sentinel`. Returns the text and a warning for the caller to surface.
pub fn write_tsplib_matrix(inst: &AtspInstance, sentinel: Weight) -> (String, String) {
    let n = inst.order;
    let mut m = vec![vec![None; n]; n];
    for a in &inst.arcs {
        m[a.from as usize - 1][a.to as usize - 1] = Some(a.weight);
    }
    let absent = n * n - n - inst.arcs.len();
    let mut warning = format!(
        "{absent} absent arcs written with sentinel weight {sentinel}. \
         Dense matrices reintroduce the large weights the sparse conversion avoids; \
         prefer the sparse arc list when the solver accepts it."
    );
    if absent > 0 && sentinel <= inst.max_weight().saturating_mul(n as Weight) {
        let _ = write!(
            warning,
            " The sentinel does not exceed {} (max weight x order), so a solver may route through absent arcs.",
            inst.max_weight().saturating_mul(n as Weight)
        );
    }
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {}", inst.name);
    let _ = writeln!(out, "TYPE: ATSP");
    let _ = writeln!(out, "COMMENT: absent arcs carry sentinel {sentinel}");
    let _ = writeln!(out, "DIMENSION: {n}");
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT");
    let _ = writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX");
    out.push_str("EDGE_WEIGHT_SECTION\n");
    for row in &m {
        let cells: Vec<String> = row.iter().map(|c| c.unwrap_or(sentinel).to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out.push_str("EOF\n");
    (out, warning)
}
