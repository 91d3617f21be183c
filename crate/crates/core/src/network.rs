//! Capacitated s-t networks, their text formats, and flows on them.
//!
//! Vertices are numbered `1..=n` in every external format and `0..n`
//! internally. Arcs are numbered `1..=m` in input order; arc `m+1` is the
//! implicit return arc (t,s) with unbounded capacity that closes every s-t
//! flow into a circulation.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// 1-based arc identifier. The return arc of a network with `m` arcs is `m + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub usize);

impl ArcId {
    /// 0-based position in arc-indexed vectors.
    #[inline]
    pub fn index(self) -> usize {
        self.0 - 1
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        ArcId(i + 1)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of arcs, kept sorted so that iteration and comparison are lexicographic.
pub type ArcSet = BTreeSet<ArcId>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(Rational),
    Unbounded,
}

impl Capacity {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: Capacity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Dimacs,
    Json,
}

/// A directed network with a designated source and sink.
///
/// The arc list always ends with the return arc (t,s), which is appended at
/// construction and can never be deleted by an attack.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Network {
    vertex_count: usize,
    arcs: Vec<Arc>,
    source: usize,
    sink: usize,
}

impl Network {
    /// Builds a network from 0-based `(tail, head, capacity)` triples.
    pub fn new(
        vertex_count: usize,
        source: usize,
        sink: usize,
        arcs: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::invalid("network must have at least one vertex"));
        }
        for (name, v) in [("source", source), ("sink", sink)] {
            if v >= vertex_count {
                return Err(Error::invalid(format!(
                    "{name} {} is not a vertex of a {vertex_count}-vertex network",
                    v + 1
                )));
            }
        }
        if source == sink {
            return Err(Error::invalid("source and sink must differ"));
        }
        let mut list = Vec::new();
        for (i, (tail, head, cap)) in arcs.into_iter().enumerate() {
            let id = i + 1;
            if tail >= vertex_count || head >= vertex_count {
                return Err(Error::invalid(format!(
                    "arc {id} references a vertex outside 1..={vertex_count}"
                )));
            }
            if tail == head {
                return Err(Error::invalid(format!("arc {id} is a self-loop at vertex {}", tail + 1)));
            }
            if cap.is_negative() {
                return Err(Error::invalid(format!("arc {id} has negative capacity {cap}")));
            }
            list.push(Arc { tail, head, capacity: Capacity::Finite(cap) });
        }
        list.push(Arc { tail: sink, head: source, capacity: Capacity::Unbounded });
        Ok(Network { vertex_count, arcs: list, source, sink })
    }

    pub fn parse(text: &str, format: InputFormat) -> Result<Self> {
        match format {
            InputFormat::Dimacs => parse_dimacs(text),
            InputFormat::Json => parse_json(text),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of real (deletable) arcs, excluding the return arc.
    pub fn arc_count(&self) -> usize {
        self.arcs.len() - 1
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn dummy_arc(&self) -> ArcId {
        ArcId(self.arcs.len())
    }

    pub fn is_dummy(&self, a: ArcId) -> bool {
        a == self.dummy_arc()
    }

    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[a.index()]
    }

    /// All arcs including the return arc, in id order.
    pub fn arcs(&self) -> impl ExactSizeIterator<Item = (ArcId, &Arc)> {
        self.arcs.iter().enumerate().map(|(i, a)| (ArcId::from_index(i), a))
    }

    /// Real arcs only.
    pub fn real_arcs(&self) -> impl ExactSizeIterator<Item = (ArcId, &Arc)> {
        self.arcs[..self.arc_count()].iter().enumerate().map(|(i, a)| (ArcId::from_index(i), a))
    }

    pub fn capacity(&self, a: ArcId) -> &Capacity {
        &self.arcs[a.index()].capacity
    }

    pub fn incidence(&self) -> IncidenceMatrix {
        IncidenceMatrix::of(self)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p max {} {}", self.vertex_count, self.arc_count()).unwrap();
        writeln!(out, "n {} s", self.source + 1).unwrap();
        writeln!(out, "n {} t", self.sink + 1).unwrap();
        for (_, arc) in self.real_arcs() {
            let cap = arc.capacity.finite().expect("real arcs are finite");
            writeln!(out, "a {} {} {}", arc.tail + 1, arc.head + 1, cap).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = JsonNetwork {
            n: self.vertex_count,
            source: self.source + 1,
            sink: self.sink + 1,
            arcs: self
                .real_arcs()
                .map(|(_, a)| JsonArc {
                    tail: a.tail + 1,
                    head: a.head + 1,
                    cap: a.capacity.finite().expect("real arcs are finite").clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("network serializes")
    }
}

fn parse_dimacs(text: &str) -> Result<Network> {
    let mut header: Option<(usize, usize)> = None;
    let mut source = None;
    let mut sink = None;
    let mut arcs = Vec::new();

    let vertex = |tok: Option<&str>, line: usize, n: usize| -> Result<usize> {
        let tok = tok.ok_or_else(|| Error::syntax(line, "missing vertex id"))?;
        let v: usize =
            tok.parse().map_err(|_| Error::syntax(line, format!("bad vertex id {tok:?}")))?;
        if v == 0 || v > n {
            return Err(Error::syntax(line, format!("vertex {v} outside 1..={n}")));
        }
        Ok(v - 1)
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        let Some(kind) = toks.next() else { continue };
        match kind {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(Error::syntax(line, "duplicate problem line"));
                }
                if toks.next() != Some("max") {
                    return Err(Error::syntax(line, "expected \"p max <n> <m>\""));
                }
                let mut num = || -> Result<usize> {
                    let t = toks.next().ok_or_else(|| Error::syntax(line, "expected \"p max <n> <m>\""))?;
                    t.parse().map_err(|_| Error::syntax(line, format!("bad count {t:?}")))
                };
                let n = num()?;
                let m = num()?;
                header = Some((n, m));
            }
            "n" => {
                let (n, _) = header.ok_or_else(|| Error::syntax(line, "node line before problem line"))?;
                let v = vertex(toks.next(), line, n)?;
                let slot = match toks.next() {
                    Some("s") => &mut source,
                    Some("t") => &mut sink,
                    other => {
                        return Err(Error::syntax(line, format!("expected role s or t, got {other:?}")))
                    }
                };
                if slot.replace(v).is_some() {
                    return Err(Error::syntax(line, "duplicate source/sink declaration"));
                }
            }
            "a" => {
                let (n, _) = header.ok_or_else(|| Error::syntax(line, "arc line before problem line"))?;
                let tail = vertex(toks.next(), line, n)?;
                let head = vertex(toks.next(), line, n)?;
                let tok = toks.next().ok_or_else(|| Error::syntax(line, "missing capacity"))?;
                let cap: Rational =
                    tok.parse().map_err(|_| Error::syntax(line, format!("bad capacity {tok:?}")))?;
                if cap.is_negative() {
                    return Err(Error::syntax(line, format!("negative capacity {cap}")));
                }
                if tail == head {
                    return Err(Error::syntax(line, format!("self-loop at vertex {}", tail + 1)));
                }
                arcs.push((tail, head, cap));
            }
            other => return Err(Error::syntax(line, format!("unknown record type {other:?}"))),
        }
        if let Some(extra) = toks.next() {
            return Err(Error::syntax(line, format!("unexpected token {extra:?}")));
        }
    }

    let (n, m) = header.ok_or_else(|| Error::invalid("missing problem line"))?;
    if arcs.len() != m {
        return Err(Error::invalid(format!("problem line declares {m} arcs, found {}", arcs.len())));
    }
    let source = source.ok_or_else(|| Error::invalid("missing source declaration"))?;
    let sink = sink.ok_or_else(|| Error::invalid("missing sink declaration"))?;
    Network::new(n, source, sink, arcs)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNetwork {
    n: usize,
    source: usize,
    sink: usize,
    arcs: Vec<JsonArc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonArc {
    tail: usize,
    head: usize,
    cap: Rational,
}

fn parse_json(text: &str) -> Result<Network> {
    let doc: JsonNetwork = serde_json::from_str(text)
        .map_err(|e| Error::syntax(e.line(), e.to_string()))?;
    let one_based = |v: usize, what: &str| -> Result<usize> {
        if v == 0 || v > doc.n {
            Err(Error::invalid(format!("{what} {v} outside 1..={}", doc.n)))
        } else {
            Ok(v - 1)
        }
    };
    let source = one_based(doc.source, "source")?;
    let sink = one_based(doc.sink, "sink")?;
    let arcs = doc
        .arcs
        .iter()
        .map(|a| Ok((one_based(a.tail, "tail")?, one_based(a.head, "head")?, a.cap.clone())))
        .collect::<Result<Vec<_>>>()?;
    Network::new(doc.n, source, sink, arcs)
}

/// Node-arc incidence matrix including the return-arc column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    /// `(tail, head)` per column; the matrix is +1 at the tail, -1 at the head.
    columns: Vec<(usize, usize)>,
}

impl IncidenceMatrix {
    pub fn of(net: &Network) -> Self {
        IncidenceMatrix {
            rows: net.vertex_count(),
            columns: net.arcs().map(|(_, a)| (a.tail, a.head)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, vertex: usize, arc: ArcId) -> i8 {
        let (tail, head) = self.columns[arc.index()];
        if vertex == tail {
            1
        } else if vertex == head {
            -1
        } else {
            0
        }
    }

    /// Nonzeros of one column as `(vertex, coefficient)`.
    pub fn column(&self, arc: ArcId) -> [(usize, i8); 2] {
        let (tail, head) = self.columns[arc.index()];
        [(tail, 1), (head, -1)]
    }

    pub fn to_dense(&self) -> Vec<Vec<i8>> {
        (0..self.rows)
            .map(|v| (0..self.cols()).map(|j| self.entry(v, ArcId::from_index(j))).collect())
            .collect()
    }
}

/// Arc values of an s-t flow in circulation form (the return arc carries the value).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flow {
    values: Vec<Rational>,
}

impl Flow {
    pub fn zero(net: &Network) -> Self {
        Flow { values: vec![Rational::zero(); net.arcs.len()] }
    }

    /// Wraps values for all `m + 1` arcs without checking feasibility.
    pub fn from_values(values: Vec<Rational>) -> Self {
        Flow { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, a: ArcId) -> &Rational {
        &self.values[a.index()]
    }

    /// Flow value, i.e. the amount on the return arc.
    pub fn value(&self) -> &Rational {
        self.values.last().expect("flow has a return arc")
    }

    pub fn iter(&self) -> impl Iterator<Item = (ArcId, &Rational)> {
        self.values.iter().enumerate().map(|(i, v)| (ArcId::from_index(i), v))
    }

    /// Checks bounds and exact conservation, naming the first violation.
    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.values.len() != net.arcs.len() {
            return Err(Error::infeasible(format!(
                "flow has {} arc values, network has {}",
                self.values.len(),
                net.arcs.len()
            )));
        }
        for (a, arc) in net.arcs() {
            let v = self.get(a);
            if v.is_negative() {
                return Err(Error::infeasible(format!("arc {a} carries negative flow {v}")));
            }
            if let Capacity::Finite(c) = &arc.capacity {
                if v > c {
                    return Err(Error::infeasible(format!(
                        "arc {a} carries {v}, above its capacity {c}"
                    )));
                }
            }
        }
        let excess = self.excess(net);
        if let Some(v) = excess.iter().position(|e| !e.is_zero()) {
            return Err(Error::infeasible(format!(
                "conservation violated at vertex {} (net outflow {})",
                v + 1,
                excess[v]
            )));
        }
        Ok(())
    }

    /// Net outflow per vertex, i.e. `M * values`.
    pub fn excess(&self, net: &Network) -> Vec<Rational> {
        let mut excess = vec![Rational::zero(); net.vertex_count()];
        for (a, arc) in net.arcs() {
            let v = self.get(a);
            if v.is_zero() {
                continue;
            }
            excess[arc.tail] += v;
            excess[arc.head] -= v;
        }
        excess
    }

    /// Parses the `f <arc_id> <p/q>` flow file format.
    ///
    /// Omitted arcs carry 0. When the return arc is omitted its value is the
    /// net outflow of the source over the real arcs.
    pub fn parse(text: &str, net: &Network) -> Result<Self> {
        let total = net.arcs.len();
        let mut values: Vec<Option<Rational>> = vec![None; total];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let mut toks = raw.split_whitespace();
            match toks.next() {
                None | Some("c") => continue,
                Some("f") => {}
                Some(other) => {
                    return Err(Error::syntax(line, format!("unknown record type {other:?}")))
                }
            }
            let id_tok = toks.next().ok_or_else(|| Error::syntax(line, "missing arc id"))?;
            let id: usize = id_tok
                .parse()
                .map_err(|_| Error::syntax(line, format!("bad arc id {id_tok:?}")))?;
            if id == 0 || id > total {
                return Err(Error::syntax(line, format!("arc id {id} outside 1..={total}")));
            }
            let val_tok = toks.next().ok_or_else(|| Error::syntax(line, "missing flow value"))?;
            let val: Rational = val_tok
                .parse()
                .map_err(|_| Error::syntax(line, format!("bad flow value {val_tok:?}")))?;
            if toks.next().is_some() {
                return Err(Error::syntax(line, "trailing tokens"));
            }
            if values[id - 1].replace(val).is_some() {
                return Err(Error::syntax(line, format!("arc {id} given twice")));
            }
        }
        let dummy = total - 1;
        let inferred = values[dummy].is_none();
        let mut values: Vec<Rational> = values.into_iter().map(Option::unwrap_or_default).collect();
        if inferred {
            let mut out = Rational::zero();
            for (a, arc) in net.real_arcs() {
                if arc.tail == net.source {
                    out += &values[a.index()];
                }
                if arc.head == net.source {
                    out -= &values[a.index()];
                }
            }
            values[dummy] = out;
        }
        Ok(Flow { values })
    }

    pub fn to_flow_file(&self) -> String {
        let mut out = String::new();
        for (a, v) in self.iter() {
            writeln!(out, "f {a} {v}").unwrap();
        }
        out
    }
}
