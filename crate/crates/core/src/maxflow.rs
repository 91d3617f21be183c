//! Exact shortest-augmenting-path maximum flow.
//!
//! Augmenting paths are found by breadth-first search over the internal
//! augmentation graph (forward slack and backward flow). Each vertex scans its
//! incident arcs in a fixed order, lowest arc id first by default, so the
//! returned flow is a deterministic function of the input.

use std::collections::VecDeque;

use crate::error::Result;
use crate::network::{ArcId, ArcSet, Flow, Network};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlowResult {
    pub flow: Flow,
    pub value: Rational,
    /// Forward arcs of the source side of a minimum cut.
    pub min_cut: ArcSet,
}

/// Maximum s-t flow with `deleted` arcs masked and capacities optionally
/// replaced by `capacity_override` (indexed by arc position, return arc ignored).
pub fn max_flow(
    net: &Network,
    capacity_override: Option<&[Rational]>,
    deleted: &ArcSet,
) -> MaxFlowResult {
    let order: Vec<ArcId> = net.real_arcs().map(|(a, _)| a).collect();
    max_flow_with_order(net, capacity_override, deleted, &order)
}

/// Same as [`max_flow`] but incident arcs are scanned in `order` rather than by id.
///
/// Different orders can produce different maximum flows of equal value.
pub fn max_flow_with_order(
    net: &Network,
    capacity_override: Option<&[Rational]>,
    deleted: &ArcSet,
    order: &[ArcId],
) -> MaxFlowResult {
    let m = net.arc_count();
    let caps: Vec<Option<Rational>> = (0..m)
        .map(|i| {
            let a = ArcId::from_index(i);
            if deleted.contains(&a) {
                return None;
            }
            Some(match capacity_override {
                Some(o) => o[i].clone(),
                None => net.capacity(a).finite().expect("real arcs are finite").clone(),
            })
        })
        .collect();
    let (values, reach) = augment(net, &caps, order);
    let value = values.last().cloned().unwrap_or_default();
    let min_cut = net
        .real_arcs()
        .filter(|(a, arc)| caps[a.index()].is_some() && reach[arc.tail] && !reach[arc.head])
        .map(|(a, _)| a)
        .collect();
    MaxFlowResult { flow: Flow::from_values(values), value, min_cut }
}

/// Value of the best adaptive flow: maximum flow of the network without
/// `deleted` where every arc's capacity is its value under `phi`.
pub fn residual_value(net: &Network, phi: &Flow, deleted: &ArcSet) -> Result<Rational> {
    phi.validate(net)?;
    Ok(residual_value_unchecked(net, phi, deleted))
}

pub(crate) fn residual_value_unchecked(net: &Network, phi: &Flow, deleted: &ArcSet) -> Rational {
    let caps: Vec<Option<Rational>> = phi.values()[..net.arc_count()]
        .iter()
        .enumerate()
        .map(|(i, v)| (!deleted.contains(&ArcId::from_index(i))).then(|| v.clone()))
        .collect();
    let order: Vec<ArcId> = net.real_arcs().map(|(a, _)| a).collect();
    augment(net, &caps, &order).0.pop().unwrap_or_default()
}

/// Fewest real arcs whose removal separates source from sink.
pub fn min_cut_cardinality(net: &Network) -> usize {
    let ones = vec![Rational::one(); net.arc_count()];
    let r = max_flow(net, Some(&ones), &ArcSet::new());
    r.value.to_i64().expect("unit-capacity flow is integral") as usize
}

/// Runs the augmentation loop. `caps[i] == None` masks arc `i`.
/// Returns arc values (return arc last) and the final source-reachable set.
fn augment(net: &Network, caps: &[Option<Rational>], order: &[ArcId]) -> (Vec<Rational>, Vec<bool>) {
    let n = net.vertex_count();
    let m = net.arc_count();
    let (s, t) = (net.source(), net.sink());

    // (arc index, forward?) per vertex, in scan order.
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for &a in order {
        let i = a.index();
        match &caps[i] {
            Some(c) if c.is_positive() => {}
            _ => continue,
        }
        let arc = net.arc(a);
        adj[arc.tail].push((i, true));
        adj[arc.head].push((i, false));
    }

    let mut flow = vec![Rational::zero(); m];
    let residual = |flow: &[Rational], i: usize, fwd: bool| -> Rational {
        if fwd {
            caps[i].as_ref().expect("masked arcs are not scanned") - &flow[i]
        } else {
            flow[i].clone()
        }
    };

    let mut total = Rational::zero();
    loop {
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        'bfs: while let Some(u) = queue.pop_front() {
            for &(i, fwd) in &adj[u] {
                let arc = net.arc(ArcId::from_index(i));
                let v = if fwd { arc.head } else { arc.tail };
                if seen[v] || !residual(&flow, i, fwd).is_positive() {
                    continue;
                }
                seen[v] = true;
                parent[v] = Some((i, fwd));
                if v == t {
                    break 'bfs;
                }
                queue.push_back(v);
            }
        }
        if !seen[t] {
            let mut values = flow;
            values.push(total);
            return (values, seen);
        }

        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let (i, fwd) = parent[v].expect("bfs tree reaches source");
            path.push((i, fwd));
            let arc = net.arc(ArcId::from_index(i));
            v = if fwd { arc.tail } else { arc.head };
        }
        let delta = path
            .iter()
            .map(|&(i, fwd)| residual(&flow, i, fwd))
            .min()
            .expect("path is nonempty");
        for &(i, fwd) in &path {
            if fwd {
                flow[i] += &delta;
            } else {
                flow[i] -= &delta;
            }
        }
        total += &delta;
    }
}
