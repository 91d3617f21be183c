//! Built-in example networks.

use crate::network::{InputFormat, Network};

/// DIMACS text of the three-vertex network with `b` unit arcs s->v followed
/// by two arcs v->t of capacity `b`. Arc ids 1..=b are the unit arcs, b+1 and
/// b+2 the v->t arcs.
pub fn two_branch_dimacs(b: usize) -> String {
    let mut s = format!("c {b} unit arcs s->v, two arcs v->t of capacity {b}\np max 3 {}\nn 1 s\nn 3 t\n", b + 2);
    for _ in 0..b {
        s.push_str("a 1 2 1\n");
    }
    s.push_str(&format!("a 2 3 {b}\na 2 3 {b}\n"));
    s
}

pub fn two_branch_instance(b: usize) -> Network {
    Network::parse(&two_branch_dimacs(b), InputFormat::Dimacs).expect("instance is well formed")
}
