//! Regular (loop-free) networks of tasks and their flattening into a
//! single composite task.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::algebra::{AttrRef, Attribute, Substrate, Task};
use crate::error::{KitError, KitResult};

/// A substrate slot of a node: slot `k` is component `k` of the node's
/// task substrate (slot 0 for an elementary substrate).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub node: usize,
    pub slot: usize,
}

/// The substrate leaving `from` enters `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: Slot,
    pub to: Slot,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub name: String,
    pub task: Task,
}

#[derive(Clone, Debug, Default)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, task: Task) -> usize {
        self.nodes.push(Node {
            name: name.into(),
            task,
        });
        self.nodes.len() - 1
    }

    pub fn connect(&mut self, from: (usize, usize), to: (usize, usize)) {
        self.edges.push(Edge {
            from: Slot { node: from.0, slot: from.1 },
            to: Slot { node: to.0, slot: to.1 },
        });
    }

    fn slot_count(&self, node: usize) -> usize {
        self.nodes[node].task.substrate().slot_sizes().len()
    }

    fn slot_substrate(&self, s: Slot) -> Substrate {
        let sub = self.nodes[s.node].task.substrate();
        if sub.is_composite() {
            sub.components()[s.slot].clone()
        } else {
            sub.clone()
        }
    }
}

/// Checks that `n` is a regular network and flattens it into one task on
/// the composite of its substrate lines (ordered by where each line
/// enters the network).
pub fn validate_network(n: &Network) -> KitResult<Task> {
    if n.nodes.is_empty() {
        return Err(KitError::InterfaceMismatch("empty network".into()));
    }
    let mut incoming: Vec<Vec<Option<usize>>> =
        (0..n.nodes.len()).map(|i| vec![None; n.slot_count(i)]).collect();
    let mut outgoing = incoming.clone();
    for (e_idx, e) in n.edges.iter().enumerate() {
        for s in [e.from, e.to] {
            if s.node >= n.nodes.len() || s.slot >= n.slot_count(s.node) {
                return Err(KitError::InterfaceMismatch(format!("edge {e_idx} names a missing slot")));
            }
        }
        if e.from.node == e.to.node {
            return Err(KitError::CycleDetected(n.nodes[e.from.node].name.clone()));
        }
        if n.slot_substrate(e.from) != n.slot_substrate(e.to) {
            return Err(KitError::InterfaceMismatch(format!(
                "edge {e_idx} joins `{}` to `{}`",
                n.slot_substrate(e.from),
                n.slot_substrate(e.to)
            )));
        }
        if outgoing[e.from.node][e.from.slot].replace(e_idx).is_some()
            || incoming[e.to.node][e.to.slot].replace(e_idx).is_some()
        {
            return Err(KitError::InterfaceMismatch(format!("edge {e_idx} reuses a slot")));
        }
    }

    let order = topological_order(n)?;

    // Interface containment on every edge.
    for (e_idx, e) in n.edges.iter().enumerate() {
        let up = &n.nodes[e.from.node].task;
        let down = &n.nodes[e.to.node].task;
        let accepted: Vec<AttrRef> = down
            .inputs()
            .iter()
            .map(|a| slot_of(a, e.to.slot))
            .collect::<KitResult<_>>()?;
        let accepted = Attribute::union(&n.slot_substrate(e.to), &accepted)?;
        for y in up.outputs() {
            let y = slot_of(&y, e.from.slot)?;
            if !y.is_subset_of(&accepted) {
                return Err(KitError::InterfaceMismatch(format!(
                    "edge {e_idx} ({} → {}): output `{y}` is not a legitimate input",
                    n.nodes[e.from.node].name, n.nodes[e.to.node].name
                )));
            }
        }
    }

    // Assign substrate lines.
    let mut line_of: Vec<Vec<usize>> = (0..n.nodes.len()).map(|i| vec![0; n.slot_count(i)]).collect();
    let mut lines: Vec<Substrate> = Vec::new();
    for &v in &order {
        for s in 0..n.slot_count(v) {
            match incoming[v][s] {
                None => {
                    line_of[v][s] = lines.len();
                    lines.push(n.slot_substrate(Slot { node: v, slot: s }));
                }
                Some(e) => {
                    let from = n.edges[e].from;
                    line_of[v][s] = line_of[from.node][from.slot];
                }
            }
        }
    }

    // Symbolic execution over product-form attributes, one run per
    // combination of legitimate inputs.
    #[derive(Clone)]
    struct Run {
        input: Vec<Option<AttrRef>>,
        current: Vec<Option<AttrRef>>,
    }
    let mut runs = vec![Run {
        input: vec![None; lines.len()],
        current: vec![None; lines.len()],
    }];
    for &v in &order {
        let task = &n.nodes[v].task;
        let mut next = Vec::new();
        for run in &runs {
            for (x, y) in task.pairs() {
                let mut r = run.clone();
                let mut ok = true;
                for s in 0..n.slot_count(v) {
                    let l = line_of[v][s];
                    let xs = slot_of(x, s)?;
                    match &run.current[l] {
                        Some(cur) => {
                            if cur.is_empty() || !cur.is_subset_of(&xs) {
                                ok = false;
                                break;
                            }
                        }
                        None => {
                            r.input[l] = Some(xs.clone());
                        }
                    }
                    r.current[l] = Some(slot_of(y, s)?);
                }
                if ok {
                    next.push(r);
                }
            }
        }
        runs = next;
    }
    if runs.is_empty() {
        return Err(KitError::InterfaceMismatch("no input propagates through the network".into()));
    }

    let composite = if lines.len() == 1 {
        lines[0].clone()
    } else {
        Substrate::composite(&lines)?
    };
    let assemble = |parts: &[Option<AttrRef>]| -> KitResult<AttrRef> {
        let parts: Vec<AttrRef> = parts.iter().map(|p| p.clone().expect("every line is assigned")).collect();
        if parts.len() == 1 {
            Ok(parts[0].clone())
        } else {
            Ok(Arc::new(Attribute::product_on(&composite, &parts)?))
        }
    };
    let mut pairs: Vec<(AttrRef, AttrRef)> = Vec::new();
    for r in &runs {
        let x = assemble(&r.input)?;
        let y = assemble(&r.current)?;
        if !pairs.iter().any(|(a, b)| a.set_eq(&x) && b.set_eq(&y)) {
            pairs.push((x, y));
        }
    }
    Task::new(pairs)
}

fn slot_of(a: &AttrRef, k: usize) -> KitResult<AttrRef> {
    a.slot(k).ok_or_else(|| {
        KitError::InterfaceMismatch(format!("attribute `{a}` is not in product form on slot {k}"))
    })
}

fn topological_order(n: &Network) -> KitResult<Vec<usize>> {
    let count = n.nodes.len();
    let mut indegree = vec![0usize; count];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); count];
    for e in &n.edges {
        succ[e.from.node].push(e.to.node);
        indegree[e.to.node] += 1;
    }
    let mut queue: VecDeque<usize> = (0..count).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(count);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &succ[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() < count {
        let stuck = (0..count).find(|i| !order.contains(i)).unwrap();
        return Err(KitError::CycleDetected(n.nodes[stuck].name.clone()));
    }
    Ok(order)
}
