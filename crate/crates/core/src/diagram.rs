//! Arc-and-line diagrams of the memory expansion.
//!
//! A diagram is a chain `f_{i_1} → arc(i_1 → k_1) → line(k_1 → l_1) →
//! arc(l_1 → k_2) → … → line(k_m → t)` with
//! `i_1 < k_1 ≤ l_1 < k_2 ≤ … ≤ l_{m−1} < k_m`. Summed over all chains it
//! reproduces `𝒪(t) − f_t`.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernel::{DeltaTrain, FreePropagator, KernelSpec, MemorySolver, NoiseSequence, Side};
use crate::scalar::{czero, Real};

/// Largest train accepted by [`sum_check`].
pub const MAX_ENUMERATION_NODES: usize = 12;

/// One term of the memory expansion; arcs are `(from, to)` on zero-based nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagram {
    arcs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Markovian,
    NonMarkovian,
}

impl Diagram {
    /// Validates the chain ordering.
    pub fn new(arcs: Vec<(usize, usize)>) -> Option<Self> {
        if arcs.is_empty() || arcs.iter().any(|&(i, k)| k <= i) {
            return None;
        }
        if arcs.windows(2).any(|w| w[1].0 < w[0].1) {
            return None;
        }
        Some(Self { arcs })
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Node whose `f` value feeds the diagram.
    pub fn start_index(&self) -> usize {
        self.arcs[0].0
    }

    /// Line segments `(k_r, l_r)` between consecutive arcs; the final line to `t` is implicit.
    pub fn lines(&self) -> Vec<(usize, usize)> {
        self.arcs.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    /// Landing node of the last arc, where the line to `t` begins.
    pub fn last_node(&self) -> usize {
        self.arcs[self.arcs.len() - 1].1
    }

    pub fn max_span(&self) -> usize {
        self.arcs.iter().map(|&(i, k)| k - i).max().unwrap_or(0)
    }

    pub fn classify(&self) -> Classification {
        if self.arcs.iter().all(|&(i, k)| k == i + 1) {
            Classification::Markovian
        } else {
            Classification::NonMarkovian
        }
    }

    /// Arcs as `from->to` pairs on one-based node labels.
    pub fn label(&self) -> String {
        self.arcs
            .iter()
            .map(|&(i, k)| format!("{}->{}", i + 1, k + 1))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn classify(d: &Diagram) -> Classification {
    d.classify()
}

/// Every diagram of an `n`-node train, in lexicographic arc order.
pub fn enumerate(n: usize) -> Vec<Diagram> {
    enumerate_restricted(n, None)
}

/// Diagrams whose arcs all span at most `max_span` nodes.
pub fn enumerate_restricted(n: usize, max_span: Option<usize>) -> Vec<Diagram> {
    let span = max_span.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    let mut chain = Vec::new();
    for i in 0..n {
        extend(i, n, span, &mut chain, &mut out);
    }
    out.sort();
    out
}

fn extend(
    from: usize,
    n: usize,
    span: usize,
    chain: &mut Vec<(usize, usize)>,
    out: &mut Vec<Diagram>,
) {
    let hi = n.min(from.saturating_add(span).saturating_add(1));
    for k in from + 1..hi {
        chain.push((from, k));
        out.push(Diagram {
            arcs: chain.clone(),
        });
        for l in k..n {
            extend(l, n, span, chain, out);
        }
        chain.pop();
    }
}

/// Product of `f_{i_1}`, `−δ²Σ` per arc and `G_0` per line.
pub fn weight<R: Real>(
    d: &Diagram,
    t: R,
    solver: &MemorySolver<R>,
    f_values: &[Complex<R>],
) -> Complex<R> {
    let train = solver.train();
    if train.active_count(t, Side::Right) <= d.last_node() {
        return czero();
    }
    let d2 = train.spacing() * train.spacing();
    let mut w = f_values[d.start_index()];
    for &(i, k) in d.arcs() {
        w = w * solver.sigma(k, i) * (-d2);
    }
    for (k, l) in d.lines() {
        w = w * solver.green_lag(l - k);
    }
    let tail = match train.node_at(t) {
        Some(at) => solver.green_lag(at - d.last_node()),
        None => solver
            .propagator()
            .green0(t - train.node_time(d.last_node())),
    };
    w * tail
}

/// Diagram expansion against the direct solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumCheck<R> {
    /// `f_t + Σ weights`.
    pub diagram_sum: Complex<R>,
    pub solver_value: Complex<R>,
    pub abs_difference: R,
    pub diagram_count: usize,
}

pub fn sum_check<R: Real>(
    t: R,
    train: &DeltaTrain<R>,
    kernel: &KernelSpec<R>,
    noise: &NoiseSequence<R>,
    initials: &[Complex<R>],
    prop: &FreePropagator<R>,
) -> Result<SumCheck<R>> {
    let n = train.len();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::TooManyNodes {
            n,
            max: MAX_ENUMERATION_NODES,
        });
    }
    let solver = MemorySolver::new(train.clone(), kernel.clone(), prop.clone())?;
    let free = solver.free_values(initials)?;
    let xi = solver.xi_nodes(noise)?;
    let f: Vec<Complex<R>> = free.iter().zip(&xi).map(|(a, b)| a + b).collect();
    let f_t = prop.free_solution(t, initials)? + solver.xi_at(t, noise)?;
    let diagrams = enumerate_restricted(n, kernel.max_arc_span());
    let diagram_sum = diagrams
        .iter()
        .fold(f_t, |acc, d| acc + weight(d, t, &solver, &f));
    let solver_value = solver.solve_at(t, initials, noise)?;
    Ok(SumCheck {
        diagram_sum,
        solver_value,
        abs_difference: (diagram_sum - solver_value).norm(),
        diagram_count: diagrams.len(),
    })
}
