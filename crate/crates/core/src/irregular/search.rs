//! Backtracking search for codes meeting pairwise constraints.
//!
//! The engine assigns one word of a fixed length to each variable. Every
//! pair of variables carries a symmetric compatibility predicate; variables
//! are picked by smallest remaining candidate set and candidate lists are
//! filtered forward after each assignment. Symmetry is broken by fixing the
//! first assigned word to zero and, optionally, restricting the second one to
//! canonical orbit representatives.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

/// Pairwise constraint system over words of `width` bits.
pub(crate) trait Constraints: Sync {
    fn vars(&self) -> usize;
    fn width(&self) -> u32;
    /// Whether variables `i` and `j` constrain each other at all.
    fn linked(&self, i: usize, j: usize) -> bool;
    fn compatible(&self, i: usize, wi: u64, j: usize, wj: u64) -> bool;
    /// Orbit-representative test for the second assigned word, given that
    /// the first is zero. `None` disables the reduction.
    fn canonical(&self, _w: u64) -> Option<bool> {
        None
    }
}

pub(crate) struct SearchOutcome {
    pub assignment: Option<Vec<u64>>,
    pub nodes: u64,
}

#[derive(Clone)]
struct State {
    assigned: Vec<Option<u64>>,
    // None: unrestricted domain (no assigned neighbour yet)
    candidates: Vec<Option<Vec<u64>>>,
}

impl State {
    fn new(vars: usize) -> Self {
        Self {
            assigned: vec![None; vars],
            candidates: vec![None; vars],
        }
    }

    fn pick<C: Constraints>(&self, c: &C) -> Option<usize> {
        let full = 1u64 << c.width();
        (0..c.vars())
            .filter(|&v| self.assigned[v].is_none())
            .min_by_key(|&v| {
                self.candidates[v]
                    .as_ref()
                    .map_or(full, |l| l.len() as u64)
            })
    }

    /// Assigns `var = word` and filters neighbours; false on a wipe-out.
    fn assign<C: Constraints>(&mut self, c: &C, var: usize, word: u64) -> bool {
        self.assigned[var] = Some(word);
        self.candidates[var] = None;
        let full = 1u64 << c.width();
        for other in 0..c.vars() {
            if self.assigned[other].is_some() || !c.linked(var, other) {
                continue;
            }
            let filtered: Vec<u64> = match self.candidates[other].take() {
                Some(list) => list
                    .into_iter()
                    .filter(|&w| c.compatible(var, word, other, w))
                    .collect(),
                None => (0..full)
                    .filter(|&w| c.compatible(var, word, other, w))
                    .collect(),
            };
            if filtered.is_empty() {
                return false;
            }
            self.candidates[other] = Some(filtered);
        }
        true
    }

    fn domain<C: Constraints>(&self, c: &C, var: usize) -> Vec<u64> {
        match &self.candidates[var] {
            Some(list) => list.clone(),
            None => (0..1u64 << c.width()).collect(),
        }
    }
}

fn dfs<C: Constraints>(c: &C, state: &mut State, nodes: &AtomicU64) -> Option<Vec<u64>> {
    nodes.fetch_add(1, Ordering::Relaxed);
    let Some(var) = state.pick(c) else {
        return Some(state.assigned.iter().map(|w| w.expect("complete")).collect());
    };
    for word in state.domain(c, var) {
        let mut next = state.clone();
        if next.assign(c, var, word) {
            if let Some(found) = dfs(c, &mut next, nodes) {
                return Some(found);
            }
        }
    }
    None
}

/// Complete search; the first solution in candidate order is returned, so
/// the result does not depend on the number of worker threads.
pub(crate) fn solve<C: Constraints>(c: &C) -> SearchOutcome {
    let nodes = AtomicU64::new(1);
    let vars = c.vars();
    if vars == 0 {
        return SearchOutcome {
            assignment: Some(Vec::new()),
            nodes: 1,
        };
    }
    let mut root = State::new(vars);
    // translation: the first word can always be taken as zero
    if !root.assign(c, 0, 0) {
        return SearchOutcome {
            assignment: None,
            nodes: 1,
        };
    }
    let Some(second) = root.pick(c) else {
        return SearchOutcome {
            assignment: Some(vec![0]),
            nodes: 1,
        };
    };
    let branches: Vec<u64> = root
        .domain(c, second)
        .into_iter()
        .filter(|&w| c.canonical(w).unwrap_or(true))
        .collect();
    let assignment = branches.par_iter().find_map_first(|&w| {
        nodes.fetch_add(1, Ordering::Relaxed);
        let mut state = root.clone();
        if !state.assign(c, second, w) {
            return None;
        }
        dfs(c, &mut state, &nodes)
    });
    SearchOutcome {
        assignment,
        nodes: nodes.into_inner(),
    }
}

/// Smallest integer among the cyclic rotations and reflections of `w`.
pub(crate) fn dihedral_min(w: u64, n: u32) -> u64 {
    let reversed = w.reverse_bits() >> (64 - n);
    let mut best = u64::MAX;
    for start in [w, reversed] {
        let mut x = start;
        for _ in 0..n {
            best = best.min(x);
            x = crate::pairmetric::rotl_u64(x, n);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_min_examples() {
        assert_eq!(dihedral_min(0b100, 3), 0b001);
        assert_eq!(dihedral_min(0b1011, 4), 0b0111);
        assert_eq!(dihedral_min(0b10100, 5), 0b00101);
        assert_eq!(dihedral_min(0, 5), 0);
    }
}
