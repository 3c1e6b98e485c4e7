use std::collections::HashSet;
use std::sync::Arc;

use super::{EdgeIx, Label, LtsError, Morphism, Object, Presheaf, Square, StateIx};

/// Backtracking search for morphisms `dom -> cod` under per-cell candidate
/// restrictions. States are assigned in index order and candidates tried in
/// index order, so the first solution found is the lexicographically least
/// one over (states, edges).
struct Search<'a> {
    dom: &'a Presheaf,
    cod: &'a Presheaf,
    state_cands: Vec<Vec<StateIx>>,
    edge_cands: Vec<Vec<EdgeIx>>,
    /// Edges whose later endpoint is the given state.
    closing: Vec<Vec<EdgeIx>>,
}

impl<'a> Search<'a> {
    fn new(
        dom: &'a Presheaf,
        cod: &'a Presheaf,
        state_cands: Vec<Vec<StateIx>>,
        edge_cands: Vec<Vec<EdgeIx>>,
    ) -> Self {
        let mut closing = vec![Vec::new(); dom.num_states()];
        for e in dom.edge_ids() {
            let d = dom.edge(e);
            closing[d.src.0.max(d.tgt.0)].push(e);
        }
        Search { dom, cod, state_cands, edge_cands, closing }
    }

    fn edge_options(&self, e: EdgeIx, assign: &[StateIx]) -> Vec<EdgeIx> {
        let d = self.dom.edge(e);
        self.edge_cands[e.0]
            .iter()
            .copied()
            .filter(|c| {
                let ce = self.cod.edge(*c);
                ce.label == d.label && ce.src == assign[d.src.0] && ce.tgt == assign[d.tgt.0]
            })
            .collect()
    }

    /// Calls `visit` with each admissible state assignment and, per edge, its
    /// admissible images. Stops when `visit` returns false.
    fn run(&self, visit: &mut dyn FnMut(&[StateIx], Vec<Vec<EdgeIx>>) -> bool) {
        let mut assign = Vec::with_capacity(self.dom.num_states());
        self.go(&mut assign, visit);
    }

    fn go(&self, assign: &mut Vec<StateIx>, visit: &mut dyn FnMut(&[StateIx], Vec<Vec<EdgeIx>>) -> bool) -> bool {
        let i = assign.len();
        if i == self.dom.num_states() {
            let opts: Vec<Vec<EdgeIx>> = self.dom.edge_ids().map(|e| self.edge_options(e, assign)).collect();
            return visit(assign, opts);
        }
        for &c in &self.state_cands[i] {
            assign.push(c);
            let ok = self.closing[i].iter().all(|&e| !self.edge_options(e, assign).is_empty());
            if ok && !self.go(assign, visit) {
                assign.pop();
                return false;
            }
            assign.pop();
        }
        true
    }
}

/// Solves a lifting problem: returns `k: B -> X` with `k ∘ left = top` and
/// `right ∘ k = bottom`, the lexicographically least one under the state
/// then edge ordering of `B` and `X`, or `None` when no lifting exists.
pub fn find_lifting(square: &Square) -> Result<Option<Morphism>, LtsError> {
    square.check()?;
    let Square { left, right, top, bottom } = square;
    let b = left.codomain();
    let x = right.domain();
    let mut state_cands: Vec<Vec<StateIx>> = b
        .state_ids()
        .map(|s| x.state_ids().filter(|&c| right.state(c) == bottom.state(s)).collect())
        .collect();
    let mut edge_cands: Vec<Vec<EdgeIx>> = b
        .edge_ids()
        .map(|e| {
            x.edges_with_label(b.edge(e).label)
                .iter()
                .copied()
                .filter(|&c| right.edge(c) == bottom.edge(e))
                .collect()
        })
        .collect();
    for s in left.domain().state_ids() {
        let want = top.state(s);
        state_cands[left.state(s).0].retain(|&c| c == want);
    }
    for e in left.domain().edge_ids() {
        let want = top.edge(e);
        edge_cands[left.edge(e).0].retain(|&c| c == want);
    }
    let search = Search::new(b, x, state_cands, edge_cands);
    let mut found = None;
    search.run(&mut |assign, opts| {
        if opts.iter().all(|o| !o.is_empty()) {
            found = Some((assign.to_vec(), opts.iter().map(|o| o[0]).collect::<Vec<_>>()));
            false
        } else {
            true
        }
    });
    let Some((states, edges)) = found else {
        return Ok(None);
    };
    let k = Morphism::new(b.clone(), x.clone(), states, edges)?;
    debug_assert!(k.after(left).map(|m| m == *top).unwrap_or(false));
    debug_assert!(right.after(&k).map(|m| m == *bottom).unwrap_or(false));
    if k.after(left)? != *top || right.after(&k)? != *bottom {
        return Err(LtsError::NonCommutingSquare);
    }
    Ok(Some(k))
}

/// Every morphism `dom -> cod`, in lexicographic order, up to `limit`.
pub fn all_morphisms(dom: &Arc<Presheaf>, cod: &Arc<Presheaf>, limit: usize) -> Vec<Morphism> {
    let state_cands = vec![cod.state_ids().collect::<Vec<_>>(); dom.num_states()];
    let edge_cands = dom.edge_ids().map(|e| cod.edges_with_label(dom.edge(e).label).to_vec()).collect();
    let search = Search::new(dom, cod, state_cands, edge_cands);
    let mut out = Vec::new();
    search.run(&mut |assign, opts| {
        // expand the product of edge options
        let mut idx = vec![0usize; opts.len()];
        if opts.iter().any(|o| o.is_empty()) {
            return true;
        }
        loop {
            if out.len() >= limit {
                return false;
            }
            let edges = idx.iter().zip(&opts).map(|(i, o)| o[*i]).collect();
            out.push(Morphism::new(dom.clone(), cod.clone(), assign.to_vec(), edges).expect("search yields morphisms"));
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return true;
                }
                idx[k] += 1;
                if idx[k] < opts[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    });
    out
}

/// A failed lifting against `s^a`: a domain state whose image has an
/// outgoing codomain edge with no preimage leaving that state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub state: StateIx,
    pub label: Label,
    pub edge: EdgeIx,
}

impl Counterexample {
    /// The non-liftable square `s^a / x / e / f`.
    pub fn square(&self, f: &Morphism) -> Square {
        let labels = f.domain().labels().clone();
        let left = Morphism::source_map(labels, self.label).expect("declared label");
        Square {
            top: Morphism::pick_state(f.domain().clone(), self.state),
            bottom: Morphism::pick_edge(f.codomain().clone(), self.edge),
            right: f.clone(),
            left,
        }
    }
}

/// First counterexample to `f` being a functional bisimulation, checking
/// only the listed domain states.
pub fn functional_bisim_counterexample_on(f: &Morphism, roots: &[StateIx]) -> Option<Counterexample> {
    let x = f.domain();
    let y = f.codomain();
    for &s in roots {
        let image = f.state(s);
        for &e in y.outgoing(image) {
            let lifted = x.outgoing(s).iter().any(|&d| f.edge(d) == e);
            if !lifted {
                return Some(Counterexample { state: s, label: y.edge(e).label, edge: e });
            }
        }
    }
    None
}

pub fn functional_bisim_counterexample(f: &Morphism) -> Option<Counterexample> {
    let roots: Vec<StateIx> = f.domain().state_ids().collect();
    functional_bisim_counterexample_on(f, &roots)
}

/// Whether `f` has the right lifting property against every `s^a`.
pub fn is_functional_bisimulation(f: &Morphism) -> Result<(), Counterexample> {
    match functional_bisim_counterexample(f) {
        None => Ok(()),
        Some(c) => Err(c),
    }
}

/// Objects of the base category at which the square
/// `top: A -> X`, `left: A -> B`, `right: X -> Y`, `bottom: B -> Y`
/// fails to be a pullback of sets.
pub fn pullback_failures(square: &Square) -> Result<Vec<Object>, LtsError> {
    square.check()?;
    let Square { left, right, top, bottom } = square;
    let a = top.domain();
    let mut failures = Vec::new();
    for object in a.objects() {
        let ok = match object {
            Object::Star => pointwise_pullback(
                a.state_ids().map(|s| (top.state(s).0, left.state(s).0)),
                right.domain().state_ids().map(|s| right.state(s).0),
                bottom.domain().state_ids().map(|s| bottom.state(s).0),
            ),
            Object::Arrow(l) => pointwise_pullback(
                a.edges_with_label(l).iter().map(|&e| (top.edge(e).0, left.edge(e).0)),
                right.domain().edges_with_label(l).iter().map(|&e| right.edge(e).0),
                bottom.domain().edges_with_label(l).iter().map(|&e| bottom.edge(e).0),
            ),
        };
        if !ok {
            failures.push(object);
        }
    }
    Ok(failures)
}

pub fn is_pullback_square(square: &Square) -> Result<bool, LtsError> {
    Ok(pullback_failures(square)?.is_empty())
}

fn pointwise_pullback(
    pairs: impl Iterator<Item = (usize, usize)>,
    right: impl Iterator<Item = usize>,
    bottom: impl Iterator<Item = usize>,
) -> bool {
    use std::collections::HashMap;
    let mut fibre_r: HashMap<usize, usize> = HashMap::new();
    for y in right {
        *fibre_r.entry(y).or_default() += 1;
    }
    let mut size = 0usize;
    for y in bottom {
        size += fibre_r.get(&y).copied().unwrap_or(0);
    }
    let mut seen = HashSet::new();
    for p in pairs {
        if !seen.insert(p) {
            return false;
        }
    }
    seen.len() == size
}
