use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use super::{engine, syntax, Proof, Term, TermError};
use crate::lts::{EdgeIx, Label, LabelSet, Presheaf, StateIx};
use crate::spec::GsosSpec;

/// A transition system that terms and proofs can range over: a finite
/// presheaf, or `T` applied to another ambient.
pub trait Ambient {
    type S: Clone + Eq + Ord + Hash + Debug;
    type E: Clone + Eq + Ord + Hash + Debug;

    fn labels(&self) -> &Arc<LabelSet>;
    fn edge_label(&self, e: &Self::E) -> Label;
    fn edge_src(&self, e: &Self::E) -> Self::S;
    fn edge_tgt(&self, e: &Self::E) -> Self::S;
    /// Edges out of `s` with label `a`, in a fixed order.
    fn edges_from(&self, s: &Self::S, a: Label) -> Vec<Self::E>;

    fn write_state(&self, s: &Self::S, out: &mut String);
    fn write_edge(&self, e: &Self::E, out: &mut String);
    fn read_state(&self, text: &str) -> Result<Self::S, TermError>;
    fn read_edge(&self, text: &str) -> Result<Self::E, TermError>;
}

impl Ambient for Presheaf {
    type S = StateIx;
    type E = EdgeIx;

    fn labels(&self) -> &Arc<LabelSet> {
        Presheaf::labels(self)
    }

    fn edge_label(&self, e: &EdgeIx) -> Label {
        self.edge(*e).label
    }

    fn edge_src(&self, e: &EdgeIx) -> StateIx {
        self.edge(*e).src
    }

    fn edge_tgt(&self, e: &EdgeIx) -> StateIx {
        self.edge(*e).tgt
    }

    fn edges_from(&self, s: &StateIx, a: Label) -> Vec<EdgeIx> {
        self.outgoing(*s).iter().copied().filter(|e| self.edge(*e).label == a).collect()
    }

    fn write_state(&self, s: &StateIx, out: &mut String) {
        out.push_str(self.state_name(*s));
    }

    fn write_edge(&self, e: &EdgeIx, out: &mut String) {
        out.push_str(&self.edge(*e).id);
    }

    fn read_state(&self, text: &str) -> Result<StateIx, TermError> {
        self.state_by_name(text).ok_or_else(|| TermError::UnknownState(text.to_string()))
    }

    fn read_edge(&self, text: &str) -> Result<EdgeIx, TermError> {
        self.edge_by_name(text).ok_or_else(|| TermError::UnknownEdge(text.to_string()))
    }
}

/// `T(A)` as an ambient: states are terms over `A`, edges are proofs.
pub struct Free<'a, A> {
    pub spec: &'a GsosSpec,
    pub inner: &'a A,
}

impl<'a, A> Free<'a, A> {
    pub fn new(spec: &'a GsosSpec, inner: &'a A) -> Self {
        Free { spec, inner }
    }
}

impl<A: Ambient> Ambient for Free<'_, A> {
    type S = Term<A::S>;
    type E = Proof<A::S, A::E>;

    fn labels(&self) -> &Arc<LabelSet> {
        self.inner.labels()
    }

    fn edge_label(&self, e: &Self::E) -> Label {
        super::label(self.spec, self.inner, e)
    }

    fn edge_src(&self, e: &Self::E) -> Self::S {
        super::src(self.spec, self.inner, e)
    }

    fn edge_tgt(&self, e: &Self::E) -> Self::S {
        super::tgt(self.spec, self.inner, e)
    }

    fn edges_from(&self, s: &Self::S, a: Label) -> Vec<Self::E> {
        engine::transitions(self.spec, self.inner, s, Some(a))
    }

    fn write_state(&self, s: &Self::S, out: &mut String) {
        syntax::write_term(self.spec, self.inner, s, out);
    }

    fn write_edge(&self, e: &Self::E, out: &mut String) {
        syntax::write_proof(self.spec, self.inner, e, out);
    }

    fn read_state(&self, text: &str) -> Result<Self::S, TermError> {
        syntax::parse_term(self.spec, self.inner, text)
    }

    fn read_edge(&self, text: &str) -> Result<Self::E, TermError> {
        syntax::parse_proof(self.spec, self.inner, text)
    }
}
