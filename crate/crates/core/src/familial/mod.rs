//! The arity functor of `T` on elements over the terminal system, and the
//! generic-free factorization of elements of `T(X)`.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::lts::{
    all_morphisms, colimit, to_json_value, Colimit, Diagram, EdgeIx, Label, LtsError, Morphism, Object, Presheaf,
    StateIx,
};
use crate::spec::{GsosSpec, RuleTerm, RuleVar};
use crate::term::{
    check_element, show_element, src, tgt, Ambient, Element, Proof, ProofArg, Term, TermError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilialError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error("filler does not start at the arity of the shape: {0}")]
    CellMismatch(String),
}

/// An element of `T(1)`: a shape.
pub type Shape = Element<StateIx, EdgeIx>;
pub type ShapeTerm = Term<StateIx>;
pub type ShapeProof = Proof<StateIx, EdgeIx>;

/// The terminal system over the labels of `spec`.
pub fn unit(spec: &GsosSpec) -> Presheaf {
    Presheaf::terminal(spec.labels.clone())
}

fn unit_edge(one: &Presheaf, l: Label) -> EdgeIx {
    one.edges_with_label(l)[0]
}

/// `T(!)`: forgets which states and edges sit at the leaves.
pub fn strip<A: Ambient>(spec: &GsosSpec, amb: &A, z: &Element<A::S, A::E>) -> Shape {
    let one = unit(spec);
    z.map(&mut |_| StateIx(0), &mut |e| unit_edge(&one, amb.edge_label(e)))
}

pub fn strip_term<V>(m: &Term<V>) -> ShapeTerm {
    m.map(&mut |_| StateIx(0))
}

/// `E^*(M) = n_M · y_*`, with states `occ0, occ1, ...` in left-to-right order.
pub fn arity_star(spec: &GsosSpec, m: &ShapeTerm) -> Arc<Presheaf> {
    let mut b = Presheaf::builder(spec.labels.clone());
    for k in 0..m.occurrences() {
        b.add_state(format!("occ{k}"));
    }
    Arc::new(b.build().expect("discrete presheaf"))
}

/// `E^a(R)` with the source and target arity maps `E(s^a|R)`, `E(t^a|R)`.
#[derive(Debug, Clone)]
pub struct ArityLabel {
    pub shape: ShapeProof,
    pub carrier: Arc<Presheaf>,
    pub src: Morphism,
    pub tgt: Morphism,
    node: Node,
}

#[derive(Debug, Clone)]
enum Node {
    Axiom,
    Rule { args: Vec<ArgPart>, sum: Colimit },
}

#[derive(Debug, Clone)]
enum ArgPart {
    Bare { term: ShapeTerm, carrier: Arc<Presheaf> },
    /// Wide pushout of the premise source maps over `E^*(M_i)`; injection 0
    /// is the identity leg, injection `1 + j` the carrier of premise `j`.
    Glued { prems: Vec<ArityLabel>, pushout: Colimit },
}

impl ArgPart {
    fn object(&self) -> &Arc<Presheaf> {
        match self {
            ArgPart::Bare { carrier, .. } => carrier,
            ArgPart::Glued { pushout, .. } => &pushout.object,
        }
    }

    /// Image in this part of occurrence `k` of the operand.
    fn occurrence(&self, k: usize) -> StateIx {
        match self {
            ArgPart::Bare { .. } => StateIx(k),
            ArgPart::Glued { pushout, .. } => pushout.injections[0].state(StateIx(k)),
        }
    }
}

impl ArityLabel {
    /// Premise arities of argument `i` (empty when the rule has no premises there).
    pub fn premises(&self, i: usize) -> &[ArityLabel] {
        match &self.node {
            Node::Rule { args, .. } => match &args[i] {
                ArgPart::Glued { prems, .. } => prems,
                ArgPart::Bare { .. } => &[],
            },
            Node::Axiom => &[],
        }
    }

    /// Injection of argument `i`'s part into the carrier.
    pub fn arg_injection(&self, i: usize) -> Option<&Morphism> {
        match &self.node {
            Node::Rule { sum, .. } => sum.injections.get(i),
            Node::Axiom => None,
        }
    }

    /// Map from premise `(i, j)`'s carrier into argument `i`'s part.
    pub fn premise_injection(&self, i: usize, j: usize) -> Option<&Morphism> {
        match &self.node {
            Node::Rule { args, .. } => match &args[i] {
                ArgPart::Glued { pushout, .. } => pushout.injections.get(1 + j),
                ArgPart::Bare { .. } => None,
            },
            Node::Axiom => None,
        }
    }
}

fn one_label(one: &Presheaf, e: EdgeIx) -> Label {
    one.edge(e).label
}

pub fn arity_label(spec: &GsosSpec, r: &ShapeProof) -> Result<ArityLabel, FamilialError> {
    let one = unit(spec);
    check_element(spec, &one, &Element::Edge(r.clone()))?;
    build_label(spec, &one, r)
}

fn build_label(spec: &GsosSpec, one: &Presheaf, r: &ShapeProof) -> Result<ArityLabel, FamilialError> {
    let labels = spec.labels.clone();
    match r {
        Proof::Axiom(e) => {
            let a = one_label(one, *e);
            let carrier = Arc::new(Presheaf::representable(labels, Object::Arrow(a))?);
            let star = arity_star(spec, &Term::Var(StateIx(0)));
            let s = Morphism::from_names(star.clone(), carrier.clone(), [("occ0", "s")], [])?;
            let t = Morphism::from_names(star, carrier.clone(), [("occ0", "t")], [])?;
            Ok(ArityLabel { shape: r.clone(), carrier, src: s, tgt: t, node: Node::Axiom })
        }
        Proof::Node(rule_id, args) => {
            let mut parts = Vec::with_capacity(args.len());
            for a in args {
                parts.push(match a {
                    ProofArg::Term(m) => ArgPart::Bare { term: m.clone(), carrier: arity_star(spec, m) },
                    ProofArg::Premises(ps) => {
                        let apex = arity_star(spec, &src(spec, one, &ps[0]));
                        let prems = ps.iter().map(|p| build_label(spec, one, p)).collect::<Result<Vec<_>, _>>()?;
                        let mut legs = vec![(String::new(), Morphism::identity(apex.clone()))];
                        for (j, p) in prems.iter().enumerate() {
                            legs.push((format!("prem{}", j + 1), p.src.clone()));
                        }
                        let pushout = colimit(&Diagram::WidePushout { apex, legs })?;
                        ArgPart::Glued { prems, pushout }
                    }
                });
            }
            let sum = colimit(&Diagram::Coproduct {
                labels,
                parts: parts.iter().enumerate().map(|(i, p)| (format!("arg{}", i + 1), p.object().clone())).collect(),
            })?;
            let carrier = sum.object.clone();

            let mut src_states = Vec::new();
            for (i, a) in args.iter().enumerate() {
                let n = match a {
                    ProofArg::Term(m) => m.occurrences(),
                    ProofArg::Premises(ps) => src(spec, one, &ps[0]).occurrences(),
                };
                for k in 0..n {
                    src_states.push(sum.injections[i].state(parts[i].occurrence(k)));
                }
            }
            let src_dom = arity_star(spec, &src(spec, one, r));
            let src_mor = Morphism::new(src_dom, carrier.clone(), src_states, vec![])?;

            let mut tgt_states = Vec::new();
            route(&spec.rule(*rule_id).target, args, &parts, &sum, one, spec, &mut tgt_states);
            let tgt_dom = arity_star(spec, &tgt(spec, one, r));
            let tgt_mor = Morphism::new(tgt_dom, carrier.clone(), tgt_states, vec![])?;
            Ok(ArityLabel {
                shape: r.clone(),
                carrier,
                src: src_mor,
                tgt: tgt_mor,
                node: Node::Rule { args: parts, sum },
            })
        }
    }
}

/// Sends the occurrences of the target, left to right, to the carrier:
/// through `E^*(M_i)` for `x_i`, through the premise's target map for `y_ij`.
fn route(
    t: &RuleTerm,
    args: &[ProofArg<StateIx, EdgeIx>],
    parts: &[ArgPart],
    sum: &Colimit,
    one: &Presheaf,
    spec: &GsosSpec,
    out: &mut Vec<StateIx>,
) {
    match t {
        RuleTerm::App(_, ch) => ch.iter().for_each(|c| route(c, args, parts, sum, one, spec, out)),
        RuleTerm::Var(RuleVar::Arg(i)) => {
            let n = match &args[*i] {
                ProofArg::Term(m) => m.occurrences(),
                ProofArg::Premises(ps) => src(spec, one, &ps[0]).occurrences(),
            };
            for k in 0..n {
                out.push(sum.injections[*i].state(parts[*i].occurrence(k)));
            }
        }
        RuleTerm::Var(RuleVar::Prem(i, j)) => {
            let ArgPart::Glued { prems, pushout } = &parts[*i] else {
                unreachable!("validated rules only use bound premise variables")
            };
            let p = &prems[*j];
            for s in p.tgt.domain().state_ids() {
                let in_part = pushout.injections[1 + j].state(p.tgt.state(s));
                out.push(sum.injections[*i].state(in_part));
            }
        }
    }
}

/// The arity of a shape at either object.
#[derive(Debug, Clone)]
pub enum Arity {
    Star(Arc<Presheaf>),
    Label(Box<ArityLabel>),
}

impl Arity {
    pub fn of(spec: &GsosSpec, shape: &Shape) -> Result<Arity, FamilialError> {
        Ok(match shape {
            Element::State(m) => Arity::Star(arity_star(spec, m)),
            Element::Edge(r) => Arity::Label(Box::new(arity_label(spec, r)?)),
        })
    }

    pub fn carrier(&self) -> &Arc<Presheaf> {
        match self {
            Arity::Star(c) => c,
            Arity::Label(a) => &a.carrier,
        }
    }
}

/// An element of `T(X)` split into its shape over 1 and the map from the
/// shape's arity into `X`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub shape: Shape,
    pub arity: Arc<Arity>,
    pub filler: Morphism,
}

fn fill_star<V>(carrier: &Arc<Presheaf>, x: &Arc<Presheaf>, m: &Term<V>, state: impl Fn(&V) -> StateIx) -> Result<Morphism, LtsError> {
    Morphism::new(carrier.clone(), x.clone(), m.vars().into_iter().map(state).collect(), vec![])
}

fn fill_label(a: &ArityLabel, x: &Arc<Presheaf>, r: &Proof<StateIx, EdgeIx>, spec: &GsosSpec) -> Result<Morphism, FamilialError> {
    match (&a.node, r) {
        (Node::Axiom, Proof::Axiom(e)) => {
            let d = x.edge(*e);
            Ok(Morphism::new(a.carrier.clone(), x.clone(), vec![d.src, d.tgt], vec![*e])?)
        }
        (Node::Rule { args: parts, sum }, Proof::Node(_, args)) => {
            if parts.is_empty() {
                return Ok(Morphism::new(a.carrier.clone(), x.clone(), vec![], vec![])?);
            }
            let mut cocone = Vec::with_capacity(parts.len());
            for (part, arg) in parts.iter().zip(args) {
                cocone.push(match (part, arg) {
                    (ArgPart::Bare { carrier, .. }, ProofArg::Term(m)) => fill_star(carrier, x, m, |s| *s)?,
                    (ArgPart::Glued { prems, pushout }, ProofArg::Premises(ps)) => {
                        let apex = pushout.injections[0].domain();
                        let m = src(spec, x.as_ref(), &ps[0]);
                        let mut comps = vec![fill_star(apex, x, &m, |s| *s)?];
                        for (pa, p) in prems.iter().zip(ps) {
                            comps.push(fill_label(pa, x, p, spec)?);
                        }
                        pushout.induced(&comps)?
                    }
                    _ => return Err(FamilialError::CellMismatch("element does not have the shape".into())),
                });
            }
            Ok(sum.induced(&cocone)?)
        }
        _ => Err(FamilialError::CellMismatch("element does not have the shape".into())),
    }
}

/// Generic-free factorization of an element of `T(X)`.
pub fn decompose(spec: &GsosSpec, x: &Arc<Presheaf>, z: &Element<StateIx, EdgeIx>) -> Result<Decomposition, FamilialError> {
    decompose_cached(spec, x, z, &mut ArityCache::default())
}

/// Arities by shape, for repeated decompositions.
pub type ArityCache = HashMap<Shape, Arc<Arity>>;

pub fn decompose_cached(
    spec: &GsosSpec,
    x: &Arc<Presheaf>,
    z: &Element<StateIx, EdgeIx>,
    cache: &mut ArityCache,
) -> Result<Decomposition, FamilialError> {
    check_element(spec, x.as_ref(), z)?;
    let shape = strip(spec, x.as_ref(), z);
    let arity = match cache.get(&shape) {
        Some(a) => a.clone(),
        None => {
            let a = Arc::new(Arity::of(spec, &shape)?);
            cache.insert(shape.clone(), a.clone());
            a
        }
    };
    let filler = match (&*arity, z) {
        (Arity::Star(c), Element::State(m)) => fill_star(c, x, m, |s| *s)?,
        (Arity::Label(a), Element::Edge(r)) => fill_label(a, x, r, spec)?,
        _ => unreachable!("arity follows the element's object"),
    };
    Ok(Decomposition { shape, arity, filler })
}

fn refill_term(m: &ShapeTerm, f: &Morphism, offset: &mut usize) -> Term<StateIx> {
    m.map(&mut |_| {
        let s = f.state(StateIx(*offset));
        *offset += 1;
        s
    })
}

fn refill_label(a: &ArityLabel, f: &Morphism) -> Result<Proof<StateIx, EdgeIx>, FamilialError> {
    match (&a.node, &a.shape) {
        (Node::Axiom, _) => Ok(Proof::Axiom(f.edge(EdgeIx(0)))),
        (Node::Rule { args: parts, sum }, Proof::Node(rule, _)) => {
            let mut args = Vec::with_capacity(parts.len());
            for (i, part) in parts.iter().enumerate() {
                let fi = f.after(&sum.injections[i])?;
                args.push(match part {
                    ArgPart::Bare { term, .. } => ProofArg::Term(refill_term(term, &fi, &mut 0)),
                    ArgPart::Glued { prems, pushout } => {
                        let mut ps = Vec::with_capacity(prems.len());
                        for (j, pa) in prems.iter().enumerate() {
                            ps.push(refill_label(pa, &fi.after(&pushout.injections[1 + j])?)?);
                        }
                        ProofArg::Premises(ps)
                    }
                });
            }
            Ok(Proof::Node(*rule, args))
        }
        _ => unreachable!("axiom arities have axiom shapes"),
    }
}

/// Substitutes the filler's values at the shape's leaves.
pub fn recompose(d: &Decomposition) -> Result<Element<StateIx, EdgeIx>, FamilialError> {
    recompose_with(&d.arity, &d.shape, &d.filler)
}

pub fn recompose_with(arity: &Arity, shape: &Shape, filler: &Morphism) -> Result<Element<StateIx, EdgeIx>, FamilialError> {
    if **filler.domain() != **arity.carrier() {
        return Err(FamilialError::CellMismatch("filler domain differs from the arity".into()));
    }
    Ok(match (arity, shape) {
        (Arity::Star(_), Element::State(m)) => Element::State(refill_term(m, filler, &mut 0)),
        (Arity::Label(a), Element::Edge(_)) => Element::Edge(refill_label(a, filler)?),
        _ => return Err(FamilialError::CellMismatch("arity and shape are at different objects".into())),
    })
}

/// The implemented genericity criterion: the filler is an isomorphism.
pub fn is_generic(spec: &GsosSpec, x: &Arc<Presheaf>, z: &Element<StateIx, EdgeIx>) -> Result<bool, FamilialError> {
    Ok(decompose(spec, x, z)?.filler.is_isomorphism())
}

/// Number of maps `l: X -> B` with `T(l)(z) = chi`, found by brute force.
pub fn count_liftings(
    x: &Arc<Presheaf>,
    z: &Element<StateIx, EdgeIx>,
    b: &Arc<Presheaf>,
    chi: &Element<StateIx, EdgeIx>,
    limit: usize,
) -> usize {
    all_morphisms(x, b, limit)
        .iter()
        .filter(|l| z.map(&mut |s| l.state(*s), &mut |e| l.edge(*e)) == *chi)
        .count()
}

/// Samples squares `z` over `chi` (same shape, `chi` in a random small `B`)
/// and checks that each admits exactly one lifting. Returns the number of
/// squares with a unique lifting and the number sampled.
pub fn spot_check_generic(
    spec: &GsosSpec,
    x: &Arc<Presheaf>,
    z: &Element<StateIx, EdgeIx>,
    rng: &mut impl Rng,
    samples: usize,
) -> Result<(usize, usize), FamilialError> {
    let d = decompose(spec, x, z)?;
    let mut unique = 0;
    let mut tried = 0;
    for _ in 0..samples {
        let b = Arc::new(crate::random::random_presheaf(rng, &spec.labels, 3, 0.5));
        let fills = all_morphisms(d.arity.carrier(), &b, 64);
        let Some(phi) = fills.choose(rng) else { continue };
        let chi = recompose_with(&d.arity, &d.shape, phi)?;
        tried += 1;
        if count_liftings(x, z, &b, &chi, 10_000) == 1 {
            unique += 1;
        }
    }
    Ok((unique, tried))
}

/// `decompose` commutes with `T(f)`: same shape, filler post-composed with `f`.
pub fn check_naturality_in_x(
    spec: &GsosSpec,
    x: &Arc<Presheaf>,
    z: &Element<StateIx, EdgeIx>,
    f: &Morphism,
) -> Result<(), String> {
    let dz = decompose(spec, x, z).map_err(|e| e.to_string())?;
    let fz = z.map(&mut |s| f.state(*s), &mut |e| f.edge(*e));
    let dfz = decompose(spec, f.codomain(), &fz).map_err(|e| e.to_string())?;
    if dfz.shape != dz.shape {
        return Err("shape changes under T(f)".into());
    }
    let composed = f.after(&dz.filler).map_err(|e| e.to_string())?;
    if composed != dfz.filler {
        return Err("filler of T(f)(z) is not f after the filler of z".into());
    }
    Ok(())
}

/// The source and target of a proof decompose through the arity maps.
pub fn check_naturality_in_c(spec: &GsosSpec, x: &Arc<Presheaf>, r: &Proof<StateIx, EdgeIx>) -> Result<(), String> {
    let one = unit(spec);
    let d = decompose(spec, x, &Element::Edge(r.clone())).map_err(|e| e.to_string())?;
    let Arity::Label(a) = &*d.arity else { return Err("edge with a star arity".into()) };
    let Element::Edge(shape) = &d.shape else { return Err("edge with a term shape".into()) };
    for (end, m, arity_map) in [
        ("source", src(spec, x.as_ref(), r), &a.src),
        ("target", tgt(spec, x.as_ref(), r), &a.tgt),
    ] {
        let expected_shape = if end == "source" { src(spec, &one, shape) } else { tgt(spec, &one, shape) };
        let dm = decompose(spec, x, &Element::State(m)).map_err(|e| e.to_string())?;
        if dm.shape != Element::State(expected_shape) {
            return Err(format!("{end} shape is not the {end} of the shape"));
        }
        let composed = d.filler.after(arity_map).map_err(|e| e.to_string())?;
        if composed != dm.filler {
            return Err(format!("{end} filler is not the filler after the {end} arity map"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub shape: String,
    pub arity: serde_json::Value,
    pub filler: serde_json::Map<String, serde_json::Value>,
}

/// JSON view: shape in proof syntax, arity carrier, filler as cell -> id.
pub fn decomposition_report(spec: &GsosSpec, d: &Decomposition) -> DecompositionReport {
    let one = unit(spec);
    let f = &d.filler;
    let mut filler = serde_json::Map::new();
    for s in f.domain().state_ids() {
        filler.insert(f.domain().state_name(s).to_string(), f.codomain().state_name(f.state(s)).into());
    }
    for e in f.domain().edge_ids() {
        filler.insert(f.domain().edge(e).id.clone(), f.codomain().edge(f.edge(e)).id.clone().into());
    }
    DecompositionReport { shape: show_element(spec, &one, &d.shape), arity: to_json_value(d.arity.carrier()), filler }
}
