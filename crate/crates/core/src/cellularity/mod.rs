//! Cell certificates for the source arity maps, lifting of cellular maps
//! against functional bisimulations, and cartesianness of `μ` and `η`.

use std::cell::Cell;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::familial::{
    arity_label, decompose_cached, recompose_with, unit, Arity, ArityCache, FamilialError, ShapeProof,
};
use crate::lts::{
    all_morphisms, colimit, is_functional_bisimulation, is_pullback_square, pullback_failures, to_json_value, Diagram,
    EdgeIx, LtsError, Morphism, Object, Presheaf, Square, StateIx,
};
use crate::spec::GsosSpec;
use crate::term::engine::product;
use crate::term::{
    check_element, eta_morphism, layerings_proof, layerings_term, mu_element, show_element, src, t_of,
    t_on_morphism, transitions, Element, Free, Proof, ProofArg, Term, TermError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error(transparent)]
    Familial(#[from] FamilialError),
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("replay diverges at step {step}: {reason}")]
    ReplayMismatch { step: usize, reason: String },
    #[error("not a functional bisimulation: {0}")]
    NotAFunctionalBisim(String),
    #[error("square does not commute: {0}")]
    NonCommutingSquare(String),
    #[error("incompatible pair: {0}")]
    IncompatiblePair(String),
    #[error("element exceeds depth {0}")]
    DepthExceeded(usize),
}

/// One attachment: push out `s^label` along the map picking state `at`.
/// The new target state and edge are named `name/t` and `name/e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub label: String,
    pub at: String,
    pub name: String,
}

/// A presentation of `γ: A -> B` as a composite of pushouts of maps `s^a`.
/// `base_names[k]` is the name in `B` of the `k`-th state of `A`.
#[derive(Debug, Clone)]
pub struct CellCertificate {
    pub base: Arc<Presheaf>,
    pub base_names: Vec<String>,
    pub steps: Vec<Step>,
    pub composite: Morphism,
}

fn join(prefix: &str, name: &str) -> String {
    match (prefix.is_empty(), name.is_empty()) {
        (true, _) => name.to_string(),
        (_, true) => prefix.to_string(),
        _ => format!("{prefix}/{name}"),
    }
}

/// Base cell names and attachments for `E(s^a|R)`, named as in the carrier.
fn steps_of(spec: &GsosSpec, one: &Presheaf, r: &ShapeProof) -> (Vec<String>, Vec<Step>) {
    match r {
        Proof::Axiom(e) => {
            let label = spec.labels.name(one.edge(*e).label).to_string();
            (vec!["s".into()], vec![Step { label, at: "s".into(), name: String::new() }])
        }
        Proof::Node(_, args) => {
            let mut base = Vec::new();
            let mut steps = Vec::new();
            for (i, a) in args.iter().enumerate() {
                let arg = format!("arg{}", i + 1);
                match a {
                    ProofArg::Term(m) => {
                        base.extend((0..m.occurrences()).map(|k| format!("{arg}/occ{k}")));
                    }
                    ProofArg::Premises(ps) => {
                        let n = src(spec, one, &ps[0]).occurrences();
                        base.extend((0..n).map(|k| format!("{arg}/occ{k}")));
                        for (j, p) in ps.iter().enumerate() {
                            let prem = format!("prem{}", j + 1);
                            let (bn, st) = steps_of(spec, one, p);
                            let rename = |c: &str| match bn.iter().position(|b| b == c) {
                                Some(k) => format!("occ{k}"),
                                None => join(&prem, c),
                            };
                            for s in st {
                                steps.push(Step {
                                    label: s.label,
                                    at: join(&arg, &rename(&s.at)),
                                    name: join(&arg, &join(&prem, &s.name)),
                                });
                            }
                        }
                    }
                }
            }
            (base, steps)
        }
    }
}

pub fn cell_certificate(spec: &GsosSpec, r: &ShapeProof) -> Result<CellCertificate, CellError> {
    let one = unit(spec);
    let a = arity_label(spec, r)?;
    let (base_names, steps) = steps_of(spec, &one, r);
    Ok(CellCertificate { base: a.src.domain().clone(), base_names, steps, composite: a.src })
}

/// The object and composite obtained by replaying the attachments.
pub fn replay(c: &CellCertificate) -> Result<(Arc<Presheaf>, Morphism), CellError> {
    let labels = c.base.labels().clone();
    let mut b = Presheaf::builder(labels.clone());
    for n in &c.base_names {
        b.add_state(n.clone());
    }
    let start = Arc::new(b.build().map_err(|e| CellError::ReplayMismatch { step: 0, reason: e.to_string() })?);
    if start.num_states() != c.base.num_states() {
        return Err(CellError::ReplayMismatch { step: 0, reason: "base names do not match the base".into() });
    }
    let mut current = start.clone();
    let mut into_current = Morphism::identity(start.clone());
    let target = c.composite.codomain();
    for (i, s) in c.steps.iter().enumerate() {
        let mismatch = |reason: String| CellError::ReplayMismatch { step: i, reason };
        let l = labels.lookup(&s.label).ok_or_else(|| mismatch(format!("unknown label {}", s.label)))?;
        let at = current.state_by_name(&s.at).ok_or_else(|| mismatch(format!("no state {}", s.at)))?;
        let pick = Morphism::pick_state(current.clone(), at);
        let attach = Morphism::source_map(labels.clone(), l)?;
        let po = colimit(&Diagram::WidePushout {
            apex: pick.domain().clone(),
            legs: vec![(String::new(), pick), (s.name.clone(), attach)],
        })?;
        into_current = po.injections[0].after(&into_current)?;
        current = po.object.clone();
        for st in current.state_names() {
            if target.state_by_name(st).is_none() {
                return Err(mismatch(format!("state {st} is not in the claimed codomain")));
            }
        }
        for e in current.edges() {
            let ok = target.edge_by_name(&e.id).is_some_and(|o| {
                let o = target.edge(o);
                o.label == e.label
                    && target.state_name(o.src) == current.state_name(e.src)
                    && target.state_name(o.tgt) == current.state_name(e.tgt)
            });
            if !ok {
                return Err(mismatch(format!("edge {} differs from the claimed codomain", e.id)));
            }
        }
    }
    let states = (0..c.base.num_states()).map(|k| into_current.state(StateIx(k))).collect();
    let composite = Morphism::new(c.base.clone(), current.clone(), states, vec![])?;
    Ok((current, composite))
}

pub fn verify_certificate(c: &CellCertificate) -> Result<(), CellError> {
    let (object, composite) = replay(c)?;
    let end = c.steps.len();
    if !object.same_cells(c.composite.codomain()) {
        return Err(CellError::ReplayMismatch { step: end, reason: "replayed object differs from the codomain".into() });
    }
    if !composite.same_under_names(&c.composite) {
        return Err(CellError::ReplayMismatch { step: end, reason: "replayed composite differs".into() });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub base: serde_json::Value,
    pub base_names: Vec<String>,
    pub steps: Vec<Step>,
    pub codomain: serde_json::Value,
    pub verified: bool,
}

pub fn certificate_report(c: &CellCertificate) -> CertificateReport {
    CertificateReport {
        base: to_json_value(&c.base),
        base_names: c.base_names.clone(),
        steps: c.steps.clone(),
        codomain: to_json_value(c.composite.codomain()),
        verified: verify_certificate(c).is_ok(),
    }
}

/// Diagonal filler `k: B -> X` of the square `top: A -> X`, `γ: A -> B`,
/// `f: X -> Y`, `bottom: B -> Y`, built one attachment at a time.
pub fn lift_against(c: &CellCertificate, f: &Morphism, top: &Morphism, bottom: &Morphism) -> Result<Morphism, CellError> {
    check_functional_bisim(f)?;
    lift_unchecked(c, f, top, bottom)
}

fn check_functional_bisim(f: &Morphism) -> Result<(), CellError> {
    is_functional_bisimulation(f).map_err(|ce| {
        CellError::NotAFunctionalBisim(format!(
            "state {} has no lift of edge {}",
            f.domain().state_name(ce.state),
            f.codomain().edge(ce.edge).id
        ))
    })
}

fn lift_unchecked(c: &CellCertificate, f: &Morphism, top: &Morphism, bottom: &Morphism) -> Result<Morphism, CellError> {
    let gamma = &c.composite;
    let b = gamma.codomain();
    let x = f.domain();
    let commutes = matches!((f.after(top), bottom.after(gamma)), (Ok(p), Ok(q)) if p == q);
    if !commutes {
        return Err(CellError::NonCommutingSquare("f after top differs from bottom after the cellular map".into()));
    }
    let mut states: HashMap<String, StateIx> = HashMap::new();
    let mut edges: HashMap<String, EdgeIx> = HashMap::new();
    for (k, n) in c.base_names.iter().enumerate() {
        states.insert(n.clone(), top.state(StateIx(k)));
    }
    for s in &c.steps {
        let from = *states
            .get(&s.at)
            .ok_or_else(|| CellError::NonCommutingSquare(format!("no state {} in the codomain", s.at)))?;
        let e_name = join(&s.name, "e");
        let goal = bottom.edge(b.edge_by_name(&e_name).ok_or_else(|| {
            CellError::NonCommutingSquare(format!("no edge {e_name} in the codomain"))
        })?);
        let lift = x.outgoing(from).iter().copied().find(|&d| f.edge(d) == goal).ok_or_else(|| {
            CellError::NotAFunctionalBisim(format!("no lift at {}", x.state_name(from)))
        })?;
        states.insert(join(&s.name, "t"), x.edge(lift).tgt);
        edges.insert(e_name, lift);
    }
    let sm = b.state_ids().map(|s| states[b.state_name(s)]).collect();
    let em = b.edge_ids().map(|e| edges[&b.edge(e).id]).collect();
    let k = Morphism::new(b.clone(), x.clone(), sm, em)?;
    if k.after(gamma)? != *top || f.after(&k)? != *bottom {
        return Err(CellError::NonCommutingSquare("constructed filler fails a triangle".into()));
    }
    Ok(k)
}

/// Solves lifting problems against one functional bisimulation, reusing
/// arities and certificates across problems with the same shape.
pub struct BisimLifter<'a> {
    spec: &'a GsosSpec,
    f: &'a Morphism,
    arities: ArityCache,
    certificates: HashMap<ShapeProof, Arc<CellCertificate>>,
}

impl<'a> BisimLifter<'a> {
    pub fn new(spec: &'a GsosSpec, f: &'a Morphism) -> Result<Self, CellError> {
        check_functional_bisim(f)?;
        Ok(BisimLifter { spec, f, arities: ArityCache::default(), certificates: HashMap::new() })
    }

    /// A transition over `X` with source `m` and image `r` under `T(f)`,
    /// built by factoring `r`, certifying its source arity map and lifting
    /// it against `f`.
    pub fn lift(&mut self, m: &Term<StateIx>, r: &Proof<StateIx, EdgeIx>, d: usize) -> Result<Proof<StateIx, EdgeIx>, CellError> {
        let (spec, f) = (self.spec, self.f);
        let x = f.domain();
        let y = f.codomain();
        if m.height() > d || r.depth() > d {
            return Err(CellError::DepthExceeded(d));
        }
        let dr = decompose_cached(spec, y, &Element::Edge(r.clone()), &mut self.arities)?;
        let fm = m.map(&mut |s| f.state(*s));
        if src(spec, y.as_ref(), r) != fm {
            return Err(CellError::IncompatiblePair("source of the transition is not the image of the term".into()));
        }
        let dm = decompose_cached(spec, x, &Element::State(m.clone()), &mut self.arities)?;
        let Element::Edge(shape) = &dr.shape else { unreachable!("edges decompose to edge shapes") };
        let cert = match self.certificates.get(shape) {
            Some(c) => c.clone(),
            None => {
                let c = Arc::new(cell_certificate(spec, shape)?);
                self.certificates.insert(shape.clone(), c.clone());
                c
            }
        };
        let k = lift_unchecked(&cert, f, &dm.filler, &dr.filler)?;
        let Element::Edge(r0) = recompose_with(&dr.arity, &dr.shape, &k)? else { unreachable!("edge shape") };
        if r0.map(&mut |s| f.state(*s), &mut |e| f.edge(*e)) != *r || src(spec, x.as_ref(), &r0) != *m {
            return Err(CellError::NonCommutingSquare("lifted transition fails verification".into()));
        }
        Ok(r0)
    }
}

/// One-off form of [`BisimLifter::lift`].
pub fn preserve_bisim_lift(
    spec: &GsosSpec,
    f: &Morphism,
    m: &Term<StateIx>,
    r: &Proof<StateIx, EdgeIx>,
    d: usize,
) -> Result<Proof<StateIx, EdgeIx>, CellError> {
    BisimLifter::new(spec, f)?.lift(m, r, d)
}

/// Every transition of `m` over `X` mapped onto `r` by `T(f)`.
pub fn brute_force_preimages(
    spec: &GsosSpec,
    f: &Morphism,
    m: &Term<StateIx>,
    r: &Proof<StateIx, EdgeIx>,
) -> Vec<Proof<StateIx, EdgeIx>> {
    let y = f.codomain();
    let l = crate::term::label(spec, y.as_ref(), r);
    transitions(spec, f.domain().as_ref(), m, Some(l))
        .into_iter()
        .filter(|p| p.map(&mut |s| f.state(*s), &mut |e| f.edge(*e)) == *r)
        .collect()
}

type El = Element<StateIx, EdgeIx>;
type El2 = Element<Term<StateIx>, Proof<StateIx, EdgeIx>>;

/// Every element of `T(X)` over the shape `shape`.
pub fn fillings(spec: &GsosSpec, x: &Arc<Presheaf>, shape: &El) -> Result<Vec<El>, CellError> {
    let arity = Arity::of(spec, shape)?;
    all_morphisms(arity.carrier(), x, usize::MAX)
        .iter()
        .map(|phi| Ok(recompose_with(&arity, shape, phi)?))
        .collect()
}

/// Every element of `T(T(X))` lying over `rr` in `T(T(1))`, found by filling
/// each leaf with every element of `T(X)` of its shape and keeping the
/// well-formed results.
pub fn fiber_t2(spec: &GsosSpec, x: &Arc<Presheaf>, rr: &El2) -> Result<Vec<El2>, CellError> {
    let mut leaves: Vec<El> = Vec::new();
    {
        let cell = std::cell::RefCell::new(&mut leaves);
        rr.map(
            &mut |t: &Term<StateIx>| cell.borrow_mut().push(Element::State(t.clone())),
            &mut |p: &Proof<StateIx, EdgeIx>| cell.borrow_mut().push(Element::Edge(p.clone())),
        );
    }
    let mut options = Vec::with_capacity(leaves.len());
    for l in &leaves {
        options.push(fillings(spec, x, l)?);
    }
    let free = Free::new(spec, x.as_ref());
    let mut out = Vec::new();
    for choice in product(&options) {
        let i = Cell::new(0);
        let next = || {
            let v = choice[i.get()].clone();
            i.set(i.get() + 1);
            v
        };
        let zz = rr.map(
            &mut |_| match next() {
                Element::State(t) => t,
                Element::Edge(_) => unreachable!("state leaf"),
            },
            &mut |_| match next() {
                Element::Edge(p) => p,
                Element::State(_) => unreachable!("edge leaf"),
            },
        );
        if check_element(spec, &free, &zz).is_ok() {
            out.push(zz);
        }
    }
    Ok(out)
}

/// Elements of `T(T(1))` flattening into the depth-`d` truncation of `T(1)`.
pub fn t2_over_one(spec: &GsosSpec, d: usize) -> Result<Vec<El2>, CellError> {
    let one = Arc::new(unit(spec));
    let t1 = t_of(spec, &one, d)?;
    let mut out = Vec::new();
    for t in &t1.terms {
        out.extend(layerings_term(t).into_iter().map(Element::State));
    }
    for p in &t1.proofs {
        out.extend(layerings_proof(spec, one.as_ref(), p).into_iter().map(Element::Edge));
    }
    Ok(out)
}

fn object_name(spec: &GsosSpec, one: &Presheaf, z: &El) -> String {
    match z {
        Element::State(_) => "*".into(),
        Element::Edge(p) => spec.labels.name(crate::term::label(spec, one, p)).to_string(),
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ObjectReport {
    pub object: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CartesianReport {
    pub square: String,
    pub depth: usize,
    pub states: usize,
    pub objects: Vec<ObjectReport>,
}

impl CartesianReport {
    pub fn is_pullback(&self) -> bool {
        self.objects.iter().all(|o| o.failures.is_empty())
    }

    fn new(spec: &GsosSpec, square: &str, d: usize, x: &Presheaf) -> Self {
        let mut objects = vec![ObjectReport { object: "*".into(), ..Default::default() }];
        objects.extend(spec.labels.names().iter().map(|n| ObjectReport { object: n.clone(), ..Default::default() }));
        CartesianReport { square: square.into(), depth: d, states: x.num_states(), objects }
    }

    fn entry(&mut self, name: &str) -> &mut ObjectReport {
        self.objects.iter_mut().find(|o| o.object == name).expect("object of the base category")
    }
}

/// The naturality square of `μ` along `X -> 1` is a pullback at every
/// element of `T(T(1))` of depth at most `d`: `μ_X` restricts to a bijection
/// from the fiber over `RR` onto the fiber over `μ_1(RR)`.
pub fn check_mu_cartesian(spec: &GsosSpec, x: &Arc<Presheaf>, d: usize) -> Result<CartesianReport, CellError> {
    let one = unit(spec);
    let mut report = CartesianReport::new(spec, "mu", d, x);
    for rr in t2_over_one(spec, d)? {
        let flat = mu_element(&rr);
        let upstairs = fiber_t2(spec, x, &rr)?;
        let downstairs: HashSet<El> = fillings(spec, x, &flat)?.into_iter().collect();
        let images: Vec<El> = upstairs.iter().map(mu_element).collect();
        let distinct: HashSet<&El> = images.iter().collect();
        let entry = report.entry(&object_name(spec, &one, &flat));
        entry.checked += 1;
        let bijective = distinct.len() == images.len()
            && distinct.len() == downstairs.len()
            && images.iter().all(|z| downstairs.contains(z));
        if !bijective {
            let free = Free::new(spec, &one);
            entry.failures.push(show_element(spec, &free, &rr));
        }
    }
    Ok(report)
}

/// The naturality square of `η` along `X -> 1` on the depth-`d` truncations.
pub fn check_eta_cartesian(spec: &GsosSpec, x: &Arc<Presheaf>, d: usize) -> Result<CartesianReport, CellError> {
    let one = Arc::new(unit(spec));
    let tx = t_of(spec, x, d)?;
    let t1 = t_of(spec, &one, d)?;
    let bang = Morphism::to_terminal(x.clone(), one.clone())?;
    let square = Square {
        top: eta_morphism(&tx)?,
        left: bang.clone(),
        right: t_on_morphism(&bang, &tx, &t1)?,
        bottom: eta_morphism(&t1)?,
    };
    let mut report = CartesianReport::new(spec, "eta", d, x);
    let failures = pullback_failures(&square)?;
    for o in report.objects.iter_mut() {
        o.checked = 1;
    }
    for f in failures {
        let name = match f {
            Object::Star => "*".to_string(),
            Object::Arrow(l) => spec.labels.name(l).to_string(),
        };
        report.entry(&name).failures.push("not a pullback".into());
    }
    debug_assert_eq!(report.is_pullback(), is_pullback_square(&square)?);
    Ok(report)
}

fn pair_terms(rr: &Term<Term<StateIx>>, r: &Term<StateIx>) -> Result<Term<Term<StateIx>>, CellError> {
    match (rr, r) {
        (Term::Var(n), _) => {
            if n.map(&mut |_| StateIx(0)) != r.map(&mut |_| StateIx(0)) {
                return Err(CellError::IncompatiblePair("leaf shape differs".into()));
            }
            Ok(Term::Var(r.clone()))
        }
        (Term::App(op, cs), Term::App(op2, rs)) if op == op2 && cs.len() == rs.len() => {
            Ok(Term::App(*op, cs.iter().zip(rs).map(|(c, s)| pair_terms(c, s)).collect::<Result<_, _>>()?))
        }
        _ => Err(CellError::IncompatiblePair("operations differ".into())),
    }
}

fn pair_proofs(
    one: &Presheaf,
    x: &Presheaf,
    rr: &Proof<Term<StateIx>, Proof<StateIx, EdgeIx>>,
    r: &Proof<StateIx, EdgeIx>,
) -> Result<Proof<Term<StateIx>, Proof<StateIx, EdgeIx>>, CellError> {
    match (rr, r) {
        (Proof::Axiom(q), _) => {
            let stripped = r.map(&mut |_| StateIx(0), &mut |e| one.edges_with_label(x.edge(*e).label)[0]);
            if *q != stripped {
                return Err(CellError::IncompatiblePair("leaf shape differs".into()));
            }
            Ok(Proof::Axiom(r.clone()))
        }
        (Proof::Node(rule, args), Proof::Node(rule2, args2)) if rule == rule2 && args.len() == args2.len() => {
            let mut out = Vec::with_capacity(args.len());
            for (a, b) in args.iter().zip(args2) {
                out.push(match (a, b) {
                    (ProofArg::Term(t), ProofArg::Term(s)) => ProofArg::Term(pair_terms(t, s)?),
                    (ProofArg::Premises(ps), ProofArg::Premises(qs)) if ps.len() == qs.len() => ProofArg::Premises(
                        ps.iter().zip(qs).map(|(p, q)| pair_proofs(one, x, p, q)).collect::<Result<_, _>>()?,
                    ),
                    _ => return Err(CellError::IncompatiblePair("argument kinds differ".into())),
                });
            }
            Ok(Proof::Node(*rule, out))
        }
        _ => Err(CellError::IncompatiblePair("rules differ".into())),
    }
}

/// The element of `T(T(X))` over `rr` flattening to `r`.
pub fn unique_r0(spec: &GsosSpec, x: &Arc<Presheaf>, rr: &El2, r: &El) -> Result<El2, CellError> {
    let one = unit(spec);
    let out = match (rr, r) {
        (Element::State(t), Element::State(s)) => Element::State(pair_terms(t, s)?),
        (Element::Edge(p), Element::Edge(q)) => Element::Edge(pair_proofs(&one, x.as_ref(), p, q)?),
        _ => return Err(CellError::IncompatiblePair("objects differ".into())),
    };
    let free = Free::new(spec, x.as_ref());
    check_element(spec, &free, &out).map_err(|e| CellError::IncompatiblePair(e.to_string()))?;
    let stripped = out.map(
        &mut |t: &Term<StateIx>| t.map(&mut |_| StateIx(0)),
        &mut |p: &Proof<StateIx, EdgeIx>| p.map(&mut |_| StateIx(0), &mut |e| one.edges_with_label(x.edge(*e).label)[0]),
    );
    if mu_element(&out) != *r || stripped != *rr {
        return Err(CellError::IncompatiblePair("witness does not reproduce the inputs".into()));
    }
    Ok(out)
}
