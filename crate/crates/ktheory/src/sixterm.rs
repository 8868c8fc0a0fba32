//! Case analysis for cyclic six-term exact sequences.
//!
//! A sequence has nodes `N₀ … N₅` and arrows `fᵢ : Nᵢ → Nᵢ₊₁` (indices mod 6).
//! The solver tracks the images `Iᵢ = im fᵢ ⊆ Nᵢ₊₁`. Exactness says
//! `ker fᵢ = Iᵢ₋₁`, so every node sits in `0 → Iᵢ₋₁ → Nᵢ → Iᵢ → 0`. Known
//! groups and arrow constraints fix some images; the rest are found by
//! splitting into cases over concrete subgroups of small known groups.
//!
//! Nodes are identified by label, so a label shared between nodes (or
//! between sequences of a [`SequenceSystem`]) is one unknown.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::extension::solve_extension;
use crate::group::FgAbelianGroup;
use crate::hom::GroupHom;
use crate::matrix::IntMatrix;
use crate::KtheoryError;

/// Known groups with at most this many generators are split into concrete
/// subgroups when an image is unknown.
pub const MAX_BRANCH_GENERATORS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    Zero,
    Surjective,
    Injective,
    /// The arrow sends the given standard generator of its domain to 0.
    KillsGenerator { generator: usize },
    /// The image contains this element (codomain coordinates).
    ImageContains { element: Vec<i64> },
    /// The image is a direct summand of the codomain, so the codomain is
    /// the direct sum of this image and the next one.
    ImageDirectSummand,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<FgAbelianGroup>,
}

impl Node {
    pub fn known(label: &str, group: &str) -> Self {
        Self {
            label: label.into(),
            group: Some(group.parse().expect("valid group literal")),
        }
    }

    pub fn unknown(label: &str) -> Self {
        Self {
            label: label.into(),
            group: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<Constraint>,
    /// Matrix on standard generators (codomain rows × domain columns).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<Vec<i64>>>,
}

impl Arrow {
    pub fn new(label: &str) -> Self {
        Self {
            label: label.into(),
            constraints: Vec::new(),
            map: None,
        }
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    fn has(&self, c: &Constraint) -> bool {
        self.constraints.contains(c)
    }
}

/// Conventional arrow names for a sequence attached to an ideal.
pub const DEFAULT_ARROW_LABELS: [&str; 6] = ["i0", "p0", "delta0", "i1", "p1", "delta1"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SixTermSequence {
    pub name: String,
    #[serde(default)]
    pub citation: String,
    pub nodes: Vec<Node>,
    pub arrows: Vec<Arrow>,
}

impl SixTermSequence {
    /// Sequence with default arrow labels and no constraints.
    pub fn new(name: &str, nodes: Vec<Node>) -> Self {
        Self {
            name: name.into(),
            citation: String::new(),
            nodes,
            arrows: DEFAULT_ARROW_LABELS.iter().map(|l| Arrow::new(l)).collect(),
        }
    }

    pub fn constrain(mut self, arrow: usize, c: Constraint) -> Self {
        self.arrows[arrow].constraints.push(c);
        self
    }

    pub fn label_arrow(mut self, arrow: usize, label: &str) -> Self {
        self.arrows[arrow].label = label.into();
        self
    }

    pub fn cite(mut self, citation: &str) -> Self {
        self.citation = citation.into();
        self
    }

    fn validate(&self) -> Result<(), KtheoryError> {
        if self.nodes.len() != 6 || self.arrows.len() != 6 {
            return Err(KtheoryError::InvalidSequence(format!(
                "`{}` has {} nodes and {} arrows; six of each are needed",
                self.name,
                self.nodes.len(),
                self.arrows.len()
            )));
        }
        Ok(())
    }
}

/// Several sequences sharing node labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSystem {
    pub name: String,
    #[serde(default)]
    pub citation: String,
    pub sequences: Vec<SixTermSequence>,
}

impl SequenceSystem {
    pub fn single(seq: SixTermSequence) -> Self {
        Self {
            name: seq.name.clone(),
            citation: seq.citation.clone(),
            sequences: vec![seq],
        }
    }

    fn labels_in_order(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for n in self.sequences.iter().flat_map(|s| &s.nodes) {
            if !out.contains(&n.label) {
                out.push(n.label.clone());
            }
        }
        out
    }

    /// Labels given a group somewhere in the system.
    pub fn known_labels(&self) -> Result<BTreeMap<String, FgAbelianGroup>, KtheoryError> {
        let mut known = BTreeMap::new();
        for n in self.sequences.iter().flat_map(|s| &s.nodes) {
            if let Some(g) = &n.group {
                if let Some(prev) = known.insert(n.label.clone(), g.clone()) {
                    if &prev != g {
                        return Err(KtheoryError::Inconsistent(format!(
                            "`{}` is declared both {} and {}",
                            n.label, prev, g
                        )));
                    }
                }
            }
        }
        Ok(known)
    }

    /// Labels never given a group, in order of first appearance.
    pub fn unknown_labels(&self) -> Vec<String> {
        let known = self.known_labels().unwrap_or_default();
        self.labels_in_order()
            .into_iter()
            .filter(|l| !known.contains_key(l))
            .collect()
    }
}

/// One consistent assignment of the unknown labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: BTreeMap<String, FgAbelianGroup>,
    pub trace: Vec<String>,
    /// Set when some case split reached the enumeration bound, so the
    /// family this assignment belongs to may continue past it.
    pub family_truncated: bool,
}

/// A property of an arrow that holds in every assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowFact {
    pub sequence: String,
    pub arrow: String,
    pub fact: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSolution {
    pub system: String,
    pub bound: u64,
    pub unknowns: Vec<String>,
    pub assignments: Vec<Assignment>,
    pub derived: Vec<ArrowFact>,
}

impl SystemSolution {
    /// Value tuples in the order of `unknowns`.
    pub fn possibilities(&self) -> Vec<Vec<FgAbelianGroup>> {
        self.assignments
            .iter()
            .map(|a| self.unknowns.iter().map(|l| a.values[l].clone()).collect())
            .collect()
    }

    /// Values of `labels` across assignments, deduplicated and sorted.
    pub fn project(&self, labels: &[&str]) -> Vec<Vec<FgAbelianGroup>> {
        let mut out: Vec<Vec<FgAbelianGroup>> = self
            .assignments
            .iter()
            .map(|a| labels.iter().map(|l| a.values[*l].clone()).collect())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_unique(&self) -> bool {
        self.assignments.len() == 1
    }
}

/// Solves one sequence on its own.
pub fn six_term_solve(seq: &SixTermSequence, bound: u64) -> Result<SystemSolution, KtheoryError> {
    solve_system(&SequenceSystem::single(seq.clone()), bound)
}

/// All consistent assignments of the unknown labels of `system`.
///
/// Sequences are solved one at a time, each time picking the first one
/// whose unknowns are pinned down by what is already known, and
/// backtracking over its cases.
pub fn solve_system(system: &SequenceSystem, bound: u64) -> Result<SystemSolution, KtheoryError> {
    for s in &system.sequences {
        s.validate()?;
    }
    let known = system.known_labels()?;
    let unknowns = system.unknown_labels();
    let mut leaves = Vec::new();
    let start = Leaf {
        labels: known,
        trace: Vec::new(),
        truncated: false,
        facts: vec![None; system.sequences.len()],
    };
    dfs(system, start, &mut vec![false; system.sequences.len()], bound, &mut leaves)?;
    if leaves.is_empty() {
        return Err(KtheoryError::Inconsistent(format!(
            "`{}` admits no assignment",
            system.name
        )));
    }

    let mut by_values: BTreeMap<Vec<FgAbelianGroup>, Assignment> = BTreeMap::new();
    for leaf in &leaves {
        let key: Vec<FgAbelianGroup> = unknowns.iter().map(|l| leaf.labels[l].clone()).collect();
        by_values
            .entry(key)
            .and_modify(|a| a.family_truncated |= leaf.truncated)
            .or_insert_with(|| Assignment {
                values: unknowns
                    .iter()
                    .map(|l| (l.clone(), leaf.labels[l].clone()))
                    .collect(),
                trace: leaf.trace.clone(),
                family_truncated: leaf.truncated,
            });
    }

    let mut derived = Vec::new();
    for (k, seq) in system.sequences.iter().enumerate() {
        let node_is_zero = |l: &Leaf, n: usize| {
            seq.nodes[n]
                .group
                .as_ref()
                .or_else(|| l.labels.get(&seq.nodes[n].label))
                .is_some_and(|g| g.is_zero())
        };
        for (i, arrow) in seq.arrows.iter().enumerate() {
            // Arrows touching a zero group carry no information.
            if leaves.iter().all(|l| node_is_zero(l, i) || node_is_zero(l, (i + 1) % 6)) {
                continue;
            }
            for (f, name) in [(0, "zero"), (1, "surjective"), (2, "injective")] {
                if leaves.iter().all(|l| l.facts[k].map_or(false, |fs| fs[i][f])) {
                    derived.push(ArrowFact {
                        sequence: seq.name.clone(),
                        arrow: arrow.label.clone(),
                        fact: name.into(),
                    });
                }
            }
        }
    }

    Ok(SystemSolution {
        system: system.name.clone(),
        bound,
        unknowns,
        assignments: by_values.into_values().collect(),
        derived,
    })
}

/// `[zero, surjective, injective]` per arrow.
type Facts = [[bool; 3]; 6];

#[derive(Clone)]
struct Leaf {
    labels: BTreeMap<String, FgAbelianGroup>,
    trace: Vec<String>,
    truncated: bool,
    facts: Vec<Option<Facts>>,
}

fn dfs(
    system: &SequenceSystem,
    at: Leaf,
    done: &mut Vec<bool>,
    bound: u64,
    out: &mut Vec<Leaf>,
) -> Result<(), KtheoryError> {
    if done.iter().all(|&d| d) {
        out.push(at);
        return Ok(());
    }
    let mut blocked = Vec::new();
    for k in 0..system.sequences.len() {
        if done[k] {
            continue;
        }
        let seq = &system.sequences[k];
        match solve_sequence(seq, &at.labels, bound) {
            Ok(local) => {
                done[k] = true;
                for s in local {
                    let mut next = at.clone();
                    next.labels = s.labels;
                    next.trace.extend(s.trace);
                    next.truncated |= s.truncated;
                    next.facts[k] = Some(s.facts);
                    dfs(system, next, done, bound, out)?;
                }
                done[k] = false;
                return Ok(());
            }
            Err(KtheoryError::Underdetermined(msg)) => blocked.push(format!("{}: {}", seq.name, msg)),
            Err(e) => return Err(e),
        }
    }
    Err(KtheoryError::Underdetermined(blocked.join("; ")))
}

struct LocalSolution {
    labels: BTreeMap<String, FgAbelianGroup>,
    trace: Vec<String>,
    truncated: bool,
    facts: Facts,
}

/// Solutions of one sequence given already-fixed labels. An empty list
/// means the sequence contradicts them.
fn solve_sequence(
    seq: &SixTermSequence,
    labels: &BTreeMap<String, FgAbelianGroup>,
    bound: u64,
) -> Result<Vec<LocalSolution>, KtheoryError> {
    let state = State {
        seq,
        labels: labels.clone(),
        images: Default::default(),
        trace: Vec::new(),
        truncated: false,
    };
    let mut out = Vec::new();
    search(state, bound, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone)]
struct Image {
    group: FgAbelianGroup,
    /// Generators in codomain coordinates, when the subgroup itself is known.
    sub: Option<Vec<Vec<BigInt>>>,
}

enum Halt {
    Conflict,
    Fatal(KtheoryError),
}

impl From<KtheoryError> for Halt {
    fn from(e: KtheoryError) -> Self {
        Halt::Fatal(e)
    }
}

#[derive(Clone)]
struct State<'a> {
    seq: &'a SixTermSequence,
    labels: BTreeMap<String, FgAbelianGroup>,
    images: [Option<Image>; 6],
    trace: Vec<String>,
    truncated: bool,
}

fn search(mut st: State<'_>, bound: u64, out: &mut Vec<LocalSolution>) -> Result<(), KtheoryError> {
    match st.saturate(bound) {
        Ok(()) => {}
        Err(Halt::Conflict) => return Ok(()),
        Err(Halt::Fatal(e)) => return Err(e),
    }
    if st.complete() {
        out.push(st.finish());
        return Ok(());
    }
    match st.branches(bound)? {
        Some(kids) => {
            for kid in kids {
                search(kid, bound, out)?;
            }
            Ok(())
        }
        None => Err(KtheoryError::Underdetermined(st.missing())),
    }
}

fn fmt_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn fmt_sub(gens: &[Vec<BigInt>]) -> String {
    if gens.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = gens.iter().map(|g| fmt_vec(g)).collect();
    format!("<{}>", parts.join(", "))
}

/// Case splits stay inside the exponent bound: candidates whose image or
/// cokernel has a larger invariant factor are not explored.
fn within_bound(g: &FgAbelianGroup, bound: u64) -> bool {
    g.largest_factor().map_or(true, |d| *d <= BigInt::from(bound))
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl<'a> State<'a> {
    fn node(&self, i: usize) -> Option<&FgAbelianGroup> {
        self.labels.get(&self.seq.nodes[i].label)
    }

    fn image_group(&self, i: usize) -> Option<&FgAbelianGroup> {
        self.images[i].as_ref().map(|im| &im.group)
    }

    fn image_is_zero(&self, i: usize) -> bool {
        self.image_group(i).map_or(false, FgAbelianGroup::is_zero)
    }

    fn note(&mut self, msg: String) {
        self.trace.push(format!("{}: {}", self.seq.name, msg));
    }

    fn arrow_name(&self, i: usize) -> String {
        let a = &self.seq.arrows[i];
        format!(
            "{} : {} -> {}",
            a.label,
            self.seq.nodes[i].label,
            self.seq.nodes[(i + 1) % 6].label
        )
    }

    /// Standard generators of `Nᵢ` that arrow `i` kills.
    fn killed(&self, i: usize, ni: &FgAbelianGroup) -> Result<Vec<Vec<BigInt>>, Halt> {
        let mut out = Vec::new();
        for c in &self.seq.arrows[i].constraints {
            if let Constraint::KillsGenerator { generator } = c {
                if *generator >= ni.ngens() {
                    return Err(Halt::Conflict);
                }
                out.push(ni.generator(*generator));
            }
        }
        Ok(out)
    }

    fn set_node(&mut self, i: usize, g: FgAbelianGroup, why: &str) -> Result<bool, Halt> {
        let label = self.seq.nodes[i].label.clone();
        match self.labels.get(&label) {
            Some(h) if *h == g => Ok(false),
            Some(_) => Err(Halt::Conflict),
            None => {
                self.note(format!("{label} = {g} ({why})"));
                self.labels.insert(label, g);
                Ok(true)
            }
        }
    }

    fn set_image_group(&mut self, i: usize, g: FgAbelianGroup, why: &str) -> Result<bool, Halt> {
        match &self.images[i] {
            Some(im) if im.group == g => Ok(false),
            Some(_) => Err(Halt::Conflict),
            None => {
                let name = self.arrow_name(i);
                self.note(format!("im[{name}] = {g} ({why})"));
                let sub = g.is_zero().then(Vec::new);
                self.images[i] = Some(Image { group: g, sub });
                Ok(true)
            }
        }
    }

    /// Records the image of arrow `i` as a concrete subgroup of `Nᵢ₊₁`,
    /// which must be known.
    fn set_image_sub(&mut self, i: usize, gens: Vec<Vec<BigInt>>, why: &str) -> Result<bool, Halt> {
        let nj = self.node((i + 1) % 6).expect("codomain known").clone();
        let ty = nj.subgroup_type(&gens);
        let name = self.arrow_name(i);
        let msg = format!("im[{name}] = {} = {ty} ({why})", fmt_sub(&gens));
        match &mut self.images[i] {
            Some(im) => {
                if im.group != ty {
                    return Err(Halt::Conflict);
                }
                match &im.sub {
                    Some(s) if nj.same_subgroup(s, &gens) => Ok(false),
                    Some(_) => Err(Halt::Conflict),
                    None => {
                        im.sub = Some(gens);
                        self.note(msg);
                        Ok(true)
                    }
                }
            }
            None => {
                self.images[i] = Some(Image {
                    group: ty,
                    sub: Some(gens),
                });
                self.note(msg);
                Ok(true)
            }
        }
    }

    fn saturate(&mut self, bound: u64) -> Result<(), Halt> {
        while self.step(bound)? {}
        self.check()
    }

    fn step(&mut self, bound: u64) -> Result<bool, Halt> {
        let mut changed = false;
        let zero = FgAbelianGroup::zero;
        for i in 0..6 {
            let (h, j) = ((i + 5) % 6, (i + 1) % 6);
            let arrow = &self.seq.arrows[i];
            let label = arrow.label.clone();
            for c in arrow.constraints.clone() {
                match c {
                    Constraint::Zero => {
                        changed |= self.set_image_group(i, zero(), &format!("{label} is zero"))?;
                    }
                    Constraint::Surjective => {
                        let why = format!("{label} is onto");
                        changed |= self.set_image_group(j, zero(), &why)?;
                        if let Some(nj) = self.node(j).cloned() {
                            changed |= self.set_image_sub(i, nj.generators(), &why)?;
                        }
                    }
                    Constraint::Injective => {
                        changed |= self.set_image_group(h, zero(), &format!("{label} is injective"))?;
                    }
                    _ => {}
                }
            }

            if let Some(ni) = self.node(i).cloned() {
                let nlabel = self.seq.nodes[i].label.clone();
                if ni.is_zero() {
                    let why = format!("{nlabel} = 0");
                    changed |= self.set_image_group(h, zero(), &why)?;
                    changed |= self.set_image_group(i, zero(), &why)?;
                }
                if self.image_is_zero(h) {
                    changed |= self.set_image_group(i, ni.clone(), &format!("{label} is injective"))?;
                }
                if self.image_is_zero(i) {
                    changed |= self.set_image_sub(h, ni.generators(), &format!("{label} vanishes"))?;
                }
                if ni.is_free() {
                    if let Some(im) = self.image_group(i).cloned() {
                        if im.rank() > ni.rank() {
                            return Err(Halt::Conflict);
                        }
                        let k = FgAbelianGroup::free(ni.rank() - im.rank());
                        changed |= self.set_image_group(
                            h,
                            k,
                            &format!("kernel of {label} out of free {nlabel}"),
                        )?;
                    }
                }
            }

            if let (Some(nj), Some(Image { sub: Some(sub), .. })) =
                (self.node(j).cloned(), self.images[i].clone())
            {
                let q = nj.quotient_type(&sub);
                let why = format!("{} / im {label}", self.seq.nodes[j].label);
                changed |= self.set_image_group(j, q, &why)?;
            }

            if let (Some(map), Some(ni), Some(nj)) =
                (self.seq.arrows[i].map.clone(), self.node(i).cloned(), self.node(j).cloned())
            {
                let rows: Vec<Vec<BigInt>> = map.iter().map(|r| to_big(r)).collect();
                let m = if rows.is_empty() {
                    IntMatrix::zeros(nj.ngens(), ni.ngens())
                } else {
                    IntMatrix::from_rows(&rows)
                };
                let f = GroupHom::new(ni, nj, m)?;
                let why = format!("{label} is given");
                changed |= self.set_image_sub(i, f.image_generators(), &why)?;
                changed |= self.set_image_sub(h, f.kernel_generators(), &why)?;
            }
        }

        for i in 0..6 {
            let h = (i + 5) % 6;
            let (Some(a), Some(c)) = (self.image_group(h).cloned(), self.image_group(i).cloned())
            else {
                continue;
            };
            let cands = if self.seq.arrows[h].has(&Constraint::ImageDirectSummand) {
                vec![a.direct_sum(&c)]
            } else {
                solve_extension(&a, &c, bound)?
            };
            match self.node(i) {
                Some(n) if !cands.contains(n) => return Err(Halt::Conflict),
                Some(_) => {}
                None => match cands.len() {
                    0 => return Err(Halt::Conflict),
                    1 => {
                        let why = format!("extension of {c} by {a}");
                        changed |= self.set_node(i, cands[0].clone(), &why)?;
                    }
                    _ => {}
                },
            }
        }
        Ok(changed)
    }

    /// Constraints that can only be checked, not propagated.
    fn check(&self) -> Result<(), Halt> {
        for i in 0..6 {
            let (h, j) = ((i + 5) % 6, (i + 1) % 6);
            let arrow = &self.seq.arrows[i];
            if let (Some(im), Some(nj)) = (self.image_group(i), self.node(j)) {
                if !im.embeds_in(nj) {
                    return Err(Halt::Conflict);
                }
            }
            if let Some(ni) = self.node(i) {
                let killed = self.killed(i, ni)?;
                if let Some(im) = self.image_group(i) {
                    if !im.is_quotient_of(&ni.quotient_type(&killed)) {
                        return Err(Halt::Conflict);
                    }
                }
                if let Some(Image { sub: Some(ker), .. }) = &self.images[h] {
                    if killed.iter().any(|g| !ni.subgroup_contains(ker, g)) {
                        return Err(Halt::Conflict);
                    }
                }
            }
            if let (Some(Image { sub: Some(sub), .. }), Some(nj)) = (&self.images[i], self.node(j)) {
                for c in &arrow.constraints {
                    if let Constraint::ImageContains { element } = c {
                        if element.len() != nj.ngens() || !nj.subgroup_contains(sub, &to_big(element)) {
                            return Err(Halt::Conflict);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn complete(&self) -> bool {
        (0..6).all(|i| self.node(i).is_some() && self.images[i].is_some())
    }

    fn missing(&self) -> String {
        let mut parts = Vec::new();
        for i in 0..6 {
            if self.node(i).is_none() {
                parts.push(self.seq.nodes[i].label.clone());
            }
        }
        for i in 0..6 {
            if self.images[i].is_none() {
                parts.push(format!("image of {}", self.seq.arrows[i].label));
            }
        }
        format!("cannot determine {}", parts.join(", "))
    }

    fn finish(self) -> LocalSolution {
        let mut facts = [[false; 3]; 6];
        for (i, f) in facts.iter_mut().enumerate() {
            *f = [
                self.image_is_zero(i),
                self.image_is_zero((i + 1) % 6),
                self.image_is_zero((i + 5) % 6),
            ];
        }
        LocalSolution {
            labels: self.labels,
            trace: self.trace,
            truncated: self.truncated,
            facts,
        }
    }

    /// Child states for the first open choice, or `None` if nothing can be
    /// enumerated.
    fn branches(&self, bound: u64) -> Result<Option<Vec<State<'a>>>, KtheoryError> {
        // An unknown image inside a small known codomain.
        for i in 0..6 {
            let j = (i + 1) % 6;
            if self.images[i].is_some() {
                continue;
            }
            let (Some(ni), Some(nj)) = (self.node(i), self.node(j)) else {
                continue;
            };
            if nj.ngens() > MAX_BRANCH_GENERATORS {
                continue;
            }
            let Ok(killed) = self.killed(i, ni) else {
                return Ok(Some(Vec::new()));
            };
            let source = ni.quotient_type(&killed);
            let wanted: Vec<Vec<BigInt>> = self.seq.arrows[i]
                .constraints
                .iter()
                .filter_map(|c| match c {
                    Constraint::ImageContains { element } if element.len() == nj.ngens() => {
                        Some(to_big(element))
                    }
                    _ => None,
                })
                .collect();
            let mut kids = Vec::new();
            for sub in nj.subgroups(bound) {
                let ty = nj.subgroup_type(&sub.generators);
                if !ty.is_quotient_of(&source)
                    || !within_bound(&ty, bound)
                    || !within_bound(&nj.quotient_type(&sub.generators), bound)
                    || wanted.iter().any(|w| !nj.subgroup_contains(&sub.generators, w))
                {
                    continue;
                }
                let mut kid = self.clone();
                let why = "case split";
                if kid.set_image_sub(i, sub.generators, why).is_ok() {
                    kid.truncated |= sub.at_bound;
                    kids.push(kid);
                }
            }
            return Ok(Some(kids));
        }
        // An unknown kernel inside a small known domain.
        for i in 0..6 {
            let h = (i + 5) % 6;
            if self.images[h].is_some() {
                continue;
            }
            let (Some(ni), Some(im)) = (self.node(i), self.image_group(i)) else {
                continue;
            };
            if ni.ngens() > MAX_BRANCH_GENERATORS {
                continue;
            }
            let Ok(killed) = self.killed(i, ni) else {
                return Ok(Some(Vec::new()));
            };
            let mut kids = Vec::new();
            for sub in ni.subgroups(bound) {
                if ni.quotient_type(&sub.generators) != *im
                    || !within_bound(&ni.subgroup_type(&sub.generators), bound)
                    || killed.iter().any(|g| !ni.subgroup_contains(&sub.generators, g))
                {
                    continue;
                }
                let mut kid = self.clone();
                if kid.set_image_sub(h, sub.generators, "case split on kernel").is_ok() {
                    kid.truncated |= sub.at_bound;
                    kids.push(kid);
                }
            }
            return Ok(Some(kids));
        }
        // An unknown node with several possible extensions.
        for i in 0..6 {
            let h = (i + 5) % 6;
            if self.node(i).is_some() {
                continue;
            }
            let (Some(a), Some(c)) = (self.image_group(h), self.image_group(i)) else {
                continue;
            };
            let cands = solve_extension(a, c, bound)?;
            let mut kids = Vec::new();
            for x in cands {
                let mut kid = self.clone();
                let why = format!("case: extension of {c} by {a}");
                if kid.set_node(i, x, &why).is_ok() {
                    kids.push(kid);
                }
            }
            return Ok(Some(kids));
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FgAbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn fully_known_split_sequence() {
        // 0 → ℤ → ℤ² → ℤ → 0 twice around the cycle with zero connecting maps.
        let seq = SixTermSequence::new(
            "split",
            vec![
                Node::known("a0", "Z"),
                Node::known("b0", "Z^2"),
                Node::known("c0", "Z"),
                Node::known("a1", "Z"),
                Node::known("b1", "Z^2"),
                Node::known("c1", "Z"),
            ],
        )
        .constrain(2, Constraint::Zero)
        .constrain(5, Constraint::Zero);
        let sol = six_term_solve(&seq, 12).unwrap();
        assert!(sol.is_unique());
        assert!(sol.unknowns.is_empty());
    }

    #[test]
    fn unknown_middle_term() {
        let seq = SixTermSequence::new(
            "middle",
            vec![
                Node::known("a0", "Z"),
                Node::unknown("b0"),
                Node::known("c0", "Z^2"),
                Node::known("a1", "0"),
                Node::unknown("b1"),
                Node::known("c1", "0"),
            ],
        )
        .constrain(5, Constraint::Zero);
        let sol = six_term_solve(&seq, 12).unwrap();
        assert_eq!(sol.possibilities(), vec![vec![g("Z^3"), g("0")]]);
    }

    #[test]
    fn contradiction_is_reported() {
        // ℤ₂ cannot sit injectively inside ℤ.
        let seq = SixTermSequence::new(
            "bad",
            vec![
                Node::known("a0", "Z_2"),
                Node::known("b0", "Z"),
                Node::known("c0", "0"),
                Node::known("a1", "0"),
                Node::known("b1", "0"),
                Node::known("c1", "0"),
            ],
        );
        assert!(matches!(
            six_term_solve(&seq, 12),
            Err(KtheoryError::Inconsistent(_))
        ));
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let mut seq = SixTermSequence::new("short", vec![Node::unknown("x"); 5]);
        seq.arrows.pop();
        assert!(matches!(
            six_term_solve(&seq, 12),
            Err(KtheoryError::InvalidSequence(_))
        ));
    }

    #[test]
    fn conflicting_declarations() {
        let seq = SixTermSequence::new(
            "clash",
            vec![
                Node::known("x", "Z"),
                Node::known("x", "Z^2"),
                Node::unknown("a"),
                Node::unknown("b"),
                Node::unknown("c"),
                Node::unknown("d"),
            ],
        );
        assert!(matches!(
            six_term_solve(&seq, 12),
            Err(KtheoryError::Inconsistent(_))
        ));
    }

    #[test]
    fn all_unknown_is_underdetermined() {
        let seq = SixTermSequence::new(
            "open",
            ["a", "b", "c", "d", "e", "f"].iter().map(|l| Node::unknown(l)).collect(),
        );
        assert!(matches!(
            six_term_solve(&seq, 12),
            Err(KtheoryError::Underdetermined(_))
        ));
    }

    #[test]
    fn given_maps_are_used() {
        // ℤ →×3 ℤ → ℤ₃ → 0 → 0 → 0 with the first map given explicitly.
        let mut seq = SixTermSequence::new(
            "given",
            vec![
                Node::known("a0", "Z"),
                Node::known("b0", "Z"),
                Node::unknown("c0"),
                Node::known("a1", "0"),
                Node::known("b1", "0"),
                Node::known("c1", "0"),
            ],
        );
        seq.arrows[0].map = Some(vec![vec![3]]);
        let sol = six_term_solve(&seq, 12).unwrap();
        assert_eq!(sol.possibilities(), vec![vec![g("Z_3")]]);
    }
}
