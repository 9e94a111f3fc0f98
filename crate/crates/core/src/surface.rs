//! The curve configuration on the fibre, its ribbon graph and the homology lattice.
//!
//! For genus parameter `b` there are `n = 2b-1` curves in each of the four chains
//! α, β, γ, δ plus the long curve σ, which meets α1, β1, γ1, δ1 in that cyclic order.
//! Chain crossings carry sign +1. The four σ-crossing signs are parameters.

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Sigma,
}

impl Family {
    pub const CHAINS: [Family; 4] = [Family::Alpha, Family::Beta, Family::Gamma, Family::Delta];

    fn ascii(self) -> &'static str {
        match self {
            Family::Alpha => "alpha",
            Family::Beta => "beta",
            Family::Gamma => "gamma",
            Family::Delta => "delta",
            Family::Sigma => "sigma",
        }
    }

    fn greek(self) -> char {
        match self {
            Family::Alpha => 'α',
            Family::Beta => 'β',
            Family::Gamma => 'γ',
            Family::Delta => 'δ',
            Family::Sigma => 'σ',
        }
    }
}

/// A curve of the configuration. `index` is 0 for σ and 1-based otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveId {
    pub family: Family,
    pub index: u32,
}

impl CurveId {
    pub const SIGMA: CurveId = CurveId { family: Family::Sigma, index: 0 };

    pub fn new(family: Family, index: u32) -> Self {
        if family == Family::Sigma {
            CurveId::SIGMA
        } else {
            CurveId { family, index }
        }
    }

    pub fn alpha(i: u32) -> Self {
        Self::new(Family::Alpha, i)
    }
    pub fn beta(i: u32) -> Self {
        Self::new(Family::Beta, i)
    }
    pub fn gamma(i: u32) -> Self {
        Self::new(Family::Gamma, i)
    }
    pub fn delta(i: u32) -> Self {
        Self::new(Family::Delta, i)
    }

    /// ASCII name used in JSON, e.g. `alpha3` or `sigma`.
    pub fn name(&self) -> String {
        match self.family {
            Family::Sigma => "sigma".into(),
            f => format!("{}{}", f.ascii(), self.index),
        }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Sigma => write!(f, "σ"),
            fam => write!(f, "{}{}", fam.greek(), self.index),
        }
    }
}

impl FromStr for CurveId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "sigma" | "s" | "σ") {
            return Ok(CurveId::SIGMA);
        }
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(|| Error::Parse(format!("bad curve name {s:?}")))?;
        let (head, tail) = s.split_at(split);
        let family = match head {
            "alpha" | "a" | "α" => Family::Alpha,
            "beta" | "b" | "β" => Family::Beta,
            "gamma" | "c" | "γ" => Family::Gamma,
            "delta" | "d" | "δ" => Family::Delta,
            _ => return Err(Error::Parse(format!("bad curve family in {s:?}"))),
        };
        let index: u32 = tail.parse().map_err(|_| Error::Parse(format!("bad curve index in {s:?}")))?;
        if index == 0 {
            return Err(Error::Parse(format!("curve index must be positive in {s:?}")));
        }
        Ok(CurveId { family, index })
    }
}

impl Serialize for CurveId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for CurveId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Oriented intersection of `curves.0` with `curves.1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: usize,
    pub curves: (CurveId, CurveId),
    pub sign: i8,
}

/// A point met when walking along a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Incidence {
    Crossing(usize),
    /// A bivalent marked point, used when a curve has no crossings left.
    Mark,
}

/// Signs of the crossings (σ, α1), (σ, β1), (σ, γ1), (σ, δ1).
pub type SigmaSigns = [i8; 4];

/// The σ-sign convention the search settles on. Pinned by tests against [`crate::twist::sign_search`].
pub const CANONICAL_SIGMA_SIGNS: SigmaSigns = [1, 1, 1, 1];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    Auto,
    Explicit(SigmaSigns),
}

impl SignMode {
    pub fn signs(&self) -> SigmaSigns {
        match self {
            SignMode::Auto => CANONICAL_SIGMA_SIGNS,
            SignMode::Explicit(s) => *s,
        }
    }
}

impl FromStr for SignMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(SignMode::Auto);
        }
        let body = s.strip_prefix("explicit:").ok_or_else(|| Error::Parse(format!("sign mode must be auto or explicit:s,s,s,s, got {s:?}")))?;
        let parts: Vec<i8> = body
            .split(',')
            .map(|p| match p.trim() {
                "+" | "+1" | "1" => Ok(1),
                "-" | "-1" => Ok(-1),
                other => Err(Error::Parse(format!("bad sign {other:?}"))),
            })
            .collect::<Result<_>>()?;
        let signs: SigmaSigns = parts.try_into().map_err(|_| Error::Parse("explicit sign mode needs four signs".into()))?;
        Ok(SignMode::Explicit(signs))
    }
}

impl fmt::Display for SignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignMode::Auto => write!(f, "auto"),
            SignMode::Explicit(s) => write!(f, "explicit:{}", format_signs(s)),
        }
    }
}

pub fn format_signs(s: &SigmaSigns) -> String {
    s.iter().map(|&x| if x > 0 { "+" } else { "-" }).collect::<Vec<_>>().join(",")
}

/// Curves, signed crossings and the order in which each curve meets them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSystem {
    /// Genus parameter, absent for ad hoc systems.
    pub b: Option<u32>,
    pub curves: Vec<CurveId>,
    pub crossings: Vec<Crossing>,
    /// Cyclic order of incidences along each curve, aligned with `curves`.
    pub incidences: Vec<Vec<Incidence>>,
    pub sigma_signs: Option<SigmaSigns>,
}

/// The reference configuration for genus parameter `b`.
pub fn build_reference_configuration(b: u32, mode: SignMode) -> Result<CurveSystem> {
    if b < 2 {
        return Err(Error::InvalidParameter(format!("b must be at least 2, got {b}")));
    }
    let signs = mode.signs();
    let n = 2 * b - 1;
    let mut curves = Vec::new();
    for fam in Family::CHAINS {
        for i in 1..=n {
            curves.push(CurveId::new(fam, i));
        }
    }
    curves.push(CurveId::SIGMA);
    let mut crossings = Vec::new();
    for fam in Family::CHAINS {
        for i in 1..n {
            crossings.push(Crossing { id: crossings.len(), curves: (CurveId::new(fam, i), CurveId::new(fam, i + 1)), sign: 1 });
        }
    }
    for (k, fam) in Family::CHAINS.iter().enumerate() {
        crossings.push(Crossing { id: crossings.len(), curves: (CurveId::SIGMA, CurveId::new(*fam, 1)), sign: signs[k] });
    }
    // incidences follow crossing ids, so σ meets α1, β1, γ1, δ1 in order
    let mut incidences = vec![Vec::new(); curves.len()];
    let pos: HashMap<CurveId, usize> = curves.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    for x in &crossings {
        incidences[pos[&x.curves.0]].push(Incidence::Crossing(x.id));
        incidences[pos[&x.curves.1]].push(Incidence::Crossing(x.id));
    }
    let sys = CurveSystem { b: Some(b), curves, crossings, incidences, sigma_signs: Some(signs) };
    sys.validate()?;
    Ok(sys)
}

impl CurveSystem {
    /// A chain α1, ..., α_len with all crossings +1.
    pub fn chain_system(len: u32) -> Result<CurveSystem> {
        if len == 0 {
            return Err(Error::InvalidParameter("chain length must be positive".into()));
        }
        let curves: Vec<CurveId> = (1..=len).map(CurveId::alpha).collect();
        let crossings: Vec<Crossing> =
            (1..len).map(|i| Crossing { id: (i - 1) as usize, curves: (CurveId::alpha(i), CurveId::alpha(i + 1)), sign: 1 }).collect();
        let incidences = (0..len as usize)
            .map(|i| {
                let mut v = Vec::new();
                if i > 0 {
                    v.push(Incidence::Crossing(i - 1));
                }
                if i + 1 < len as usize {
                    v.push(Incidence::Crossing(i));
                }
                if v.is_empty() {
                    v.push(Incidence::Mark);
                }
                v
            })
            .collect();
        let sys = CurveSystem { b: None, curves, crossings, incidences, sigma_signs: None };
        sys.validate()?;
        Ok(sys)
    }

    pub fn position(&self, c: &CurveId) -> Option<usize> {
        self.curves.iter().position(|x| x == c)
    }

    pub fn contains(&self, c: &CurveId) -> bool {
        self.position(c).is_some()
    }

    /// Crossings shared by two curves.
    pub fn shared(&self, c1: &CurveId, c2: &CurveId) -> Vec<&Crossing> {
        self.crossings
            .iter()
            .filter(|x| (x.curves.0 == *c1 && x.curves.1 == *c2) || (x.curves.0 == *c2 && x.curves.1 == *c1))
            .collect()
    }

    /// Algebraic intersection number read off the crossings.
    pub fn geometric_pairing(&self, c1: &CurveId, c2: &CurveId) -> i64 {
        self.shared(c1, c2).iter().map(|x| if x.curves.0 == *c1 { x.sign as i64 } else { -(x.sign as i64) }).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.incidences.len() != self.curves.len() {
            return Err(Error::Dimension { expected: self.curves.len(), found: self.incidences.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.curves {
            if !seen.insert(*c) {
                return Err(Error::InvalidParameter(format!("curve {c} listed twice")));
            }
        }
        for (k, x) in self.crossings.iter().enumerate() {
            if x.id != k {
                return Err(Error::InvalidParameter(format!("crossing ids must be 0..len, found {} at {k}", x.id)));
            }
            if x.curves.0 == x.curves.1 {
                return Err(Error::InvalidParameter(format!("crossing {k} joins {} to itself", x.curves.0)));
            }
            if x.sign != 1 && x.sign != -1 {
                return Err(Error::InvalidParameter(format!("crossing {k} has sign {}", x.sign)));
            }
            for c in [x.curves.0, x.curves.1] {
                let p = self.position(&c).ok_or_else(|| Error::UnknownCurve(c.name()))?;
                let hits = self.incidences[p].iter().filter(|i| **i == Incidence::Crossing(k)).count();
                if hits != 1 {
                    return Err(Error::InvalidParameter(format!("curve {c} meets crossing {k} {hits} times")));
                }
            }
        }
        for (p, inc) in self.incidences.iter().enumerate() {
            for i in inc {
                if let Incidence::Crossing(k) = i {
                    let x = self.crossings.get(*k).ok_or(Error::IndexOutOfRange { index: *k, len: self.crossings.len() })?;
                    if x.curves.0 != self.curves[p] && x.curves.1 != self.curves[p] {
                        return Err(Error::InvalidParameter(format!("curve {} lists foreign crossing {k}", self.curves[p])));
                    }
                }
            }
        }
        Ok(())
    }

    /// Subsystem on `keep`; crossings with dropped curves become marked points.
    pub fn restrict(&self, keep: &[CurveId]) -> Result<CurveSystem> {
        for c in keep {
            if !self.contains(c) {
                return Err(Error::UnknownCurve(c.name()));
            }
        }
        let mut renumber = HashMap::new();
        let mut crossings = Vec::new();
        for x in &self.crossings {
            if keep.contains(&x.curves.0) && keep.contains(&x.curves.1) {
                renumber.insert(x.id, crossings.len());
                crossings.push(Crossing { id: crossings.len(), ..x.clone() });
            }
        }
        let incidences = keep
            .iter()
            .map(|c| {
                self.incidences[self.position(c).unwrap()]
                    .iter()
                    .map(|i| match i {
                        Incidence::Crossing(k) => renumber.get(k).map_or(Incidence::Mark, |&j| Incidence::Crossing(j)),
                        Incidence::Mark => Incidence::Mark,
                    })
                    .collect()
            })
            .collect();
        Ok(CurveSystem { b: None, curves: keep.to_vec(), crossings, incidences, sigma_signs: None })
    }

    /// The cyclic order in which σ meets other curves, starting at α1.
    pub fn sigma_cyclic_order(&self) -> Option<Vec<CurveId>> {
        let p = self.position(&CurveId::SIGMA)?;
        let mut order: Vec<CurveId> = self.incidences[p]
            .iter()
            .filter_map(|i| match i {
                Incidence::Crossing(k) => {
                    let x = &self.crossings[*k];
                    Some(if x.curves.0 == CurveId::SIGMA { x.curves.1 } else { x.curves.0 })
                }
                Incidence::Mark => None,
            })
            .collect();
        if let Some(s) = order.iter().position(|c| *c == CurveId::alpha(1)) {
            order.rotate_left(s);
        }
        Some(order)
    }

    /// Crossing graph in DOT: one node per crossing, one edge per arc.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph configuration {\n  node [shape=circle];\n");
        for x in &self.crossings {
            let s = if x.sign > 0 { "+" } else { "-" };
            out.push_str(&format!("  x{} [label=\"{}·{} {}\"];\n", x.id, x.curves.0, x.curves.1, s));
        }
        let mut marks = 0;
        for (p, inc) in self.incidences.iter().enumerate() {
            let names: Vec<String> = inc
                .iter()
                .map(|i| match i {
                    Incidence::Crossing(k) => format!("x{k}"),
                    Incidence::Mark => {
                        marks += 1;
                        out.push_str(&format!("  m{} [shape=point];\n", marks - 1));
                        format!("m{}", marks - 1)
                    }
                })
                .collect();
            for j in 0..names.len() {
                let (u, v) = (&names[j], &names[(j + 1) % names.len()]);
                out.push_str(&format!("  {u} -- {v} [label=\"{}\"];\n", self.curves[p]));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Crossing(usize),
    Mark(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub kind: VertexKind,
    /// Half-edges in counterclockwise order. Half-edge `2e` is the tail of edge `e`, `2e+1` its head.
    pub rotation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Index into `RibbonGraph::curves`.
    pub curve: usize,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RibbonGraph {
    pub curves: Vec<CurveId>,
    pub crossings: Vec<Crossing>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Edges of each curve in walking order.
    pub curve_edges: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryWalk {
    pub half_edges: Vec<usize>,
}

impl BoundaryWalk {
    pub fn len(&self) -> usize {
        self.half_edges.len()
    }
    pub fn is_empty(&self) -> bool {
        self.half_edges.is_empty()
    }
}

pub fn ribbon_from_system(sys: &CurveSystem) -> Result<RibbonGraph> {
    sys.validate()?;
    let mut vertices: Vec<Vertex> = sys.crossings.iter().map(|x| Vertex { kind: VertexKind::Crossing(x.id), rotation: Vec::new() }).collect();
    let mut edges = Vec::new();
    let mut curve_edges = Vec::new();
    // (vertex, curve) -> (incoming half-edge, outgoing half-edge)
    let mut ends: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (p, inc) in sys.incidences.iter().enumerate() {
        if inc.is_empty() {
            return Err(Error::DegenerateCurve(sys.curves[p].to_string()));
        }
        let vs: Vec<usize> = inc
            .iter()
            .map(|i| match i {
                Incidence::Crossing(k) => *k,
                Incidence::Mark => {
                    vertices.push(Vertex { kind: VertexKind::Mark(p), rotation: Vec::new() });
                    vertices.len() - 1
                }
            })
            .collect();
        let first = edges.len();
        let k = vs.len();
        for j in 0..k {
            edges.push(Edge { curve: p, tail: vs[j], head: vs[(j + 1) % k] });
        }
        for j in 0..k {
            let out = 2 * (first + j);
            let inn = 2 * (first + (j + k - 1) % k) + 1;
            ends.insert((vs[j], p), (inn, out));
        }
        curve_edges.push((first..first + k).collect());
    }
    for v in 0..vertices.len() {
        vertices[v].rotation = match vertices[v].kind {
            VertexKind::Crossing(id) => {
                let x = &sys.crossings[id];
                let pp = sys.position(&x.curves.0).unwrap();
                let qq = sys.position(&x.curves.1).unwrap();
                let (p_in, p_out) = ends[&(v, pp)];
                let (q_in, q_out) = ends[&(v, qq)];
                if x.sign > 0 {
                    vec![p_in, q_in, p_out, q_out]
                } else {
                    vec![q_out, p_out, q_in, p_in]
                }
            }
            VertexKind::Mark(p) => {
                let (i, o) = ends[&(v, p)];
                vec![i, o]
            }
        };
    }
    let rg = RibbonGraph { curves: sys.curves.clone(), crossings: sys.crossings.clone(), vertices, edges, curve_edges };
    rg.validate()?;
    Ok(rg)
}

impl RibbonGraph {
    pub fn half_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        let e = &self.edges[h / 2];
        if h.is_multiple_of(2) {
            e.tail
        } else {
            e.head
        }
    }

    /// Every half-edge sits exactly once in the rotation of its own vertex.
    pub fn validate(&self) -> Result<()> {
        let mut at = vec![usize::MAX; self.half_edge_count()];
        for (v, vert) in self.vertices.iter().enumerate() {
            for &h in &vert.rotation {
                if h >= at.len() {
                    return Err(Error::InconsistentRibbon(format!("vertex {v} lists unknown half-edge {h}")));
                }
                if at[h] != usize::MAX {
                    return Err(Error::InconsistentRibbon(format!("half-edge {h} appears twice")));
                }
                at[h] = v;
            }
        }
        for (h, &v) in at.iter().enumerate() {
            if v == usize::MAX {
                return Err(Error::InconsistentRibbon(format!("half-edge {h} missing from rotations")));
            }
            if v != self.vertex_of(h) {
                return Err(Error::InconsistentRibbon(format!("half-edge {h} listed at vertex {v}, edge says {}", self.vertex_of(h))));
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.tail >= self.vertices.len() || edge.head >= self.vertices.len() || edge.curve >= self.curves.len() {
                return Err(Error::InconsistentRibbon(format!("edge {e} has dangling endpoints")));
            }
        }
        Ok(())
    }

    fn rotation_successor(&self) -> Vec<usize> {
        let mut next = vec![0; self.half_edge_count()];
        for v in &self.vertices {
            for (i, &h) in v.rotation.iter().enumerate() {
                next[h] = v.rotation[(i + 1) % v.rotation.len()];
            }
        }
        next
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }
}

/// Boundary walks: orbits of `h -> next_at_vertex(twin(h))`, each started at its smallest half-edge.
pub fn trace_boundary(rg: &RibbonGraph) -> Result<Vec<BoundaryWalk>> {
    rg.validate()?;
    let next = rg.rotation_successor();
    let mut seen = vec![false; rg.half_edge_count()];
    let mut walks = Vec::new();
    for start in 0..rg.half_edge_count() {
        if seen[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            walk.push(h);
            h = next[h ^ 1];
        }
        if h != start {
            return Err(Error::InconsistentRibbon("face permutation is not a bijection".into()));
        }
        walks.push(BoundaryWalk { half_edges: walk });
    }
    Ok(walks)
}

/// Euler characteristic `V - E` of the ribbon surface and genus of the capped closed surface.
pub fn euler_and_genus(rg: &RibbonGraph) -> Result<(i64, i64)> {
    if !rg.is_connected() {
        return Err(Error::Disconnected);
    }
    let faces = trace_boundary(rg)?.len() as i64;
    let chi = rg.vertices.len() as i64 - rg.edges.len() as i64;
    let two_g = 2 - (chi + faces);
    if two_g < 0 || two_g % 2 != 0 {
        return Err(Error::InconsistentRibbon(format!("closed Euler characteristic {} is not 2-2g", chi + faces)));
    }
    Ok((chi, two_g / 2))
}

/// H1 of the closed surface obtained by capping every boundary walk with a disk.
#[derive(Clone, Debug, Serialize)]
pub struct HomologyModel {
    pub b: Option<u32>,
    pub sigma_signs: Option<SigmaSigns>,
    pub curves: Vec<CurveId>,
    pub rank: usize,
    pub genus: usize,
    pub boundary_components: usize,
    /// Intersection form J on the lattice basis.
    pub form: IntMatrix,
    /// Row k is the class of `curves[k]`.
    pub classes: IntMatrix,
    /// Pairings of curves read off the crossings.
    pub gram: IntMatrix,
    /// Face cycles written in the curve basis, when the curves form a basis of the graph's cycle space.
    pub face_curve_coefficients: Option<IntMatrix>,
    pub fingerprint: String,
    #[serde(skip)]
    lookup: HashMap<CurveId, usize>,
}

impl HomologyModel {
    pub fn class(&self, c: &CurveId) -> Result<&[i64]> {
        let k = self.lookup.get(c).ok_or_else(|| Error::UnknownCurve(c.name()))?;
        Ok(self.classes.row(*k))
    }

    pub fn contains(&self, c: &CurveId) -> bool {
        self.lookup.contains_key(c)
    }

    /// `<x, y> = x^T J y`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        let jy = self.form.mul_vec(y)?;
        crate::intmat::dot(x, &jy)
    }

    pub fn pair_curves(&self, c1: &CurveId, c2: &CurveId) -> Result<i64> {
        self.pair(self.class(c1)?, self.class(c2)?)
    }
}

/// Curve cycles modulo face boundaries, certified by Smith normal form.
pub fn homology_model(rg: &RibbonGraph) -> Result<HomologyModel> {
    if !rg.is_connected() {
        return Err(Error::Disconnected);
    }
    let walks = trace_boundary(rg)?;
    let (_, genus) = euler_and_genus(rg)?;
    let nv = rg.vertices.len();
    let ne = rg.edges.len();

    // spanning tree; cycles are coordinatized by their non-tree edges
    let mut adj = vec![Vec::new(); nv];
    for (e, edge) in rg.edges.iter().enumerate() {
        adj[edge.tail].push((e, edge.head));
        adj[edge.head].push((e, edge.tail));
    }
    let mut in_tree = vec![false; ne];
    let mut seen = vec![false; nv];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(e, w) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    let mut col = vec![usize::MAX; ne];
    let mut k = 0;
    for e in 0..ne {
        if !in_tree[e] {
            col[e] = k;
            k += 1;
        }
    }

    let nc = rg.curves.len();
    let mut cmat = IntMatrix::zeros(nc, k);
    for (p, es) in rg.curve_edges.iter().enumerate() {
        for &e in es {
            if col[e] != usize::MAX {
                cmat[(p, col[e])] += 1;
            }
        }
    }
    let mut fmat = IntMatrix::zeros(walks.len(), k);
    for (f, w) in walks.iter().enumerate() {
        for &h in &w.half_edges {
            let e = h / 2;
            if col[e] != usize::MAX {
                fmat[(f, col[e])] += if h % 2 == 0 { 1 } else { -1 };
            }
        }
    }

    let snf = fmat.smith()?;
    if !snf.torsion().is_empty() {
        return Err(Error::InvariantViolation(format!("torsion {:?} in the capped homology", snf.torsion())));
    }
    let r = snf.rank();
    if r + 1 != walks.len() {
        return Err(Error::InvariantViolation(format!("{} face relations of rank {r}", walks.len())));
    }
    let rank = k - r;
    // quotient coordinates are the trailing columns after the column transform
    let cv = cmat.mul(&snf.v)?;
    let mut classes = IntMatrix::zeros(nc, rank);
    for i in 0..nc {
        for j in 0..rank {
            classes[(i, j)] = cv[(i, r + j)];
        }
    }
    let q = classes.left_inverse().map_err(|_| Error::InvariantViolation("curve classes do not generate the lattice".into()))?;

    let mut gram = IntMatrix::zeros(nc, nc);
    for x in &rg.crossings {
        let i = rg.curves.iter().position(|c| *c == x.curves.0).unwrap();
        let j = rg.curves.iter().position(|c| *c == x.curves.1).unwrap();
        gram[(i, j)] += x.sign as i64;
        gram[(j, i)] -= x.sign as i64;
    }
    let form = q.mul(&gram)?.mul(&q.transpose())?;
    if !form.is_antisymmetric() {
        return Err(Error::InvariantViolation("intersection form is not antisymmetric".into()));
    }
    if classes.mul(&form)?.mul(&classes.transpose())? != gram {
        return Err(Error::InvariantViolation("crossing data is inconsistent with a form on the quotient".into()));
    }
    if rank > 0 {
        let s = form.smith()?;
        if s.rank() != rank || s.invariants.iter().any(|&x| x != 1) {
            return Err(Error::InvariantViolation("intersection form is not unimodular".into()));
        }
    }
    if rank != 2 * genus as usize {
        return Err(Error::InvariantViolation(format!("lattice rank {rank} but genus {genus}")));
    }

    let face_curve_coefficients = if nc == k {
        cmat.inverse_unimodular().ok().map(|ci| fmat.mul(&ci)).transpose()?
    } else {
        None
    };

    let lookup = rg.curves.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut model = HomologyModel {
        b: None,
        sigma_signs: None,
        curves: rg.curves.clone(),
        rank,
        genus: genus as usize,
        boundary_components: walks.len(),
        form,
        classes,
        gram,
        face_curve_coefficients,
        fingerprint: String::new(),
        lookup,
    };
    model.fingerprint = fingerprint(&model)?;
    Ok(model)
}

fn fingerprint(m: &HomologyModel) -> Result<String> {
    let payload = serde_json::to_vec(&(&m.curves, &m.form, &m.classes))?;
    Ok(hex::encode(Sha256::digest(&payload))[..16].to_string())
}

/// Builds the reference system, its ribbon graph and its homology model in one go.
pub fn reference_model(b: u32, mode: SignMode) -> Result<(CurveSystem, RibbonGraph, HomologyModel)> {
    let sys = build_reference_configuration(b, mode)?;
    let rg = ribbon_from_system(&sys)?;
    let mut model = homology_model(&rg)?;
    model.b = sys.b;
    model.sigma_signs = sys.sigma_signs;
    Ok((sys, rg, model))
}

/// Model of an ad hoc system, e.g. a chain.
pub fn model_of(sys: &CurveSystem) -> Result<HomologyModel> {
    let rg = ribbon_from_system(sys)?;
    let mut model = homology_model(&rg)?;
    model.b = sys.b;
    model.sigma_signs = sys.sigma_signs;
    Ok(model)
}

/// All sixteen σ-sign conventions, `+` before `-` in each slot.
pub fn all_sign_conventions() -> Vec<SigmaSigns> {
    let mut out = Vec::with_capacity(16);
    for mask in 0..16u8 {
        let s = |bit: u8| if mask & (8 >> bit) == 0 { 1 } else { -1 };
        out.push([s(0), s(1), s(2), s(3)]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_counts() {
        let sys = build_reference_configuration(2, SignMode::Auto).unwrap();
        assert_eq!(sys.curves.len(), 13);
        assert_eq!(sys.crossings.len(), 12);
        assert_eq!(sys.sigma_cyclic_order().unwrap(), vec![CurveId::alpha(1), CurveId::beta(1), CurveId::gamma(1), CurveId::delta(1)]);
        assert!(matches!(build_reference_configuration(1, SignMode::Auto), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn ribbon_sizes_and_valence() {
        for (b, v, e) in [(2, 12, 24), (3, 20, 40)] {
            let rg = ribbon_from_system(&build_reference_configuration(b, SignMode::Auto).unwrap()).unwrap();
            assert_eq!((rg.vertices.len(), rg.edges.len()), (v, e));
            assert!(rg.vertices.iter().all(|v| v.rotation.len() == 4));
        }
    }

    #[test]
    fn rotation_alternates_curves() {
        let rg = ribbon_from_system(&build_reference_configuration(2, SignMode::Auto).unwrap()).unwrap();
        for v in &rg.vertices {
            let cs: Vec<usize> = v.rotation.iter().map(|h| rg.edges[h / 2].curve).collect();
            assert_eq!(cs[0], cs[2]);
            assert_eq!(cs[1], cs[3]);
            assert_ne!(cs[0], cs[1]);
        }
    }

    #[test]
    fn annulus_and_single_crossing() {
        let one = ribbon_from_system(&CurveSystem::chain_system(1).unwrap()).unwrap();
        assert_eq!(trace_boundary(&one).unwrap().len(), 2);
        assert_eq!(euler_and_genus(&one).unwrap(), (0, 0));
        let two = ribbon_from_system(&CurveSystem::chain_system(2).unwrap()).unwrap();
        assert_eq!(trace_boundary(&two).unwrap().len(), 1);
    }

    #[test]
    fn reference_topology() {
        let (_, rg, model) = reference_model(2, SignMode::Auto).unwrap();
        assert_eq!(trace_boundary(&rg).unwrap().len(), 4);
        assert_eq!(euler_and_genus(&rg).unwrap(), (-12, 5));
        assert_eq!(model.rank, 10);
        assert_eq!(model.pair_curves(&CurveId::alpha(1), &CurveId::alpha(2)).unwrap(), 1);
        assert_eq!(model.pair_curves(&CurveId::alpha(1), &CurveId::gamma(1)).unwrap(), 0);
    }

    #[test]
    fn degenerate_curve_rejected() {
        let mut sys = CurveSystem::chain_system(1).unwrap();
        sys.incidences[0].clear();
        assert!(matches!(ribbon_from_system(&sys), Err(Error::DegenerateCurve(_))));
    }

    #[test]
    fn corrupted_rotation_rejected() {
        let mut rg = ribbon_from_system(&CurveSystem::chain_system(3).unwrap()).unwrap();
        rg.vertices[0].rotation[1] = rg.vertices[0].rotation[0];
        assert!(matches!(trace_boundary(&rg), Err(Error::InconsistentRibbon(_))));
    }

    #[test]
    fn disconnected_rejected() {
        let sys = CurveSystem::chain_system(3).unwrap().restrict(&[CurveId::alpha(1), CurveId::alpha(3)]).unwrap();
        let rg = ribbon_from_system(&sys).unwrap();
        assert!(matches!(euler_and_genus(&rg), Err(Error::Disconnected)));
    }

    #[test]
    fn curve_names_round_trip() {
        for c in [CurveId::alpha(3), CurveId::delta(11), CurveId::SIGMA] {
            assert_eq!(c.name().parse::<CurveId>().unwrap(), c);
            assert_eq!(c.to_string().parse::<CurveId>().unwrap(), c);
        }
        assert!("alpha0".parse::<CurveId>().is_err());
        assert!("omega2".parse::<CurveId>().is_err());
    }

    #[test]
    fn sign_mode_parsing() {
        assert_eq!("auto".parse::<SignMode>().unwrap(), SignMode::Auto);
        assert_eq!("explicit:+,-,-1,1".parse::<SignMode>().unwrap(), SignMode::Explicit([1, -1, -1, 1]));
        assert!("explicit:+,+".parse::<SignMode>().is_err());
        assert_eq!(all_sign_conventions()[0], [1, 1, 1, 1]);
        assert_eq!(all_sign_conventions().len(), 16);
    }
}
