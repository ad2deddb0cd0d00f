//! Finite algebra engines.
//!
//! Two carriers are supported behind one interface: full (optionally
//! relativized) set algebras over an enumerated point space, and abstract
//! finite Boolean algebras whose cylindrifier and substitution operators are
//! raw lookup tables. Tables are deliberately unconstrained so that operator
//! axiom violations remain expressible; nothing here assumes the operators are
//! lawful.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{capacity, PalgError, Result};
use crate::space::{DimensionSet, Element, PointSpace, Transformation};

/// Carrier enumerations are capped at this many elements.
pub const MAX_CARRIER: usize = 1 << 16;
/// Closure computations stop with a capacity error beyond this many elements.
pub const MAX_CLOSURE: usize = 1 << 16;
/// Abstract algebras carry total operator families; dimension is capped so the
/// substitution family `^dd` stays enumerable.
pub const MAX_TABLE_DIM: u16 = 5;
pub const MAX_ATOMS: u16 = 16;

/// Enumerates `^dd` in lexicographic entry order.
pub fn all_transformations(dim: u16) -> Result<Vec<Transformation>> {
    let count = (dim as usize).max(1).checked_pow(dim as u32).unwrap_or(usize::MAX);
    capacity("transformation family", count, 4096)?;
    if dim == 0 {
        return Ok(vec![Transformation::identity(0)]);
    }
    let mut out = Vec::with_capacity(count);
    let mut entries = vec![0u16; dim as usize];
    loop {
        out.push(Transformation::new(entries.clone())?);
        let mut i = dim as usize;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            entries[i] += 1;
            if entries[i] < dim {
                break;
            }
            entries[i] = 0;
        }
    }
}

/// A unary operator of the polyadic signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorId {
    Cyl(DimensionSet),
    Subst(Transformation),
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorId::Cyl(g) => write!(f, "c{g}"),
            OperatorId::Subst(t) => write!(f, "s{t}"),
        }
    }
}

impl OperatorId {
    pub fn parse(s: &str, dim: u16) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('c') {
            Ok(OperatorId::Cyl(DimensionSet::parse(rest, dim)?))
        } else if let Some(rest) = s.strip_prefix('s') {
            let t: Transformation = rest.parse()?;
            if t.dim() != dim {
                return Err(PalgError::DimensionMismatch {
                    expected: dim as usize,
                    got: t.dim() as usize,
                });
            }
            Ok(OperatorId::Subst(t))
        } else {
            Err(PalgError::UnknownOperator(s.to_string()))
        }
    }
}

/// The set algebra of all subsets of the unit inside `℘(^αU)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullSetAlgebra {
    space: PointSpace,
    unit: Element,
}

impl FullSetAlgebra {
    pub fn full(dim: u16, base: u16) -> Result<Self> {
        let space = PointSpace::new(dim, base)?;
        let unit = Element::ones(space.point_count());
        Ok(FullSetAlgebra { space, unit })
    }

    pub fn with_unit(dim: u16, base: u16, unit: Element) -> Result<Self> {
        let space = PointSpace::new(dim, base)?;
        if unit.len() != space.point_count() {
            return Err(PalgError::DimensionMismatch {
                expected: space.point_count(),
                got: unit.len(),
            });
        }
        Ok(FullSetAlgebra { space, unit })
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn unit(&self) -> &Element {
        &self.unit
    }

    pub fn is_full_unit(&self) -> bool {
        self.unit.count_ones() == self.space.point_count()
    }

    fn check_element(&self, x: &Element) -> Result<()> {
        if x.len() != self.space.point_count() {
            return Err(PalgError::DimensionMismatch {
                expected: self.space.point_count(),
                got: x.len(),
            });
        }
        if !x.le(&self.unit) {
            return Err(PalgError::InvalidElement(
                "element is not below the unit".into(),
            ));
        }
        Ok(())
    }

    /// Per-point index of `s∘τ`, i.e. the point whose membership decides `s ∈ s_τX`.
    pub fn subst_point_map(&self, tau: &Transformation) -> Result<Vec<u32>> {
        if tau.dim() != self.space.dim() {
            return Err(PalgError::DimensionMismatch {
                expected: self.space.dim() as usize,
                got: tau.dim() as usize,
            });
        }
        let dim = self.space.dim() as usize;
        let mut map = Vec::with_capacity(self.space.point_count());
        let mut composed = vec![0u16; dim];
        for s in self.space.points() {
            let seq = self.space.decode(s)?;
            for i in 0..dim {
                composed[i] = seq[tau.apply(i as u16) as usize];
            }
            map.push(self.space.encode(&composed)? as u32);
        }
        Ok(map)
    }

    /// Per-point id of the agreement class off `Γ` (coordinates in `Γ` zeroed).
    pub fn cyl_block_map(&self, gamma: &DimensionSet) -> Result<Vec<u32>> {
        if gamma.dim() != self.space.dim() {
            return Err(PalgError::DimensionMismatch {
                expected: self.space.dim() as usize,
                got: gamma.dim() as usize,
            });
        }
        let mut map = Vec::with_capacity(self.space.point_count());
        for s in self.space.points() {
            let mut seq = self.space.decode(s)?;
            for i in gamma.members() {
                seq[i as usize] = 0;
            }
            map.push(self.space.encode(&seq)? as u32);
        }
        Ok(map)
    }

    /// `c_(Γ)X = {s ∈ unit : ∃t∈X agreeing with s off Γ}`.
    pub fn cyl(&self, gamma: &DimensionSet, x: &Element) -> Result<Element> {
        self.check_element(x)?;
        let blocks = self.cyl_block_map(gamma)?;
        let mut hit = vec![false; self.space.point_count()];
        for t in x.iter_ones() {
            hit[blocks[t] as usize] = true;
        }
        let mut out = Element::zeros(self.space.point_count());
        for s in self.space.points() {
            if hit[blocks[s] as usize] && self.unit.get(s) {
                out.set(s, true);
            }
        }
        Ok(out)
    }

    /// `s_τX = {s ∈ unit : s∘τ ∈ X}`.
    pub fn subst(&self, tau: &Transformation, x: &Element) -> Result<Element> {
        self.check_element(x)?;
        let map = self.subst_point_map(tau)?;
        let mut out = Element::zeros(self.space.point_count());
        for s in self.space.points() {
            if x.get(map[s] as usize) && self.unit.get(s) {
                out.set(s, true);
            }
        }
        Ok(out)
    }
}

/// An abstract finite Boolean algebra with raw operator tables. The carrier is
/// always the powerset of `atoms` bit positions; only the operator tables can
/// deviate from set semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteBAO {
    dim: u16,
    atoms: u16,
    cyl: BTreeMap<DimensionSet, Vec<u64>>,
    subst: BTreeMap<Transformation, Vec<u64>>,
    /// true when the tables were supplied on atoms only and extended additively
    from_atom_tables: bool,
    /// original coordinates when this algebra arose as a compression
    source_coords: Option<Vec<u16>>,
}

impl FiniteBAO {
    pub fn new(
        dim: u16,
        atoms: u16,
        cyl: BTreeMap<DimensionSet, Vec<u64>>,
        subst: BTreeMap<Transformation, Vec<u64>>,
    ) -> Result<Self> {
        capacity("abstract algebra dimension", dim as usize, MAX_TABLE_DIM as usize)?;
        capacity("atom count", atoms as usize, MAX_ATOMS as usize)?;
        let carrier = 1usize << atoms;
        let top = if atoms == 64 { u64::MAX } else { (1u64 << atoms) - 1 };
        for gamma in DimensionSet::all(dim) {
            let table = cyl
                .get(&gamma)
                .ok_or_else(|| PalgError::UnknownOperator(format!("c{gamma} table missing")))?;
            Self::check_table(table, carrier, top, "cylindrifier")?;
        }
        for tau in all_transformations(dim)? {
            let table = subst
                .get(&tau)
                .ok_or_else(|| PalgError::UnknownOperator(format!("s{tau} table missing")))?;
            Self::check_table(table, carrier, top, "substitution")?;
        }
        Ok(FiniteBAO {
            dim,
            atoms,
            cyl,
            subst,
            from_atom_tables: false,
            source_coords: None,
        })
    }

    fn check_table(table: &[u64], carrier: usize, top: u64, what: &str) -> Result<()> {
        if table.len() != carrier {
            return Err(PalgError::Malformed(format!(
                "{what} table has {} entries, carrier needs {carrier}",
                table.len()
            )));
        }
        for &v in table {
            if v & !top != 0 {
                return Err(PalgError::Malformed(format!(
                    "{what} table entry {v:#x} is outside the carrier"
                )));
            }
        }
        Ok(())
    }

    /// Builds the completely additive extension `f(x) = Σ{f(a) : a atom ≤ x}`
    /// from tables given on atoms only.
    pub fn from_atom_tables(
        dim: u16,
        atoms: u16,
        cyl_on_atoms: BTreeMap<DimensionSet, Vec<u64>>,
        subst_on_atoms: BTreeMap<Transformation, Vec<u64>>,
    ) -> Result<Self> {
        let extend = |atom_values: &[u64]| -> Result<Vec<u64>> {
            if atom_values.len() != atoms as usize {
                return Err(PalgError::Malformed(format!(
                    "atom table has {} entries, need {atoms}",
                    atom_values.len()
                )));
            }
            let carrier = 1usize << atoms;
            let mut table = vec![0u64; carrier];
            for x in 0..carrier {
                let mut acc = 0u64;
                for (i, &v) in atom_values.iter().enumerate() {
                    if x >> i & 1 == 1 {
                        acc |= v;
                    }
                }
                table[x] = acc;
            }
            Ok(table)
        };
        let mut cyl = BTreeMap::new();
        for (g, t) in &cyl_on_atoms {
            cyl.insert(*g, extend(t)?);
        }
        let mut subst = BTreeMap::new();
        for (s, t) in &subst_on_atoms {
            subst.insert(s.clone(), extend(t)?);
        }
        let mut bao = FiniteBAO::new(dim, atoms, cyl, subst)?;
        bao.from_atom_tables = true;
        Ok(bao)
    }

    pub fn dim(&self) -> u16 {
        self.dim
    }

    pub fn atom_count(&self) -> u16 {
        self.atoms
    }

    pub fn from_atom_tables_flag(&self) -> bool {
        self.from_atom_tables
    }

    pub fn source_coords(&self) -> Option<&[u16]> {
        self.source_coords.as_deref()
    }

    pub fn cyl_table(&self, gamma: &DimensionSet) -> Result<&[u64]> {
        self.cyl
            .get(gamma)
            .map(|v| v.as_slice())
            .ok_or_else(|| PalgError::UnknownOperator(format!("c{gamma}")))
    }

    pub fn subst_table(&self, tau: &Transformation) -> Result<&[u64]> {
        self.subst
            .get(tau)
            .map(|v| v.as_slice())
            .ok_or_else(|| PalgError::UnknownOperator(format!("s{tau}")))
    }

    /// Overwrites a single table entry; the standing way to build mutants.
    pub fn corrupt(&mut self, op: &OperatorId, at: u64, value: u64) -> Result<()> {
        let carrier = 1u64 << self.atoms;
        if at >= carrier || value >= carrier {
            return Err(PalgError::OutOfRange {
                what: "table index",
                value: at.max(value) as usize,
                limit: carrier as usize - 1,
            });
        }
        let table = match op {
            OperatorId::Cyl(g) => self
                .cyl
                .get_mut(g)
                .ok_or_else(|| PalgError::UnknownOperator(format!("c{g}")))?,
            OperatorId::Subst(t) => self
                .subst
                .get_mut(t)
                .ok_or_else(|| PalgError::UnknownOperator(format!("s{t}")))?,
        };
        table[at as usize] = value;
        Ok(())
    }

    /// The standing 2-atom example of a normal unary table that is not
    /// additive: on atoms a, b it fixes both, yet sends the top to a.
    pub fn two_atom_non_additive() -> FiniteBAO {
        let mut cyl = BTreeMap::new();
        cyl.insert(DimensionSet::empty(1), vec![0, 1, 2, 3]);
        cyl.insert(
            DimensionSet::from_members(1, [0]).unwrap(),
            vec![0, 3, 3, 3],
        );
        let mut subst = BTreeMap::new();
        subst.insert(Transformation::identity(1), vec![0, 1, 2, 1]);
        FiniteBAO::new(1, 2, cyl, subst).unwrap()
    }
}

/// One handle over both carrier kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Algebra {
    Set(FullSetAlgebra),
    Table(FiniteBAO),
}

impl Algebra {
    pub fn full_set(dim: u16, base: u16) -> Result<Self> {
        Ok(Algebra::Set(FullSetAlgebra::full(dim, base)?))
    }

    pub fn dim(&self) -> u16 {
        match self {
            Algebra::Set(a) => a.space().dim(),
            Algebra::Table(b) => b.dim,
        }
    }

    /// Bit length of the element masks of this algebra.
    pub fn element_len(&self) -> usize {
        match self {
            Algebra::Set(a) => a.space().point_count(),
            Algebra::Table(b) => b.atoms as usize,
        }
    }

    pub fn zero(&self) -> Element {
        Element::zeros(self.element_len())
    }

    pub fn one(&self) -> Element {
        match self {
            Algebra::Set(a) => a.unit().clone(),
            Algebra::Table(b) => Element::ones(b.atoms as usize),
        }
    }

    pub fn complement(&self, x: &Element) -> Result<Element> {
        match self {
            Algebra::Set(a) => {
                a.check_element(x)?;
                a.unit().minus(x)
            }
            Algebra::Table(_) => Ok(x.not()),
        }
    }

    pub fn and(&self, x: &Element, y: &Element) -> Result<Element> {
        x.and(y)
    }

    pub fn or(&self, x: &Element, y: &Element) -> Result<Element> {
        x.or(y)
    }

    pub fn cyl(&self, gamma: &DimensionSet, x: &Element) -> Result<Element> {
        match self {
            Algebra::Set(a) => a.cyl(gamma, x),
            Algebra::Table(b) => {
                let table = b.cyl_table(gamma)?;
                Element::from_u64(b.atoms as usize, table[x.as_u64() as usize])
            }
        }
    }

    pub fn subst(&self, tau: &Transformation, x: &Element) -> Result<Element> {
        match self {
            Algebra::Set(a) => a.subst(tau, x),
            Algebra::Table(b) => {
                let table = b.subst_table(tau)?;
                Element::from_u64(b.atoms as usize, table[x.as_u64() as usize])
            }
        }
    }

    pub fn apply(&self, op: &OperatorId, x: &Element) -> Result<Element> {
        match op {
            OperatorId::Cyl(g) => self.cyl(g, x),
            OperatorId::Subst(t) => self.subst(t, x),
        }
    }

    /// All unary operators of the signature, cylindrifiers first.
    pub fn operators(&self) -> Result<Vec<OperatorId>> {
        let dim = self.dim();
        let mut ops: Vec<OperatorId> = DimensionSet::all(dim).map(OperatorId::Cyl).collect();
        ops.extend(all_transformations(dim)?.into_iter().map(OperatorId::Subst));
        Ok(ops)
    }

    /// Atoms in ascending mask order.
    pub fn atoms(&self) -> Vec<Element> {
        match self {
            Algebra::Set(a) => a
                .unit()
                .iter_ones()
                .map(|i| Element::singleton(a.space().point_count(), i))
                .collect(),
            Algebra::Table(b) => (0..b.atoms as usize)
                .map(|i| Element::singleton(b.atoms as usize, i))
                .collect(),
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Algebra::Set(a) => a.unit().count_ones(),
            Algebra::Table(b) => b.atoms as usize,
        }
    }

    /// Full carrier in ascending mask order; capacity-gated.
    pub fn carrier(&self) -> Result<Vec<Element>> {
        let bits = self.atom_count();
        capacity("carrier enumeration", bits, 16)?;
        match self {
            Algebra::Set(a) => {
                if a.is_full_unit() {
                    let pc = a.space().point_count();
                    Ok((0..1usize << pc)
                        .map(|m| Element::from_u64(pc, m as u64).unwrap())
                        .collect())
                } else {
                    Ok(a.unit().subsets()?.collect())
                }
            }
            Algebra::Table(b) => {
                let n = b.atoms as usize;
                Ok((0..1usize << n)
                    .map(|m| Element::from_u64(n, m as u64).unwrap())
                    .collect())
            }
        }
    }

    pub fn carrier_len(&self) -> Result<usize> {
        let bits = self.atom_count();
        capacity("carrier enumeration", bits, 16)?;
        Ok(1usize << bits)
    }

    pub fn contains(&self, x: &Element) -> bool {
        match self {
            Algebra::Set(a) => x.len() == a.space().point_count() && x.le(a.unit()),
            Algebra::Table(b) => x.len() == b.atoms as usize,
        }
    }
}

/// Least subset containing the generators and the unit, closed under
/// complement-in-unit, intersection, every cylindrifier and every
/// substitution; ascending mask order.
pub fn generated_subalgebra(algebra: &Algebra, generators: &[Element]) -> Result<Vec<Element>> {
    use std::collections::BTreeSet;
    let ops = algebra.operators()?;
    let mut set: BTreeSet<Element> = BTreeSet::new();
    let mut queue: Vec<Element> = Vec::new();
    let push = |set: &mut BTreeSet<Element>, queue: &mut Vec<Element>, e: Element| -> Result<()> {
        if set.insert(e.clone()) {
            capacity("generated subalgebra", set.len(), MAX_CLOSURE)?;
            queue.push(e);
        }
        Ok(())
    };
    push(&mut set, &mut queue, algebra.one())?;
    for g in generators {
        if !algebra.contains(g) {
            return Err(PalgError::InvalidElement(
                "generator is not an element of the algebra".into(),
            ));
        }
        push(&mut set, &mut queue, g.clone())?;
    }
    while let Some(e) = queue.pop() {
        push(&mut set, &mut queue, algebra.complement(&e)?)?;
        for op in &ops {
            push(&mut set, &mut queue, algebra.apply(op, &e)?)?;
        }
        let snapshot: Vec<Element> = set.iter().cloned().collect();
        for f in snapshot {
            push(&mut set, &mut queue, e.and(&f)?)?;
        }
    }
    Ok(set.into_iter().collect())
}

/// The compression of the algebra onto the coordinates in `J`: carrier is the
/// fixed points of `c_(dim∖J)`, cylindrifiers restrict to subsets of `J`, and
/// substitutions extend by the identity off `J`. The result is re-indexed onto
/// `{0,…,|J|−1}` with the original coordinates kept as metadata.
pub fn neat_reduct(algebra: &Algebra, j: &DimensionSet) -> Result<FiniteBAO> {
    let dim = algebra.dim();
    if j.dim() != dim {
        return Err(PalgError::DimensionMismatch {
            expected: dim as usize,
            got: j.dim() as usize,
        });
    }
    let co_j = j.complement();
    let carrier = algebra.carrier()?;
    let mut fixed: Vec<Element> = Vec::new();
    for x in &carrier {
        if algebra.cyl(&co_j, x)? == *x {
            fixed.push(x.clone());
        }
    }
    capacity("compression carrier", fixed.len(), 4096)?;

    // Boolean closure of the fixed-point set; fails only on lawless tables.
    let closed = |e: &Element| fixed.binary_search(e).is_ok();
    for x in &fixed {
        if !closed(&algebra.complement(x)?) {
            return Err(PalgError::Unsupported(
                "fixed points of the compression are not closed under complement".into(),
            ));
        }
        for y in &fixed {
            if !closed(&x.and(y)?) {
                return Err(PalgError::Unsupported(
                    "fixed points of the compression are not closed under meet".into(),
                ));
            }
        }
    }

    // Atoms of the compressed Boolean algebra.
    let mut atoms: Vec<Element> = Vec::new();
    'outer: for x in &fixed {
        if x.is_zero() {
            continue;
        }
        for y in &fixed {
            if !y.is_zero() && y != x && y.le(x) {
                continue 'outer;
            }
        }
        atoms.push(x.clone());
    }
    capacity("compression atoms", atoms.len(), MAX_ATOMS as usize)?;
    let n = atoms.len() as u16;
    if 1usize << n != fixed.len() {
        return Err(PalgError::Unsupported(
            "compression carrier is not the powerset of its atoms".into(),
        ));
    }

    let mask_of = |e: &Element| -> u64 {
        let mut m = 0u64;
        for (i, a) in atoms.iter().enumerate() {
            if a.le(e) {
                m |= 1 << i;
            }
        }
        m
    };
    // element of the big algebra realizing each compressed mask
    let mut realize: Vec<Option<Element>> = vec![None; 1 << n];
    for x in &fixed {
        realize[mask_of(x) as usize] = Some(x.clone());
    }
    let realize: Vec<Element> = realize
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| {
            PalgError::Unsupported("compression carrier is not the powerset of its atoms".into())
        })?;

    let coords: Vec<u16> = j.members().collect();
    let sub_dim = coords.len() as u16;
    let mut cyl = BTreeMap::new();
    for gamma_sub in DimensionSet::all(sub_dim) {
        let gamma =
            DimensionSet::from_members(dim, gamma_sub.members().map(|k| coords[k as usize]))?;
        let mut table = vec![0u64; 1 << n];
        for (m, x) in realize.iter().enumerate() {
            let r = algebra.cyl(&gamma, x)?;
            if !closed(&r) {
                return Err(PalgError::Unsupported(
                    "cylindrifier leaves the compression carrier".into(),
                ));
            }
            table[m] = mask_of(&r);
        }
        cyl.insert(gamma_sub, table);
    }
    let mut subst = BTreeMap::new();
    for tau_sub in all_transformations(sub_dim)? {
        let mut entries: Vec<u16> = (0..dim).collect();
        for (k, &c) in coords.iter().enumerate() {
            entries[c as usize] = coords[tau_sub.apply(k as u16) as usize];
        }
        let tau_bar = Transformation::new(entries)?;
        let mut table = vec![0u64; 1 << n];
        for (m, x) in realize.iter().enumerate() {
            let r = algebra.subst(&tau_bar, x)?;
            if !closed(&r) {
                return Err(PalgError::Unsupported(
                    "substitution leaves the compression carrier".into(),
                ));
            }
            table[m] = mask_of(&r);
        }
        subst.insert(tau_sub, table);
    }
    let mut bao = FiniteBAO::new(sub_dim, n, cyl, subst)?;
    bao.source_coords = Some(coords);
    Ok(bao)
}

/// Materializes any small algebra as an explicit table algebra.
pub fn to_table_algebra(algebra: &Algebra) -> Result<FiniteBAO> {
    neat_reduct(algebra, &DimensionSet::full(algebra.dim()))
}

/// Smallest `J` with `c_({i})X = X` for every `i ∉ J`; full units only.
pub fn minimal_support(algebra: &FullSetAlgebra, x: &Element) -> Result<DimensionSet> {
    if !algebra.is_full_unit() {
        return Err(PalgError::Unsupported(
            "supports are computed on full units only".into(),
        ));
    }
    algebra.check_element(x)?;
    let dim = algebra.space().dim();
    let mut members = Vec::new();
    for i in 0..dim {
        let gi = DimensionSet::from_members(dim, [i])?;
        if algebra.cyl(&gi, x)? != *x {
            members.push(i);
        }
    }
    DimensionSet::from_members(dim, members)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub effective_degree: u16,
    pub local_degree: u16,
    pub effective_cardinality: usize,
}

/// Effective degree, local degree and effective cardinality of a full set
/// algebra, by exhaustive support computation over the carrier.
pub fn degree_report(algebra: &FullSetAlgebra) -> Result<DegreeReport> {
    if !algebra.is_full_unit() {
        return Err(PalgError::Unsupported(
            "degrees are computed on full units only".into(),
        ));
    }
    let handle = Algebra::Set(algebra.clone());
    let carrier = handle.carrier()?;
    let mut effective = 0u16;
    for x in &carrier {
        let s = minimal_support(algebra, x)?;
        effective = effective.max(s.len() as u16);
    }
    let j = DimensionSet::from_members(algebra.space().dim(), 0..effective)?;
    let nr = neat_reduct(&handle, &j)?;
    Ok(DegreeReport {
        effective_degree: effective,
        local_degree: effective + 1,
        effective_cardinality: 1usize << nr.atom_count(),
    })
}

/// Output of the two-dimensional partition construction.
#[derive(Debug, Clone)]
pub struct PartitionAlgebra {
    pub algebra: FullSetAlgebra,
    /// generator `R_X` per subset `X` of the non-diagonal block indices
    pub generators: Vec<(Vec<u16>, Element)>,
    pub subalgebra: Vec<Element>,
}

/// Builds the relativized dimension-2 set algebra generated by the relations
/// `R_X` over a partition of `U×U` whose block 0 is the diagonal, with the
/// (principal) ultrafilter generated by `{principal}`.
pub fn partition_algebra(
    base: u16,
    blocks: &[Element],
    principal: usize,
) -> Result<PartitionAlgebra> {
    let space = PointSpace::new(2, base)?;
    let pc = space.point_count();
    if blocks.is_empty() {
        return Err(PalgError::MalformedPartition("no blocks supplied".into()));
    }
    let mut union = Element::zeros(pc);
    let mut total = 0usize;
    for (k, b) in blocks.iter().enumerate() {
        if b.len() != pc {
            return Err(PalgError::MalformedPartition(format!(
                "block {k} has bit length {}, space has {pc} points",
                b.len()
            )));
        }
        if b.is_zero() {
            return Err(PalgError::MalformedPartition(format!("block {k} is empty")));
        }
        union = union.or(b)?;
        total += b.count_ones();
    }
    if total != pc || union.count_ones() != pc {
        return Err(PalgError::MalformedPartition(
            "blocks do not partition U×U".into(),
        ));
    }
    let mut diagonal = Element::zeros(pc);
    for x in 0..base {
        diagonal.set(space.encode(&[x, x])?, true);
    }
    if blocks[0] != diagonal {
        return Err(PalgError::MalformedPartition(
            "block 0 is not exactly the diagonal".into(),
        ));
    }
    let swap = Transformation::new(vec![1, 0])?;
    let ambient = FullSetAlgebra::full(2, base)?;
    for (k, b) in blocks.iter().enumerate().skip(1) {
        if ambient.subst(&swap, b)? != *b {
            return Err(PalgError::MalformedPartition(format!(
                "block {k} is not symmetric"
            )));
        }
        let mut dom = vec![false; base as usize];
        let mut range = vec![false; base as usize];
        for p in b.iter_ones() {
            let seq = space.decode(p)?;
            dom[seq[0] as usize] = true;
            range[seq[1] as usize] = true;
        }
        if !dom.iter().all(|&d| d) || !range.iter().all(|&r| r) {
            return Err(PalgError::MalformedPartition(format!(
                "block {k} does not have full domain and range"
            )));
        }
    }
    if principal == 0 || principal >= blocks.len() {
        return Err(PalgError::MalformedPartition(format!(
            "principal index {principal} does not name a non-diagonal block"
        )));
    }

    let non_diag = blocks.len() - 1;
    capacity("partition generator family", 1usize << non_diag, 1 << 12)?;
    let r_x = |x_mask: usize| -> Result<Element> {
        let mut r = Element::zeros(pc);
        for k in 0..non_diag {
            if x_mask >> k & 1 == 1 {
                r = r.or(&blocks[k + 1])?;
            }
        }
        // principal ultrafilter: X ∈ F iff it contains the principal index
        if x_mask >> (principal - 1) & 1 == 1 {
            r = r.or(&blocks[0])?;
        }
        Ok(r)
    };
    let unit = r_x((1usize << non_diag) - 1)?;
    let algebra = FullSetAlgebra::with_unit(2, base, unit)?;
    let mut generators = Vec::new();
    for x_mask in 0..1usize << non_diag {
        let members: Vec<u16> = (0..non_diag)
            .filter(|k| x_mask >> k & 1 == 1)
            .map(|k| (k + 1) as u16)
            .collect();
        generators.push((members, r_x(x_mask)?));
    }
    let gen_elements: Vec<Element> = generators.iter().map(|(_, e)| e.clone()).collect();
    let subalgebra = generated_subalgebra(&Algebra::Set(algebra.clone()), &gen_elements)?;
    Ok(PartitionAlgebra {
        algebra,
        generators,
        subalgebra,
    })
}

// ---------------------------------------------------------------------------
// serialization

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum AlgebraSpec {
    #[serde(rename = "full_set_algebra")]
    FullSet {
        dim: u16,
        base: u16,
        #[serde(skip_serializing_if = "Option::is_none")]
        unit: Option<Element>,
    },
    #[serde(rename = "abstract")]
    Abstract {
        dim: u16,
        atoms: u16,
        cyl: BTreeMap<String, Vec<u64>>,
        subst: BTreeMap<String, Vec<u64>>,
        #[serde(default)]
        on_atoms: bool,
    },
}

impl Algebra {
    pub fn from_json(text: &str) -> Result<Algebra> {
        let spec: AlgebraSpec = serde_json::from_str(text)?;
        match spec {
            AlgebraSpec::FullSet { dim, base, unit } => match unit {
                None => Algebra::full_set(dim, base),
                Some(u) => Ok(Algebra::Set(FullSetAlgebra::with_unit(dim, base, u)?)),
            },
            AlgebraSpec::Abstract {
                dim,
                atoms,
                cyl,
                subst,
                on_atoms,
            } => {
                let mut cyl_tables = BTreeMap::new();
                for (k, v) in cyl {
                    cyl_tables.insert(DimensionSet::parse(&k, dim)?, v);
                }
                let mut subst_tables = BTreeMap::new();
                for (k, v) in subst {
                    let t: Transformation = k.parse()?;
                    if t.dim() != dim {
                        return Err(PalgError::DimensionMismatch {
                            expected: dim as usize,
                            got: t.dim() as usize,
                        });
                    }
                    subst_tables.insert(t, v);
                }
                let bao = if on_atoms {
                    FiniteBAO::from_atom_tables(dim, atoms, cyl_tables, subst_tables)?
                } else {
                    FiniteBAO::new(dim, atoms, cyl_tables, subst_tables)?
                };
                Ok(Algebra::Table(bao))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let spec = match self {
            Algebra::Set(a) => AlgebraSpec::FullSet {
                dim: a.space().dim(),
                base: a.space().base(),
                unit: if a.is_full_unit() {
                    None
                } else {
                    Some(a.unit().clone())
                },
            },
            Algebra::Table(b) => AlgebraSpec::Abstract {
                dim: b.dim,
                atoms: b.atoms,
                cyl: b
                    .cyl
                    .iter()
                    .map(|(g, t)| (g.to_string(), t.clone()))
                    .collect(),
                subst: b
                    .subst
                    .iter()
                    .map(|(s, t)| (s.to_string(), t.clone()))
                    .collect(),
                on_atoms: false,
            },
        };
        Ok(serde_json::to_string_pretty(&spec)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the cylindrification definition on explicit
    /// sequences; the independent route for the frozen values below.
    fn naive_cyl(dim: u16, base: u16, gamma: &[u16], points: &[Vec<u16>]) -> Vec<Vec<u16>> {
        let space = PointSpace::new(dim, base).unwrap();
        let mut out = Vec::new();
        for s in space.points() {
            let seq = space.decode(s).unwrap();
            let witnessed = points.iter().any(|t| {
                (0..dim as usize).all(|j| gamma.contains(&(j as u16)) || t[j] == seq[j])
            });
            if witnessed {
                out.push(seq);
            }
        }
        out
    }

    fn elt(a: &FullSetAlgebra, points: &[&[u16]]) -> Element {
        let mut e = Element::zeros(a.space().point_count());
        for p in points {
            e.set(a.space().encode(p).unwrap(), true);
        }
        e
    }

    #[test]
    fn cyl_examples() {
        let a = FullSetAlgebra::full(2, 2).unwrap();
        let x = elt(&a, &[&[0, 1]]);
        // oracle: enumerate the 4 points
        let expect = naive_cyl(2, 2, &[0], &[vec![0, 1]]);
        assert_eq!(expect, vec![vec![0, 1], vec![1, 1]]);
        let g0 = DimensionSet::from_members(2, [0]).unwrap();
        assert_eq!(a.cyl(&g0, &x).unwrap(), elt(&a, &[&[0, 1], &[1, 1]]));
        assert_eq!(a.cyl(&g0, &x).unwrap().to_string(), "0xa:4");

        // c_(Γ)0 = 0 and empty cylindrification is the identity
        let zero = Element::zeros(4);
        assert_eq!(a.cyl(&DimensionSet::full(2), &zero).unwrap(), zero);
        assert_eq!(a.cyl(&DimensionSet::empty(2), &x).unwrap(), x);
    }

    #[test]
    fn subst_examples() {
        let a = FullSetAlgebra::full(2, 2).unwrap();
        let x = elt(&a, &[&[0, 1]]);
        let swap = Transformation::new(vec![1, 0]).unwrap();
        assert_eq!(a.subst(&swap, &x).unwrap(), elt(&a, &[&[1, 0]]));
        assert_eq!(a.subst(&Transformation::identity(2), &x).unwrap(), x);
        let collapse = Transformation::new(vec![0, 0]).unwrap();
        assert!(a.subst(&collapse, &x).unwrap().is_zero());
    }

    #[test]
    fn subst_is_boolean_endomorphism_on_full_units() {
        // postulate 6, exhaustive for point_count ≤ 10
        for (dim, base) in [(1u16, 2u16), (2, 2), (2, 3), (3, 2)] {
            let a = FullSetAlgebra::full(dim, base).unwrap();
            let h = Algebra::Set(a.clone());
            let carrier = h.carrier().unwrap();
            for tau in all_transformations(dim).unwrap() {
                for x in &carrier {
                    let sx = a.subst(&tau, x).unwrap();
                    assert_eq!(a.subst(&tau, &x.not()).unwrap(), sx.not());
                    for y in carrier.iter().take(8) {
                        let sy = a.subst(&tau, y).unwrap();
                        assert_eq!(
                            a.subst(&tau, &x.or(y).unwrap()).unwrap(),
                            sx.or(&sy).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cyl_distribution_postulate4_small() {
        for (dim, base) in [(1u16, 2u16), (2, 2), (1, 3)] {
            let a = FullSetAlgebra::full(dim, base).unwrap();
            let h = Algebra::Set(a.clone());
            let carrier = h.carrier().unwrap();
            for gamma in DimensionSet::all(dim) {
                for x in &carrier {
                    for y in &carrier {
                        let cy = a.cyl(&gamma, y).unwrap();
                        let lhs = a.cyl(&gamma, &x.and(&cy).unwrap()).unwrap();
                        let rhs = a.cyl(&gamma, x).unwrap().and(&cy).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn generated_subalgebra_examples() {
        let a = Algebra::full_set(1, 2).unwrap();
        let empty = generated_subalgebra(&a, &[]).unwrap();
        assert_eq!(empty.len(), 2); // {0, 1}
        let unit_only = generated_subalgebra(&a, &[a.one()]).unwrap();
        assert_eq!(unit_only.len(), 2);
        let atom = Element::singleton(2, 0);
        let all = generated_subalgebra(&a, &[atom]).unwrap();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn neat_reduct_examples() {
        let a = Algebra::full_set(2, 2).unwrap();
        // J = {0}: fixed points of c_({1}) computed over all 16 elements
        let j0 = DimensionSet::from_members(2, [0]).unwrap();
        let nr = neat_reduct(&a, &j0).unwrap();
        assert_eq!(nr.dim(), 1);
        assert_eq!(nr.atom_count(), 2);
        assert_eq!(nr.source_coords(), Some(&[0u16][..]));
        // cylindrifying the re-indexed {0} sends both atoms to the top
        let g = DimensionSet::from_members(1, [0]).unwrap();
        assert_eq!(nr.cyl_table(&g).unwrap(), &[0, 3, 3, 3]);

        // J = full dimension gives the algebra itself
        let full = neat_reduct(&a, &DimensionSet::full(2)).unwrap();
        assert_eq!(full.atom_count(), 4);

        // J = ∅ leaves only {0, 1}
        let nothing = neat_reduct(&a, &DimensionSet::empty(2)).unwrap();
        assert_eq!(nothing.atom_count(), 1);
        assert_eq!(nothing.dim(), 0);
    }

    #[test]
    fn neat_reduct_of_full_algebra_matches_smaller_space() {
        // Nr_J(℘(^αU)) ≅ ℘(^JU) with matching operations, brute force.
        for (dim, base, j_members) in [
            (2u16, 2u16, vec![0u16]),
            (3, 2, vec![0, 1]),
            (3, 2, vec![1]),
            (2, 2, vec![1]),
        ] {
            let big = Algebra::full_set(dim, base).unwrap();
            let j = DimensionSet::from_members(dim, j_members.iter().copied()).unwrap();
            let nr = neat_reduct(&big, &j).unwrap();
            let small = Algebra::full_set(j_members.len() as u16, base).unwrap();
            let small_table = to_table_algebra(&small).unwrap();
            // same operator tables after the canonical re-indexing
            assert_eq!(nr.atom_count(), small_table.atom_count());
            for gamma in DimensionSet::all(nr.dim()) {
                assert_eq!(
                    nr.cyl_table(&gamma).unwrap(),
                    small_table.cyl_table(&gamma).unwrap(),
                    "cyl {gamma} differs for J={j}"
                );
            }
            for tau in all_transformations(nr.dim()).unwrap() {
                assert_eq!(
                    nr.subst_table(&tau).unwrap(),
                    small_table.subst_table(&tau).unwrap(),
                    "subst {tau} differs for J={j}"
                );
            }
        }
    }

    #[test]
    fn minimal_support_examples() {
        let a = FullSetAlgebra::full(2, 2).unwrap();
        let x = elt(&a, &[&[0, 0], &[0, 1]]);
        assert_eq!(
            minimal_support(&a, &x).unwrap(),
            DimensionSet::from_members(2, [0]).unwrap()
        );
        assert!(minimal_support(&a, &Element::zeros(4)).unwrap().is_empty());
        // support of c_({i})X excludes i
        let g0 = DimensionSet::from_members(2, [0]).unwrap();
        let y = elt(&a, &[&[0, 1]]);
        let cy = a.cyl(&g0, &y).unwrap();
        assert!(!minimal_support(&a, &cy).unwrap().contains(0));
    }

    #[test]
    fn degree_report_example() {
        let a = FullSetAlgebra::full(2, 2).unwrap();
        let report = degree_report(&a).unwrap();
        assert_eq!(report.effective_degree, 2);
        assert_eq!(report.local_degree, 3);
        assert_eq!(report.effective_cardinality, 16);
    }

    #[test]
    fn degree_rejects_relativized_units() {
        let unit = Element::from_u64(4, 0b0111).unwrap();
        let a = FullSetAlgebra::with_unit(2, 2, unit).unwrap();
        assert!(degree_report(&a).is_err());
        assert!(minimal_support(&a, &Element::zeros(4)).is_err());
    }

    fn off_diagonal(base: u16) -> Element {
        let space = PointSpace::new(2, base).unwrap();
        let mut e = Element::ones(space.point_count());
        for x in 0..base {
            e.set(space.encode(&[x, x]).unwrap(), false);
        }
        e
    }

    fn diagonal(base: u16) -> Element {
        off_diagonal(base).not()
    }

    #[test]
    fn partition_algebra_single_block() {
        // u=3, one off-diagonal block: R_{{1}} is the unit, subalgebra trivial
        let blocks = vec![diagonal(3), off_diagonal(3)];
        let pa = partition_algebra(3, &blocks, 1).unwrap();
        assert_eq!(pa.algebra.unit(), &Element::ones(9));
        assert_eq!(pa.generators.len(), 2);
        assert_eq!(pa.generators[1].1, Element::ones(9));
        assert_eq!(pa.subalgebra.len(), 2);
    }

    #[test]
    fn partition_algebra_two_blocks() {
        // u=4 split into the diagonal and two symmetric full-domain blocks:
        // Q1 joins x,y differing by 1 or 3 mod 4, Q2 joins opposite corners.
        let space = PointSpace::new(2, 4).unwrap();
        let mut q1 = Element::zeros(16);
        let mut q2 = Element::zeros(16);
        for x in 0..4u16 {
            for y in 0..4u16 {
                if x == y {
                    continue;
                }
                let idx = space.encode(&[x, y]).unwrap();
                if (x + 4 - y) % 4 == 2 {
                    q2.set(idx, true);
                } else {
                    q1.set(idx, true);
                }
            }
        }
        let blocks = vec![diagonal(4), q1.clone(), q2.clone()];
        let pa = partition_algebra(4, &blocks, 1).unwrap();
        // R_{{2}} = Q2 is an atom of the generated subalgebra
        assert_eq!(pa.generators[2].1, q2);
        let q2_is_atom = pa
            .subalgebra
            .iter()
            .filter(|e| !e.is_zero() && Element::le(e, &q2))
            .all(|e| *e == q2);
        assert!(pa.subalgebra.contains(&q2) && q2_is_atom);
    }

    #[test]
    fn partition_algebra_rejects_malformed_input() {
        // missing diagonal
        let blocks = vec![off_diagonal(3), diagonal(3)];
        let err = partition_algebra(3, &blocks, 1).unwrap_err();
        assert!(err.to_string().contains("diagonal"));
        // asymmetric block
        let space = PointSpace::new(2, 2).unwrap();
        let mut asym = Element::zeros(4);
        asym.set(space.encode(&[0, 1]).unwrap(), true);
        let mut rest = off_diagonal(2).minus(&asym).unwrap();
        rest = rest.or(&Element::zeros(4)).unwrap();
        let err = partition_algebra(2, &[diagonal(2), asym, rest], 1).unwrap_err();
        assert!(err.to_string().contains("symmetric"));
    }

    #[test]
    fn two_atom_non_additive_shape() {
        let b = FiniteBAO::two_atom_non_additive();
        let g = b.subst_table(&Transformation::identity(1)).unwrap();
        assert_eq!(g, &[0, 1, 2, 1]);
    }

    #[test]
    fn algebra_json_round_trip() {
        let a = Algebra::full_set(2, 2).unwrap();
        let text = a.to_json().unwrap();
        assert_eq!(Algebra::from_json(&text).unwrap(), a);

        let b = Algebra::Table(FiniteBAO::two_atom_non_additive());
        let text = b.to_json().unwrap();
        assert_eq!(Algebra::from_json(&text).unwrap(), b);

        // atom-supplied tables extend additively and record the mode
        let json = r#"{
            "kind": "abstract", "dim": 1, "atoms": 2,
            "cyl": {"{}": [1, 2], "{0}": [3, 3]},
            "subst": {"[0]": [1, 2]},
            "on_atoms": true
        }"#;
        let c = Algebra::from_json(json).unwrap();
        if let Algebra::Table(b) = &c {
            assert!(b.from_atom_tables_flag());
            assert_eq!(b.cyl_table(&DimensionSet::from_members(1, [0]).unwrap()).unwrap(), &[0, 3, 3, 3]);
            assert_eq!(b.subst_table(&Transformation::identity(1)).unwrap(), &[0, 1, 2, 3]);
        } else {
            panic!("expected table algebra");
        }
    }

    #[test]
    fn relativized_operations_stay_below_unit() {
        let unit = Element::from_u64(4, 0b0111).unwrap();
        let a = FullSetAlgebra::with_unit(2, 2, unit.clone()).unwrap();
        let h = Algebra::Set(a.clone());
        for x in h.carrier().unwrap() {
            for gamma in DimensionSet::all(2) {
                assert!(a.cyl(&gamma, &x).unwrap().le(&unit));
            }
            for tau in all_transformations(2).unwrap() {
                assert!(a.subst(&tau, &x).unwrap().le(&unit));
            }
        }
        // elements above the unit are rejected
        assert!(a.cyl(&DimensionSet::empty(2), &Element::ones(4)).is_err());
    }
}
