//! NNF circuits in the c2d text format, structural validation, exact model
//! counting for d-DNNF, conditioning, a Shannon-expansion builder and the
//! extraction of balanced disjoint rectangle covers.
//!
//! Gates are stored in topological order (children before parents) and the
//! last gate is the root. Variables are 0-based internally and 1-based in the
//! text format.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfun::{var_cap, TruthTable};
use crate::error::{Error, Result};
use crate::rational::pow2;
use crate::rect::{rectangle_from_models, verify_cover, Cover, CoverRequirements, Partition};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Gate {
    Lit {
        var: usize,
        positive: bool,
    },
    True,
    False,
    And {
        children: Vec<usize>,
    },
    /// `decision` is the 1-based decision variable of the c2d format, or 0.
    Or {
        decision: usize,
        children: Vec<usize>,
    },
}

impl Gate {
    pub fn children(&self) -> &[usize] {
        match self {
            Gate::And { children } | Gate::Or { children, .. } => children,
            _ => &[],
        }
    }
}

/// A set of variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VarSet {
    words: Vec<u64>,
}

impl VarSet {
    pub fn singleton(v: usize) -> Self {
        let mut s = Self::default();
        s.insert(v);
        s
    }

    pub fn insert(&mut self, v: usize) {
        if self.words.len() <= v / 64 {
            self.words.resize(v / 64 + 1, 0);
        }
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w >> (v % 64) & 1 == 1)
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Smallest shared variable.
    pub fn first_common(&self, other: &Self) -> Option<usize> {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| *a & *b != 0)
            .map(|(i, (a, b))| i * 64 + (a & b).trailing_zeros() as usize)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| i * 64 + b)
        })
    }
}

/// An NNF circuit over `n` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NnfCircuit {
    n: usize,
    gates: Vec<Gate>,
    vars: Vec<VarSet>,
}

impl NnfCircuit {
    /// Checks child order and variable bounds and caches variable sets.
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::InvalidArgument("circuit has no gates".into()));
        }
        let mut vars: Vec<VarSet> = Vec::with_capacity(gates.len());
        for (i, g) in gates.iter().enumerate() {
            let set = match g {
                Gate::Lit { var, .. } => {
                    if *var >= n {
                        return Err(Error::IndexOutOfBounds {
                            index: *var,
                            bound: n,
                        });
                    }
                    VarSet::singleton(*var)
                }
                Gate::True | Gate::False => VarSet::default(),
                Gate::And { children } | Gate::Or { children, .. } => {
                    let mut s = VarSet::default();
                    for &c in children {
                        if c >= i {
                            return Err(Error::InvalidArgument(format!(
                                "gate {i} refers to gate {c}, which is not earlier"
                            )));
                        }
                        s.union_with(&vars[c]);
                    }
                    s
                }
            };
            if let Gate::Or { decision, .. } = g {
                if *decision > n {
                    return Err(Error::IndexOutOfBounds {
                        index: *decision,
                        bound: n + 1,
                    });
                }
            }
            vars.push(set);
        }
        Ok(Self { n, gates, vars })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of gates, the circuit size.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn edge_count(&self) -> usize {
        self.gates.iter().map(|g| g.children().len()).sum()
    }

    pub fn root(&self) -> usize {
        self.gates.len() - 1
    }

    pub fn vars(&self, gate: usize) -> &VarSet {
        &self.vars[gate]
    }

    /// Truth table of every gate over all `n` variables.
    pub fn gate_tables(&self) -> Result<Vec<TruthTable>> {
        let n = self.n;
        let mut t: Vec<TruthTable> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let table = match g {
                Gate::Lit { var, positive } => {
                    let v = TruthTable::var(n, *var)?;
                    if *positive {
                        v
                    } else {
                        v.not()
                    }
                }
                Gate::True => TruthTable::constant(n, true)?,
                Gate::False => TruthTable::zeros(n)?,
                Gate::And { children } => {
                    let mut acc = TruthTable::constant(n, true)?;
                    for &c in children {
                        acc = acc.and(&t[c])?;
                    }
                    acc
                }
                Gate::Or { children, .. } => {
                    let mut acc = TruthTable::zeros(n)?;
                    for &c in children {
                        acc = acc.or(&t[c])?;
                    }
                    acc
                }
            };
            t.push(table);
        }
        Ok(t)
    }

    /// The function computed at the root.
    pub fn function(&self) -> Result<TruthTable> {
        Ok(self.gate_tables()?.pop().expect("nonempty circuit"))
    }

    /// Evaluates every gate on one assignment.
    pub fn eval_gates(&self, x: u64) -> Vec<bool> {
        let mut val: Vec<bool> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Lit { var, positive } => (x >> var & 1 == 1) == *positive,
                Gate::True => true,
                Gate::False => false,
                Gate::And { children } => children.iter().all(|&c| val[c]),
                Gate::Or { children, .. } => children.iter().any(|&c| val[c]),
            };
            val.push(v);
        }
        val
    }

    pub fn eval(&self, x: u64) -> bool {
        *self.eval_gates(x).last().expect("nonempty circuit")
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn emit(&self) -> String {
        emit(self)
    }
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| perr(line, format!("expected a number, found {tok:?}")))
}

/// Parses the c2d NNF format: header `nnf V E n`, then one gate per line
/// (`L ±v`, `A c i...`, `O j c i...`). `A 0` is true and `O j 0` false.
/// Lines starting with `c` are comments.
pub fn parse(text: &str) -> Result<NnfCircuit> {
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" {
            continue;
        }
        let Some((_, _, n, _)) = header else {
            if toks[0] != "nnf" || toks.len() != 4 {
                return Err(perr(line_no, "expected header `nnf V E n`"));
            }
            let v = num(toks[1], line_no)?;
            let e = num(toks[2], line_no)?;
            let n = num(toks[3], line_no)?;
            header = Some((v, e, n, line_no));
            continue;
        };
        let i = gates.len();
        let children = |toks: &[&str], count_at: usize| -> Result<Vec<usize>> {
            let c: usize = num(
                toks.get(count_at)
                    .ok_or_else(|| perr(line_no, "missing child count"))?,
                line_no,
            )?;
            let rest = &toks[count_at + 1..];
            if rest.len() != c {
                return Err(perr(
                    line_no,
                    format!("declared {c} children, found {}", rest.len()),
                ));
            }
            rest.iter()
                .map(|t| {
                    let ch: usize = num(t, line_no)?;
                    if ch >= i {
                        return Err(perr(line_no, format!("forward reference to gate {ch}")));
                    }
                    Ok(ch)
                })
                .collect()
        };
        let gate = match toks[0] {
            "L" => {
                if toks.len() != 2 {
                    return Err(perr(line_no, "literal line must be `L ±v`"));
                }
                let lit: i64 = num(toks[1], line_no)?;
                if lit == 0 || lit.unsigned_abs() as usize > n {
                    return Err(perr(line_no, format!("literal {lit} outside 1..={n}")));
                }
                Gate::Lit {
                    var: lit.unsigned_abs() as usize - 1,
                    positive: lit > 0,
                }
            }
            "A" => {
                let ch = children(&toks, 1)?;
                if ch.is_empty() {
                    Gate::True
                } else {
                    Gate::And { children: ch }
                }
            }
            "O" => {
                let decision: usize = num(
                    toks.get(1)
                        .ok_or_else(|| perr(line_no, "missing decision variable"))?,
                    line_no,
                )?;
                if decision > n {
                    return Err(perr(line_no, format!("decision variable {decision} > {n}")));
                }
                let ch = children(&toks, 2)?;
                if ch.is_empty() {
                    Gate::False
                } else {
                    Gate::Or {
                        decision,
                        children: ch,
                    }
                }
            }
            other => return Err(perr(line_no, format!("unknown gate type {other:?}"))),
        };
        gates.push(gate);
    }
    let Some((v, e, n, hline)) = header else {
        return Err(perr(0, "missing header"));
    };
    if gates.len() != v {
        return Err(perr(
            hline,
            format!("header declares {v} gates, found {}", gates.len()),
        ));
    }
    let edges: usize = gates.iter().map(|g| g.children().len()).sum();
    if edges != e {
        return Err(perr(
            hline,
            format!("header declares {e} edges, found {edges}"),
        ));
    }
    NnfCircuit::new(n, gates).map_err(|err| perr(hline, err.to_string()))
}

pub fn emit(c: &NnfCircuit) -> String {
    let mut s = format!("nnf {} {} {}\n", c.size(), c.edge_count(), c.n);
    for g in &c.gates {
        match g {
            Gate::Lit { var, positive } => {
                let v = *var as i64 + 1;
                writeln!(s, "L {}", if *positive { v } else { -v }).unwrap();
            }
            Gate::True => s.push_str("A 0\n"),
            Gate::False => s.push_str("O 0 0\n"),
            Gate::And { children } => {
                write!(s, "A {}", children.len()).unwrap();
                children.iter().for_each(|ch| write!(s, " {ch}").unwrap());
                s.push('\n');
            }
            Gate::Or { decision, children } => {
                write!(s, "O {decision} {}", children.len()).unwrap();
                children.iter().for_each(|ch| write!(s, " {ch}").unwrap());
                s.push('\n');
            }
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposabilityWitness {
    pub gate: usize,
    /// 0-based variable shared by two children.
    pub variable: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminismWitness {
    pub gate: usize,
    /// Assignment over all `n` variables accepted by two children.
    pub assignment: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub is_nnf: bool,
    pub is_decomposable: bool,
    /// `None` when `n` exceeds the truth-table cap.
    pub is_deterministic: Option<bool>,
    pub decomposability_witness: Option<DecomposabilityWitness>,
    pub determinism_witness: Option<DeterminismWitness>,
}

impl ValidationReport {
    pub fn is_ddnnf(&self) -> bool {
        self.is_nnf && self.is_decomposable && self.is_deterministic == Some(true)
    }
}

/// Decomposability: the children of each AND have pairwise disjoint
/// variables. Determinism: the children of each OR accept pairwise disjoint
/// sets of assignments over all `n` variables.
pub fn validate(c: &NnfCircuit) -> ValidationReport {
    let mut decomposability_witness = None;
    'gates: for (i, g) in c.gates.iter().enumerate() {
        if let Gate::And { children } = g {
            let mut seen = VarSet::default();
            for &ch in children {
                if let Some(v) = seen.first_common(&c.vars[ch]) {
                    decomposability_witness = Some(DecomposabilityWitness {
                        gate: i,
                        variable: v,
                    });
                    break 'gates;
                }
                seen.union_with(&c.vars[ch]);
            }
        }
    }

    let mut determinism_witness = None;
    let is_deterministic = if c.n > var_cap() {
        None
    } else {
        let tables = c.gate_tables().expect("n within cap");
        'or: for (i, g) in c.gates.iter().enumerate() {
            if let Gate::Or { children, .. } = g {
                let mut seen = TruthTable::zeros(c.n).expect("n within cap");
                for &ch in children {
                    let shared = seen.and(&tables[ch]).expect("same n");
                    if let Some(x) = shared.models().next() {
                        determinism_witness = Some(DeterminismWitness {
                            gate: i,
                            assignment: x,
                        });
                        break 'or;
                    }
                    seen = seen.or(&tables[ch]).expect("same n");
                }
            }
        }
        Some(determinism_witness.is_none())
    };

    ValidationReport {
        is_nnf: true,
        is_decomposable: decomposability_witness.is_none(),
        is_deterministic,
        decomposability_witness,
        determinism_witness,
    }
}

/// A circuit known to be decomposable and deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdnnfCircuit(NnfCircuit);

impl DdnnfCircuit {
    /// Validates `c`; fails unless both structural checks pass.
    pub fn certify(c: NnfCircuit) -> Result<Self> {
        let r = validate(&c);
        if let Some(w) = r.decomposability_witness {
            return Err(Error::NotDdnnf(format!(
                "gate {} is not decomposable (variable {} shared)",
                w.gate,
                w.variable + 1
            )));
        }
        match r.is_deterministic {
            Some(true) => Ok(Self(c)),
            Some(false) => {
                let w = r.determinism_witness.expect("witness for failed check");
                Err(Error::NotDdnnf(format!(
                    "gate {} is not deterministic (shared model {})",
                    w.gate, w.assignment
                )))
            }
            None => Err(Error::NotDdnnf(format!(
                "determinism cannot be checked for n = {} above the cap {}",
                c.n,
                var_cap()
            ))),
        }
    }

    /// Trusts the caller, for circuits too large to certify.
    pub fn assume_valid(c: NnfCircuit) -> Self {
        Self(c)
    }

    pub fn circuit(&self) -> &NnfCircuit {
        &self.0
    }

    pub fn into_inner(self) -> NnfCircuit {
        self.0
    }

    /// Models over all `n` variables. Children of an OR that miss some of the
    /// gate's variables are scaled by `2^gap`, as is the root.
    pub fn model_count(&self) -> BigUint {
        let c = &self.0;
        let mut count: Vec<BigUint> = Vec::with_capacity(c.gates.len());
        for (i, g) in c.gates.iter().enumerate() {
            let v = match g {
                Gate::Lit { .. } | Gate::True => BigUint::one(),
                Gate::False => BigUint::zero(),
                Gate::And { children } => children.iter().map(|&ch| &count[ch]).product(),
                Gate::Or { children, .. } => children
                    .iter()
                    .map(|&ch| &count[ch] * pow2(c.vars[i].len() - c.vars[ch].len()))
                    .sum(),
            };
            count.push(v);
        }
        let root = c.root();
        &count[root] * pow2(c.n - c.vars[root].len())
    }

    /// Probability of the root under independent variables with
    /// `Pr[x_i = 1] = p[i]`.
    pub fn probability(&self, p: &[BigRational]) -> Result<BigRational> {
        let c = &self.0;
        if p.len() != c.n {
            return Err(Error::DimensionMismatch {
                expected: c.n,
                found: p.len(),
            });
        }
        let mut pr: Vec<BigRational> = Vec::with_capacity(c.gates.len());
        for g in &c.gates {
            let v = match g {
                Gate::Lit { var, positive } => {
                    if *positive {
                        p[*var].clone()
                    } else {
                        BigRational::one() - &p[*var]
                    }
                }
                Gate::True => BigRational::one(),
                Gate::False => BigRational::zero(),
                Gate::And { children } => children
                    .iter()
                    .fold(BigRational::one(), |acc, &ch| acc * &pr[ch]),
                Gate::Or { children, .. } => children
                    .iter()
                    .fold(BigRational::zero(), |acc, &ch| acc + &pr[ch]),
            };
            pr.push(v);
        }
        Ok(pr.pop().expect("nonempty circuit"))
    }
}

pub fn model_count(c: &DdnnfCircuit) -> BigUint {
    c.model_count()
}

/// Result of simplifying a gate: a constant or a built gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Const(bool),
    Gate(usize),
}

/// Hash-consing gate store; identical gates are created once.
#[derive(Debug, Default)]
struct Builder {
    gates: Vec<Gate>,
    memo: HashMap<Gate, usize>,
}

impl Builder {
    fn add(&mut self, g: Gate) -> usize {
        if let Some(&i) = self.memo.get(&g) {
            return i;
        }
        let i = self.gates.len();
        self.gates.push(g.clone());
        self.memo.insert(g, i);
        i
    }

    fn lit(&mut self, var: usize, positive: bool) -> usize {
        self.add(Gate::Lit { var, positive })
    }

    fn and(&mut self, children: Vec<usize>) -> usize {
        match children.len() {
            0 => self.add(Gate::True),
            1 => children[0],
            _ => self.add(Gate::And { children }),
        }
    }

    fn or(&mut self, decision: usize, children: Vec<usize>) -> usize {
        match children.len() {
            0 => self.add(Gate::False),
            1 => children[0],
            _ => self.add(Gate::Or { decision, children }),
        }
    }

    fn node(&mut self, n: Node) -> usize {
        match n {
            Node::Const(true) => self.add(Gate::True),
            Node::Const(false) => self.add(Gate::False),
            Node::Gate(g) => g,
        }
    }

    /// Keeps the gates reachable from `root`, in order, so `root` is last.
    fn finish(self, n: usize, root: usize) -> NnfCircuit {
        let mut live = vec![false; root + 1];
        live[root] = true;
        for i in (0..=root).rev() {
            if live[i] {
                for &c in self.gates[i].children() {
                    live[c] = true;
                }
            }
        }
        let mut map = vec![usize::MAX; root + 1];
        let mut gates = Vec::new();
        for i in 0..=root {
            if !live[i] {
                continue;
            }
            map[i] = gates.len();
            gates.push(match &self.gates[i] {
                Gate::And { children } => Gate::And {
                    children: children.iter().map(|&c| map[c]).collect(),
                },
                Gate::Or { decision, children } => Gate::Or {
                    decision: *decision,
                    children: children.iter().map(|&c| map[c]).collect(),
                },
                g => g.clone(),
            });
        }
        NnfCircuit::new(n, gates).expect("builder output is well formed")
    }
}

/// Replaces assigned literals by constants and propagates them. The
/// variable count is kept; unreachable gates are dropped.
pub fn condition(
    c: &NnfCircuit,
    partial: &crate::boolfun::PartialAssignment,
) -> Result<NnfCircuit> {
    if let Some(v) = partial.vars().find(|&v| v >= c.n) {
        return Err(Error::IndexOutOfBounds {
            index: v,
            bound: c.n,
        });
    }
    let mut b = Builder::default();
    let mut map: Vec<Node> = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let node = match g {
            Gate::Lit { var, positive } => match partial.value(*var) {
                Some(val) => Node::Const(val == *positive),
                None => Node::Gate(b.lit(*var, *positive)),
            },
            Gate::True => Node::Const(true),
            Gate::False => Node::Const(false),
            Gate::And { children } => {
                let ch: Vec<Node> = children.iter().map(|&x| map[x]).collect();
                if ch.contains(&Node::Const(false)) {
                    Node::Const(false)
                } else {
                    let gs: Vec<usize> = ch
                        .iter()
                        .filter_map(|x| match x {
                            Node::Gate(g) => Some(*g),
                            Node::Const(_) => None,
                        })
                        .collect();
                    if gs.is_empty() {
                        Node::Const(true)
                    } else {
                        Node::Gate(b.and(gs))
                    }
                }
            }
            Gate::Or { decision, children } => {
                let ch: Vec<Node> = children.iter().map(|&x| map[x]).collect();
                if ch.contains(&Node::Const(true)) {
                    Node::Const(true)
                } else {
                    let gs: Vec<usize> = ch
                        .iter()
                        .filter_map(|x| match x {
                            Node::Gate(g) => Some(*g),
                            Node::Const(_) => None,
                        })
                        .collect();
                    if gs.is_empty() {
                        Node::Const(false)
                    } else {
                        Node::Gate(b.or(*decision, gs))
                    }
                }
            }
        };
        map.push(node);
    }
    let root = b.node(*map.last().expect("nonempty circuit"));
    Ok(b.finish(c.n, root))
}

/// Shannon expansion of `f` along `order` (a permutation of `0..n`), sharing
/// identical subfunctions. Every path tests every variable, so the result is
/// smooth as well as decomposable and deterministic. Decision nodes are
/// `Or(And(¬x, lo), And(x, hi))`; a false branch is dropped.
pub fn from_truth_table(f: &TruthTable, order: &[usize]) -> Result<NnfCircuit> {
    let n = f.n();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!(
            "order must be a permutation of 0..{n}"
        )));
    }
    // reorder so that local variable j is order[j]
    let g = TruthTable::from_fn(n, |y| {
        let x = order
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &v)| acc | (y >> j & 1) << v);
        f.eval(x)
    })?;
    let mut b = Builder::default();
    let mut memo: HashMap<(usize, TruthTable), Option<usize>> = HashMap::new();
    let root = build_level(&mut b, &mut memo, order, 0, g)?;
    let root = match root {
        Some(r) => r,
        None => b.add(Gate::False),
    };
    Ok(b.finish(n, root))
}

fn build_level(
    b: &mut Builder,
    memo: &mut HashMap<(usize, TruthTable), Option<usize>>,
    order: &[usize],
    level: usize,
    sub: TruthTable,
) -> Result<Option<usize>> {
    if sub.is_zero() {
        return Ok(None);
    }
    if level == order.len() {
        return Ok(Some(b.add(Gate::True)));
    }
    let key = (level, sub);
    if let Some(&hit) = memo.get(&key) {
        return Ok(hit);
    }
    let sub = &key.1;
    let var = order[level];
    let out = if sub.n() == 1 {
        match (sub.eval(0), sub.eval(1)) {
            (false, true) => b.lit(var, true),
            (true, false) => b.lit(var, false),
            _ => {
                let (neg, pos) = (b.lit(var, false), b.lit(var, true));
                b.or(var + 1, vec![neg, pos])
            }
        }
    } else {
        let zero = crate::boolfun::PartialAssignment::new(vec![(0, false)])?;
        let one = crate::boolfun::PartialAssignment::new(vec![(0, true)])?;
        let lo = build_level(b, memo, order, level + 1, sub.condition(&zero)?)?;
        let hi = build_level(b, memo, order, level + 1, sub.condition(&one)?)?;
        let mut branches = Vec::new();
        if let Some(lo) = lo {
            let l = b.lit(var, false);
            branches.push(b.and(vec![l, lo]));
        }
        if let Some(hi) = hi {
            let l = b.lit(var, true);
            branches.push(b.and(vec![l, hi]));
        }
        b.or(var + 1, branches)
    };
    memo.insert(key, Some(out));
    Ok(Some(out))
}

/// Constant propagation, left-fold binarisation and smoothing. Children of
/// an OR, and the root, are padded with `x ∨ ¬x` for each missing variable.
/// The result computes the same function and is still a d-DNNF.
pub fn normalize(c: &DdnnfCircuit) -> DdnnfCircuit {
    let c = c.circuit();
    let n = c.n;
    let simplified = condition(c, &crate::boolfun::PartialAssignment::default())
        .expect("empty assignment is valid");
    let mut b = Builder::default();
    let mut map: Vec<usize> = Vec::with_capacity(simplified.gates.len());
    let mut taut: BTreeMap<usize, usize> = BTreeMap::new();
    let mut tautology = |b: &mut Builder, v: usize| {
        *taut.entry(v).or_insert_with(|| {
            let (neg, pos) = (b.lit(v, false), b.lit(v, true));
            b.or(v + 1, vec![neg, pos])
        })
    };
    let fold_and =
        |b: &mut Builder, ch: &[usize]| ch[1..].iter().fold(ch[0], |acc, &x| b.and(vec![acc, x]));
    for (i, g) in simplified.gates.iter().enumerate() {
        let node = match g {
            Gate::Lit { var, positive } => b.lit(*var, *positive),
            Gate::True => b.add(Gate::True),
            Gate::False => b.add(Gate::False),
            Gate::And { children } => {
                let ch: Vec<usize> = children.iter().map(|&x| map[x]).collect();
                fold_and(&mut b, &ch)
            }
            Gate::Or { decision, children } => {
                let all = &simplified.vars[i];
                let ch: Vec<usize> = children
                    .iter()
                    .map(|&x| {
                        let mut parts = vec![map[x]];
                        for v in all.iter().filter(|&v| !simplified.vars[x].contains(v)) {
                            parts.push(tautology(&mut b, v));
                        }
                        fold_and(&mut b, &parts)
                    })
                    .collect();
                let last = ch.len() - 1;
                let inner = ch[..last]
                    .iter()
                    .skip(1)
                    .fold(ch[0], |acc, &x| b.or(0, vec![acc, x]));
                if last == 0 {
                    inner
                } else {
                    b.or(*decision, vec![inner, ch[last]])
                }
            }
        };
        map.push(node);
    }
    let root_old = simplified.root();
    let mut root = map[root_old];
    if !matches!(simplified.gates[root_old], Gate::False) {
        let mut parts = if matches!(simplified.gates[root_old], Gate::True) {
            vec![]
        } else {
            vec![root]
        };
        for v in (0..n).filter(|&v| !simplified.vars[root_old].contains(v)) {
            parts.push(tautology(&mut b, v));
        }
        if !parts.is_empty() {
            root = fold_and(&mut b, &parts);
        }
    }
    DdnnfCircuit(b.finish(n, root))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverExtraction {
    pub cover: Cover,
    /// Gates of the input circuit.
    pub gate_count: usize,
    /// Gates of the normalised circuit the descent ran on.
    pub normalized_gate_count: usize,
    /// Stopping gate (in the normalised circuit) of each rectangle.
    pub stop_gates: Vec<usize>,
}

/// Builds a balanced disjoint rectangle cover with at most one rectangle per
/// gate of the normalised circuit.
///
/// Each model descends from the root along its accepting children (unique at
/// OR gates by determinism), taking the child with more variables at AND
/// gates, and stops at the first gate `v` with `3|vars(v)| <= 2n`. Since the
/// parent had more than `2n/3` variables and AND gates are binary, `v` has at
/// least `n/3`. Models are grouped by `v`; each group must be a product set
/// over `(vars(v), rest)` and the whole cover is re-verified.
pub fn extract_cover(c: &DdnnfCircuit) -> Result<CoverExtraction> {
    let n = c.circuit().n;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "cover extraction needs n >= 2, got {n}"
        )));
    }
    let norm = normalize(c);
    let d = norm.circuit();
    let tables = d.gate_tables()?;
    let f = tables[d.root()].clone();
    let mut groups: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for x in f.models() {
        let mut g = d.root();
        loop {
            if 3 * d.vars[g].len() <= 2 * n {
                break;
            }
            g = match &d.gates[g] {
                Gate::And { children } => *children
                    .iter()
                    .max_by(|&&a, &&b| d.vars[a].len().cmp(&d.vars[b].len()).then(b.cmp(&a)))
                    .expect("binary gate"),
                Gate::Or { children, .. } => {
                    let mut acc = children.iter().filter(|&&ch| tables[ch].eval(x));
                    let first = *acc.next().ok_or(Error::CoverConstruction(format!(
                        "no accepting child at gate {g}"
                    )))?;
                    if acc.next().is_some() {
                        return Err(Error::NotDdnnf(format!("gate {g} is not deterministic")));
                    }
                    first
                }
                other => {
                    return Err(Error::CoverConstruction(format!(
                        "descent reached {other:?} at gate {g} with too many variables"
                    )))
                }
            };
        }
        groups.entry(g).or_default().push(x);
    }
    let mut rects = Vec::with_capacity(groups.len());
    for (&g, models) in &groups {
        let left: Vec<usize> = d.vars[g].iter().collect();
        let p = Partition::from_left(n, &left)?;
        let r = rectangle_from_models(&p, models)?.ok_or(Error::NotARectangle { gate: g })?;
        rects.push(r);
    }
    let mut cover = Cover::new(rects);
    let report = verify_cover(&f, &cover, CoverRequirements::DISJOINT_BALANCED);
    if !report.ok {
        return Err(Error::CoverConstruction(format!("{:?}", report.failures)));
    }
    cover.mark(&report);
    Ok(CoverExtraction {
        cover,
        gate_count: c.circuit().size(),
        normalized_gate_count: d.size(),
        stop_gates: groups.keys().copied().collect(),
    })
}

/// Random d-DNNF on `n` variables mixing decision nodes, decomposable ANDs of
/// fanin 2 and 3, constants and non-smooth branches.
pub fn random_ddnnf<R: Rng + ?Sized>(rng: &mut R, n: usize) -> NnfCircuit {
    let mut b = Builder::default();
    let vars: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.9)).collect();
    let root = random_node(rng, &mut b, &vars);
    b.finish(n, root)
}

fn random_node<R: Rng + ?Sized>(rng: &mut R, b: &mut Builder, vars: &[usize]) -> usize {
    match vars.len() {
        0 => {
            if rng.random_bool(0.85) {
                b.add(Gate::True)
            } else {
                b.add(Gate::False)
            }
        }
        1 => {
            let v = vars[0];
            match rng.random_range(0..5) {
                0 | 1 => b.lit(v, true),
                2 | 3 => b.lit(v, false),
                _ => {
                    let (neg, pos) = (b.lit(v, false), b.lit(v, true));
                    b.or(v + 1, vec![neg, pos])
                }
            }
        }
        len => match rng.random_range(0..10) {
            0..=4 => {
                let i = rng.random_range(0..len);
                let v = vars[i];
                let rest: Vec<usize> = vars.iter().copied().filter(|&w| w != v).collect();
                let branch = |rng: &mut R, b: &mut Builder, positive: bool| {
                    let sub: Vec<usize> = rest
                        .iter()
                        .copied()
                        .filter(|_| rng.random_bool(0.85))
                        .collect();
                    let child = random_node(rng, b, &sub);
                    let l = b.lit(v, positive);
                    b.and(vec![l, child])
                };
                let lo = branch(rng, b, false);
                let hi = branch(rng, b, true);
                match rng.random_range(0..8) {
                    0 => lo,
                    1 => hi,
                    _ => b.or(v + 1, vec![lo, hi]),
                }
            }
            5..=8 => {
                let mut shuffled = vars.to_vec();
                shuffled.shuffle(rng);
                let parts = if len >= 3 && rng.random_bool(0.3) {
                    3
                } else {
                    2
                };
                let mut cuts: Vec<usize> = crate::gen::random_subset(rng, len - 1, parts - 1)
                    .into_iter()
                    .map(|c| c + 1)
                    .collect();
                cuts.insert(0, 0);
                cuts.push(len);
                let children = cuts
                    .windows(2)
                    .map(|w| random_node(rng, b, &shuffled[w[0]..w[1]]))
                    .collect();
                b.and(children)
            }
            _ => {
                let i = rng.random_range(0..len);
                let l = b.lit(vars[i], rng.random_bool(0.5));
                let rest: Vec<usize> = vars.iter().copied().filter(|&w| w != vars[i]).collect();
                let child = random_node(rng, b, &rest);
                b.and(vec![l, child])
            }
        },
    }
}
