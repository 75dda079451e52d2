//! Interval orders and their `(v, sigma)` representations, sup-norm
//! projection onto functions monotone along chains, feasibility of
//! chainwise interval constraints, and slope-constrained uniform fits.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};

/// Strict partial order on named elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrder", into = "RawOrder")]
pub struct IntervalOrder {
    elements: Vec<String>,
    /// `less[i][j]` iff `elements[i] < elements[j]`.
    less: Vec<Vec<bool>>,
    positions: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrder {
    elements: Vec<String>,
    less: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positions: Option<BTreeMap<String, f64>>,
}

impl TryFrom<RawOrder> for IntervalOrder {
    type Error = KappaError;

    fn try_from(raw: RawOrder) -> Result<Self> {
        IntervalOrder::new(raw.elements, &raw.less, raw.positions)
    }
}

impl From<IntervalOrder> for RawOrder {
    fn from(p: IntervalOrder) -> Self {
        let mut less = Vec::new();
        for (i, row) in p.less.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                if r {
                    less.push((p.elements[i].clone(), p.elements[j].clone()));
                }
            }
        }
        RawOrder {
            elements: p.elements,
            less,
            positions: p.positions,
        }
    }
}

fn index_of(elements: &[String]) -> Result<HashMap<&str, usize>> {
    let mut idx = HashMap::new();
    for (i, e) in elements.iter().enumerate() {
        if idx.insert(e.as_str(), i).is_some() {
            return Err(KappaError::InvalidOrder(format!("duplicate element {e:?}")));
        }
    }
    Ok(idx)
}

impl IntervalOrder {
    /// Validates irreflexivity and transitivity of the listed pairs; the
    /// relation is taken as given, not closed.
    pub fn new(
        elements: Vec<String>,
        less: &[(String, String)],
        positions: Option<BTreeMap<String, f64>>,
    ) -> Result<Self> {
        let idx = index_of(&elements)?;
        let n = elements.len();
        let mut rel = vec![vec![false; n]; n];
        for (a, b) in less {
            let lookup = |e: &String| {
                idx.get(e.as_str())
                    .copied()
                    .ok_or_else(|| KappaError::InvalidOrder(format!("unknown element {e:?}")))
            };
            rel[lookup(a)?][lookup(b)?] = true;
        }
        if let Some(pos) = &positions {
            for e in &elements {
                match pos.get(e) {
                    Some(p) if p.is_finite() => {}
                    _ => {
                        return Err(KappaError::InvalidOrder(format!(
                            "missing or non-finite position for {e:?}"
                        )))
                    }
                }
            }
        }
        let p = IntervalOrder {
            elements,
            less: rel,
            positions,
        };
        p.check_strict()?;
        Ok(p)
    }

    /// Order on `0..n` given as a boolean matrix; element names are the
    /// indices.
    pub fn from_matrix(less: Vec<Vec<bool>>) -> Result<Self> {
        let n = less.len();
        if less.iter().any(|r| r.len() != n) {
            return Err(KappaError::InvalidOrder("relation matrix must be square".into()));
        }
        let p = IntervalOrder {
            elements: (0..n).map(|i| i.to_string()).collect(),
            less,
            positions: None,
        };
        p.check_strict()?;
        Ok(p)
    }

    fn check_strict(&self) -> Result<()> {
        let n = self.elements.len();
        for i in 0..n {
            if self.less[i][i] {
                return Err(KappaError::InvalidOrder(format!(
                    "{} < {} violates irreflexivity",
                    self.elements[i], self.elements[i]
                )));
            }
            for j in 0..n {
                if !self.less[i][j] {
                    continue;
                }
                for k in 0..n {
                    if self.less[j][k] && !self.less[i][k] {
                        return Err(KappaError::InvalidOrder(format!(
                            "{} < {} < {} but not {} < {}: relation is not transitive",
                            self.elements[i], self.elements[j], self.elements[k], self.elements[i], self.elements[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn less(&self, i: usize, j: usize) -> bool {
        self.less[i][j]
    }

    pub fn positions(&self) -> Option<&BTreeMap<String, f64>> {
        self.positions.as_ref()
    }

    /// A forbidden `2 + 2`: `a < b`, `c < d` with `a` not below `d` and
    /// `c` not below `b`, as indices `(a, b, c, d)`.
    pub fn two_plus_two(&self) -> Option<(usize, usize, usize, usize)> {
        let pairs: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|i| (0..self.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| self.less[i][j])
            .collect();
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                if !self.less[a][d] && !self.less[c][b] {
                    return Some((a, b, c, d));
                }
            }
        }
        None
    }
}

/// True iff the order contains no `2 + 2`.
pub fn check_interval_order(p: &IntervalOrder) -> bool {
    p.two_plus_two().is_none()
}

/// Value and length maps with `x < y` iff `v(x) + sigma(x) < v(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRepresentation")]
pub struct Representation {
    v: BTreeMap<String, f64>,
    sigma: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRepresentation {
    v: BTreeMap<String, f64>,
    sigma: BTreeMap<String, f64>,
}

impl TryFrom<RawRepresentation> for Representation {
    type Error = KappaError;

    fn try_from(raw: RawRepresentation) -> Result<Self> {
        Representation::new(raw.v, raw.sigma)
    }
}

impl Representation {
    pub fn new(v: BTreeMap<String, f64>, sigma: BTreeMap<String, f64>) -> Result<Self> {
        for (k, s) in &sigma {
            if !(*s >= 0.0 && s.is_finite()) {
                return Err(KappaError::InvalidArgument(format!(
                    "sigma({k}) = {s} must be nonnegative"
                )));
            }
        }
        if let Some((k, x)) = v.iter().find(|(_, x)| !x.is_finite()) {
            return Err(KappaError::InvalidArgument(format!("v({k}) = {x} must be finite")));
        }
        Ok(Representation { v, sigma })
    }

    pub fn v(&self) -> &BTreeMap<String, f64> {
        &self.v
    }

    pub fn sigma(&self) -> &BTreeMap<String, f64> {
        &self.sigma
    }
}

/// Outcome of [`verify_representation`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub holds: bool,
    /// Smallest `v(y) - v(x) - sigma(x)` over related pairs `x < y`
    /// (`+inf` if there are none); must be positive.
    #[serde(with = "crate::value::extended")]
    pub strict_margin: f64,
    /// Smallest `v(x) + sigma(x) - v(y)` over distinct unrelated pairs
    /// (`+inf` if there are none); must be nonnegative.
    #[serde(with = "crate::value::extended")]
    pub reverse_margin: f64,
}

/// Checks `x < y <=> v(x) + sigma(x) < v(y)` on every ordered pair.
pub fn verify_representation(p: &IntervalOrder, r: &Representation) -> Result<Verification> {
    let mut right = Vec::with_capacity(p.len());
    let mut left = Vec::with_capacity(p.len());
    for e in &p.elements {
        let (Some(v), Some(s)) = (r.v.get(e), r.sigma.get(e)) else {
            return Err(KappaError::InvalidArgument(format!(
                "representation misses element {e:?}"
            )));
        };
        left.push(*v);
        right.push(v + s);
    }
    let mut strict_margin = f64::INFINITY;
    let mut reverse_margin = f64::INFINITY;
    for i in 0..p.len() {
        for j in 0..p.len() {
            if i == j {
                continue;
            }
            if p.less[i][j] {
                strict_margin = strict_margin.min(left[j] - right[i]);
            } else {
                reverse_margin = reverse_margin.min(right[i] - left[j]);
            }
        }
    }
    Ok(Verification {
        holds: strict_margin > 0.0 && reverse_margin >= 0.0,
        strict_margin,
        reverse_margin,
    })
}

/// Integer representation from the ranks of predecessor sets.
///
/// In an interval order the sets `D(x) = {y : y < x}` form a chain under
/// inclusion. With `l(x)` the rank of `D(x)` among the distinct sets and
/// `r(x)` the largest rank of a `D(z)` not containing `x`, one has
/// `x < y` iff `r(x) < l(y)`; the result is `v = l`, `sigma = r - l`.
pub fn find_representation(p: &IntervalOrder) -> Result<Representation> {
    if let Some((a, b, c, d)) = p.two_plus_two() {
        let e = &p.elements;
        return Err(KappaError::NotIntervalOrder(format!(
            "{} < {} and {} < {} form a 2 + 2",
            e[a], e[b], e[c], e[d]
        )));
    }
    let n = p.len();
    let down: Vec<Vec<bool>> = (0..n).map(|x| (0..n).map(|y| p.less[y][x]).collect()).collect();
    let size = |s: &Vec<bool>| s.iter().filter(|&&b| b).count();
    // chain under inclusion, so sizes rank the distinct sets
    let mut sizes: Vec<usize> = down.iter().map(size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let rank = |s: &Vec<bool>| sizes.binary_search(&size(s)).expect("listed size") as f64;
    let mut v = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    for x in 0..n {
        let l = rank(&down[x]);
        let r = (0..n)
            .filter(|&z| !down[z][x])
            .map(|z| rank(&down[z]))
            .fold(l, f64::max);
        v.insert(p.elements[x].clone(), l);
        sigma.insert(p.elements[x].clone(), r - l);
    }
    let rep = Representation::new(v, sigma)?;
    if !verify_representation(p, &rep)?.holds {
        return Err(KappaError::Internal("rank representation failed verification".into()));
    }
    Ok(rep)
}

/// Real function on named points with positive weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunction")]
pub struct FunctionOnT {
    values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    weights: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    values: BTreeMap<String, f64>,
    #[serde(default)]
    weights: BTreeMap<String, f64>,
}

impl TryFrom<RawFunction> for FunctionOnT {
    type Error = KappaError;

    fn try_from(raw: RawFunction) -> Result<Self> {
        FunctionOnT::weighted(raw.values, raw.weights)
    }
}

impl FunctionOnT {
    /// Unit weights.
    pub fn new(values: BTreeMap<String, f64>) -> Result<Self> {
        FunctionOnT::weighted(values, BTreeMap::new())
    }

    /// Weights default to 1 where missing.
    pub fn weighted(values: BTreeMap<String, f64>, weights: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((k, x)) = values.iter().find(|(_, x)| !x.is_finite()) {
            return Err(KappaError::InvalidArgument(format!("f({k}) = {x} must be finite")));
        }
        for (k, w) in &weights {
            if !values.contains_key(k) {
                return Err(KappaError::InvalidArgument(format!("weight for unknown point {k:?}")));
            }
            if !(*w > 0.0 && w.is_finite()) {
                return Err(KappaError::InvalidArgument(format!(
                    "weight({k}) = {w} must be positive"
                )));
            }
        }
        Ok(FunctionOnT { values, weights })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        FunctionOnT::new(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }

    pub fn weight(&self, id: &str) -> f64 {
        self.weights.get(id).copied().unwrap_or(1.0)
    }

    fn with_values(&self, values: BTreeMap<String, f64>) -> FunctionOnT {
        FunctionOnT {
            values,
            weights: self.weights.clone(),
        }
    }

    /// `max |f(x)| phi(x)`.
    pub fn seminorm(&self) -> f64 {
        self.values
            .iter()
            .map(|(k, v)| v.abs() * self.weight(k))
            .fold(0.0, f64::max)
    }

    /// Weighted sup-distance over the points of `self`; points missing from
    /// `other` are an error.
    pub fn distance(&self, other: &FunctionOnT) -> Result<f64> {
        let mut d: f64 = 0.0;
        for (k, v) in &self.values {
            let w = other
                .get(k)
                .ok_or_else(|| KappaError::InvalidArgument(format!("no value at {k:?}")))?;
            d = d.max((v - w).abs() * self.weight(k));
        }
        Ok(d)
    }
}

/// Chains of point ids, each listed in increasing order, with optional
/// bounding elements `(a_t, b_t)` keyed by chain index.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFamily {
    pub chains: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bounds: BTreeMap<String, (String, String)>,
}

impl ChainFamily {
    pub fn new(chains: Vec<Vec<String>>) -> Self {
        ChainFamily {
            chains,
            bounds: BTreeMap::new(),
        }
    }

    pub fn from_ids(chains: &[&[&str]]) -> Self {
        ChainFamily::new(
            chains
                .iter()
                .map(|c| c.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
    }

    /// Checks every chain against an ambient order: consecutive members
    /// strictly increase, and bounds sit below and above every member.
    pub fn validate_against(&self, p: &IntervalOrder) -> Result<()> {
        let idx = index_of(&p.elements)?;
        let get = |e: &String| {
            idx.get(e.as_str())
                .copied()
                .ok_or_else(|| KappaError::InvalidOrder(format!("unknown element {e:?}")))
        };
        for (t, chain) in self.chains.iter().enumerate() {
            let ids = chain.iter().map(get).collect::<Result<Vec<_>>>()?;
            for w in ids.windows(2) {
                if !p.less[w[0]][w[1]] {
                    return Err(KappaError::InvalidOrder(format!(
                        "chain {t}: {} < {} does not hold",
                        p.elements[w[0]], p.elements[w[1]]
                    )));
                }
            }
            if let Some((a, b)) = self.bounds.get(&t.to_string()) {
                let (a, b) = (get(a)?, get(b)?);
                for &x in &ids {
                    if !((a == x || p.less[a][x]) && (x == b || p.less[x][b])) {
                        return Err(KappaError::InvalidOrder(format!(
                            "chain {t}: {} is outside its bounds",
                            p.elements[x]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Preorder generated by the chains on the points of `ids`: reflexive
/// transitive closure as a matrix.
fn generated_preorder(ids: &[String], lambda: &ChainFamily) -> Result<Vec<Vec<bool>>> {
    let idx = index_of(ids)?;
    let n = ids.len();
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for chain in &lambda.chains {
        let pos = chain
            .iter()
            .map(|e| {
                idx.get(e.as_str())
                    .copied()
                    .ok_or_else(|| KappaError::InvalidArgument(format!("chain point {e:?} has no value")))
            })
            .collect::<Result<Vec<_>>>()?;
        for w in pos.windows(2) {
            le[w[0]][w[1]] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if le[i][k] {
                for j in 0..n {
                    if le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
    }
    Ok(le)
}

/// Result of [`monotone_project_sup`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub projected: FunctionOnT,
    /// Weighted sup-distance from the input; the optimum over the cone.
    pub distance: f64,
}

/// Best weighted sup-norm approximation of `g` by a function nondecreasing
/// along every chain.
///
/// The optimal distance is `e = max over x <= y of (g(x) - g(y)) /
/// (1/phi(x) + 1/phi(y))`; every function between `max_{x <= y} (g(x) -
/// e/phi(x))` and `min_{z >= y} (g(z) + e/phi(z))` attains it, and the
/// midpoint of the two envelopes is returned. With unit weights this is
/// `(M + m) / 2` for the running maximum `M` over predecessors and running
/// minimum `m` over successors. Points outside every chain keep their
/// values.
pub fn monotone_project_sup(g: &FunctionOnT, lambda: &ChainFamily) -> Result<Projection> {
    let ids: Vec<String> = g.values.keys().cloned().collect();
    let le = generated_preorder(&ids, lambda)?;
    let n = ids.len();
    for i in 0..n {
        for j in i + 1..n {
            if le[i][j] && le[j][i] {
                return Err(KappaError::InvalidOrder(format!(
                    "chains force {} <= {} <= {}: the generated order has a cycle",
                    ids[i], ids[j], ids[i]
                )));
            }
        }
    }
    let val: Vec<f64> = ids.iter().map(|k| g.values[k]).collect();
    let inv: Vec<f64> = ids.iter().map(|k| 1.0 / g.weight(k)).collect();
    let mut e: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if le[i][j] && i != j {
                e = e.max((val[i] - val[j]) / (inv[i] + inv[j]));
            }
        }
    }
    let mut out = BTreeMap::new();
    for y in 0..n {
        let lo = (0..n)
            .filter(|&x| le[x][y])
            .map(|x| val[x] - e * inv[x])
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = (0..n)
            .filter(|&z| le[y][z])
            .map(|z| val[z] + e * inv[z])
            .fold(f64::INFINITY, f64::min);
        out.insert(ids[y].clone(), 0.5 * (lo + hi));
    }
    let projected = g.with_values(out);
    let distance = g.distance(&projected)?;
    Ok(Projection { projected, distance })
}

/// Targets and radius for one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConstraint {
    pub chain: Vec<String>,
    pub targets: BTreeMap<String, f64>,
    pub radius: f64,
}

/// Functions `g` with `max_{x in t} |g(x) - f(x)| phi(x) <= r_t` on every
/// chain `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    pub entries: Vec<ChainConstraint>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<String, f64>,
}

impl ConstraintSet {
    fn weight(&self, id: &str) -> f64 {
        self.weights.get(id).copied().unwrap_or(1.0)
    }

    /// Membership test at tolerance `tol`.
    pub fn contains(&self, g: &FunctionOnT, tol: f64) -> bool {
        self.entries.iter().all(|c| {
            c.chain.iter().all(|x| match g.get(x) {
                Some(v) => (v - c.targets[x]).abs() * self.weight(x) <= c.radius + tol,
                None => false,
            })
        })
    }

    /// Per-point intervals, intersected over the chains through each point.
    fn intervals(&self) -> BTreeMap<String, (f64, f64)> {
        let mut out: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for c in &self.entries {
            for x in &c.chain {
                let slack = c.radius / self.weight(x);
                let t = c.targets[x];
                let e = out.entry(x.clone()).or_insert((f64::NEG_INFINITY, f64::INFINITY));
                e.0 = e.0.max(t - slack);
                e.1 = e.1.min(t + slack);
            }
        }
        out
    }
}

/// Constraint set around `f` with one radius per chain of `lambda`; `f`
/// itself is always a member.
pub fn build_constraint_set(f: &FunctionOnT, lambda: &ChainFamily, radii: &[f64]) -> Result<ConstraintSet> {
    if radii.len() != lambda.chains.len() {
        return Err(KappaError::DimensionMismatch {
            expected: lambda.chains.len(),
            found: radii.len(),
        });
    }
    let mut entries = Vec::new();
    for (chain, &r) in lambda.chains.iter().zip(radii) {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(KappaError::InvalidArgument(format!("radius {r} must be nonnegative")));
        }
        let targets = chain
            .iter()
            .map(|x| {
                f.get(x)
                    .map(|v| (x.clone(), v))
                    .ok_or_else(|| KappaError::InvalidArgument(format!("f has no value at {x:?}")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        entries.push(ChainConstraint {
            chain: chain.clone(),
            targets,
            radius: r,
        });
    }
    Ok(ConstraintSet {
        entries,
        weights: f.weights.clone(),
    })
}

/// Result of [`cone_feasibility`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub witness: Option<FunctionOnT>,
    /// Some radius is zero, so the constraint set has empty interior.
    pub outside_interior_hypothesis: bool,
}

/// Decides whether some function is nondecreasing on every chain of
/// `lambda` and lies in `c`. Points forced equal by the chains are merged
/// and their intervals intersected; running lower bounds are then pushed
/// forward in topological order, and the result is the witness whenever
/// it stays below every upper bound.
pub fn cone_feasibility(c: &ConstraintSet, lambda: &ChainFamily) -> Result<Feasibility> {
    for e in &c.entries {
        if !(e.radius >= 0.0) {
            return Err(KappaError::InvalidArgument(format!(
                "radius {} must be nonnegative",
                e.radius
            )));
        }
        if let Some(x) = e.chain.iter().find(|x| !e.targets.contains_key(*x)) {
            return Err(KappaError::InvalidArgument(format!("no target at {x:?}")));
        }
    }
    let outside = c.entries.iter().any(|e| e.radius == 0.0);
    let mut box_of = c.intervals();
    for x in lambda.chains.iter().flatten() {
        box_of.entry(x.clone()).or_insert((f64::NEG_INFINITY, f64::INFINITY));
    }
    let ids: Vec<String> = box_of.keys().cloned().collect();
    let le = generated_preorder(&ids, lambda)?;
    let n = ids.len();
    let infeasible = Feasibility {
        feasible: false,
        witness: None,
        outside_interior_hypothesis: outside,
    };
    let mut lo: Vec<f64> = ids.iter().map(|k| box_of[k].0).collect();
    let hi: Vec<f64> = ids.iter().map(|k| box_of[k].1).collect();
    // lower bound at y: largest lower bound among all points below y,
    // which for a closed preorder is one pass over predecessors
    let lo0 = lo.clone();
    for y in 0..n {
        lo[y] = (0..n)
            .filter(|&x| le[x][y])
            .map(|x| lo0[x])
            .fold(f64::NEG_INFINITY, f64::max);
    }
    // a point with no finite lower bound takes the least finite upper
    // bound among its successors, or 0
    let mut w = vec![0.0; n];
    for y in 0..n {
        if lo[y] > hi[y] {
            return Ok(infeasible);
        }
        w[y] = if lo[y].is_finite() {
            lo[y]
        } else {
            let cap = (0..n)
                .filter(|&z| le[y][z])
                .map(|z| hi[z])
                .fold(f64::INFINITY, f64::min);
            if cap.is_finite() {
                cap.min(0.0)
            } else {
                0.0
            }
        };
    }
    // unbounded-below points were set independently; restore monotonicity
    let w0 = w.clone();
    for y in 0..n {
        w[y] = (0..n)
            .filter(|&x| le[x][y])
            .map(|x| w0[x])
            .fold(f64::NEG_INFINITY, f64::max);
    }
    let witness = FunctionOnT::weighted(
        ids.iter().cloned().zip(w.iter().copied()).collect(),
        c.weights
            .iter()
            .filter(|(k, _)| box_of.contains_key(*k))
            .map(|(k, v)| (k.clone(), *v))
            .collect(),
    )?;
    let monotone = (0..n).all(|i| (0..n).all(|j| !le[i][j] || w[i] <= w[j]));
    if !monotone || !c.contains(&witness, 1e-12 * witness.seminorm().max(1.0)) {
        return Err(KappaError::Internal("feasibility witness failed verification".into()));
    }
    Ok(Feasibility {
        feasible: true,
        witness: Some(witness),
        outside_interior_hypothesis: outside,
    })
}

/// Result of [`constrained_fit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub fitted: FunctionOnT,
    pub eps: f64,
}

/// Binary-search tolerance on `eps` in [`constrained_fit`].
pub const FIT_TOL: f64 = 1e-9;

/// Closest function in sup norm to `g` (points at `positions` on the line)
/// with `C2 (x2 - x1) <= g~(x2) - g~(x1) <= C1 (x2 - x1)` for `x1 < x2`.
///
/// Slopes between consecutive points imply the bounds for all pairs, so
/// feasibility at a given `eps` is a system of difference constraints,
/// decided by Bellman-Ford; `eps` is located by bisection on
/// `[0, |g|_inf + C1 diam]`.
pub fn constrained_fit(g: &FunctionOnT, positions: &BTreeMap<String, f64>, c1: f64, c2: f64) -> Result<Fit> {
    if !(c1.is_finite() && c2.is_finite()) || c2 < 0.0 {
        return Err(KappaError::InvalidArgument(format!(
            "need 0 <= C2 <= C1, got C1 = {c1}, C2 = {c2}"
        )));
    }
    if c2 > c1 {
        return Err(KappaError::Infeasible(format!("C2 = {c2} exceeds C1 = {c1}")));
    }
    let mut pts: Vec<(f64, &String, f64)> = Vec::with_capacity(g.values.len());
    for (k, v) in &g.values {
        let x = positions
            .get(k)
            .copied()
            .ok_or_else(|| KappaError::InvalidArgument(format!("no position for {k:?}")))?;
        if !x.is_finite() {
            return Err(KappaError::InvalidArgument(format!("position of {k:?} is not finite")));
        }
        pts.push((x, k, *v));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(KappaError::InvalidArgument(format!(
            "{:?} and {:?} share a position",
            w[0].1, w[1].1
        )));
    }
    if pts.is_empty() {
        return Err(KappaError::InvalidArgument("nothing to fit".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let gs: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let diam = xs[xs.len() - 1] - xs[0];
    let (mut lo, mut hi) = (0.0, g.seminorm_unweighted() + c1 * diam);
    let mut best =
        slope_feasible(&xs, &gs, c1, c2, hi).ok_or_else(|| KappaError::Internal("upper bracket infeasible".into()))?;
    if let Some(z) = slope_feasible(&xs, &gs, c1, c2, 0.0) {
        best = z;
    } else {
        while hi - lo > FIT_TOL {
            let mid = 0.5 * (lo + hi);
            match slope_feasible(&xs, &gs, c1, c2, mid) {
                Some(z) => {
                    best = z;
                    hi = mid;
                }
                None => lo = mid,
            }
        }
    }
    let values = pts.iter().zip(&best).map(|(p, v)| (p.1.clone(), *v)).collect();
    let fitted = FunctionOnT::new(values)?;
    let eps = gs.iter().zip(&best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Fit { fitted, eps })
}

impl FunctionOnT {
    fn seminorm_unweighted(&self) -> f64 {
        self.values.values().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Bellman-Ford on the difference constraints for a fixed `eps`; node `n`
/// is the zero reference. Returns values when there is no negative cycle.
fn slope_feasible(xs: &[f64], gs: &[f64], c1: f64, c2: f64, eps: f64) -> Option<Vec<f64>> {
    let n = xs.len();
    // edge (u, v, w): value[v] - value[u] <= w
    let mut edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        edges.push((n, i, gs[i] + eps));
        edges.push((i, n, -(gs[i] - eps)));
    }
    for i in 0..n.saturating_sub(1) {
        let dx = xs[i + 1] - xs[i];
        edges.push((i, i + 1, c1 * dx));
        edges.push((i + 1, i, -c2 * dx));
    }
    let mut dist = vec![0.0; n + 1];
    for _ in 0..=n {
        let mut changed = false;
        for &(u, v, w) in &edges {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                changed = true;
            }
        }
        if !changed {
            return Some((0..n).map(|i| dist[i] - dist[n]).collect());
        }
    }
    None
}
