//! Finite group actions on finite spaces.
//!
//! A [`FiniteGroupAction`] is a set of permutations of a [`FiniteSpace`]
//! that is closed under composition and inversion; closure is checked in full
//! when the action is built. On top of that sit orbits, isotropy groups,
//! invariant measures, permissibility of parameter functions, induced actions
//! on the image of a permissible function, orbit reduction and equivariance
//! checks for statistical models and estimators.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("space must contain at least one point")]
    EmptySpace,
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("element {index} is not a permutation of {n} points")]
    InvalidPermutation { index: usize, n: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("point {0} is not in the space")]
    PointNotInSpace(usize),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("parameter function is not permissible under the group")]
    NotPermissible,
    #[error("the given point set is not an orbit of the group")]
    NotAnOrbit,
    #[error("model row {row} is not a probability distribution")]
    NotADistribution { row: usize },
}

/// A finite set of labelled points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSpace {
    labels: Vec<String>,
}

impl FiniteSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, SymmetryError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(SymmetryError::EmptySpace);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SymmetryError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Points labelled `0..n`.
    pub fn indexed(n: usize) -> Result<Self, SymmetryError> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn subspace(&self, points: &[usize]) -> FiniteSpace {
        FiniteSpace {
            labels: points.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }
}

/// A permutation `i -> p[i]` of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Rotation `i -> i + shift (mod n)`.
    pub fn cyclic(n: usize, shift: usize) -> Self {
        Self((0..n).map(|i| (i + shift) % n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
}

/// A finite permutation group acting on a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroupAction {
    space: FiniteSpace,
    elements: Vec<Permutation>,
}

impl FiniteGroupAction {
    /// Validates the element set: each must permute the space, the identity
    /// must be present, and the set must be closed under composition and
    /// inverses. Duplicates are dropped, keeping first occurrences.
    pub fn new(space: FiniteSpace, elements: Vec<Vec<usize>>) -> Result<Self, SymmetryError> {
        let n = space.len();
        let mut perms = Vec::with_capacity(elements.len());
        let mut seen = HashSet::new();
        for (index, images) in elements.into_iter().enumerate() {
            let p = Permutation::new(images)
                .filter(|p| p.len() == n)
                .ok_or(SymmetryError::InvalidPermutation { index, n })?;
            if seen.insert(p.clone()) {
                perms.push(p);
            }
        }
        let action = Self {
            space,
            elements: perms,
        };
        action.verify_group()?;
        Ok(action)
    }

    /// Closes a set of generators under composition.
    pub fn generated_by(space: FiniteSpace, generators: &[Vec<usize>]) -> Result<Self, SymmetryError> {
        let n = space.len();
        let mut gens = Vec::new();
        for (index, g) in generators.iter().enumerate() {
            let p = Permutation::new(g.clone())
                .filter(|p| p.len() == n)
                .ok_or(SymmetryError::InvalidPermutation { index, n })?;
            gens.push(p);
        }
        let identity = Permutation::identity(n);
        let mut elements = vec![identity.clone()];
        let mut seen: HashSet<Permutation> = HashSet::from([identity]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let next = g.compose(&elements[i]);
                if seen.insert(next.clone()) {
                    elements.push(next);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        Ok(Self { space, elements })
    }

    pub fn trivial(space: FiniteSpace) -> Self {
        let n = space.len();
        Self {
            space,
            elements: vec![Permutation::identity(n)],
        }
    }

    fn verify_group(&self) -> Result<(), SymmetryError> {
        if !self.elements.iter().any(Permutation::is_identity) {
            return Err(SymmetryError::NotAGroup("identity is missing".into()));
        }
        let set: HashSet<&Permutation> = self.elements.iter().collect();
        for (i, g) in self.elements.iter().enumerate() {
            for (j, h) in self.elements.iter().enumerate() {
                if !set.contains(&g.compose(h)) {
                    return Err(SymmetryError::NotAGroup(format!(
                        "not closed under composition: element {i} after element {j} is missing"
                    )));
                }
            }
        }
        // Closure of a finite set of permutations already gives inverses.
        debug_assert!(self.elements.iter().all(|g| set.contains(&g.inverse())));
        Ok(())
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    fn check_point(&self, x: usize) -> Result<(), SymmetryError> {
        if x >= self.space.len() {
            return Err(SymmetryError::PointNotInSpace(x));
        }
        Ok(())
    }

    /// `{ g x : g in G }`, sorted.
    pub fn orbit_of(&self, x: usize) -> Result<Vec<usize>, SymmetryError> {
        self.check_point(x)?;
        let mut orbit: Vec<usize> = self.elements.iter().map(|g| g.apply(x)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        Ok(orbit)
    }

    /// Elements satisfying `keep`; callers ensure the selection is a subgroup.
    fn subgroup(&self, keep: impl Fn(&Permutation) -> bool) -> FiniteGroupAction {
        FiniteGroupAction {
            space: self.space.clone(),
            elements: self.elements.iter().filter(|g| keep(g)).cloned().collect(),
        }
    }
}

/// Partition of the space into orbits, each sorted, ordered by smallest point.
pub fn orbits(g: &FiniteGroupAction) -> Vec<Vec<usize>> {
    let n = g.space.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if assigned[x] {
            continue;
        }
        let orbit = g.orbit_of(x).expect("point in range");
        for &y in &orbit {
            assigned[y] = true;
        }
        out.push(orbit);
    }
    out
}

pub fn is_transitive(g: &FiniteGroupAction) -> bool {
    orbits(g).len() == 1
}

/// `{ g : g x = x }`.
pub fn isotropy_group(g: &FiniteGroupAction, x: usize) -> Result<FiniteGroupAction, SymmetryError> {
    g.check_point(x)?;
    Ok(g.subgroup(|p| p.apply(x) == x))
}

/// Uniform weight on each orbit, normalized per orbit.
pub fn invariant_measure(g: &FiniteGroupAction) -> Vec<f64> {
    let mut weights = vec![0.0; g.space.len()];
    for orbit in orbits(g) {
        let w = 1.0 / orbit.len() as f64;
        for x in orbit {
            weights[x] = w;
        }
    }
    weights
}

/// Total function from one finite space to another.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterFunction {
    domain: FiniteSpace,
    codomain: FiniteSpace,
    map: Vec<usize>,
}

impl ParameterFunction {
    pub fn new(
        domain: FiniteSpace,
        codomain: FiniteSpace,
        map: Vec<usize>,
    ) -> Result<Self, SymmetryError> {
        if map.len() != domain.len() {
            return Err(SymmetryError::DomainMismatch(format!(
                "function table has {} entries for {} points",
                map.len(),
                domain.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&c| c >= codomain.len()) {
            return Err(SymmetryError::DomainMismatch(format!(
                "value {bad} is outside the codomain"
            )));
        }
        Ok(Self {
            domain,
            codomain,
            map,
        })
    }

    /// Builds the function from values computed per domain point; the
    /// codomain is the sorted set of distinct values.
    pub fn from_values<K, F>(domain: FiniteSpace, f: F) -> Self
    where
        K: Ord + ToString,
        F: Fn(usize) -> K,
    {
        let values: Vec<K> = (0..domain.len()).map(&f).collect();
        let mut distinct: BTreeMap<&K, usize> = values.iter().map(|v| (v, 0)).collect();
        for (i, slot) in distinct.values_mut().enumerate() {
            *slot = i;
        }
        let codomain = FiniteSpace {
            labels: distinct.keys().map(|k| k.to_string()).collect(),
        };
        let map = values.iter().map(|v| distinct[v]).collect();
        Self {
            domain,
            codomain,
            map,
        }
    }

    pub fn domain(&self) -> &FiniteSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSpace {
        &self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.map
    }

    /// Sorted distinct values taken.
    pub fn image(&self) -> Vec<usize> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img.dedup();
        img
    }
}

fn check_domain(g: &FiniteGroupAction, zeta: &ParameterFunction) -> Result<(), SymmetryError> {
    if zeta.domain.len() != g.space.len() {
        return Err(SymmetryError::DomainMismatch(format!(
            "function domain has {} points, group space has {}",
            zeta.domain.len(),
            g.space.len()
        )));
    }
    Ok(())
}

/// `zeta(x1) = zeta(x2)` implies `zeta(g x1) = zeta(g x2)` for every `g`.
///
/// Equivalently, each `g` maps level sets of `zeta` into level sets, which is
/// checked in `O(|G| n)` rather than over all pairs.
pub fn is_permissible(
    g: &FiniteGroupAction,
    zeta: &ParameterFunction,
) -> Result<bool, SymmetryError> {
    check_domain(g, zeta)?;
    Ok(induced_images(g, zeta).is_some())
}

/// For each group element, the map `zeta(x) -> zeta(g x)` on the image, or
/// `None` if some element does not respect the level sets of `zeta`.
fn induced_images(g: &FiniteGroupAction, zeta: &ParameterFunction) -> Option<Vec<HashMap<usize, usize>>> {
    let mut out = Vec::with_capacity(g.elements.len());
    for p in &g.elements {
        let mut h: HashMap<usize, usize> = HashMap::new();
        for x in 0..zeta.domain.len() {
            let target = zeta.map[p.apply(x)];
            match h.insert(zeta.map[x], target) {
                Some(prev) if prev != target => return None,
                _ => {}
            }
        }
        out.push(h);
    }
    Some(out)
}

/// The action of `G` induced on the image of a permissible `zeta`.
#[derive(Debug, Clone)]
pub struct InducedAction {
    /// Group acting on the image points (labelled from the codomain).
    pub action: FiniteGroupAction,
    /// Codomain indices of the image, in the order used by `action`'s space.
    pub image: Vec<usize>,
    /// `homomorphism[i]` is the index in `action.elements()` of the image of
    /// the `i`-th element of the source group.
    pub homomorphism: Vec<usize>,
}

pub fn induced_action(
    g: &FiniteGroupAction,
    zeta: &ParameterFunction,
) -> Result<InducedAction, SymmetryError> {
    check_domain(g, zeta)?;
    let maps = induced_images(g, zeta).ok_or(SymmetryError::NotPermissible)?;
    let image = zeta.image();
    let position: HashMap<usize, usize> = image.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let space = zeta.codomain.subspace(&image);

    let mut elements: Vec<Permutation> = Vec::new();
    let mut index: HashMap<Permutation, usize> = HashMap::new();
    let mut homomorphism = Vec::with_capacity(maps.len());
    for h in maps {
        let perm = Permutation(image.iter().map(|c| position[&h[c]]).collect());
        let k = *index.entry(perm.clone()).or_insert_with(|| {
            elements.push(perm);
            elements.len() - 1
        });
        homomorphism.push(k);
    }
    let action = FiniteGroupAction { space, elements };
    action.verify_group()?;
    Ok(InducedAction {
        action,
        image,
        homomorphism,
    })
}

/// Result of restricting a group action and a parameter function to an orbit.
#[derive(Debug, Clone)]
pub struct OrbitReduction {
    /// Original indices of the orbit points, in the order of the restricted space.
    pub points: Vec<usize>,
    pub action: FiniteGroupAction,
    pub zeta: ParameterFunction,
    pub permissible: bool,
}

pub fn reduce_to_orbit(
    g: &FiniteGroupAction,
    orbit: &[usize],
    zeta: &ParameterFunction,
) -> Result<OrbitReduction, SymmetryError> {
    check_domain(g, zeta)?;
    let mut points = orbit.to_vec();
    points.sort_unstable();
    points.dedup();
    let first = *points.first().ok_or(SymmetryError::NotAnOrbit)?;
    if g.orbit_of(first).map_err(|_| SymmetryError::NotAnOrbit)? != points {
        return Err(SymmetryError::NotAnOrbit);
    }
    let local: HashMap<usize, usize> = points.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut elements = Vec::new();
    let mut seen = HashSet::new();
    for p in &g.elements {
        let r = Permutation(points.iter().map(|x| local[&p.apply(*x)]).collect());
        if seen.insert(r.clone()) {
            elements.push(r);
        }
    }
    let action = FiniteGroupAction {
        space: g.space.subspace(&points),
        elements,
    };
    let zeta = ParameterFunction {
        domain: action.space.clone(),
        codomain: zeta.codomain.clone(),
        map: points.iter().map(|&x| zeta.map[x]).collect(),
    };
    let permissible = is_permissible(&action, &zeta)?;
    Ok(OrbitReduction {
        points,
        action,
        zeta,
        permissible,
    })
}

/// A pair `(sample-space element, parameter-space element)` linked by the
/// homomorphism from the sample-space group to the parameter group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPair {
    pub sample: Permutation,
    pub parameter: Permutation,
}

impl GroupPair {
    pub fn new(sample: Vec<usize>, parameter: Vec<usize>) -> Result<Self, SymmetryError> {
        let n_s = sample.len();
        let n_p = parameter.len();
        Ok(Self {
            sample: Permutation::new(sample)
                .ok_or(SymmetryError::InvalidPermutation { index: 0, n: n_s })?,
            parameter: Permutation::new(parameter)
                .ok_or(SymmetryError::InvalidPermutation { index: 1, n: n_p })?,
        })
    }
}

const EQUIVARIANCE_TOL: f64 = 1e-12;

/// Checks `P^{g theta}(g_hat x) = P^theta(x)` over all pairs, parameters and
/// sample points. `model[theta][x]` is the probability of `x` under `theta`.
pub fn check_equivariance(model: &[Vec<f64>], pairing: &[GroupPair]) -> Result<bool, SymmetryError> {
    let n_theta = model.len();
    let n_x = model.first().map_or(0, Vec::len);
    for (row, probs) in model.iter().enumerate() {
        let total: f64 = probs.iter().sum();
        if probs.len() != n_x
            || probs.iter().any(|p| !p.is_finite() || *p < 0.0)
            || (total - 1.0).abs() > 1e-10
        {
            return Err(SymmetryError::NotADistribution { row });
        }
    }
    for pair in pairing {
        check_pair(pair, n_x, n_theta)?;
    }
    for pair in pairing {
        for (theta, probs) in model.iter().enumerate() {
            let moved = &model[pair.parameter.apply(theta)];
            for (x, &p) in probs.iter().enumerate() {
                if (moved[pair.sample.apply(x)] - p).abs() > EQUIVARIANCE_TOL {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Checks `est(g_hat x) = g est(x)` for all pairs and sample points.
pub fn check_equivariant_estimator(
    est: &[usize],
    n_theta: usize,
    pairing: &[GroupPair],
) -> Result<bool, SymmetryError> {
    if let Some(&bad) = est.iter().find(|&&t| t >= n_theta) {
        return Err(SymmetryError::DomainMismatch(format!(
            "estimate {bad} is outside the parameter space"
        )));
    }
    for pair in pairing {
        check_pair(pair, est.len(), n_theta)?;
    }
    Ok(pairing.iter().all(|pair| {
        (0..est.len()).all(|x| est[pair.sample.apply(x)] == pair.parameter.apply(est[x]))
    }))
}

fn check_pair(pair: &GroupPair, n_x: usize, n_theta: usize) -> Result<(), SymmetryError> {
    if pair.sample.len() != n_x || pair.parameter.len() != n_theta {
        return Err(SymmetryError::DomainMismatch(format!(
            "pair acts on {}x{} points, model is {}x{}",
            pair.sample.len(),
            pair.parameter.len(),
            n_x,
            n_theta
        )));
    }
    Ok(())
}
