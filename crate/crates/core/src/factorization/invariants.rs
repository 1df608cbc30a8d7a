use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{distance, Factorization};

/// Arithmetic invariants of a single element, computed from `Z(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementInvariants {
    pub factorization_count: usize,
    pub lengths: Vec<u32>,
    pub delta: Vec<u32>,
    #[serde(with = "crate::ratio")]
    pub rho: Ratio<u32>,
    pub catenary: u32,
    pub monotone_catenary: u32,
    pub tame: u32,
}

impl ElementInvariants {
    pub fn compute(z: &[Factorization]) -> Self {
        let lengths = length_set(z);
        let d = Distances::new(z);
        let catenary = catenary_from(&d);
        ElementInvariants {
            factorization_count: z.len(),
            delta: delta_of_element(&lengths).into_iter().collect(),
            rho: elasticity_of_element(&lengths),
            catenary,
            monotone_catenary: monotone_catenary_from(z, &d, catenary),
            tame: tame_from(z, &d),
            lengths,
        }
    }
}

/// `|gcd(a, b)|` for ascending id lists, without data-dependent branches.
#[inline]
fn common_len(a: &[u32], b: &[u32]) -> u32 {
    let (mut i, mut j, mut common) = (0, 0, 0u32);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        common += (x == y) as u32;
        i += (x <= y) as usize;
        j += (y <= x) as usize;
    }
    common
}

/// Pairwise distances of a factorization set, computed once.
struct Distances {
    n: usize,
    d: Vec<u16>,
}

impl Distances {
    fn new(z: &[Factorization]) -> Self {
        let n = z.len();
        let flat: Vec<(u32, &[u32])> = z.iter().map(|f| (f.len(), f.ids())).collect();
        let mut d = vec![0u16; n * n];
        for i in 0..n {
            let (li, a) = flat[i];
            for j in i + 1..n {
                let (lj, b) = flat[j];
                let v = (li.max(lj) - common_len(a, b)).min(u16::MAX as u32) as u16;
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Distances { n, d }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> u32 {
        self.d[i * self.n + j] as u32
    }

    #[inline]
    fn row(&self, i: usize) -> &[u16] {
        &self.d[i * self.n..(i + 1) * self.n]
    }
}

/// `L(a)`, ascending.
pub fn length_set(z: &[Factorization]) -> Vec<u32> {
    z.iter()
        .map(|f| f.len())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Successive differences of a sorted length set.
pub fn delta_of_element(lengths: &[u32]) -> BTreeSet<u32> {
    lengths.windows(2).map(|w| w[1] - w[0]).collect()
}

/// `max L / min L`; one for the identity and for elements without
/// factorizations.
pub fn elasticity_of_element(lengths: &[u32]) -> Ratio<u32> {
    match (lengths.first(), lengths.last()) {
        (Some(&lo), Some(&hi)) if lo > 0 => Ratio::new(hi, lo),
        _ => Ratio::from_integer(1),
    }
}

/// Smallest `N` making the distance-`≤ N` graph on `Z(a)` connected: the
/// bottleneck edge of a minimum spanning tree.
pub fn catenary_of_element(z: &[Factorization]) -> u32 {
    catenary_from(&Distances::new(z))
}

fn catenary_from(d: &Distances) -> u32 {
    let n = d.n;
    if n <= 1 {
        return 0;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![u32::MAX; n];
    best[0] = 0;
    let mut bottleneck = 0;
    for _ in 0..n {
        let (next, _) = best
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_tree[*i])
            .min_by_key(|(_, &d)| d)
            .expect("an unvisited vertex remains");
        in_tree[next] = true;
        bottleneck = bottleneck.max(best[next]);
        for (j, &dj) in d.row(next).iter().enumerate() {
            if !in_tree[j] {
                best[j] = best[j].min(dj as u32);
            }
        }
    }
    bottleneck
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Whether any two factorizations can be joined by an `N`-chain whose
/// lengths never decrease (from the shorter end).
///
/// Inside one length level this is plain connectivity. Between levels, once
/// each level is a single class, a monotone chain from level `i` to a higher
/// level `j` exists iff `j` is reachable from `i` along upward edges.
fn monotone_chains_at(d: &Distances, levels: &BTreeMap<u32, Vec<usize>>, n: u32) -> bool {
    let mut uf = UnionFind::new(d.n);
    for members in levels.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if d.get(i, j) <= n {
                    uf.union(i, j);
                }
            }
        }
        let root = uf.find(members[0]);
        if members.iter().any(|&i| uf.find(i) != root) {
            return false;
        }
    }
    let keys: Vec<&Vec<usize>> = levels.values().collect();
    let m = keys.len();
    let mut edge = vec![vec![false; m]; m];
    for a in 0..m {
        for b in a + 1..m {
            edge[a][b] = keys[a]
                .iter()
                .any(|&i| keys[b].iter().any(|&j| d.get(i, j) <= n));
        }
    }
    let mut reach = vec![vec![false; m]; m];
    for a in (0..m).rev() {
        reach[a][a] = true;
        for b in a + 1..m {
            if edge[a][b] {
                let (lo, hi) = reach.split_at_mut(b);
                for (to, &from) in lo[a][b..].iter_mut().zip(&hi[0][b..]) {
                    *to |= from;
                }
            }
        }
        if reach[a][a..].iter().any(|&r| !r) {
            return false;
        }
    }
    true
}

/// Smallest `N` such that any two factorizations are joined by a monotone
/// `N`-chain. At least the catenary degree; equal to it when all
/// factorizations have the same length.
pub fn monotone_catenary_of_element(z: &[Factorization]) -> u32 {
    let d = Distances::new(z);
    monotone_catenary_from(z, &d, catenary_from(&d))
}

fn monotone_catenary_from(z: &[Factorization], d: &Distances, c: u32) -> u32 {
    if z.len() <= 1 {
        return c;
    }
    let mut levels: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, f) in z.iter().enumerate() {
        levels.entry(f.len()).or_default().push(i);
    }
    if levels.len() == 1 {
        return c;
    }
    let candidates: BTreeSet<u32> = d.d.iter().map(|&v| v as u32).filter(|&v| v >= c).collect();
    candidates
        .into_iter()
        .find(|&n| monotone_chains_at(d, &levels, n))
        .expect("the largest distance always admits monotone chains")
}

/// `t(a, u)`: how far a factorization may be from one containing `u`.
/// Zero when `u` occurs in no factorization.
pub fn tame_of_pair(z: &[Factorization], atom: u32) -> u32 {
    let with: Vec<&Factorization> = z.iter().filter(|f| f.contains(atom)).collect();
    if with.is_empty() {
        return 0;
    }
    z.iter()
        .filter(|f| !f.contains(atom))
        .map(|f| with.iter().map(|w| distance(f, w)).min().unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// `t(a)`: maximum of `t(a, u)` over the atoms dividing `a`.
pub fn tame_of_element(z: &[Factorization]) -> u32 {
    tame_from(z, &Distances::new(z))
}

/// For each factorization `f`, the nearest factorization containing each
/// atom, in one pass over the distance row of `f`.
fn tame_from(z: &[Factorization], d: &Distances) -> u32 {
    let atoms: Vec<u32> = z
        .iter()
        .flat_map(|f| f.ids().iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let slots: Vec<Vec<usize>> = z
        .iter()
        .map(|w| {
            let mut s: Vec<usize> = w
                .ids()
                .iter()
                .map(|id| atoms.binary_search(id).expect("atom occurs in Z(a)"))
                .collect();
            s.dedup();
            s
        })
        .collect();
    let top = d.d.iter().copied().max().unwrap_or(0) as usize;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    let mut done = vec![false; atoms.len()];
    let mut out = 0;
    for i in 0..z.len() {
        for b in &mut buckets {
            b.clear();
        }
        for (j, &dij) in d.row(i).iter().enumerate() {
            buckets[dij as usize].push(j);
        }
        // atoms of `f` need no partner; count the others down as they are met
        let mut missing = atoms.len();
        done.fill(false);
        for &s in &slots[i] {
            done[s] = true;
            missing -= 1;
        }
        'levels: for (dist, bucket) in buckets.iter().enumerate() {
            for &j in bucket {
                for &s in &slots[j] {
                    if !done[s] {
                        done[s] = true;
                        missing -= 1;
                        out = out.max(dist as u32);
                        if missing == 0 {
                            break 'levels;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Classes of the relation generated by "shares an atom". With
/// `equal_length` only factorizations of the same length are linked.
/// Each class is a sorted list of indices into `z`.
pub fn r_chain_classes(z: &[Factorization], equal_length: bool) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(z.len());
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            if (!equal_length || z[i].len() == z[j].len()) && z[i].shares_atom_with(&z[j]) {
                uf.union(i, j);
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..z.len() {
        let r = uf.find(i);
        classes.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort();
    out
}

/// Whether `z[x]` and `z[y]` are joined by a chain of factorizations with
/// monotone lengths in which consecutive members share an atom.
pub fn monotone_r_chain_exists(z: &[Factorization], x: usize, y: usize) -> bool {
    let (from, to) = if z[x].len() <= z[y].len() {
        (x, y)
    } else {
        (y, x)
    };
    monotone_r_reachable(z, from, z[to].len())[to]
}

/// Indices reachable from `z[from]` along chains of non-decreasing length,
/// never longer than `ceiling`, in which consecutive members share an atom.
pub fn monotone_r_reachable(z: &[Factorization], from: usize, ceiling: u32) -> Vec<bool> {
    let mut seen = vec![false; z.len()];
    if z[from].len() > ceiling {
        return seen;
    }
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..z.len() {
            if !seen[j]
                && z[j].len() >= z[i].len()
                && z[j].len() <= ceiling
                && z[i].shares_atom_with(&z[j])
            {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::super::testing::Numerical;
    use super::super::{factorizations, AtomTable};
    use super::*;

    fn f(ids: &[u32]) -> Factorization {
        Factorization::from_ids(ids.iter().copied())
    }

    #[test]
    fn length_set_delta_rho() {
        let z = vec![f(&[0, 0]), f(&[1, 1, 1]), f(&[2, 2, 2, 2, 2])];
        let l = length_set(&z);
        assert_eq!(l, vec![2, 3, 5]);
        assert_eq!(delta_of_element(&l), BTreeSet::from([1, 2]));
        assert_eq!(elasticity_of_element(&l), Ratio::new(5, 2));
        assert_eq!(elasticity_of_element(&[0]), Ratio::from_integer(1));
    }

    #[test]
    fn catenary_of_trivial_sets() {
        assert_eq!(catenary_of_element(&[]), 0);
        assert_eq!(catenary_of_element(&[f(&[0, 1])]), 0);
        assert_eq!(catenary_of_element(&[f(&[0, 0]), f(&[1, 2])]), 2);
    }

    #[test]
    fn catenary_is_bottleneck_not_diameter() {
        // a-b-c path with distances 2, 2 while d(a, c) = 3
        let z = vec![f(&[0, 1, 2]), f(&[0, 3, 4]), f(&[5, 3, 4])];
        assert_eq!(distance(&z[0], &z[2]), 3);
        assert_eq!(catenary_of_element(&z), 2);
    }

    #[test]
    fn numerical_semigroup_two_three() {
        // ⟨2,3⟩: Z(12) = {2^6, 2^3 3^2, 3^4}
        let m = Numerical::new(&[2, 3], 30);
        let atoms: AtomTable<u32> = m.atoms();
        let z = factorizations(&m, &atoms, &12);
        assert_eq!(catenary_of_element(&z), 3);
        let inv = ElementInvariants::compute(&z);
        assert_eq!(inv.lengths, vec![4, 5, 6]);
        assert_eq!(inv.delta, vec![1]);
        assert_eq!(inv.monotone_catenary, 3);
        assert_eq!(inv.rho, Ratio::new(3, 2));
    }

    #[test]
    fn monotone_needs_more_than_catenary() {
        // The two length-3 factorizations are linked at distance 2 only
        // through the longer one.
        let z = vec![f(&[0, 1, 2]), f(&[0, 1, 3, 4]), f(&[3, 4, 5])];
        assert_eq!(catenary_of_element(&z), 2);
        assert_eq!(monotone_catenary_of_element(&z), 3);
        assert_eq!(brute_monotone(&z), 3);
    }

    /// Direct definition: smallest N such that for every ordered pair with
    /// |x| ≤ |y| some simple monotone N-chain from x reaches y.
    fn brute_monotone(z: &[Factorization]) -> u32 {
        let reach = |n: u32, x: usize, y: usize| {
            let mut seen = vec![false; z.len()];
            let mut stack = vec![x];
            seen[x] = true;
            while let Some(i) = stack.pop() {
                if i == y {
                    return true;
                }
                for j in 0..z.len() {
                    if !seen[j]
                        && z[j].len() >= z[i].len()
                        && z[j].len() <= z[y].len()
                        && distance(&z[i], &z[j]) <= n
                    {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            false
        };
        (0..)
            .find(|&n| {
                (0..z.len()).all(|x| {
                    (0..z.len()).all(|y| z[x].len() > z[y].len() || reach(n, x, y))
                })
            })
            .unwrap()
    }

    #[test]
    fn monotone_catenary_matches_definition_on_numerical_semigroups() {
        for gens in [&[3u32, 5, 7][..], &[4, 6, 9], &[5, 7, 8, 9], &[6, 7, 10, 11]] {
            let m = Numerical::new(gens, 60);
            let atoms = m.atoms();
            for a in m.elements() {
                let z = factorizations(&m, &atoms, &a);
                assert_eq!(
                    monotone_catenary_of_element(&z),
                    brute_monotone(&z),
                    "gens {gens:?}, element {a}"
                );
            }
        }
    }

    #[test]
    fn tame_examples() {
        let z = vec![f(&[0, 0]), f(&[1, 1, 1])];
        assert_eq!(tame_of_pair(&z, 0), 3);
        assert_eq!(tame_of_pair(&z, 1), 3);
        assert_eq!(tame_of_pair(&z, 7), 0);
        assert_eq!(tame_of_element(&z), 3);
        assert_eq!(tame_of_element(&[f(&[4])]), 0);
    }

    #[test]
    fn r_classes_and_monotone_chains() {
        let z = vec![f(&[0, 1]), f(&[1, 2, 3]), f(&[4, 5]), f(&[2, 6, 7, 8])];
        assert_eq!(r_chain_classes(&z, false), vec![vec![0, 1, 3], vec![2]]);
        assert_eq!(
            r_chain_classes(&z, true),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
        assert!(monotone_r_chain_exists(&z, 0, 3));
        assert!(monotone_r_chain_exists(&z, 3, 0));
        assert!(!monotone_r_chain_exists(&z, 0, 2));
        // x=0 to y=3 through 1; a detour through a longer factorization is
        // not monotone.
        let z = vec![f(&[0, 1]), f(&[0, 2, 3, 4]), f(&[2, 5, 6])];
        assert!(!monotone_r_chain_exists(&z, 0, 2));
    }
}
