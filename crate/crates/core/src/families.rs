//! Generators of structured and random bounded families for experiments.
//!
//! Graph-shaped generators work over the edge set of the complete graph
//! `K_v` with edges indexed lexicographically over vertex pairs; the edge
//! labels are recorded in the ground set so reports stay interpretable.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::run_rng;
use crate::sets::{GroundSet, SetFamily, SubsetMask, MAX_GROUND_SIZE};

/// What to generate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Edge sets of all k-cliques of `K_v`.
    Clique { vertices: usize, clique_size: usize },
    /// Edge sets of all perfect matchings of `K_v` (v even).
    PerfectMatching { vertices: usize },
    /// Edge sets of all stars with `leaves` leaves in `K_v`.
    Star { vertices: usize, leaves: usize },
    /// `count` distinct nonempty subsets of `[n]` with sizes in `1..=ell`,
    /// uniform by (size, then subset).
    Random { n: usize, count: usize, ell: usize, seed: u64 },
}

/// Lexicographic edge index of `{i, j}` in `K_v`, with `i < j`.
fn edge_index(v: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < v);
    // Edges (0,1),(0,2),…,(0,v−1),(1,2),…
    i * v - i * (i + 1) / 2 + (j - i - 1)
}

fn edge_ground(v: usize) -> Result<GroundSet> {
    let edges = v * (v - 1) / 2;
    if v < 2 || edges > MAX_GROUND_SIZE {
        return Err(Error::Generator(format!(
            "K_{v} has {edges} edges, outside the supported ground range"
        )));
    }
    let mut labels = Vec::with_capacity(edges);
    for i in 0..v {
        for j in (i + 1)..v {
            labels.push(format!("{i}-{j}"));
        }
    }
    GroundSet::with_labels(edges, labels)
}

pub fn generate(spec: &GeneratorSpec) -> Result<SetFamily> {
    match *spec {
        GeneratorSpec::Clique { vertices, clique_size } => gen_cliques(vertices, clique_size),
        GeneratorSpec::PerfectMatching { vertices } => gen_matchings(vertices),
        GeneratorSpec::Star { vertices, leaves } => gen_stars(vertices, leaves),
        GeneratorSpec::Random { n, count, ell, seed } => gen_random_family(n, count, ell, seed),
    }
}

fn gen_cliques(v: usize, k: usize) -> Result<SetFamily> {
    let ground = edge_ground(v)?;
    if k < 2 || k > v {
        return Err(Error::Generator(format!("clique size {k} not in 2..={v}")));
    }
    let mut members = Vec::new();
    for vertex_set in combinations(v, k) {
        let mut bits = 0u64;
        for a in 0..k {
            for b in (a + 1)..k {
                bits |= 1 << edge_index(v, vertex_set[a], vertex_set[b]);
            }
        }
        members.push(SubsetMask::from_bits(bits));
    }
    SetFamily::new(ground, members)
}

fn gen_matchings(v: usize) -> Result<SetFamily> {
    let ground = edge_ground(v)?;
    if !v.is_multiple_of(2) {
        return Err(Error::Generator(format!("perfect matchings need even v, got {v}")));
    }
    let mut members = Vec::new();
    let mut used = vec![false; v];
    fn recurse(
        v: usize,
        used: &mut [bool],
        bits: u64,
        members: &mut Vec<SubsetMask>,
    ) {
        let Some(first) = used.iter().position(|&u| !u) else {
            members.push(SubsetMask::from_bits(bits));
            return;
        };
        used[first] = true;
        for partner in (first + 1)..v {
            if !used[partner] {
                used[partner] = true;
                recurse(v, used, bits | 1 << edge_index(v, first, partner), members);
                used[partner] = false;
            }
        }
        used[first] = false;
    }
    recurse(v, &mut used, 0, &mut members);
    SetFamily::new(ground, members)
}

fn gen_stars(v: usize, d: usize) -> Result<SetFamily> {
    let ground = edge_ground(v)?;
    if d < 1 || d > v - 1 {
        return Err(Error::Generator(format!("star degree {d} not in 1..={}", v - 1)));
    }
    let mut members = Vec::new();
    for center in 0..v {
        let others: Vec<usize> = (0..v).filter(|&x| x != center).collect();
        for leaf_set in combinations(others.len(), d) {
            let mut bits = 0u64;
            for &li in &leaf_set {
                let leaf = others[li];
                let (a, b) = if center < leaf { (center, leaf) } else { (leaf, center) };
                bits |= 1 << edge_index(v, a, b);
            }
            members.push(SubsetMask::from_bits(bits));
        }
    }
    SetFamily::new(ground, members)
}

/// `count` distinct nonempty subsets with sizes in `1..=ell`: draw a size
/// uniformly, then a uniform subset of that size, rejecting duplicates.
/// Rejects infeasible counts instead of truncating.
pub fn gen_random_family(n: usize, count: usize, ell: usize, seed: u64) -> Result<SetFamily> {
    let ground = GroundSet::new(n)?;
    if ell < 1 || ell > n {
        return Err(Error::Generator(format!("ell = {ell} not in 1..={n}")));
    }
    let available: u128 = (1..=ell).map(|s| binom_u128(n, s)).sum();
    if count as u128 > available {
        return Err(Error::Generator(format!(
            "requested {count} distinct sets but only {available} exist with sizes 1..={ell}"
        )));
    }
    let mut rng = run_rng(seed);
    let mut chosen = std::collections::HashSet::new();
    while chosen.len() < count {
        let size = rng.random_range(1..=ell);
        // Uniform size-subset via partial Fisher–Yates.
        let mut indices: Vec<usize> = (0..n).collect();
        let mut bits = 0u64;
        for t in 0..size {
            let pick = rng.random_range(t..n);
            indices.swap(t, pick);
            bits |= 1 << indices[t];
        }
        chosen.insert(bits);
    }
    SetFamily::new(ground, chosen.into_iter().map(SubsetMask::from_bits))
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc
}

/// All k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangles_of_k4() {
        let f = generate(&GeneratorSpec::Clique { vertices: 4, clique_size: 3 }).unwrap();
        assert_eq!(f.ground().size(), 6);
        assert_eq!(f.len(), 4);
        assert!(f.members().iter().all(|m| m.size() == 3));
        assert!(f.is_antichain());
    }

    #[test]
    fn triangles_of_k5() {
        let f = generate(&GeneratorSpec::Clique { vertices: 5, clique_size: 3 }).unwrap();
        assert_eq!(f.ground().size(), 10);
        assert_eq!(f.len(), 10);
    }

    #[test]
    fn matchings_of_k4() {
        let f = generate(&GeneratorSpec::PerfectMatching { vertices: 4 }).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.members().iter().all(|m| m.size() == 2));
        assert!(generate(&GeneratorSpec::PerfectMatching { vertices: 5 }).is_err());
    }

    #[test]
    fn stars_of_k4() {
        let f = generate(&GeneratorSpec::Star { vertices: 4, leaves: 2 }).unwrap();
        // 4 centers × binom(3,2) leaf choices.
        assert_eq!(f.len(), 12);
        assert!(f.members().iter().all(|m| m.size() == 2));
    }

    #[test]
    fn ground_cap_enforced() {
        assert!(generate(&GeneratorSpec::Clique { vertices: 12, clique_size: 3 }).is_err());
        assert!(generate(&GeneratorSpec::Clique { vertices: 11, clique_size: 3 }).is_ok());
    }

    #[test]
    fn random_family_contract() {
        let f = gen_random_family(6, 5, 2, 99).unwrap();
        assert_eq!(f.len(), 5);
        assert!(f.bound_ell() <= 2);
        assert!(f.members().iter().all(|m| !m.is_empty()));
        assert_eq!(f, gen_random_family(6, 5, 2, 99).unwrap());
        assert_ne!(f, gen_random_family(6, 5, 2, 100).unwrap());
    }

    #[test]
    fn random_family_exhaustion() {
        let f = gen_random_family(4, 15, 4, 1).unwrap();
        assert_eq!(f.len(), 15);
        assert!(gen_random_family(4, 16, 4, 1).is_err());
    }

    #[test]
    fn edge_indexing_is_lexicographic() {
        assert_eq!(edge_index(4, 0, 1), 0);
        assert_eq!(edge_index(4, 0, 3), 2);
        assert_eq!(edge_index(4, 1, 2), 3);
        assert_eq!(edge_index(4, 2, 3), 5);
        let labels: Vec<String> = edge_ground(4).unwrap().labels().unwrap().to_vec();
        assert_eq!(labels[0], "0-1");
        assert_eq!(labels[5], "2-3");
    }
}
