//! Rooted planar binary trees and their exact combinatorics.
//!
//! A tree is stored as its "levels" word-code: the in-order sequence of
//! vertex levels, root at level 1. The grade-0 leaf is the singleton code
//! `0`. A code of grade >= 1 contains exactly one digit `1`; splitting at
//! it and decrementing both halves yields the root's two subtrees, so the
//! codec, grafting and root-splitting are all O(grade) slice operations.
//!
//! Codes of equal length compare numerically, which is exactly the tree
//! order used everywhere downstream (forests, coefficient vectors, the
//! branching matrix).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigUint;
use num::integer::binomial;
use num::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest grade the enumeration entry points accept by default. Catalan
/// growth makes anything larger a deliberate opt-in via the `_capped`
/// variants.
pub const DEFAULT_GRADE_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("invalid word-code `{code}`: {reason}")]
    InvalidCode { code: String, reason: String },
    #[error("the leaf tree has no root split")]
    LeafTree,
    #[error("grade {requested} exceeds the configured cap {cap}")]
    ResourceLimit { requested: usize, cap: usize },
}

/// A rooted planar binary tree, held as its levels word-code.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    code: Vec<u8>,
}

impl Tree {
    /// The grade-0 tree, word-code `0`.
    pub fn leaf() -> Tree {
        Tree { code: vec![0] }
    }

    pub fn is_leaf(&self) -> bool {
        self.code == [0]
    }

    /// Number of internal vertices; equals the code length except for the leaf.
    pub fn grade(&self) -> usize {
        if self.is_leaf() {
            0
        } else {
            self.code.len()
        }
    }

    pub fn code(&self) -> &[u8] {
        &self.code
    }

    /// Builds a tree from a level sequence, enforcing the recursive
    /// validity invariant (one root digit per segment, contiguous levels).
    pub fn from_levels(levels: &[u8]) -> Result<Tree, TreeError> {
        if levels.is_empty() {
            return Err(invalid(levels, "empty code"));
        }
        if levels == [0] {
            return Ok(Tree::leaf());
        }
        if levels.contains(&0) {
            return Err(invalid(levels, "digit 0 only encodes the leaf tree"));
        }
        validate_segment(levels, 1).map_err(|reason| invalid(levels, &reason))?;
        Ok(Tree {
            code: levels.to_vec(),
        })
    }

    /// Parses the textual form produced by `Display`: concatenated digits
    /// when every level is below 10 (`"231323"`), dot-separated otherwise
    /// (`"1.2.3.10"`).
    pub fn parse(word: &str) -> Result<Tree, TreeError> {
        if word.is_empty() {
            return Err(TreeError::InvalidCode {
                code: word.to_string(),
                reason: "empty code".into(),
            });
        }
        let levels: Result<Vec<u8>, _> = if word.contains('.') {
            word.split('.')
                .map(|part| part.parse::<u8>().map_err(|e| e.to_string()))
                .collect()
        } else {
            word.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| format!("non-digit character `{c}`"))
                })
                .collect()
        };
        let levels = levels.map_err(|reason| TreeError::InvalidCode {
            code: word.to_string(),
            reason,
        })?;
        Tree::from_levels(&levels)
    }

    /// Grafts `self` and `right` at a new root: each level is shifted up by
    /// one and the halves are joined by the new root digit `1`. The leaf
    /// contributes an empty segment.
    pub fn graft(&self, right: &Tree) -> Tree {
        let mut code = Vec::with_capacity(self.grade() + right.grade() + 1);
        if !self.is_leaf() {
            code.extend(self.code.iter().map(|d| d + 1));
        }
        code.push(1);
        if !right.is_leaf() {
            code.extend(right.code.iter().map(|d| d + 1));
        }
        Tree { code }
    }

    /// Inverse of `graft`: the two subtrees hanging off the root.
    pub fn split_root(&self) -> Result<(Tree, Tree), TreeError> {
        if self.is_leaf() {
            return Err(TreeError::LeafTree);
        }
        let root = self
            .code
            .iter()
            .position(|&d| d == 1)
            .expect("valid nonzero-grade code has a root digit");
        Ok((segment(&self.code[..root]), segment(&self.code[root + 1..])))
    }

    /// Weight character: 1 on the leaf, and the Leibniz binomial times the
    /// subtree weights at every root split.
    pub fn weight(&self) -> BigUint {
        if self.is_leaf() {
            return BigUint::one();
        }
        let (a, b) = self.split_root().expect("non-leaf");
        let coeff = binomial(
            BigUint::from(a.grade() + b.grade()),
            BigUint::from(a.grade()),
        );
        coeff * a.weight() * b.weight()
    }

    /// Attaches a new vertex to every free branch, one output tree per
    /// free branch (grade + 1 of them), duplicates kept.
    pub fn branch(&self) -> Vec<Tree> {
        if self.is_leaf() {
            return vec![Tree {
                code: vec![1],
            }];
        }
        let n = self.code.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            // A free left branch exists when no earlier neighbour sits one
            // level up; scanning the code, that is `code[i-1] < code[i]`.
            if i == 0 || self.code[i - 1] < self.code[i] {
                let mut code = self.code.clone();
                code.insert(i, self.code[i] + 1);
                out.push(Tree { code });
            }
            if i + 1 == n || self.code[i + 1] < self.code[i] {
                let mut code = self.code.clone();
                code.insert(i + 1, self.code[i] + 1);
                out.push(Tree { code });
            }
        }
        out
    }

    /// Lowest word-code representative of the vertex-twist equivalence
    /// class: canonicalize both subtrees, then keep the smaller of the two
    /// root orders.
    pub fn canonical(&self) -> Tree {
        if self.is_leaf() {
            return self.clone();
        }
        let (a, b) = self.split_root().expect("non-leaf");
        let (ca, cb) = (a.canonical(), b.canonical());
        let ab = ca.graft(&cb);
        let ba = cb.graft(&ca);
        if ab <= ba {
            ab
        } else {
            ba
        }
    }

    /// Number of internal vertices whose two subtrees are non-isomorphic as
    /// non-planar trees; the twist class of the tree has 2^sigma members.
    pub fn symmetry(&self) -> u32 {
        if self.is_leaf() {
            return 0;
        }
        let (a, b) = self.split_root().expect("non-leaf");
        let here = u32::from(a.canonical() != b.canonical());
        here + a.symmetry() + b.symmetry()
    }

    /// Every tree reachable by twisting vertices, the brute-force orbit the
    /// canonical form and symmetry count are checked against.
    pub fn twist_orbit(&self) -> BTreeSet<Tree> {
        fn expand(t: &Tree) -> Vec<Tree> {
            if t.is_leaf() {
                return vec![t.clone()];
            }
            let (a, b) = t.split_root().expect("non-leaf");
            let mut out = Vec::new();
            for ea in expand(&a) {
                for eb in expand(&b) {
                    out.push(ea.graft(&eb));
                    out.push(eb.graft(&ea));
                }
            }
            out
        }
        expand(self).into_iter().collect()
    }
}

fn invalid(levels: &[u8], reason: &str) -> TreeError {
    TreeError::InvalidCode {
        code: levels
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(if levels.iter().any(|&d| d > 9) { "." } else { "" }),
        reason: reason.to_string(),
    }
}

fn validate_segment(seg: &[u8], level: u8) -> Result<(), String> {
    if seg.is_empty() {
        return Ok(());
    }
    let roots: Vec<usize> = seg
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == level)
        .map(|(i, _)| i)
        .collect();
    match roots.len() {
        1 => {
            let r = roots[0];
            validate_segment(&seg[..r], level + 1)?;
            validate_segment(&seg[r + 1..], level + 1)
        }
        0 => Err(format!("segment `{seg:?}` has no level-{level} root")),
        _ => Err(format!("segment `{seg:?}` has multiple level-{level} roots")),
    }
}

fn segment(seg: &[u8]) -> Tree {
    if seg.is_empty() {
        Tree::leaf()
    } else {
        Tree {
            code: seg.iter().map(|d| d - 1).collect(),
        }
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade()
            .cmp(&other.grade())
            .then_with(|| self.code.cmp(&other.code))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.code.iter().all(|&d| d <= 9) {
            for d in &self.code {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.code.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl FromStr for Tree {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tree::parse(s)
    }
}

impl Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Tree::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A tree together with its weight and symmetry count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeTriple {
    pub tree: Tree,
    pub weight: BigUint,
    pub symmetry: u32,
}

impl TreeTriple {
    pub fn new(tree: Tree) -> TreeTriple {
        let weight = tree.weight();
        let symmetry = tree.symmetry();
        TreeTriple {
            tree,
            weight,
            symmetry,
        }
    }
}

/// All trees of one grade, strictly increasing in tree order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Forest {
    pub grade: usize,
    pub entries: Vec<TreeTriple>,
}

impl Forest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn trees(&self) -> impl Iterator<Item = &Tree> {
        self.entries.iter().map(|t| &t.tree)
    }
}

/// A non-planar class representative with the grafting pair that generates
/// it (the root split of the canonical code; both children canonical).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonplanarEntry {
    pub triple: TreeTriple,
    pub left: Tree,
    pub right: Tree,
}

/// nth Catalan number, binomial(2n, n)/(n+1).
pub fn catalan(n: usize) -> BigUint {
    binomial(BigUint::from(2 * n), BigUint::from(n)) / BigUint::from(n + 1)
}

/// All planar trees of grades 0..=n, one forest per grade, tree-ordered.
pub fn enumerate_planar_upto(n: usize, cap: usize) -> Result<Vec<Forest>, TreeError> {
    if n > cap {
        return Err(TreeError::ResourceLimit { requested: n, cap });
    }
    let mut by_grade: Vec<Vec<Tree>> = vec![vec![Tree::leaf()]];
    for g in 1..=n {
        let mut trees = Vec::new();
        for k in 0..g {
            for a in &by_grade[k] {
                for b in &by_grade[g - 1 - k] {
                    trees.push(a.graft(b));
                }
            }
        }
        trees.sort();
        by_grade.push(trees);
    }
    Ok(by_grade
        .into_iter()
        .enumerate()
        .map(|(grade, trees)| Forest {
            grade,
            entries: trees.into_iter().map(TreeTriple::new).collect(),
        })
        .collect())
}

/// The planar forest of grade n (Catalan(n) trees).
pub fn enumerate_planar(n: usize) -> Result<Forest, TreeError> {
    enumerate_planar_capped(n, DEFAULT_GRADE_CAP)
}

pub fn enumerate_planar_capped(n: usize, cap: usize) -> Result<Forest, TreeError> {
    Ok(enumerate_planar_upto(n, cap)?.pop().expect("grade n forest"))
}

/// Non-planar class representatives of grades 0..=n with their generating
/// pairs, built by grafting unordered pairs of lower-grade representatives.
pub fn enumerate_nonplanar_upto(
    n: usize,
    cap: usize,
) -> Result<Vec<Vec<NonplanarEntry>>, TreeError> {
    if n > cap {
        return Err(TreeError::ResourceLimit { requested: n, cap });
    }
    let leaf = NonplanarEntry {
        triple: TreeTriple::new(Tree::leaf()),
        left: Tree::leaf(),
        right: Tree::leaf(),
    };
    let mut by_grade: Vec<Vec<NonplanarEntry>> = vec![vec![leaf]];
    for g in 1..=n {
        let mut entries = Vec::new();
        for k in 0..=(g - 1) / 2 {
            let hi = g - 1 - k;
            for (ai, a) in by_grade[k].iter().enumerate() {
                for (bi, b) in by_grade[hi].iter().enumerate() {
                    if k == hi && bi < ai {
                        continue;
                    }
                    let ab = a.triple.tree.graft(&b.triple.tree);
                    let ba = b.triple.tree.graft(&a.triple.tree);
                    let rep = if ab <= ba { ab } else { ba };
                    let (left, right) = rep.split_root().expect("grade >= 1");
                    entries.push(NonplanarEntry {
                        triple: TreeTriple::new(rep),
                        left,
                        right,
                    });
                }
            }
        }
        entries.sort_by(|x, y| x.triple.tree.cmp(&y.triple.tree));
        by_grade.push(entries);
    }
    Ok(by_grade)
}

/// The forest of non-planar representatives at grade n
/// (Wedderburn-Etherington many).
pub fn enumerate_nonplanar(n: usize) -> Result<Forest, TreeError> {
    enumerate_nonplanar_capped(n, DEFAULT_GRADE_CAP)
}

pub fn enumerate_nonplanar_capped(n: usize, cap: usize) -> Result<Forest, TreeError> {
    let entries = enumerate_nonplanar_upto(n, cap)?.pop().expect("grade n");
    Ok(Forest {
        grade: n,
        entries: entries.into_iter().map(|e| e.triple).collect(),
    })
}
