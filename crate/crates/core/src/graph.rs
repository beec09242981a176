//! Bi-block graphs built by iterated leaf-block attachment.
//!
//! Vertex numbering is deterministic: block 0 takes ids `0..m+n` with its X
//! part first, and every later block appends its `m + n - 1` new vertices in
//! X-then-Y order, skipping the slot taken by the cut vertex (always offset
//! 0 of the attachment side).

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::X => Side::Y,
            Side::Y => Side::X,
        }
    }

    fn slot(self) -> usize {
        match self {
            Side::X => 0,
            Side::Y => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::X => "X",
            Side::Y => "Y",
        })
    }
}

/// A complete bipartite block `K_{m,n}`: `m = |X|`, `n = |Y|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSpec {
    pub m: usize,
    pub n: usize,
}

impl BlockSpec {
    pub fn new(m: usize, n: usize) -> Self {
        BlockSpec { m, n }
    }

    pub fn part_size(&self, side: Side) -> usize {
        match side {
            Side::X => self.m,
            Side::Y => self.n,
        }
    }

    pub fn order(&self) -> usize {
        self.m + self.n
    }
}

/// Glues a new block onto the graph built so far: `cut_vertex` becomes a
/// vertex of the new block's `side` part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Attachment {
    pub cut_vertex: usize,
    pub side: Side,
}

impl Attachment {
    pub fn new(cut_vertex: usize, side: Side) -> Self {
        Attachment { cut_vertex, side }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Membership {
    pub block: usize,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiBlockGraph {
    blocks: Vec<BlockSpec>,
    attachments: Vec<Attachment>,
    /// `parts[b][side][offset]` is the global id at that slot of block `b`.
    parts: Vec<[Vec<usize>; 2]>,
    memberships: Vec<Vec<Membership>>,
    adjacency: Vec<Vec<usize>>,
    distances: Vec<Vec<usize>>,
}

impl BiBlockGraph {
    /// Builds the graph `block_0 ◎ block_1 ◎ ...`; attachment `i` glues block
    /// `i + 1`.
    pub fn new(blocks: Vec<BlockSpec>, attachments: Vec<Attachment>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyGraph);
        }
        for (index, b) in blocks.iter().enumerate() {
            if b.m == 0 || b.n == 0 {
                return Err(Error::InvalidBlock { index, m: b.m, n: b.n });
            }
        }
        if attachments.len() + 1 != blocks.len() {
            return Err(Error::BadAttachment(format!(
                "{} blocks need {} attachments, got {}",
                blocks.len(),
                blocks.len() - 1,
                attachments.len()
            )));
        }

        let mut parts: Vec<[Vec<usize>; 2]> = Vec::with_capacity(blocks.len());
        let mut memberships: Vec<Vec<Membership>> = Vec::new();
        let mut next = 0usize;
        for (b, spec) in blocks.iter().enumerate() {
            let attach = if b == 0 { None } else { Some(attachments[b - 1]) };
            if let Some(a) = attach {
                if a.cut_vertex >= next {
                    return Err(Error::BadAttachment(format!(
                        "attachment {} references vertex {} but only {} vertices exist",
                        b - 1,
                        a.cut_vertex,
                        next
                    )));
                }
            }
            let mut block_parts: [Vec<usize>; 2] = [Vec::with_capacity(spec.m), Vec::with_capacity(spec.n)];
            for side in [Side::X, Side::Y] {
                for offset in 0..spec.part_size(side) {
                    let id = match attach {
                        Some(a) if a.side == side && offset == 0 => a.cut_vertex,
                        _ => {
                            memberships.push(Vec::new());
                            next += 1;
                            next - 1
                        }
                    };
                    memberships[id].push(Membership { block: b, side });
                    block_parts[side.slot()].push(id);
                }
            }
            parts.push(block_parts);
        }

        let mut adjacency = vec![Vec::new(); next];
        for p in &parts {
            for &x in &p[0] {
                for &y in &p[1] {
                    adjacency[x].push(y);
                    adjacency[y].push(x);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let distances = bfs_all_pairs(&adjacency);
        Ok(BiBlockGraph { blocks, attachments, parts, memberships, adjacency, distances })
    }

    /// A single block `K_{m,n}`.
    pub fn complete_bipartite(m: usize, n: usize) -> Result<Self> {
        Self::new(vec![BlockSpec::new(m, n)], Vec::new())
    }

    /// The path on `n >= 2` vertices, numbered along the path.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::EmptyGraph);
        }
        let blocks = vec![BlockSpec::new(1, 1); n - 1];
        let attachments = (1..n - 1).map(|v| Attachment::new(v, Side::X)).collect();
        Self::new(blocks, attachments)
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn attachments(&self) -> &[Attachment] {
        &self.attachments
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.memberships.len()
    }

    /// Global ids of the `side` part of block `b`, in offset order.
    pub fn part(&self, block: usize, side: Side) -> &[usize] {
        &self.parts[block][side.slot()]
    }

    /// The labeling convention: `(block, side, offset)` to global id.
    pub fn vertex_at(&self, block: usize, side: Side, offset: usize) -> Option<usize> {
        self.parts.get(block)?[side.slot()].get(offset).copied()
    }

    pub fn memberships(&self, v: usize) -> &[Membership] {
        &self.memberships[v]
    }

    /// Number of blocks containing `v`.
    pub fn block_index(&self, v: usize) -> usize {
        self.memberships[v].len()
    }

    pub fn is_cut_vertex(&self, v: usize) -> bool {
        self.block_index(v) >= 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn distances(&self) -> &[Vec<usize>] {
        &self.distances
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        self.distances[u][v]
    }

    pub fn diameter(&self) -> usize {
        self.distances.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Every block is `K_{1,1}`.
    pub fn is_tree(&self) -> bool {
        self.blocks.iter().all(|b| b.m == 1 && b.n == 1)
    }

    /// The subgraph made of the first `k` blocks. Its vertex ids coincide
    /// with the first ids of `self`.
    pub fn prefix(&self, k: usize) -> Result<BiBlockGraph> {
        if k == 0 || k > self.blocks.len() {
            return Err(Error::BadAttachment(format!("prefix of {k} blocks out of {}", self.blocks.len())));
        }
        Self::new(self.blocks[..k].to_vec(), self.attachments[..k - 1].to_vec())
    }
}

/// All-pairs shortest path lengths over an unweighted adjacency list.
/// Unreachable pairs are `usize::MAX`.
pub(crate) fn bfs_all_pairs(adjacency: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adjacency.len();
    let mut out = vec![vec![usize::MAX; n]; n];
    let mut queue = VecDeque::new();
    for (s, dist) in out.iter_mut().enumerate() {
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in &adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    out
}

/// BFS distance matrix of `g`.
pub fn distance_matrix(g: &BiBlockGraph) -> Vec<Vec<usize>> {
    g.distances.clone()
}

pub fn block_index(g: &BiBlockGraph, v: usize) -> usize {
    g.block_index(v)
}

/// Seeded random bi-block graph: `r` blocks with `m_i` uniform in
/// `[1, max_m]` and `n_i` uniform in `[1, max_n]`; each attachment picks a
/// uniform existing vertex and a uniform side.
pub fn random_bi_block(seed: u64, r: usize, max_m: usize, max_n: usize) -> Result<BiBlockGraph> {
    if r == 0 {
        return Err(Error::EmptyGraph);
    }
    if max_m == 0 || max_n == 0 {
        return Err(Error::InvalidBlock { index: 0, m: max_m, n: max_n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::with_capacity(r);
    let mut attachments = Vec::with_capacity(r - 1);
    let mut order = 0usize;
    for i in 0..r {
        let spec = BlockSpec::new(rng.random_range(1..=max_m), rng.random_range(1..=max_n));
        if i > 0 {
            let cut_vertex = rng.random_range(0..order);
            let side = if rng.random_bool(0.5) { Side::X } else { Side::Y };
            attachments.push(Attachment::new(cut_vertex, side));
            order += spec.order() - 1;
        } else {
            order = spec.order();
        }
        blocks.push(spec);
    }
    BiBlockGraph::new(blocks, attachments)
}
