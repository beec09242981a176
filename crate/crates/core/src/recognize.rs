//! Recognition of bi-block graphs from raw edge lists.
//!
//! The input is split into biconnected components (iterative lowpoint DFS),
//! every component is checked to be complete bipartite, and the block-cut
//! tree is walked from input vertex 0 to recover a block-attachment model.
//!
//! Traversal order: blocks are visited breadth-first. Within a visited
//! block, vertices are scanned in canonical order, and the unvisited blocks
//! hanging off each vertex are taken in ascending order of their sorted
//! input vertex lists. In the root block X is the colour class of vertex 0;
//! in every later block X is the class of its cut vertex.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Attachment, BiBlockGraph, BlockSpec, Side};

/// A recognised graph in canonical numbering, plus the map back to input ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognizedGraph {
    pub graph: BiBlockGraph,
    /// `input_ids[canonical] = input vertex id`.
    pub input_ids: Vec<usize>,
}

impl RecognizedGraph {
    /// Inverse of `input_ids`.
    pub fn canonical_ids(&self) -> Vec<usize> {
        let mut out = vec![0; self.input_ids.len()];
        for (canonical, &input) in self.input_ids.iter().enumerate() {
            out[input] = canonical;
        }
        out
    }
}

struct Component {
    vertices: Vec<usize>,
    x: Vec<usize>,
    y: Vec<usize>,
}

/// Validates `edges` on vertices `0..vertex_count` and rebuilds the
/// canonical bi-block graph.
pub fn ingest_edge_list(edges: &[(usize, usize)], vertex_count: usize) -> Result<RecognizedGraph> {
    if vertex_count == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut seen = HashSet::with_capacity(edges.len());
    let mut adjacency = vec![Vec::new(); vertex_count];
    for &(u, v) in edges {
        for w in [u, v] {
            if w >= vertex_count {
                return Err(Error::VertexOutOfRange(w));
            }
        }
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::MultiEdgeOrLoop(u, v));
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    if edges.is_empty() {
        return Err(if vertex_count == 1 { Error::EmptyGraph } else { Error::NotConnected });
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    if !is_connected(&adjacency) {
        return Err(Error::NotConnected);
    }

    let components =
        biconnected_components(&adjacency).into_iter().map(|edges| classify(&edges)).collect::<Result<Vec<_>>>()?;
    Ok(rebuild(&components, vertex_count))
}

fn is_connected(adjacency: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adjacency.len()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &w in &adjacency[u] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == adjacency.len()
}

/// Edge sets of the biconnected components of a connected simple graph.
fn biconnected_components(adjacency: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    const UNSEEN: usize = usize::MAX;
    let n = adjacency.len();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut components = Vec::new();

    // (vertex, parent, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = vec![(0, UNSEEN, 0)];
    disc[0] = time;
    low[0] = time;
    time += 1;
    while let Some(top) = stack.last_mut() {
        let (v, parent, idx) = *top;
        if idx < adjacency[v].len() {
            top.2 += 1;
            let w = adjacency[v][idx];
            if disc[w] == UNSEEN {
                edge_stack.push((v, w));
                disc[w] = time;
                low[w] = time;
                time += 1;
                stack.push((w, v, 0));
            } else if w != parent && disc[w] < disc[v] {
                edge_stack.push((v, w));
                low[v] = low[v].min(disc[w]);
            }
            continue;
        }
        stack.pop();
        if let Some(&(u, _, _)) = stack.last() {
            low[u] = low[u].min(low[v]);
            if low[v] >= disc[u] {
                let mut component = Vec::new();
                while let Some(e) = edge_stack.pop() {
                    component.push(e);
                    if e == (u, v) {
                        break;
                    }
                }
                components.push(component);
            }
        }
    }
    components
}

/// Two-colours one component and checks it is complete bipartite.
fn classify(edges: &[(usize, usize)]) -> Result<Component> {
    let vertices: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect::<BTreeSet<_>>().into_iter().collect();
    let local = |v: usize| vertices.binary_search(&v).expect("endpoint is a component vertex");
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for &(u, v) in edges {
        adjacency[local(u)].push(local(v));
        adjacency[local(v)].push(local(u));
    }

    let mut colour: Vec<Option<bool>> = vec![None; vertices.len()];
    colour[0] = Some(false);
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let cu = colour[u].expect("queued vertices are coloured");
        for &w in &adjacency[u] {
            match colour[w] {
                None => {
                    colour[w] = Some(!cu);
                    queue.push_back(w);
                }
                Some(cw) if cw == cu => return Err(Error::BlockNotBipartite(vertices.clone())),
                Some(_) => {}
            }
        }
    }

    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, &v) in vertices.iter().enumerate() {
        if colour[i] == Some(false) {
            x.push(v);
        } else {
            y.push(v);
        }
    }
    if edges.len() != x.len() * y.len() {
        return Err(Error::BlockNotCompleteBipartite(vertices));
    }
    Ok(Component { vertices, x, y })
}

fn rebuild(components: &[Component], vertex_count: usize) -> RecognizedGraph {
    let mut blocks_of: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    for (c, comp) in components.iter().enumerate() {
        for &v in &comp.vertices {
            blocks_of[v].push(c);
        }
    }
    for list in &mut blocks_of {
        list.sort_by(|&a, &b| components[a].vertices.cmp(&components[b].vertices));
    }

    const UNASSIGNED: usize = usize::MAX;
    let mut canonical = vec![UNASSIGNED; vertex_count];
    let mut input_ids = Vec::with_capacity(vertex_count);
    let mut visited = vec![false; components.len()];
    let mut blocks = Vec::with_capacity(components.len());
    let mut attachments = Vec::with_capacity(components.len().saturating_sub(1));
    // (component, input id of the cut vertex it hangs from)
    let mut queue: VecDeque<(usize, Option<usize>)> = VecDeque::new();

    let root = blocks_of[0][0];
    visited[root] = true;
    queue.push_back((root, None));
    while let Some((c, cut)) = queue.pop_front() {
        let comp = &components[c];
        let anchor = cut.unwrap_or(0);
        let (x, y) = if comp.x.contains(&anchor) { (&comp.x, &comp.y) } else { (&comp.y, &comp.x) };
        blocks.push(BlockSpec::new(x.len(), y.len()));
        if let Some(cv) = cut {
            attachments.push(Attachment::new(canonical[cv], Side::X));
        }
        let mut order = Vec::with_capacity(comp.vertices.len());
        if cut.is_some() {
            order.push(anchor);
        }
        for &v in x.iter().chain(y.iter()) {
            if Some(v) != cut {
                canonical[v] = input_ids.len();
                input_ids.push(v);
            }
        }
        order.extend(x.iter().chain(y.iter()).copied().filter(|&v| Some(v) != cut));
        for v in order {
            for &other in &blocks_of[v] {
                if !visited[other] {
                    visited[other] = true;
                    queue.push_back((other, Some(v)));
                }
            }
        }
    }

    let graph = BiBlockGraph::new(blocks, attachments).expect("reconstructed attachment model is well formed");
    debug_assert_eq!(graph.vertex_count(), vertex_count);
    RecognizedGraph { graph, input_ids }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    #[test]
    fn four_cycle_is_one_block() {
        let r = ingest_edge_list(&cycle(4), 4).unwrap();
        assert_eq!(r.graph.blocks(), &[BlockSpec::new(2, 2)]);
        // colour class of 0 is {0, 2}
        assert_eq!(r.input_ids, vec![0, 2, 1, 3]);
    }

    #[test]
    fn rejections() {
        assert!(matches!(ingest_edge_list(&cycle(3), 3), Err(Error::BlockNotBipartite(_))));
        assert!(matches!(ingest_edge_list(&cycle(5), 5), Err(Error::BlockNotBipartite(_))));
        assert!(matches!(ingest_edge_list(&cycle(6), 6), Err(Error::BlockNotCompleteBipartite(_))));
        assert_eq!(ingest_edge_list(&[(0, 1)], 3), Err(Error::NotConnected));
        assert_eq!(ingest_edge_list(&[(0, 1), (2, 3)], 4), Err(Error::NotConnected));
        assert_eq!(ingest_edge_list(&[(0, 1), (1, 0)], 2), Err(Error::MultiEdgeOrLoop(1, 0)));
        assert_eq!(ingest_edge_list(&[(0, 0)], 1), Err(Error::MultiEdgeOrLoop(0, 0)));
        assert_eq!(ingest_edge_list(&[(0, 5)], 2), Err(Error::VertexOutOfRange(5)));
        assert_eq!(ingest_edge_list(&[], 0), Err(Error::EmptyGraph));
        assert_eq!(ingest_edge_list(&[], 1), Err(Error::EmptyGraph));
    }

    #[test]
    fn star_with_cut_vertex_at_root() {
        // star centred at 0: three K_{1,1} blocks hanging from vertex 0
        let r = ingest_edge_list(&[(0, 3), (0, 1), (0, 2)], 4).unwrap();
        assert_eq!(r.graph.block_count(), 3);
        assert_eq!(r.graph.block_index(0), 3);
        assert_eq!(r.input_ids, vec![0, 1, 2, 3]);
        assert_eq!(r.canonical_ids(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn path_relabelled() {
        // path 2 - 0 - 1 - 3
        let r = ingest_edge_list(&[(2, 0), (0, 1), (1, 3)], 4).unwrap();
        let canon = r.canonical_ids();
        for &(u, v) in &[(2usize, 0usize), (0, 1), (1, 3)] {
            assert_eq!(r.graph.distance(canon[u], canon[v]), 1);
        }
        assert_eq!(r.graph.distance(canon[2], canon[3]), 3);
    }
}
