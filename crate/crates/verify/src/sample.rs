//! Seeded random mechanisms from the same space as the enumeration.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use respgap_core::Outcome;

use crate::config::EnumerationConfig;
use crate::enumerate::{FlatDecision, FlatNode, FlatTree, Labels, Partitions, NO_CLASS};

/// Generator for sample `index`: one ChaCha stream per index, so a sample
/// does not depend on how many others were drawn or on which worker.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const LEAF_PROBABILITY: f64 = 0.3;

pub fn sample_tree(cfg: &EnumerationConfig, rng: &mut ChaCha8Rng) -> FlatTree {
    let mut nodes = Vec::new();
    let mut budget = cfg.decision_cap();
    grow(cfg, rng, cfg.max_depth, &mut budget, &mut nodes);
    FlatTree { nodes }
}

fn grow(cfg: &EnumerationConfig, rng: &mut ChaCha8Rng, depth: usize, budget: &mut usize, nodes: &mut Vec<FlatNode>) -> usize {
    let at = nodes.len();
    let leaf = depth == 0 || *budget == 0 || (at > 0 && rng.gen_bool(LEAF_PROBABILITY));
    if leaf {
        let o = if rng.gen_bool(0.5) { Outcome::Yes } else { Outcome::No };
        nodes.push(FlatNode::Leaf(o));
        return at;
    }
    *budget -= 1;
    nodes.push(FlatNode::Leaf(Outcome::Yes));

    let mask = rng.gen_range(1u32..(1 << cfg.agents));
    let deciders: Vec<usize> = (0..cfg.agents).filter(|&a| mask >> a & 1 == 1).collect();
    let counts: Vec<usize> = deciders.iter().map(|_| rng.gen_range(1..=cfg.max_actions)).collect();
    let profiles: usize = counts.iter().product();
    let blocks = rng.gen_range(1..=cfg.max_children.min(profiles));
    // Surjective: the first `blocks` shuffled profiles get distinct blocks.
    let mut raw: Vec<usize> = (0..profiles).map(|_| rng.gen_range(0..blocks)).collect();
    let mut order: Vec<usize> = (0..profiles).collect();
    order.shuffle(rng);
    for (b, &p) in order.iter().take(blocks).enumerate() {
        raw[p] = b;
    }
    let mut rename = vec![usize::MAX; blocks];
    let mut used = 0;
    let table: Vec<usize> = raw
        .iter()
        .map(|&b| {
            if rename[b] == usize::MAX {
                rename[b] = used;
                used += 1;
            }
            rename[b]
        })
        .collect();
    let children = (0..blocks).map(|_| grow(cfg, rng, depth - 1, budget, nodes)).collect();
    nodes[at] = FlatNode::Decision(FlatDecision { deciders, counts, table, children });
    at
}

/// A random partition per agent among nodes with equal action lists,
/// redrawn a few times when it comes out trivial although a non-trivial
/// one exists, with a random action order for each later class member.
pub fn sample_partitions(tree: &FlatTree, agents: usize, rng: &mut ChaCha8Rng) -> Partitions {
    let can_merge = (0..agents).any(|a| {
        let keys: Vec<Option<usize>> = tree
            .nodes
            .iter()
            .filter_map(|n| match n {
                FlatNode::Decision(d) => Some(d.deciders.iter().position(|&x| x == a).map(|k| d.counts[k])),
                FlatNode::Leaf(_) => None,
            })
            .collect();
        keys.iter().enumerate().any(|(i, k)| keys[..i].contains(k))
    });
    let mut labels = draw(tree, agents, rng);
    for _ in 0..8 {
        if !can_merge || !trivial(&labels) {
            break;
        }
        labels = draw(tree, agents, rng);
    }
    let mut names = tree.identity_names(agents);
    for (row, agent_names) in labels.iter().zip(&mut names) {
        let mut seen = Vec::new();
        for (i, &c) in row.iter().enumerate() {
            if c == NO_CLASS {
                continue;
            }
            if seen.contains(&c) {
                agent_names[i].shuffle(rng);
            } else {
                seen.push(c);
            }
        }
    }
    Partitions { labels, names }
}

fn trivial(labels: &Labels) -> bool {
    labels.iter().all(|row| {
        let mut seen: Vec<u32> = row.iter().copied().filter(|&c| c != NO_CLASS).collect();
        let n = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == n
    })
}

fn draw(tree: &FlatTree, agents: usize, rng: &mut ChaCha8Rng) -> Labels {
    (0..agents)
        .map(|a| {
            let mut row = vec![NO_CLASS; tree.nodes.len()];
            // Blocks per action-list key: (key, [class labels]).
            let mut blocks: Vec<(Option<usize>, Vec<u32>)> = Vec::new();
            let mut next = 0u32;
            for (i, n) in tree.nodes.iter().enumerate() {
                let FlatNode::Decision(d) = n else { continue };
                let key = d.deciders.iter().position(|&x| x == a).map(|k| d.counts[k]);
                let slot = match blocks.iter().position(|(k, _)| *k == key) {
                    Some(s) => s,
                    None => {
                        blocks.push((key, Vec::new()));
                        blocks.len() - 1
                    }
                };
                let existing = &mut blocks[slot].1;
                let pick = rng.gen_range(0..=existing.len());
                row[i] = if pick == existing.len() {
                    existing.push(next);
                    next += 1;
                    next - 1
                } else {
                    existing[pick]
                };
            }
            row
        })
        .collect()
}
