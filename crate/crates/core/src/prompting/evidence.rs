use std::collections::BTreeSet;

use crate::kg::{Edge, KnowledgeGraph, NodeId};
use crate::sampling::{AnswerOptions, Distractor, Path};

/// A sentence identified by its owner node and index in the owner's text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SentenceRef {
    pub owner: NodeId,
    pub index: usize,
}

impl SentenceRef {
    pub fn new(owner: &NodeId, index: usize) -> Self {
        Self { owner: owner.clone(), index }
    }

    pub fn text<'g>(&self, graph: &'g KnowledgeGraph) -> &'g str {
        &graph.node(&self.owner).expect("sentence owner in graph").context_sentences[self.index]
    }
}

/// The three candidate sentence lists, each free of repeats.
///
/// `distractor` holds the sentences that place the distractor in the
/// context (its lead plus the evidence of its attaching edge); it is empty
/// unless a distractor is passed in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence {
    pub query: Vec<SentenceRef>,
    pub distractor: Vec<SentenceRef>,
    pub options: Vec<SentenceRef>,
    pub all: Vec<SentenceRef>,
}

#[derive(Default)]
struct Collector {
    out: Vec<SentenceRef>,
    seen: BTreeSet<SentenceRef>,
}

impl Collector {
    fn push(&mut self, s: SentenceRef) {
        if self.seen.insert(s.clone()) {
            self.out.push(s);
        }
    }

    /// Lead and evidence sentences on both sides of an edge.
    fn edge(&mut self, e: &Edge) {
        self.push(SentenceRef::new(&e.src, 0));
        for &i in &e.evidence_src {
            self.push(SentenceRef::new(&e.src, i));
        }
        self.push(SentenceRef::new(&e.dst, 0));
        for &i in &e.evidence_dst {
            self.push(SentenceRef::new(&e.dst, i));
        }
    }
}

/// Gathers query evidence (path edges in path order), option evidence
/// (edges joining an off-path option to a path node) and every sentence of
/// every involved node.
pub fn collect_evidence(
    graph: &KnowledgeGraph,
    path: &Path,
    options: &AnswerOptions,
    distractor: Option<&Distractor>,
) -> Evidence {
    let mut query = Collector::default();
    for e in &path.edges {
        query.edge(e);
    }

    let mut dis = Collector::default();
    if let Some(d) = distractor {
        let at = &path.nodes[d.attach_index - 1];
        let step = &path.edges[d.attach_index - 1];
        for e in graph.out_edges(at) {
            if e.dst == d.node && e.same_relation(step) {
                dis.edge(e);
            }
        }
    }

    let mut opts = Collector::default();
    for node in &options.nodes {
        if path.contains(node) {
            continue;
        }
        for p in &path.nodes {
            for e in graph.out_edges(p).iter().filter(|e| &e.dst == node) {
                opts.edge(e);
            }
            for e in graph.out_edges(node).iter().filter(|e| &e.dst == p) {
                opts.edge(e);
            }
        }
    }

    let mut involved: Vec<&NodeId> = path.nodes.iter().collect();
    involved.extend(distractor.map(|d| &d.node));
    involved.extend(options.nodes.iter());
    let mut all = Collector::default();
    let mut seen_nodes = BTreeSet::new();
    for id in involved {
        if seen_nodes.insert(id) {
            let n = graph.node(id).map_or(0, |n| n.context_sentences.len());
            for i in 0..n {
                all.push(SentenceRef::new(id, i));
            }
        }
    }

    Evidence { query: query.out, distractor: dis.out, options: opts.out, all: all.out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{GraphBuilder, Node};
    use crate::sampling::OptionSource;

    #[test]
    fn one_hop_query_evidence() {
        let mut b = GraphBuilder::new();
        b.add_node(Node {
            id: "H".into(),
            aliases: vec!["X".into()],
            context_sentences: vec!["X is a film.".into(), "It stars Y.".into(), "It is long.".into()],
        });
        b.add_node(Node {
            id: "T".into(),
            aliases: vec!["Y".into()],
            context_sentences: vec!["Y is an actor.".into(), "Y lives in Z.".into()],
        });
        b.add_edge(Edge {
            src: "H".into(),
            dst: "T".into(),
            relation: "cast".into(),
            rel_aliases: vec!["cast member".into()],
            evidence_src: vec![1],
            evidence_dst: vec![],
        });
        let g = b.build().unwrap();
        let path = Path { nodes: vec!["H".into(), "T".into()], edges: g.edges().cloned().collect() };
        let options = AnswerOptions {
            options: vec!["Y".into(), "X".into()],
            nodes: vec!["T".into(), "H".into()],
            sources: vec![OptionSource::Correct, OptionSource::PathEntity],
            correct_index: 1,
        };
        let ev = collect_evidence(&g, &path, &options, None);
        let h = NodeId::from("H");
        let t = NodeId::from("T");
        assert_eq!(ev.query, vec![SentenceRef::new(&h, 0), SentenceRef::new(&h, 1), SentenceRef::new(&t, 0)]);
        assert!(ev.options.is_empty());
        assert!(ev.distractor.is_empty());
        assert_eq!(ev.all.len(), 5);
    }
}
