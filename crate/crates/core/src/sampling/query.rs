use rand::seq::SliceRandom;
use rand::Rng;

use super::Path;
use crate::kg::KnowledgeGraph;

/// A path instantiated with one alias for the head and one per relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub path: Path,
    pub head_alias: String,
    pub edge_aliases: Vec<String>,
    pub rendered: String,
}

impl Query {
    /// Renders `head→(rel1)→(rel2)→?`.
    pub fn render(head_alias: &str, edge_aliases: &[String]) -> String {
        let mut out = String::from(head_alias);
        for a in edge_aliases {
            out.push_str("→(");
            out.push_str(a);
            out.push(')');
        }
        out.push_str("→?");
        out
    }
}

/// Draws the head alias and each relation alias uniformly.
pub fn sample_query<R: Rng + ?Sized>(graph: &KnowledgeGraph, path: &Path, rng: &mut R) -> Query {
    let head_alias = graph.aliases(path.head()).choose(rng).expect("graph nodes carry aliases").clone();
    let edge_aliases: Vec<String> =
        path.edges.iter().map(|e| e.rel_aliases.choose(rng).expect("edges carry aliases").clone()).collect();
    let rendered = Query::render(&head_alias, &edge_aliases);
    Query { path: path.clone(), head_alias, edge_aliases, rendered }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{Edge, GraphBuilder, Node};
    use crate::seed::derive_rng;

    #[test]
    fn renders_arrow_template() {
        let q = Query::render("Chandler Bing", &["actor".into(), "birth_date".into()]);
        assert_eq!(q, "Chandler Bing→(actor)→(birth_date)→?");
    }

    #[test]
    fn head_aliases_are_uniform() {
        let mut b = GraphBuilder::new();
        b.add_node(Node {
            id: "A".into(),
            aliases: vec!["a1".into(), "a2".into()],
            context_sentences: vec!["a1.".into()],
        });
        b.add_node(Node { id: "B".into(), aliases: vec!["b".into()], context_sentences: vec!["b.".into()] });
        b.add_edge(Edge {
            src: "A".into(),
            dst: "B".into(),
            relation: "r".into(),
            rel_aliases: vec!["r".into()],
            evidence_src: vec![0],
            evidence_dst: vec![],
        });
        let g = b.build().unwrap();
        let path = Path { nodes: vec!["A".into(), "B".into()], edges: g.edges().cloned().collect() };
        let n = 10_000;
        let a1 = (0..n).filter(|&s| sample_query(&g, &path, &mut derive_rng(s, &[])).head_alias == "a1").count();
        // 3 sigma = 150
        assert!((a1 as i64 - 5000).abs() < 150, "{a1}");
        assert_eq!(sample_query(&g, &path, &mut derive_rng(1, &[])).rendered.matches("→").count(), 2);
    }
}
