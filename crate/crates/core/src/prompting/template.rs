use super::context::{estimate_tokens, render_context, ContextBlock};
use crate::sampling::{AnswerOptions, Query, MAX_FEW_SHOT};

pub const PROMPT_TEMPLATE: &str = include_str!("../../fixtures/prompt/template.txt");
/// Common context paragraph followed by five worked examples, separated by
/// blank lines.
pub const FEW_SHOT_BANK: &str = include_str!("../../fixtures/prompt/few_shot.txt");
/// Bumped whenever either fixture above changes.
pub const TEMPLATE_VERSION: u32 = 1;

/// The first `count` bank examples under the common context, followed by a
/// blank line; empty for `count == 0`.
pub fn few_shot_block(count: usize) -> String {
    if count == 0 {
        return String::new();
    }
    let mut parts = FEW_SHOT_BANK.trim_end().split("\n\n");
    let common = parts.next().expect("few-shot bank has a common context");
    let examples: Vec<&str> = parts.collect();
    debug_assert_eq!(examples.len(), MAX_FEW_SHOT);
    let mut out = String::from(common);
    for ex in examples.iter().take(count) {
        out.push_str("\n\n");
        out.push_str(ex);
    }
    out.push_str("\n\n");
    out
}

/// Single-pass substitution of `{name}` placeholders, so substituted text is
/// never rescanned.
fn fill(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + values.iter().map(|v| v.1.len()).sum::<usize>());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after
            .find('}')
            .and_then(|close| values.iter().find(|(k, _)| *k == &after[..close]).map(|(_, v)| (close, v)));
        match hit {
            Some((close, v)) => {
                out.push_str(v);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// A fully rendered prompt and the parts it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prompt {
    pub few_shot: String,
    pub context: Vec<ContextBlock>,
    pub query: Query,
    pub options: AnswerOptions,
    pub rendered: String,
    /// Estimate for the whole rendered prompt.
    pub token_estimate: usize,
    /// Estimate for the rendered context alone.
    pub context_tokens: usize,
}

/// Fills the template. `few_shot_count` is capped at the bank size.
pub fn render_prompt(
    few_shot_count: usize,
    context: Vec<ContextBlock>,
    query: Query,
    options: AnswerOptions,
) -> Prompt {
    let few_shot = few_shot_block(few_shot_count.min(MAX_FEW_SHOT));
    let context_text = render_context(&context);
    let rendered = fill(
        PROMPT_TEMPLATE,
        &[
            ("few_shot", &few_shot),
            ("context", &context_text),
            ("query", &query.rendered),
            ("options", &options.render()),
        ],
    );
    Prompt {
        token_estimate: estimate_tokens(&rendered),
        context_tokens: estimate_tokens(&context_text),
        few_shot,
        context,
        query,
        options,
        rendered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompting::Tier;
    use crate::sampling::{OptionSource, Path};

    fn parts() -> (Query, AnswerOptions, Vec<ContextBlock>) {
        let path = Path { nodes: vec!["A".into(), "B".into()], edges: vec![] };
        let query = Query {
            path,
            head_alias: "a".into(),
            edge_aliases: vec!["r".into()],
            rendered: Query::render("a", &["r".into()]),
        };
        let options = AnswerOptions {
            options: vec!["x".into(), "y".into(), "z".into()],
            nodes: vec!["X".into(), "B".into(), "Z".into()],
            sources: vec![OptionSource::PathEntity, OptionSource::Correct, OptionSource::RelatedEntity],
            correct_index: 2,
        };
        let ctx = vec![
            ContextBlock {
                owner: "A".into(),
                indices: vec![0, 1],
                sentences: vec!["a is {query}.".into(), "a r y.".into()],
                tier: Tier::QueryEvidence,
            },
            ContextBlock {
                owner: "B".into(),
                indices: vec![0],
                sentences: vec!["y is b.".into()],
                tier: Tier::QueryEvidence,
            },
        ];
        (query, options, ctx)
    }

    #[test]
    fn byte_exact_without_examples() {
        let (q, o, c) = parts();
        let p = render_prompt(0, c, q, o);
        let expected =
            "Actual Query:\nGiven Context:\na is {query}. a r y.\ny is b.\n\nAnswer the question:\na→(r)→?\n\n\
answer the question by selecting the correct answer from the following options:\n\n1. x\n2. y\n3. z\n\n\
The format for beginning your response is:\n\ncorrect answer: <option_number>. <answer>, because <succinct reason>\n\n\
follow this exact format and only choose from the given options";
        assert_eq!(p.rendered, expected);
        assert_eq!(p.token_estimate, expected.len().div_ceil(4));
    }

    #[test]
    fn few_shot_examples_are_included_in_order() {
        let (q, o, c) = parts();
        let p = render_prompt(2, c, q, o);
        assert!(p.rendered.starts_with("Common Context:\nentity_B is the son of entity_A."));
        assert!(p.rendered.contains("Question 1: entity_A→(father of)→(leader of)→?"));
        assert!(p.rendered.contains("Question 2: entity_B→(chief of)→(constitutes)→(companion of)→?"));
        assert!(!p.rendered.contains("Question 3"));
        assert!(p.rendered.contains("get entity_E.\n\nActual Query:\n"));
        for k in 0..=5 {
            let block = few_shot_block(k);
            assert_eq!(block.matches("Question ").count(), k);
        }
    }
}
