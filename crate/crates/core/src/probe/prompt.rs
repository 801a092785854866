use serde::{Deserialize, Serialize};

use crate::providers::Prompt;

use super::PermutationTrial;

const INSTRUCTION: &str = "You are entering a multiple choice questions exam. You should directly answer each question by choosing the correct option. Be concise and straight to the point in your answer. Output only the letter corresponding to the correct answer.";
const FORMAT_LINE: &str = "Format your answer as '<put correct answer here>'.";
const OPTIONS_HEAD: &str = "Options:\nA. ";
const ANSWER_TAIL: &str = "\nAnswer:";

/// How the evaluation prompt is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptStyle {
    /// Instruction, question and options in one message (closed chat models).
    #[default]
    Chat,
    /// Instruction as the system prompt, question and options as the user turn.
    SystemUser,
}

fn question(trial: &PermutationTrial, title: &str, author: &str) -> String {
    let [a, b, c, d] = &trial.options;
    format!(
        "Question: Which of the following passages is verbatim from the \"{title}\" book by {author}?\n\
         Options:\nA. {a}\nB. {b}\nC. {c}\nD. {d}\nAnswer:"
    )
}

pub fn build_mcqa_prompt(
    trial: &PermutationTrial,
    title: &str,
    author: &str,
    style: PromptStyle,
) -> Prompt {
    match style {
        PromptStyle::Chat => {
            Prompt::Single(format!("{INSTRUCTION}\n{}", question(trial, title, author)))
        }
        PromptStyle::SystemUser => Prompt::SystemUser {
            system: format!("{INSTRUCTION}\n\n{FORMAT_LINE}"),
            user: question(trial, title, author),
        },
    }
}

/// The four option bodies of an evaluation prompt, or `None` if `text` is not one.
pub fn split_mcqa_options(text: &str) -> Option<[&str; 4]> {
    let head = text
        .match_indices(OPTIONS_HEAD)
        .find(|(i, _)| *i == 0 || text[..*i].ends_with('\n'))?
        .0;
    let body = text[head + OPTIONS_HEAD.len()..].strip_suffix(ANSWER_TAIL)?;
    let b = body.find("\nB. ")?;
    let c = b + body[b..].find("\nC. ")?;
    let d = c + body[c..].find("\nD. ")?;
    Some([&body[..b], &body[b + 4..c], &body[c + 4..d], &body[d + 4..]])
}
