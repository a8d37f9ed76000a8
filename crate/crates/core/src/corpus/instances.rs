//! The `DEPNN-INST 1` parsed-instance format.
//!
//! One header line, then one record per line:
//!
//! ```text
//! DEPNN-INST 1
//! <id>\t<label|_>\t<e1 start>-<e1 end>\t<e2 start>-<e2 end>\t<token> <token> ...
//! ```
//!
//! Each token is `form|lemma|head|relation|ner|wordnet`, numbered from 1 by
//! position. `head` is 0 for the root and `_` (with relation `_`) for a token
//! outside the tree, such as a collapsed preposition. Optional fields use
//! `_` when absent; all fields are percent-escaped. Lines starting with `#`
//! and blank lines are ignored.

use std::path::Path;

use super::{read_to_string, CorpusError, Instance};
use crate::adp::{Arc, DependencyGraph, Token};
use crate::labels::Label;
use crate::text::{escape, escape_opt, unescape, unescape_opt};

pub const INSTANCE_HEADER: &str = "DEPNN-INST 1";

pub fn read_parsed_instances(path: impl AsRef<Path>) -> Result<Vec<Instance>, CorpusError> {
    parse_instances(&read_to_string(path.as_ref())?)
}

pub fn parse_instances(text: &str) -> Result<Vec<Instance>, CorpusError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == INSTANCE_HEADER => {}
        None => return Ok(Vec::new()),
        Some(_) => return Err(CorpusError::format(1, format!("expected header {INSTANCE_HEADER:?}"))),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| parse_record(l.trim_end_matches('\r'), n + 1))
        .collect()
}

fn parse_record(line: &str, line_no: usize) -> Result<Instance, CorpusError> {
    let err = |m: String| CorpusError::format(line_no, m);
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 5 {
        return Err(err(format!("expected 5 tab-separated fields, found {}", fields.len())));
    }
    let id: u64 = fields[0].parse().map_err(|_| err(format!("bad id {:?}", fields[0])))?;
    let gold = match fields[1] {
        "_" => None,
        l => Some(l.parse::<Label>().map_err(|e| err(e.to_string()))?),
    };
    let span = |s: &str| -> Result<(usize, usize), CorpusError> {
        let (a, b) = s.split_once('-').ok_or_else(|| err(format!("bad span {s:?}")))?;
        Ok((
            a.parse().map_err(|_| err(format!("bad span {s:?}")))?,
            b.parse().map_err(|_| err(format!("bad span {s:?}")))?,
        ))
    };
    let e1 = span(fields[2])?;
    let e2 = span(fields[3])?;

    let mut tokens = Vec::new();
    let mut arcs = Vec::new();
    for (i, tok) in fields[4].split(' ').enumerate() {
        let index = i + 1;
        let parts: Vec<&str> = tok.split('|').collect();
        if parts.len() != 6 {
            return Err(err(format!("token {index} has {} fields, expected 6", parts.len())));
        }
        let bad_escape = || err(format!("bad escape in token {index}"));
        let mut token = Token::new(index, unescape(parts[0]).ok_or_else(bad_escape)?);
        token.lemma = unescape_opt(parts[1]).ok_or_else(bad_escape)?;
        token.ner_tag = unescape_opt(parts[4]).ok_or_else(bad_escape)?;
        token.wn_hypernym = unescape_opt(parts[5]).ok_or_else(bad_escape)?;
        match (parts[2], parts[3]) {
            ("_", "_") => {}
            ("_", _) | (_, "_") => return Err(err(format!("token {index}: head and relation must both be '_'"))),
            (h, r) => {
                let head = h.parse().map_err(|_| err(format!("token {index}: bad head {h:?}")))?;
                arcs.push(Arc::new(head, index, unescape(r).ok_or_else(bad_escape)?));
            }
        }
        tokens.push(token);
    }

    let graph = DependencyGraph::new(tokens, arcs).map_err(|source| CorpusError::TreeViolation { id, source })?;
    Instance::new(id, graph, e1, e2, gold)
}

pub fn write_instances<'a>(instances: impl IntoIterator<Item = &'a Instance>) -> String {
    let mut out = String::from(INSTANCE_HEADER);
    out.push('\n');
    for inst in instances {
        let label = inst.gold.map(|l| l.to_string()).unwrap_or_else(|| "_".into());
        out.push_str(&format!(
            "{}\t{}\t{}-{}\t{}-{}\t",
            inst.id, label, inst.e1.start, inst.e1.end, inst.e2.start, inst.e2.end
        ));
        let g = &inst.graph;
        let toks: Vec<String> = g
            .tokens()
            .iter()
            .map(|t| {
                let (head, rel) = match (g.head(t.index), g.relation(t.index)) {
                    (Some(h), Some(r)) => (h.to_string(), escape(r)),
                    _ => ("_".to_string(), "_".to_string()),
                };
                format!(
                    "{}|{}|{}|{}|{}|{}",
                    escape(&t.form),
                    escape_opt(t.lemma.as_deref()),
                    head,
                    rel,
                    escape_opt(t.ner_tag.as_deref()),
                    escape_opt(t.wn_hypernym.as_deref()),
                )
            })
            .collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;
    use proptest::prelude::*;

    const THIEF: &str = "DEPNN-INST 1\n\
        # A thief broke the ignition with screwdriver\n\
        7\tInstrument-Agency(e2,e1)\t2-2\t7-7\tA|a|2|det|_|_ thief|thief|3|nsubj|_|noun.person broke|break|0|root|_|_ the|the|5|det|_|_ ignition|ignition|3|dobj|_|_ with|with|_|_|_|_ screwdriver|screwdriver|3|prep_with|_|noun.artifact\n";

    #[test]
    fn reads_thief_record() {
        let v = parse_instances(THIEF).unwrap();
        assert_eq!(v.len(), 1);
        let inst = &v[0];
        assert_eq!(inst.e1.head, 2);
        assert_eq!(inst.e2.head, 7);
        assert_eq!(inst.graph.token(2).unwrap().wn_hypernym.as_deref(), Some("noun.person"));
        let adp = inst.adp().unwrap();
        assert_eq!(
            adp.path.render(&inst.graph),
            "thief nsubj_inv broke prep_with screwdriver"
        );
        assert_eq!(parse_instances(&write_instances(&v)).unwrap(), v);
    }

    #[test]
    fn cycle_is_a_tree_violation() {
        let text = "DEPNN-INST 1\n3\t_\t1-1\t2-2\ta|_|2|x|_|_ b|_|1|y|_|_\n";
        assert!(matches!(
            parse_instances(text),
            Err(CorpusError::TreeViolation { id: 3, .. })
        ));
    }

    #[test]
    fn span_errors_name_the_instance() {
        let text = "DEPNN-INST 1\n4\t_\t1-1\t1-2\ta|_|0|root|_|_ b|_|1|y|_|_\n";
        assert!(matches!(
            parse_instances(text),
            Err(CorpusError::SpanError { id: 4, .. })
        ));
        let text = "DEPNN-INST 1\n4\t_\t1-1\t3-3\ta|_|0|root|_|_ b|_|1|y|_|_\n";
        assert!(matches!(
            parse_instances(text),
            Err(CorpusError::SpanError { id: 4, .. })
        ));
    }

    #[test]
    fn format_errors() {
        assert!(matches!(
            parse_instances("DEPNN-INST 2\n"),
            Err(CorpusError::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_instances("DEPNN-INST 1\n\n1\t_\t1-1\n"),
            Err(CorpusError::Format { line: 3, .. })
        ));
        assert!(parse_instances("").unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(seed in any::<u64>()) {
            let corpus = synthetic::separable_corpus(5, seed);
            let text = write_instances(&corpus);
            prop_assert_eq!(parse_instances(&text).unwrap(), corpus);
        }
    }
}
