//! Conversion from raw SemEval sentences plus external CoNLL parses to
//! validated instances.
//!
//! The CoNLL reader takes the usual ten tab-separated columns (ID, FORM,
//! LEMMA, CPOS, POS, FEATS, HEAD, DEPREL, and two more). Each sentence may be
//! preceded by `# id = N` or `# sent_id = N`; otherwise sentences are
//! numbered from 1 in file order. NER and WordNet tags are read from
//! `NER=` and `WN=` entries in the tenth column, separated by `|`. A token
//! whose HEAD is `_` or whose DEPREL is `erased` is kept outside the tree.

use std::collections::HashMap;
use std::fmt;

use super::{CorpusError, Instance, RawInstance};
use crate::adp::{Arc, DependencyGraph, Token};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSentence {
    pub id: u64,
    pub graph: DependencyGraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentFailure {
    pub id: u64,
    pub reason: String,
}

impl fmt::Display for AlignmentFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instance {}: {}", self.id, self.reason)
    }
}

pub fn parse_conll(text: &str) -> Result<Vec<ParsedSentence>, CorpusError> {
    let mut out = Vec::new();
    let mut pending_id: Option<u64> = None;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    let flush = |rows: &mut Vec<(usize, Vec<String>)>,
                 pending_id: &mut Option<u64>,
                 out: &mut Vec<ParsedSentence>|
     -> Result<(), CorpusError> {
        if rows.is_empty() {
            return Ok(());
        }
        let id = pending_id.take().unwrap_or(out.len() as u64 + 1);
        out.push(build_sentence(id, rows)?);
        rows.clear();
        Ok(())
    };

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut rows, &mut pending_id, &mut out)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if matches!(key.trim(), "id" | "sent_id") {
                    flush(&mut rows, &mut pending_id, &mut out)?;
                    let id = value
                        .trim()
                        .parse()
                        .map_err(|_| CorpusError::format(line_no, format!("bad sentence id {:?}", value.trim())))?;
                    pending_id = Some(id);
                }
            }
            continue;
        }
        let cols: Vec<String> = line.split('\t').map(str::to_string).collect();
        if cols.len() < 8 {
            return Err(CorpusError::format(
                line_no,
                format!("expected at least 8 columns, found {}", cols.len()),
            ));
        }
        rows.push((line_no, cols));
    }
    flush(&mut rows, &mut pending_id, &mut out)?;
    Ok(out)
}

fn build_sentence(id: u64, rows: &[(usize, Vec<String>)]) -> Result<ParsedSentence, CorpusError> {
    let mut tokens = Vec::with_capacity(rows.len());
    let mut arcs = Vec::new();
    for (i, (line_no, cols)) in rows.iter().enumerate() {
        let index = i + 1;
        if cols[0].parse::<usize>().ok() != Some(index) {
            return Err(CorpusError::format(
                *line_no,
                format!("expected token id {index}, found {:?}", cols[0]),
            ));
        }
        let mut token = Token::new(index, cols[1].clone());
        token.lemma = Some(cols[2].clone()).filter(|l| l != "_");
        if let Some(misc) = cols.get(9) {
            for entry in misc.split('|') {
                match entry.split_once('=') {
                    Some(("NER", v)) if v != "_" && !v.is_empty() => token.ner_tag = Some(v.into()),
                    Some(("WN", v)) if v != "_" && !v.is_empty() => token.wn_hypernym = Some(v.into()),
                    _ => {}
                }
            }
        }
        let (head, rel) = (cols[6].as_str(), cols[7].as_str());
        if head != "_" && rel != "erased" && rel != "_" {
            let head = head
                .parse()
                .map_err(|_| CorpusError::format(*line_no, format!("bad head {head:?}")))?;
            arcs.push(Arc::new(head, index, rel));
        }
        tokens.push(token);
    }
    let graph = DependencyGraph::new(tokens, arcs).map_err(|source| CorpusError::TreeViolation { id, source })?;
    Ok(ParsedSentence { id, graph })
}

/// Characters a parser token may stand for in the raw sentence.
fn surface_forms(form: &str) -> Vec<String> {
    let mapped: &[&str] = match form {
        "-LRB-" | "-lrb-" => &["("],
        "-RRB-" | "-rrb-" => &[")"],
        "-LSB-" | "-lsb-" => &["["],
        "-RSB-" | "-rsb-" => &["]"],
        "-LCB-" | "-lcb-" => &["{"],
        "-RCB-" | "-rcb-" => &["}"],
        "``" | "''" => &["\"", "``", "''"],
        "`" => &["'", "`"],
        _ => &[],
    };
    let mut v: Vec<String> = mapped.iter().map(|s| s.to_string()).collect();
    v.push(form.replace("\\/", "/").replace("\\*", "*"));
    v
}

/// Character span of every token in `text`, or the first token that
/// cannot be placed.
fn token_offsets(text: &[char], graph: &DependencyGraph) -> Result<Vec<(usize, usize)>, String> {
    let mut pos = 0;
    let mut spans = Vec::with_capacity(graph.len());
    for t in graph.tokens() {
        while pos < text.len() && text[pos].is_whitespace() {
            pos += 1;
        }
        let found = surface_forms(&t.form).into_iter().find_map(|s| {
            let s: Vec<char> = s.chars().collect();
            let end = pos + s.len();
            (!s.is_empty() && end <= text.len() && text[pos..end] == s[..]).then_some(end)
        });
        match found {
            Some(end) => {
                spans.push((pos, end));
                pos = end;
            }
            None => {
                return Err(format!(
                    "token {} {:?} does not match the text at character {pos}",
                    t.index, t.form
                ))
            }
        }
    }
    Ok(spans)
}

fn entity_tokens(spans: &[(usize, usize)], range: &std::ops::Range<usize>) -> Option<(usize, usize)> {
    let hit: Vec<usize> = spans
        .iter()
        .enumerate()
        .filter(|(_, &(s, e))| s < range.end && range.start < e)
        .map(|(i, _)| i + 1)
        .collect();
    Some((*hit.first()?, *hit.last()?))
}

/// Pair raw sentences with parses by id and map entity character ranges to
/// token spans. Instances that cannot be aligned are reported, not guessed.
pub fn align_instances(
    raw: &[RawInstance],
    parses: &[ParsedSentence],
    collapse: bool,
) -> (Vec<Instance>, Vec<AlignmentFailure>) {
    let by_id: HashMap<u64, &ParsedSentence> = parses.iter().map(|p| (p.id, p)).collect();
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for r in raw {
        let fail = |reason: String| AlignmentFailure { id: r.id, reason };
        let Some(parse) = by_id.get(&r.id) else {
            failed.push(fail("no parse with this id".into()));
            continue;
        };
        let chars: Vec<char> = r.text.chars().collect();
        let spans = match token_offsets(&chars, &parse.graph) {
            Ok(s) => s,
            Err(reason) => {
                failed.push(fail(reason));
                continue;
            }
        };
        let (Some(e1), Some(e2)) = (entity_tokens(&spans, &r.e1), entity_tokens(&spans, &r.e2)) else {
            failed.push(fail("entity covers no token".into()));
            continue;
        };
        let graph = if collapse {
            parse.graph.collapse_prepositions()
        } else {
            parse.graph.clone()
        };
        match Instance::new(r.id, graph, e1, e2, r.label) {
            Ok(inst) => ok.push(inst),
            Err(e) => failed.push(fail(e.to_string())),
        }
    }
    (ok, failed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_semeval_raw;

    const RAW: &str = "7\t\"A <e1>thief</e1> broke the ignition with a <e2>screwdriver</e2> (allegedly).\"\nInstrument-Agency(e2,e1)\nComment:\n\n8\t\"The <e1>cat</e1> sat on the <e2>mat</e2>.\"\nOther\nComment:\n\n";

    const CONLL: &str = "# sent_id = 7\n\
1\tA\ta\tDT\tDT\t_\t2\tdet\t_\t_\n\
2\tthief\tthief\tNN\tNN\t_\t3\tnsubj\t_\tWN=noun.person\n\
3\tbroke\tbreak\tVBD\tVBD\t_\t0\troot\t_\t_\n\
4\tthe\tthe\tDT\tDT\t_\t5\tdet\t_\t_\n\
5\tignition\tignition\tNN\tNN\t_\t3\tdobj\t_\t_\n\
6\twith\twith\tIN\tIN\t_\t3\tprep\t_\t_\n\
7\ta\ta\tDT\tDT\t_\t8\tdet\t_\t_\n\
8\tscrewdriver\tscrewdriver\tNN\tNN\t_\t6\tpobj\t_\tNER=O|WN=noun.artifact\n\
9\t-LRB-\t-lrb-\t-LRB-\t-LRB-\t_\t10\tpunct\t_\t_\n\
10\tallegedly\tallegedly\tRB\tRB\t_\t3\tadvmod\t_\t_\n\
11\t-RRB-\t-rrb-\t-RRB-\t-RRB-\t_\t10\tpunct\t_\t_\n\
12\t.\t.\t.\t.\t_\t3\tpunct\t_\t_\n\
\n\
# sent_id = 8\n\
1\tThe\tthe\tDT\tDT\t_\t2\tdet\t_\t_\n\
2\tdog\tdog\tNN\tNN\t_\t3\tnsubj\t_\t_\n\
3\tsat\tsit\tVBD\tVBD\t_\t0\troot\t_\t_\n";

    #[test]
    fn reads_conll() {
        let s = parse_conll(CONLL).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].id, 7);
        assert_eq!(s[0].graph.len(), 12);
        let t = s[0].graph.token(8).unwrap();
        assert_eq!(t.ner_tag.as_deref(), Some("O"));
        assert_eq!(t.wn_hypernym.as_deref(), Some("noun.artifact"));
        assert_eq!(s[0].graph.token(3).unwrap().lemma.as_deref(), Some("break"));
    }

    #[test]
    fn aligns_and_collapses() {
        let raw = parse_semeval_raw(RAW).unwrap();
        let parses = parse_conll(CONLL).unwrap();
        let (ok, failed) = align_instances(&raw, &parses, true);
        assert_eq!(ok.len(), 1);
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].id, 8);
        let inst = &ok[0];
        assert_eq!((inst.e1.start, inst.e1.end), (2, 2));
        assert_eq!((inst.e2.start, inst.e2.end), (8, 8));
        let adp = inst.adp().unwrap();
        assert_eq!(
            adp.path.render(&inst.graph),
            "thief nsubj_inv broke prep_with screwdriver"
        );
    }

    #[test]
    fn missing_parse_is_reported() {
        let raw = parse_semeval_raw(RAW).unwrap();
        let (ok, failed) = align_instances(&raw, &[], false);
        assert!(ok.is_empty());
        assert_eq!(failed.len(), 2);
    }

    #[test]
    fn unnumbered_sentences_count_from_one() {
        let s = parse_conll("1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n\n1\tb\t_\t_\t_\t_\t0\troot\t_\t_\n").unwrap();
        assert_eq!(s.iter().map(|p| p.id).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn bad_rows() {
        assert!(matches!(
            parse_conll("1\ta\t_\n"),
            Err(CorpusError::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_conll("# id = 5\n1\ta\t_\t_\t_\t_\t2\tx\t_\t_\n2\tb\t_\t_\t_\t_\t1\ty\t_\t_\n"),
            Err(CorpusError::TreeViolation { id: 5, .. })
        ));
        assert!(parse_conll("").unwrap().is_empty());
    }
}
