use std::ops::Range;
use std::path::Path;

use super::{read_to_string, CorpusError};
use crate::labels::Label;

/// One entry of an official SemEval-2010 task 8 file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInstance {
    pub id: u64,
    /// Sentence as written in the file, markers included.
    pub marked: String,
    /// Sentence with the `<e1>`/`<e2>` markers removed.
    pub text: String,
    /// Character range of each entity in `text`.
    pub e1: Range<usize>,
    pub e2: Range<usize>,
    pub label: Option<Label>,
    pub comment: Option<String>,
}

pub fn read_semeval_raw(path: impl AsRef<Path>) -> Result<Vec<RawInstance>, CorpusError> {
    parse_semeval_raw(&read_to_string(path.as_ref())?)
}

/// Parse the official layout: a numbered, quoted sentence line, then an
/// optional label line and `Comment:` line, then a blank separator. Test
/// files without labels are accepted.
pub fn parse_semeval_raw(text: &str) -> Result<Vec<RawInstance>, CorpusError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut out: Vec<RawInstance> = Vec::new();
    let mut open = false;

    for (n, raw_line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            open = false;
            continue;
        }
        if let Some(inst) = parse_sentence_line(line, line_no)? {
            out.push(inst);
            open = true;
            continue;
        }
        let Some(current) = out.last_mut().filter(|_| open) else {
            return Err(CorpusError::format(line_no, "expected a numbered sentence line"));
        };
        let trimmed = line.trim();
        if let Some(c) = trimmed.strip_prefix("Comment") {
            current.comment = Some(c.trim_start_matches(':').trim().to_string());
        } else if current.label.is_none() {
            current.label = Some(
                trimmed
                    .parse()
                    .map_err(|e: crate::labels::UnknownLabel| CorpusError::format(line_no, e.to_string()))?,
            );
        } else {
            return Err(CorpusError::format(line_no, "unexpected extra line in record"));
        }
    }
    Ok(out)
}

fn parse_sentence_line(line: &str, line_no: usize) -> Result<Option<RawInstance>, CorpusError> {
    let Some((id, rest)) = line.split_once('\t') else {
        return Ok(None);
    };
    let Ok(id) = id.trim().parse::<u64>() else {
        return Ok(None);
    };
    let rest = rest.trim();
    let marked = rest
        .strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .ok_or_else(|| CorpusError::format(line_no, "sentence must be enclosed in double quotes"))?;

    let mut text = String::with_capacity(marked.len());
    let mut chars = 0usize;
    let mut e1 = (None, None);
    let mut e2 = (None, None);
    let mut i = 0;
    while i < marked.len() {
        let tail = &marked[i..];
        let tag = ["<e1>", "</e1>", "<e2>", "</e2>"]
            .into_iter()
            .find(|t| tail.starts_with(t));
        if let Some(tag) = tag {
            let slot = match tag {
                "<e1>" => &mut e1.0,
                "</e1>" => &mut e1.1,
                "<e2>" => &mut e2.0,
                _ => &mut e2.1,
            };
            if slot.replace(chars).is_some() {
                return Err(CorpusError::format(line_no, format!("duplicate {tag} marker")));
            }
            i += tag.len();
            continue;
        }
        let ch = tail.chars().next().expect("non-empty tail");
        text.push(ch);
        chars += 1;
        i += ch.len_utf8();
    }

    let range = |pair: (Option<usize>, Option<usize>), name: &str| match pair {
        (Some(s), Some(e)) if s < e => Ok(s..e),
        _ => Err(CorpusError::format(line_no, format!("missing or empty {name} markers"))),
    };
    Ok(Some(RawInstance {
        id,
        marked: marked.to_string(),
        e1: range(e1, "e1")?,
        e2: range(e2, "e2")?,
        text,
        label: None,
        comment: None,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "1\t\"The system as described above has its greatest application in an arrayed <e1>configuration</e1> of antenna <e2>elements</e2>.\"\r\nComponent-Whole(e2,e1)\r\nComment: Not a collection: there is structure here, organisation.\r\n\r\n2\t\"The <e1>child</e1> was carefully wrapped and bound into the <e2>cradle</e2> by means of a cord.\"\nOther\nComment:\n\n";

    #[test]
    fn parses_official_layout() {
        let v = parse_semeval_raw(SAMPLE).unwrap();
        assert_eq!(v.len(), 2);
        let a = &v[0];
        assert_eq!(a.id, 1);
        assert_eq!(a.label, Some("Component-Whole(e2,e1)".parse().unwrap()));
        let chars: Vec<char> = a.text.chars().collect();
        let e1: String = chars[a.e1.clone()].iter().collect();
        let e2: String = chars[a.e2.clone()].iter().collect();
        assert_eq!(e1, "configuration");
        assert_eq!(e2, "elements");
        assert!(!a.text.contains('<'));
        assert_eq!(
            a.comment.as_deref(),
            Some("Not a collection: there is structure here, organisation.")
        );
        assert_eq!(v[1].label, Some(Label::OTHER));
        assert_eq!(v[1].comment.as_deref(), Some(""));
    }

    #[test]
    fn unlabeled_test_file() {
        let v = parse_semeval_raw("8001\t\"The most common <e1>audits</e1> were about <e2>waste</e2> and recycling.\"\n8002\t\"The <e1>company</e1> fabricates plastic <e2>chairs</e2>.\"\n").unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|r| r.label.is_none()));
    }

    #[test]
    fn empty_file() {
        assert!(parse_semeval_raw("").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "1\t\"no <e1>markers</e1> here\"\nOther\n";
        match parse_semeval_raw(bad) {
            Err(CorpusError::Format { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        let bad_label = "1\t\"<e1>a</e1> <e2>b</e2>\"\nNope(e1,e2)\n";
        match parse_semeval_raw(bad_label) {
            Err(CorpusError::Format { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_semeval_raw("stray text\n").is_err());
    }

    #[test]
    fn non_ascii_offsets_are_characters() {
        let v = parse_semeval_raw("5\t\"Café <e1>crème</e1> in a <e2>cup</e2>.\"\n").unwrap();
        let chars: Vec<char> = v[0].text.chars().collect();
        assert_eq!(chars[v[0].e1.clone()].iter().collect::<String>(), "crème");
    }
}
