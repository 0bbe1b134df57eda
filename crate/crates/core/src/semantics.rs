//! Word phrases: rule-based chunking over Universal POS tags, phrase
//! embeddings from pretrained word vectors, and relation-view filtering.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{normalize_token, EmbeddingTable, TranscriptWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhraseKind {
    #[serde(rename = "NP")]
    Noun,
    #[serde(rename = "VP")]
    Verb,
    #[serde(rename = "PP")]
    Prepositional,
    #[serde(rename = "SVO")]
    SubjectVerbObject,
}

impl PhraseKind {
    pub const ALL: [PhraseKind; 4] = [
        PhraseKind::Noun,
        PhraseKind::Verb,
        PhraseKind::Prepositional,
        PhraseKind::SubjectVerbObject,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PhraseKind::Noun => "NP",
            PhraseKind::Verb => "VP",
            PhraseKind::Prepositional => "PP",
            PhraseKind::SubjectVerbObject => "SVO",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        PhraseKind::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(label))
    }
}

impl fmt::Display for PhraseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhraseSpan {
    pub id: usize,
    pub kind: PhraseKind,
    pub word_range: Range<usize>,
    pub text: String,
    pub start: f64,
    pub end: f64,
    /// Number of extracted phrases with the same lowercased text.
    pub occurrence_count: usize,
    #[serde(skip)]
    pub embedding: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Det,
    Adj,
    Noun,
    Adp,
    Aux,
    Verb,
    Part,
    Other,
}

impl Tag {
    fn from_upos(tag: &str) -> Tag {
        match tag.to_ascii_uppercase().as_str() {
            "DET" => Tag::Det,
            "ADJ" => Tag::Adj,
            "NOUN" | "PROPN" => Tag::Noun,
            "ADP" => Tag::Adp,
            "AUX" => Tag::Aux,
            "VERB" => Tag::Verb,
            "PART" => Tag::Part,
            _ => Tag::Other,
        }
    }
}

struct Chunker {
    tags: Vec<Tag>,
    sentence_end: Vec<bool>,
}

impl Chunker {
    /// Word `j` matches `tag` and may join a span that started at `start`.
    fn takes(&self, j: usize, start: usize, tag: Tag) -> bool {
        j < self.tags.len() && self.tags[j] == tag && (j == start || !self.sentence_end[j - 1])
    }

    fn noun_phrase(&self, i: usize, start: usize) -> Option<usize> {
        let mut j = i;
        if self.takes(j, start, Tag::Det) {
            j += 1;
        }
        while self.takes(j, start, Tag::Adj) {
            j += 1;
        }
        let nouns = j;
        while self.takes(j, start, Tag::Noun) {
            j += 1;
        }
        (j > nouns).then_some(j)
    }

    fn verb_phrase(&self, i: usize, start: usize) -> Option<usize> {
        let mut j = i;
        while self.takes(j, start, Tag::Aux) {
            j += 1;
        }
        if !self.takes(j, start, Tag::Verb) {
            return None;
        }
        j += 1;
        if self.takes(j, start, Tag::Part) {
            j += 1;
        }
        Some(j)
    }

    fn prepositional_phrase(&self, i: usize, start: usize) -> Option<usize> {
        if !self.takes(i, start, Tag::Adp) {
            return None;
        }
        self.noun_phrase(i + 1, start)
    }

    fn svo(&self, i: usize, start: usize) -> Option<usize> {
        let subject = self.noun_phrase(i, start)?;
        let verb = self.verb_phrase(subject, start)?;
        self.noun_phrase(verb, start)
    }

    fn matcher(&self, kind: PhraseKind) -> impl Fn(usize) -> Option<usize> + '_ {
        move |i| match kind {
            PhraseKind::Noun => self.noun_phrase(i, i),
            PhraseKind::Verb => self.verb_phrase(i, i),
            PhraseKind::Prepositional => self.prepositional_phrase(i, i),
            PhraseKind::SubjectVerbObject => self.svo(i, i),
        }
    }

    /// Longest match, left to right, non-overlapping within one kind.
    fn chunks(&self, kind: PhraseKind) -> Vec<Range<usize>> {
        let m = self.matcher(kind);
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.tags.len() {
            match m(i) {
                Some(end) => {
                    out.push(i..end);
                    i = end;
                }
                None => i += 1,
            }
        }
        out
    }
}

fn make_spans(words: &[TranscriptWord], mut found: Vec<(PhraseKind, Range<usize>)>) -> Vec<PhraseSpan> {
    found.sort_by(|a, b| {
        (a.1.start, a.1.end, a.0).cmp(&(b.1.start, b.1.end, b.0))
    });
    let mut spans: Vec<PhraseSpan> = found
        .into_iter()
        .enumerate()
        .map(|(id, (kind, range))| {
            let text = words[range.clone()]
                .iter()
                .map(|w| w.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            PhraseSpan {
                id,
                kind,
                start: words[range.start].start,
                end: words[range.end - 1].end,
                word_range: range,
                text,
                occurrence_count: 0,
                embedding: None,
            }
        })
        .collect();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for s in &spans {
        *counts.entry(s.text.to_lowercase()).or_default() += 1;
    }
    for s in &mut spans {
        s.occurrence_count = counts[&s.text.to_lowercase()];
    }
    spans
}

/// Chunk NP, VP, PP and SVO phrases from POS-tagged words.
///
/// * NP: `DET? ADJ* NOUN+` (proper nouns count as nouns)
/// * PP: `ADP NP`
/// * VP: `AUX* VERB PART?`
/// * SVO: `NP VP NP`
///
/// No phrase crosses a sentence boundary.
pub fn extract_phrases(words: &[TranscriptWord]) -> Result<Vec<PhraseSpan>> {
    let mut tags = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        match &w.pos_tag {
            Some(t) => tags.push(Tag::from_upos(t)),
            None => {
                return Err(Error::Config(format!(
                    "word {i} ({:?}) has no POS tag and no phrase annotations were given",
                    w.text
                )))
            }
        }
    }
    let chunker = Chunker {
        tags,
        sentence_end: words.iter().map(|w| w.sentence_end).collect(),
    };
    let found = PhraseKind::ALL
        .into_iter()
        .flat_map(|kind| chunker.chunks(kind).into_iter().map(move |r| (kind, r)))
        .collect();
    Ok(make_spans(words, found))
}

#[derive(Deserialize)]
struct Annotation {
    kind: String,
    words: Vec<usize>,
}

/// Build phrases from pre-extracted annotations,
/// `[{"kind": "NP", "words": [first, last]}]`.
///
/// `words` is either `[i]`, an inclusive `[first, last]` pair, or a full
/// list of consecutive indices.
pub fn phrases_from_annotations(words: &[TranscriptWord], source: &[u8]) -> Result<Vec<PhraseSpan>> {
    let annotations: Vec<Annotation> = serde_json::from_slice(source).map_err(|e| Error::Parse {
        frame: None,
        line: Some(e.line()),
        message: e.to_string(),
    })?;
    let mut found = Vec::with_capacity(annotations.len());
    for (n, a) in annotations.into_iter().enumerate() {
        let kind = PhraseKind::from_label(&a.kind)
            .ok_or_else(|| Error::Schema(format!("annotation {n}: unknown kind {:?}", a.kind)))?;
        let range = match a.words.as_slice() {
            [] => return Err(Error::Schema(format!("annotation {n}: empty word list"))),
            [i] => *i..*i + 1,
            [first, last] if first <= last => *first..*last + 1,
            list if list.len() > 2 && list.windows(2).all(|w| w[1] == w[0] + 1) => {
                list[0]..list[list.len() - 1] + 1
            }
            _ => {
                return Err(Error::Schema(format!(
                    "annotation {n}: word indices must be contiguous"
                )))
            }
        };
        if range.end > words.len() {
            return Err(Error::Schema(format!(
                "annotation {n}: word {} out of range ({} words)",
                range.end - 1,
                words.len()
            )));
        }
        found.push((kind, range));
    }
    Ok(make_spans(words, found))
}

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "our", "their", "his",
    "her", "its", "some", "any", "every", "each", "no",
];
const ADPOSITIONS: &[&str] = &[
    "in", "on", "at", "of", "for", "with", "from", "by", "about", "into", "over", "under",
    "between", "through", "during", "without", "within", "to", "after", "before", "like",
];
const AUXILIARIES: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "am", "will", "would", "can", "could", "should",
    "may", "might", "must", "do", "does", "did", "have", "has", "had",
];
const PRONOUNS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them",
];
const CONJUNCTIONS: &[&str] = &["and", "or", "but", "so", "because", "if"];

/// Fill missing POS tags from closed-class word lists; everything else is
/// tagged NOUN. Only meant for fixtures and demos.
pub fn fallback_tag(words: &mut [TranscriptWord]) {
    for w in words.iter_mut().filter(|w| w.pos_tag.is_none()) {
        let token = w.token();
        let tag = if DETERMINERS.contains(&token.as_str()) {
            "DET"
        } else if ADPOSITIONS.contains(&token.as_str()) {
            "ADP"
        } else if AUXILIARIES.contains(&token.as_str()) {
            "AUX"
        } else if PRONOUNS.contains(&token.as_str()) {
            "PRON"
        } else if CONJUNCTIONS.contains(&token.as_str()) {
            "CCONJ"
        } else if token == "not" {
            "PART"
        } else {
            "NOUN"
        };
        w.pos_tag = Some(tag.to_string());
    }
}

/// Mean vector of the phrase's in-vocabulary tokens, or `None` when no token
/// is in the table.
pub fn phrase_embedding(span: &PhraseSpan, table: &EmbeddingTable) -> Option<Vec<f64>> {
    let mut sum = vec![0.0f64; table.dimension()];
    let mut found = 0usize;
    for token in span.text.split_whitespace().map(normalize_token) {
        if let Some(v) = table.get(&token) {
            for (s, &x) in sum.iter_mut().zip(v) {
                *s += f64::from(x);
            }
            found += 1;
        }
    }
    if found == 0 {
        return None;
    }
    for s in &mut sum {
        *s /= found as f64;
    }
    Some(sum)
}

/// Predicates of the relation-view phrase filter; unset ones always pass.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhraseFilter {
    pub time_range: Option<(f64, f64)>,
    pub min_occurrence: Option<usize>,
    pub kinds: Option<BTreeSet<PhraseKind>>,
}

impl PhraseFilter {
    pub fn validate(&self) -> Result<()> {
        if let Some((lo, hi)) = self.time_range {
            if !(lo <= hi) {
                return Err(Error::Config(format!("time range {lo}..{hi} is inverted")));
            }
        }
        Ok(())
    }

    pub fn accepts(&self, span: &PhraseSpan) -> bool {
        self.time_range
            .is_none_or(|(lo, hi)| (lo..=hi).contains(&span.start))
            && self
                .min_occurrence
                .is_none_or(|n| span.occurrence_count >= n)
            && self.kinds.as_ref().is_none_or(|k| k.contains(&span.kind))
    }
}

pub fn filter_phrases(spans: &[PhraseSpan], filter: &PhraseFilter) -> Result<Vec<PhraseSpan>> {
    filter.validate()?;
    Ok(spans.iter().filter(|s| filter.accepts(s)).cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagged(items: &[(&str, &str)]) -> Vec<TranscriptWord> {
        items
            .iter()
            .enumerate()
            .map(|(i, (w, t))| {
                TranscriptWord::new(*w, i as f64, i as f64 + 0.5).with_pos(*t)
            })
            .collect()
    }

    fn summary(spans: &[PhraseSpan]) -> Vec<(PhraseKind, String)> {
        spans.iter().map(|s| (s.kind, s.text.clone())).collect()
    }

    #[test]
    fn noun_phrase_with_determiner_and_adjective() {
        let spans = extract_phrases(&tagged(&[("the", "DET"), ("red", "ADJ"), ("car", "NOUN")])).unwrap();
        assert_eq!(summary(&spans), vec![(PhraseKind::Noun, "the red car".into())]);
        assert_eq!(spans[0].word_range, 0..3);
        assert_eq!((spans[0].start, spans[0].end), (0.0, 2.5));
    }

    #[test]
    fn separate_nouns_split_by_conjunction() {
        let spans = extract_phrases(&tagged(&[("pros", "NOUN"), ("and", "CCONJ"), ("cons", "NOUN")])).unwrap();
        assert_eq!(
            summary(&spans),
            vec![(PhraseKind::Noun, "pros".into()), (PhraseKind::Noun, "cons".into())]
        );
    }

    #[test]
    fn prepositional_phrase_with_proper_noun() {
        let spans = extract_phrases(&tagged(&[("in", "ADP"), ("Germany", "PROPN")])).unwrap();
        assert_eq!(
            summary(&spans),
            vec![
                (PhraseKind::Prepositional, "in Germany".into()),
                (PhraseKind::Noun, "Germany".into())
            ]
        );
    }

    #[test]
    fn verb_and_svo_phrases() {
        let words = tagged(&[
            ("the", "DET"),
            ("coach", "NOUN"),
            ("will", "AUX"),
            ("give", "VERB"),
            ("feedback", "NOUN"),
        ]);
        let spans = extract_phrases(&words).unwrap();
        assert_eq!(
            summary(&spans),
            vec![
                (PhraseKind::Noun, "the coach".into()),
                (PhraseKind::SubjectVerbObject, "the coach will give feedback".into()),
                (PhraseKind::Verb, "will give".into()),
                (PhraseKind::Noun, "feedback".into()),
            ]
        );
    }

    #[test]
    fn phrases_stop_at_sentence_boundaries() {
        let mut words = tagged(&[("data", "NOUN"), ("science", "NOUN")]);
        words[0].sentence_end = true;
        let spans = extract_phrases(&words).unwrap();
        assert_eq!(
            summary(&spans),
            vec![(PhraseKind::Noun, "data".into()), (PhraseKind::Noun, "science".into())]
        );
    }

    #[test]
    fn occurrence_counts_are_case_insensitive() {
        let spans = extract_phrases(&tagged(&[
            ("Ideas", "NOUN"),
            ("matter", "VERB"),
            (",", "PUNCT"),
            ("ideas", "NOUN"),
        ]))
        .unwrap();
        let ideas: Vec<_> = spans.iter().filter(|s| s.text.eq_ignore_ascii_case("ideas")).collect();
        assert_eq!(ideas.len(), 2);
        assert!(ideas.iter().all(|s| s.occurrence_count == 2));
    }

    #[test]
    fn missing_tags_is_config_error() {
        let words = vec![TranscriptWord::new("hello", 0.0, 0.5)];
        assert!(matches!(extract_phrases(&words), Err(Error::Config(_))));
    }

    #[test]
    fn fallback_tagger_feeds_chunker() {
        let mut words: Vec<_> = ["the", "plan", "in", "Singapore"]
            .iter()
            .enumerate()
            .map(|(i, w)| TranscriptWord::new(*w, i as f64, i as f64 + 0.5))
            .collect();
        fallback_tag(&mut words);
        let spans = extract_phrases(&words).unwrap();
        assert!(spans.iter().any(|s| s.kind == PhraseKind::Prepositional && s.text == "in Singapore"));
    }

    #[test]
    fn annotations_bypass_chunker() {
        let words: Vec<_> = (0..5).map(|i| TranscriptWord::new(format!("w{i}"), i as f64, i as f64 + 0.5)).collect();
        let spans = phrases_from_annotations(
            &words,
            br#"[{"kind":"NP","words":[1,3]},{"kind":"vp","words":[4]},{"kind":"PP","words":[0,1,2]}]"#,
        )
        .unwrap();
        assert_eq!(spans[0].word_range, 0..3);
        assert_eq!(spans[1].word_range, 1..4);
        assert_eq!(spans[1].text, "w1 w2 w3");
        assert_eq!(spans[2].kind, PhraseKind::Verb);
        assert!(phrases_from_annotations(&words, br#"[{"kind":"NP","words":[3,9]}]"#).is_err());
        assert!(phrases_from_annotations(&words, br#"[{"kind":"XX","words":[1]}]"#).is_err());
        assert!(phrases_from_annotations(&words, br#"[{"kind":"NP","words":[1,2,4]}]"#).is_err());
    }

    fn span(text: &str) -> PhraseSpan {
        PhraseSpan {
            id: 0,
            kind: PhraseKind::Noun,
            word_range: 0..1,
            text: text.into(),
            start: 0.0,
            end: 1.0,
            occurrence_count: 1,
            embedding: None,
        }
    }

    #[test]
    fn embedding_examples() {
        let table = crate::ingest::load_embeddings("pros 1 0\ncons 0 1\n".as_bytes()).unwrap();
        assert_eq!(phrase_embedding(&span("Pros"), &table), Some(vec![1.0, 0.0]));
        assert_eq!(phrase_embedding(&span("pros cons"), &table), Some(vec![0.5, 0.5]));
        assert_eq!(phrase_embedding(&span("zebra"), &table), None);
    }

    #[test]
    fn filter_examples() {
        let mut a = span("early");
        a.occurrence_count = 2;
        let mut b = span("late");
        b.start = 10.0;
        b.kind = PhraseKind::Verb;
        let all = vec![a.clone(), b.clone()];

        assert_eq!(filter_phrases(&all, &PhraseFilter::default()).unwrap(), all);
        let by_count = PhraseFilter { min_occurrence: Some(2), ..Default::default() };
        assert_eq!(filter_phrases(&all, &by_count).unwrap(), vec![a.clone()]);
        let by_time = PhraseFilter { time_range: Some((0.0, 5.0)), ..Default::default() };
        assert_eq!(filter_phrases(&all, &by_time).unwrap(), vec![a.clone()]);
        let by_kind = PhraseFilter { kinds: Some([PhraseKind::Verb].into()), ..Default::default() };
        assert_eq!(filter_phrases(&all, &by_kind).unwrap(), vec![b]);
        let inverted = PhraseFilter { time_range: Some((5.0, 1.0)), ..Default::default() };
        assert!(matches!(filter_phrases(&all, &inverted), Err(Error::Config(_))));
    }
}
