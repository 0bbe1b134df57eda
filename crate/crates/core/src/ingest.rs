//! Parsing and validation of the external inputs: pose keypoint frames,
//! word-timestamped transcripts and plain-text word vectors, plus the
//! timestamp alignment between words and frames.
//!
//! Pose input is accepted in three layouts:
//!
//! * a consolidated document `{"frames": [{"index", "t"?, "people": [...]}], "width"?, "height"?}`
//! * a top-level array of frame objects (the index defaults to the array position)
//! * a single per-frame document as written by the keypoint detector
//!   (`{"version": .., "people": [{"pose_keypoints_2d": [..75 floats..]}]}`)
//!
//! A person's keypoints may be given either as `"keypoints": [[x, y, c], ...]`
//! (25 triples), `"keypoints": [x, y, c, ...]` (75 floats) or the flat
//! `"pose_keypoints_2d"` array.

use std::collections::HashMap;
use std::fs;
use std::io::BufRead;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Number of body keypoints per frame in the 25-point body layout.
pub const BODY_KEYPOINTS: usize = 25;

/// One detected body keypoint in pixel coordinates.
///
/// A confidence of zero marks an undetected keypoint; its coordinates carry
/// no meaning.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "c")]
    pub confidence: f64,
}

impl Keypoint {
    pub const UNDETECTED: Keypoint = Keypoint {
        x: 0.0,
        y: 0.0,
        confidence: 0.0,
    };

    pub fn new(x: f64, y: f64, confidence: f64) -> Self {
        Keypoint { x, y, confidence }
    }

    #[inline]
    pub fn detected(&self) -> bool {
        self.confidence > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseFrame {
    pub frame_index: usize,
    pub timestamp: f64,
    pub keypoints: [Keypoint; BODY_KEYPOINTS],
}

impl PoseFrame {
    pub fn keypoint(&self, index: usize) -> &Keypoint {
        &self.keypoints[index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSize {
    pub width: f64,
    pub height: f64,
}

/// The speaker's pose over a whole video.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoseTrack {
    pub frames: Vec<PoseFrame>,
    pub frame_size: Option<FrameSize>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PoseParseOptions {
    /// Frame rate used to synthesize timestamps for frames that carry none.
    pub fps_hint: Option<f64>,
    /// Video frame size; overrides any size embedded in the document.
    pub frame_size: Option<FrameSize>,
}

struct RawFrame {
    index: usize,
    timestamp: Option<f64>,
    people: Vec<[Keypoint; BODY_KEYPOINTS]>,
}

/// Parse a pose document (consolidated, array or single-frame layout).
pub fn parse_pose_frames(source: &[u8], options: &PoseParseOptions) -> Result<PoseTrack> {
    if source.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::parse("empty pose document"));
    }
    let doc: Value = serde_json::from_slice(source).map_err(|e| Error::Parse {
        frame: None,
        line: Some(e.line()),
        message: e.to_string(),
    })?;

    let mut embedded_size = None;
    let raw = match &doc {
        Value::Object(map) if map.contains_key("frames") => {
            embedded_size = read_frame_size(map)?;
            let frames = map["frames"]
                .as_array()
                .ok_or_else(|| Error::parse("\"frames\" must be an array"))?;
            frames
                .iter()
                .enumerate()
                .map(|(pos, f)| read_frame(f, pos))
                .collect::<Result<Vec<_>>>()?
        }
        Value::Array(frames) => frames
            .iter()
            .enumerate()
            .map(|(pos, f)| read_frame(f, pos))
            .collect::<Result<Vec<_>>>()?,
        Value::Object(_) => vec![read_frame(&doc, 0)?],
        _ => return Err(Error::parse("pose document must be a JSON object or array")),
    };

    assemble(raw, options.frame_size.or(embedded_size), options.fps_hint)
}

/// Parse a directory of per-frame keypoint documents, ordered by file name.
///
/// The frame index is taken from the last run of digits in each file stem
/// (`clip_000000000012_keypoints.json` is frame 12), falling back to the
/// position in name order.
pub fn parse_pose_dir(dir: &Path, options: &PoseParseOptions) -> Result<PoseTrack> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::parse(format!(
            "no frame documents in {}",
            dir.display()
        )));
    }

    let mut raw = Vec::with_capacity(paths.len());
    for (pos, path) in paths.iter().enumerate() {
        let bytes = fs::read(path)?;
        let doc: Value = serde_json::from_slice(&bytes).map_err(|e| Error::Parse {
            frame: Some(pos),
            line: Some(e.line()),
            message: format!("{}: {e}", path.display()),
        })?;
        let index = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(trailing_number)
            .unwrap_or(pos);
        let mut frame = read_frame(&doc, index)?;
        frame.index = index;
        raw.push(frame);
    }
    assemble(raw, options.frame_size, options.fps_hint)
}

fn trailing_number(stem: &str) -> Option<usize> {
    let bytes = stem.as_bytes();
    let end = bytes.iter().rposition(u8::is_ascii_digit)? + 1;
    let start = bytes[..end]
        .iter()
        .rposition(|b| !b.is_ascii_digit())
        .map_or(0, |p| p + 1);
    stem[start..end].parse().ok()
}

fn read_frame_size(map: &serde_json::Map<String, Value>) -> Result<Option<FrameSize>> {
    match (map.get("width"), map.get("height")) {
        (Some(w), Some(h)) => {
            let (width, height) = (
                w.as_f64().ok_or_else(|| Error::parse("width must be a number"))?,
                h.as_f64().ok_or_else(|| Error::parse("height must be a number"))?,
            );
            if !(width > 0.0 && height > 0.0) {
                return Err(Error::Schema("frame size must be positive".into()));
            }
            Ok(Some(FrameSize { width, height }))
        }
        _ => Ok(None),
    }
}

fn read_frame(value: &Value, position: usize) -> Result<RawFrame> {
    let frame_err = |frame: usize, message: String| Error::Parse {
        frame: Some(frame),
        line: None,
        message,
    };
    let obj = value
        .as_object()
        .ok_or_else(|| frame_err(position, "frame must be an object".into()))?;
    let index = match obj.get("index") {
        None | Some(Value::Null) => position,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| frame_err(position, "index must be a non-negative integer".into()))?
            as usize,
    };
    let timestamp = match obj.get("t") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_f64()
                .ok_or_else(|| frame_err(index, "t must be a number".into()))?,
        ),
    };
    let people = match obj.get("people") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(people)) => people
            .iter()
            .map(|p| read_person(p, index))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(frame_err(index, "people must be an array".into())),
    };
    Ok(RawFrame {
        index,
        timestamp,
        people,
    })
}

fn read_person(value: &Value, frame: usize) -> Result<[Keypoint; BODY_KEYPOINTS]> {
    let parse_err = |message: &str| Error::Parse {
        frame: Some(frame),
        line: None,
        message: message.to_string(),
    };
    let list = value
        .get("keypoints")
        .or_else(|| value.get("pose_keypoints_2d"))
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("person has no keypoint array"))?;

    let number = |v: &Value| v.as_f64().ok_or_else(|| parse_err("keypoint value is not a number"));
    let mut flat = Vec::with_capacity(BODY_KEYPOINTS * 3);
    if list.first().is_some_and(Value::is_array) {
        if list.len() != BODY_KEYPOINTS {
            return Err(Error::Schema(format!(
                "frame {frame}: expected {BODY_KEYPOINTS} keypoints, found {}",
                list.len()
            )));
        }
        for triple in list {
            let triple = triple
                .as_array()
                .ok_or_else(|| parse_err("keypoint must be an [x, y, c] array"))?;
            if triple.len() != 3 {
                return Err(Error::Schema(format!(
                    "frame {frame}: keypoint must have 3 components, found {}",
                    triple.len()
                )));
            }
            for v in triple {
                flat.push(number(v)?);
            }
        }
    } else {
        if list.len() != BODY_KEYPOINTS * 3 {
            return Err(Error::Schema(format!(
                "frame {frame}: expected {} keypoint values, found {}",
                BODY_KEYPOINTS * 3,
                list.len()
            )));
        }
        for v in list {
            flat.push(number(v)?);
        }
    }

    let mut keypoints = [Keypoint::UNDETECTED; BODY_KEYPOINTS];
    for (k, chunk) in flat.chunks_exact(3).enumerate() {
        let (x, y, c) = (chunk[0], chunk[1], chunk[2]);
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Schema(format!(
                "frame {frame}: keypoint {k} confidence {c} outside [0, 1]"
            )));
        }
        if c > 0.0 && !(x.is_finite() && y.is_finite()) {
            return Err(Error::Schema(format!(
                "frame {frame}: keypoint {k} has non-finite coordinates"
            )));
        }
        keypoints[k] = if c > 0.0 {
            Keypoint::new(x, y, c)
        } else {
            Keypoint::UNDETECTED
        };
    }
    Ok(keypoints)
}

fn mean_confidence(keypoints: &[Keypoint; BODY_KEYPOINTS]) -> f64 {
    keypoints.iter().map(|k| k.confidence).sum::<f64>() / BODY_KEYPOINTS as f64
}

/// Reference point used to pick the speaker among several detected people.
fn selection_center(raw: &[RawFrame], frame_size: Option<FrameSize>) -> (f64, f64) {
    if let Some(size) = frame_size {
        return (size.width / 2.0, size.height / 2.0);
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for kp in raw
        .iter()
        .flat_map(|f| f.people.iter().flatten())
        .filter(|k| k.detected())
    {
        x0 = x0.min(kp.x);
        y0 = y0.min(kp.y);
        x1 = x1.max(kp.x);
        y1 = y1.max(kp.y);
    }
    if x0 > x1 {
        (0.0, 0.0)
    } else {
        ((x0 + x1) / 2.0, (y0 + y1) / 2.0)
    }
}

/// Where a person stands: keypoint 0, else the neck, else the centroid of
/// whatever was detected.
fn anchor(person: &[Keypoint; BODY_KEYPOINTS]) -> Option<(f64, f64)> {
    if let Some(k) = [person[0], person[1]].into_iter().find(Keypoint::detected) {
        return Some((k.x, k.y));
    }
    let detected: Vec<&Keypoint> = person.iter().filter(|k| k.detected()).collect();
    if detected.is_empty() {
        return None;
    }
    let n = detected.len() as f64;
    Some((
        detected.iter().map(|k| k.x).sum::<f64>() / n,
        detected.iter().map(|k| k.y).sum::<f64>() / n,
    ))
}

/// Choose the person whose keypoint 0 is nearest to `center`; ties go to
/// the higher mean confidence, then to the earlier entry. A person missing
/// keypoint 0 is placed by [`anchor`], so a speaker whose face drops out for
/// a frame is not swapped for someone else.
fn select_speaker(
    people: &[[Keypoint; BODY_KEYPOINTS]],
    center: (f64, f64),
) -> [Keypoint; BODY_KEYPOINTS] {
    let distance = |p: &[Keypoint; BODY_KEYPOINTS]| {
        anchor(p).map_or(f64::INFINITY, |(x, y)| (x - center.0).hypot(y - center.1))
    };
    let mut best: Option<(f64, f64, &[Keypoint; BODY_KEYPOINTS])> = None;
    for person in people {
        let (d, c) = (distance(person), mean_confidence(person));
        let better = match best {
            None => true,
            Some((bd, bc, _)) => d < bd || (d == bd && c > bc),
        };
        if better {
            best = Some((d, c, person));
        }
    }
    best.map_or([Keypoint::UNDETECTED; BODY_KEYPOINTS], |(_, _, p)| *p)
}

fn assemble(
    mut raw: Vec<RawFrame>,
    frame_size: Option<FrameSize>,
    fps_hint: Option<f64>,
) -> Result<PoseTrack> {
    if raw.is_empty() {
        return Err(Error::parse("pose document contains no frames"));
    }
    if let Some(fps) = fps_hint {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::Config(format!("fps hint must be positive, got {fps}")));
        }
    }
    raw.sort_by_key(|f| f.index);
    if let Some(w) = raw.windows(2).find(|w| w[0].index == w[1].index) {
        return Err(Error::Schema(format!("duplicate frame index {}", w[0].index)));
    }

    let center = selection_center(&raw, frame_size);
    let mut frames = Vec::with_capacity(raw.len());
    for f in &raw {
        let timestamp = match (f.timestamp, fps_hint) {
            (Some(t), _) => t,
            (None, Some(fps)) => f.index as f64 / fps,
            (None, None) => {
                return Err(Error::Config(format!(
                    "frame {} has no timestamp and no fps hint was given",
                    f.index
                )))
            }
        };
        if !(timestamp.is_finite() && timestamp >= 0.0) {
            return Err(Error::Schema(format!(
                "frame {}: timestamp {timestamp} must be a non-negative number",
                f.index
            )));
        }
        frames.push(PoseFrame {
            frame_index: f.index,
            timestamp,
            keypoints: select_speaker(&f.people, center),
        });
    }
    if let Some(w) = frames.windows(2).find(|w| w[1].timestamp <= w[0].timestamp) {
        return Err(Error::Schema(format!(
            "timestamps must strictly increase: frame {} at {} follows frame {} at {}",
            w[1].frame_index, w[1].timestamp, w[0].frame_index, w[0].timestamp
        )));
    }
    Ok(PoseTrack { frames, frame_size })
}

#[derive(Serialize)]
struct OutDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    height: Option<f64>,
    frames: Vec<OutFrame>,
}

#[derive(Serialize)]
struct OutFrame {
    index: usize,
    t: f64,
    people: Vec<OutPerson>,
}

#[derive(Serialize)]
struct OutPerson {
    keypoints: Vec<[f64; 3]>,
}

/// Serialize a track in the consolidated layout with explicit timestamps.
pub fn write_pose_track(track: &PoseTrack) -> String {
    let doc = OutDoc {
        width: track.frame_size.map(|s| s.width),
        height: track.frame_size.map(|s| s.height),
        frames: track
            .frames
            .iter()
            .map(|f| OutFrame {
                index: f.frame_index,
                t: f.timestamp,
                people: if f.keypoints.iter().any(Keypoint::detected) {
                    vec![OutPerson {
                        keypoints: f.keypoints.iter().map(|k| [k.x, k.y, k.confidence]).collect(),
                    }]
                } else {
                    Vec::new()
                },
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("pose track serializes")
}

/// One spoken word with its time interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptWord {
    pub text: String,
    pub start: f64,
    pub end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos_tag: Option<String>,
    /// Set when the word closes a sentence (a `.`, `!` or `?` followed it).
    #[serde(default)]
    pub sentence_end: bool,
}

impl TranscriptWord {
    pub fn new(text: impl Into<String>, start: f64, end: f64) -> Self {
        TranscriptWord {
            text: text.into(),
            start,
            end,
            pos_tag: None,
            sentence_end: false,
        }
    }

    pub fn with_pos(mut self, tag: impl Into<String>) -> Self {
        self.pos_tag = Some(tag.into());
        self
    }

    /// Lowercased text with leading and trailing punctuation removed.
    pub fn token(&self) -> String {
        normalize_token(&self.text)
    }
}

pub(crate) fn normalize_token(text: &str) -> String {
    text.trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

#[derive(Deserialize)]
struct RawWord {
    word: String,
    start: Option<f64>,
    end: Option<f64>,
    pos: Option<String>,
}

fn is_punctuation(text: &str) -> bool {
    !text.chars().any(char::is_alphanumeric)
}

fn ends_sentence(text: &str) -> bool {
    text.trim_end().ends_with(['.', '!', '?'])
}

/// Parse a word-timestamp transcript.
///
/// Punctuation-only tokens are dropped; sentence-final ones mark the
/// preceding word as the end of a sentence. Punctuation tokens may omit
/// their times.
pub fn parse_transcript(source: &[u8]) -> Result<Vec<TranscriptWord>> {
    let raw: Vec<RawWord> = serde_json::from_slice(source).map_err(|e| Error::Parse {
        frame: None,
        line: Some(e.line()),
        message: e.to_string(),
    })?;

    let mut words: Vec<TranscriptWord> = Vec::with_capacity(raw.len());
    for (i, w) in raw.into_iter().enumerate() {
        if is_punctuation(&w.word) {
            if ends_sentence(&w.word) {
                if let Some(last) = words.last_mut() {
                    last.sentence_end = true;
                }
            }
            continue;
        }
        let (start, end) = match (w.start, w.end) {
            (Some(s), Some(e)) => (s, e),
            _ => {
                return Err(Error::Schema(format!(
                    "word {i} ({:?}) is missing start or end",
                    w.word
                )))
            }
        };
        if !(start.is_finite() && end.is_finite() && start >= 0.0) {
            return Err(Error::Schema(format!(
                "word {i} ({:?}) has invalid times {start}..{end}",
                w.word
            )));
        }
        if start >= end {
            return Err(Error::Schema(format!(
                "word {i} ({:?}) starts at {start} but ends at {end}",
                w.word
            )));
        }
        let sentence_end = ends_sentence(&w.word);
        words.push(TranscriptWord {
            text: w.word,
            start,
            end,
            pos_tag: w.pos.filter(|p| !p.is_empty()),
            sentence_end,
        });
    }

    words.sort_by(|a, b| a.start.total_cmp(&b.start));
    if let Some(pair) = words.windows(2).find(|p| p[0].end > p[1].start) {
        return Err(Error::Schema(format!(
            "words {:?} ({}..{}) and {:?} ({}..{}) overlap",
            pair[0].text, pair[0].start, pair[0].end, pair[1].text, pair[1].start, pair[1].end
        )));
    }
    Ok(words)
}

/// Serialize words in the transcript input format.
pub fn write_transcript(words: &[TranscriptWord]) -> String {
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        let mut item = serde_json::json!({ "word": w.text, "start": w.start, "end": w.end });
        if let Some(pos) = &w.pos_tag {
            item["pos"] = Value::String(pos.clone());
        }
        out.push(item);
        if w.sentence_end && !ends_sentence(&w.text) {
            out.push(serde_json::json!({ "word": "." }));
        }
    }
    serde_json::to_string(&out).expect("transcript serializes")
}

/// Pretrained word vectors keyed by word.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: HashMap<String, Vec<f32>>,
}

impl EmbeddingTable {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    /// Entries in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.entries.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }
}

/// Load whitespace-separated `word v1 .. vd` lines. The first occurrence of
/// a duplicated word wins.
pub fn load_embeddings(source: impl BufRead) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::default();
    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::Parse {
            frame: None,
            line: Some(line_no),
            message: e.to_string(),
        })?;
        let mut parts = line.split_whitespace();
        let Some(word) = parts.next() else { continue };
        let vector = parts
            .map(|p| {
                p.parse::<f32>().map_err(|_| Error::Parse {
                    frame: None,
                    line: Some(line_no),
                    message: format!("component {p:?} is not a number"),
                })
            })
            .collect::<Result<Vec<f32>>>()?;
        if vector.is_empty() {
            return Err(Error::Schema(format!("line {line_no}: word {word:?} has no vector")));
        }
        if table.dimension == 0 {
            table.dimension = vector.len();
        } else if vector.len() != table.dimension {
            return Err(Error::Schema(format!(
                "line {line_no}: dimension {} differs from {}",
                vector.len(),
                table.dimension
            )));
        }
        table.entries.entry(word.to_string()).or_insert(vector);
    }
    if table.dimension == 0 {
        return Err(Error::parse("embedding source contains no vectors"));
    }
    Ok(table)
}

/// Map each word to the positions (in `frames`) of the frames whose
/// timestamp lies in `[start, end)`.
pub fn align(frames: &[PoseFrame], words: &[TranscriptWord]) -> Vec<Range<usize>> {
    words
        .iter()
        .map(|w| frame_range(frames, w.start, w.end))
        .collect()
}

/// Positions of frames with timestamp in `[start, end)`.
pub fn frame_range(frames: &[PoseFrame], start: f64, end: f64) -> Range<usize> {
    let lo = frames.partition_point(|f| f.timestamp < start);
    let hi = frames.partition_point(|f| f.timestamp < end);
    lo..hi.max(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_json(n: usize, with_t: bool, fps: f64) -> String {
        let people = r#"[{"keypoints":[[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1],[1,1,1]]}]"#;
        let frames: Vec<String> = (0..n)
            .map(|i| {
                if with_t {
                    format!(r#"{{"index":{i},"t":{},"people":{people}}}"#, i as f64 / fps)
                } else {
                    format!(r#"{{"index":{i},"people":{people}}}"#)
                }
            })
            .collect();
        format!(r#"{{"frames":[{}]}}"#, frames.join(","))
    }

    fn opts(fps: Option<f64>) -> PoseParseOptions {
        PoseParseOptions {
            fps_hint: fps,
            frame_size: None,
        }
    }

    #[test]
    fn empty_pose_source_is_a_parse_error() {
        assert!(matches!(
            parse_pose_frames(b"", &opts(Some(25.0))),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_pose_frames(b"  \n", &opts(Some(25.0))),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn single_frame_starts_at_zero() {
        let track = parse_pose_frames(frame_json(1, false, 25.0).as_bytes(), &opts(Some(25.0))).unwrap();
        assert_eq!(track.frames.len(), 1);
        assert_eq!(track.frames[0].timestamp, 0.0);
        assert!(track.frames[0].keypoints.iter().all(|k| k.confidence == 1.0));
    }

    #[test]
    fn timestamps_synthesized_from_fps() {
        let track = parse_pose_frames(frame_json(3, false, 10.0).as_bytes(), &opts(Some(10.0))).unwrap();
        let ts: Vec<f64> = track.frames.iter().map(|f| f.timestamp).collect();
        assert_eq!(ts, vec![0.0, 0.1, 0.2]);
    }

    #[test]
    fn embedded_timestamps_win_over_fps() {
        let track = parse_pose_frames(frame_json(3, true, 4.0).as_bytes(), &opts(Some(10.0))).unwrap();
        assert_eq!(track.frames[2].timestamp, 0.5);
    }

    #[test]
    fn missing_fps_without_timestamps_is_config_error() {
        let err = parse_pose_frames(frame_json(2, false, 1.0).as_bytes(), &opts(None)).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn wrong_keypoint_count_is_schema_error() {
        let doc = r#"{"frames":[{"index":0,"people":[{"keypoints":[[1,1,1],[1,1,1]]}]}]}"#;
        assert!(matches!(
            parse_pose_frames(doc.as_bytes(), &opts(Some(25.0))),
            Err(Error::Schema(_))
        ));
        let flat = format!(r#"{{"people":[{{"pose_keypoints_2d":[{}]}}]}}"#, vec!["0.5"; 72].join(","));
        assert!(matches!(
            parse_pose_frames(flat.as_bytes(), &opts(Some(25.0))),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn malformed_frame_reports_index() {
        let doc = r#"{"frames":[{"index":7,"people":[{"keypoints":"nope"}]}]}"#;
        match parse_pose_frames(doc.as_bytes(), &opts(Some(25.0))) {
            Err(Error::Parse { frame, .. }) => assert_eq!(frame, Some(7)),
            other => panic!("unexpected {other:?}"),
        }
        let broken = b"{\"frames\": [";
        assert!(matches!(
            parse_pose_frames(broken, &opts(Some(25.0))),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn flat_openpose_frame_is_accepted() {
        let mut values = Vec::new();
        for k in 0..25 {
            values.push(format!("{}", 100 + k));
            values.push("200".to_string());
            values.push("0.9".to_string());
        }
        let doc = format!(
            r#"{{"version":1.3,"people":[{{"person_id":[-1],"pose_keypoints_2d":[{}]}}]}}"#,
            values.join(",")
        );
        let track = parse_pose_frames(doc.as_bytes(), &opts(Some(30.0))).unwrap();
        assert_eq!(track.frames[0].keypoints[3], Keypoint::new(103.0, 200.0, 0.9));
    }

    fn person_at(x: f64, y: f64, conf: f64) -> String {
        let kps: Vec<String> = (0..25).map(|_| format!("[{x},{y},{conf}]")).collect();
        format!(r#"{{"keypoints":[{}]}}"#, kps.join(","))
    }

    #[test]
    fn speaker_nearest_to_center_is_selected() {
        let doc = format!(
            r#"{{"width":1000,"height":800,"frames":[{{"index":0,"people":[{},{}]}}]}}"#,
            person_at(100.0, 700.0, 0.9),
            person_at(480.0, 380.0, 0.5)
        );
        let track = parse_pose_frames(doc.as_bytes(), &opts(Some(25.0))).unwrap();
        assert_eq!(track.frames[0].keypoints[0].x, 480.0);
        assert_eq!(
            track.frame_size,
            Some(FrameSize {
                width: 1000.0,
                height: 800.0
            })
        );
    }

    #[test]
    fn speaker_without_face_is_placed_by_neck() {
        let mut speaker: Vec<String> = (0..25).map(|_| "[500,420,0.9]".to_string()).collect();
        speaker[0] = "[0,0,0]".into();
        let doc = format!(
            r#"{{"width":1000,"height":800,"frames":[{{"index":0,"people":[{},{{"keypoints":[{}]}}]}}]}}"#,
            person_at(100.0, 700.0, 0.9),
            speaker.join(",")
        );
        let track = parse_pose_frames(doc.as_bytes(), &opts(Some(25.0))).unwrap();
        assert_eq!(track.frames[0].keypoints[1].x, 500.0);
        assert!(!track.frames[0].keypoints[0].detected());
    }

    #[test]
    fn equidistant_people_break_ties_on_confidence() {
        let doc = format!(
            r#"{{"width":1000,"height":800,"frames":[{{"index":0,"people":[{},{}]}}]}}"#,
            person_at(400.0, 400.0, 0.4),
            person_at(600.0, 400.0, 0.8)
        );
        let track = parse_pose_frames(doc.as_bytes(), &opts(Some(25.0))).unwrap();
        assert_eq!(track.frames[0].keypoints[0].x, 600.0);
    }

    #[test]
    fn frame_without_people_is_undetected() {
        let doc = r#"{"frames":[{"index":0,"t":0.0,"people":[]}]}"#;
        let track = parse_pose_frames(doc.as_bytes(), &opts(None)).unwrap();
        assert!(track.frames[0].keypoints.iter().all(|k| !k.detected()));
    }

    #[test]
    fn non_increasing_timestamps_rejected() {
        let p = person_at(1.0, 1.0, 1.0);
        let doc = format!(r#"{{"frames":[{{"index":0,"t":1.0,"people":[{p}]}},{{"index":1,"t":0.5,"people":[{p}]}}]}}"#);
        assert!(matches!(
            parse_pose_frames(doc.as_bytes(), &opts(None)),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn confidence_out_of_range_rejected() {
        let doc = format!(r#"{{"frames":[{{"index":0,"people":[{}]}}]}}"#, person_at(1.0, 1.0, 1.5));
        assert!(matches!(
            parse_pose_frames(doc.as_bytes(), &opts(Some(1.0))),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn frames_sorted_by_index() {
        let p = person_at(1.0, 1.0, 1.0);
        let doc = format!(r#"[{{"index":2,"people":[{p}]}},{{"index":0,"people":[{p}]}},{{"index":1,"people":[{p}]}}]"#);
        let track = parse_pose_frames(doc.as_bytes(), &opts(Some(10.0))).unwrap();
        let idx: Vec<usize> = track.frames.iter().map(|f| f.frame_index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn pose_directory_uses_file_numbers() {
        let dir = tempfile::tempdir().unwrap();
        for i in [3usize, 1, 2] {
            let doc = format!(r#"{{"version":1.3,"people":[{}]}}"#, person_at(i as f64, 1.0, 1.0));
            fs::write(dir.path().join(format!("talk_{i:012}_keypoints.json")), doc).unwrap();
        }
        let track = parse_pose_dir(dir.path(), &opts(Some(10.0))).unwrap();
        let idx: Vec<usize> = track.frames.iter().map(|f| f.frame_index).collect();
        assert_eq!(idx, vec![1, 2, 3]);
        assert_eq!(track.frames[0].keypoints[0].x, 1.0);
        assert!((track.frames[2].timestamp - 0.3).abs() < 1e-12);
    }

    #[test]
    fn transcript_basics() {
        assert!(parse_transcript(b"[]").unwrap().is_empty());
        let words = parse_transcript(
            br#"[{"word":"hello","start":0.0,"end":0.4},{"word":"world","start":0.5,"end":0.9}]"#,
        )
        .unwrap();
        assert_eq!(words.len(), 2);
        assert_eq!(words[0].text, "hello");
        assert_eq!(words[1].text, "world");
    }

    #[test]
    fn transcript_out_of_order_is_sorted() {
        let words = parse_transcript(
            br#"[{"word":"c","start":2.0,"end":2.5},{"word":"a","start":0.0,"end":0.4},{"word":"b","start":1.0,"end":1.5}]"#,
        )
        .unwrap();
        let text: Vec<&str> = words.iter().map(|w| w.text.as_str()).collect();
        assert_eq!(text, vec!["a", "b", "c"]);
    }

    #[test]
    fn transcript_validation_errors() {
        let overlap = br#"[{"word":"a","start":0.0,"end":0.6},{"word":"b","start":0.5,"end":0.9}]"#;
        assert!(matches!(parse_transcript(overlap), Err(Error::Schema(_))));
        let inverted = br#"[{"word":"a","start":0.5,"end":0.5}]"#;
        assert!(matches!(parse_transcript(inverted), Err(Error::Schema(_))));
        assert!(matches!(parse_transcript(b"{"), Err(Error::Parse { .. })));
    }

    #[test]
    fn punctuation_dropped_and_marks_sentence_end() {
        let words = parse_transcript(
            br#"[{"word":"hi","start":0.0,"end":0.3,"pos":"INTJ"},{"word":".","start":0.3,"end":0.31},{"word":"there","start":0.5,"end":0.8},{"word":",","start":0.8,"end":0.81}]"#,
        )
        .unwrap();
        assert_eq!(words.len(), 2);
        assert!(words[0].sentence_end);
        assert!(!words[1].sentence_end);
        assert_eq!(words[0].pos_tag.as_deref(), Some("INTJ"));
    }

    #[test]
    fn embeddings_basic() {
        let table = load_embeddings("a 1.0 2.0".as_bytes()).unwrap();
        assert_eq!(table.dimension(), 2);
        assert_eq!(table.get("a"), Some(&[1.0f32, 2.0][..]));
    }

    #[test]
    fn embeddings_dimension_mismatch() {
        let err = load_embeddings("a 1 2\nb 1 2 3".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn embeddings_first_duplicate_wins() {
        let table = load_embeddings("a 1 2\nb 0 0\na 3 4\n".as_bytes()).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.get("a"), Some(&[1.0f32, 2.0][..]));
    }

    #[test]
    fn embeddings_non_numeric() {
        match load_embeddings("a 1 2\nb 1 x".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, Some(2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn grid(n: usize, step: f64) -> Vec<PoseFrame> {
        (0..n)
            .map(|i| PoseFrame {
                frame_index: i,
                timestamp: i as f64 * step,
                keypoints: [Keypoint::UNDETECTED; BODY_KEYPOINTS],
            })
            .collect()
    }

    #[test]
    fn align_interval_membership() {
        // 0.0 ..= 2.0 in 0.1 steps, timestamps as index / fps.
        let frames: Vec<PoseFrame> = (0..=20)
            .map(|i| PoseFrame {
                frame_index: i,
                timestamp: i as f64 / 10.0,
                keypoints: [Keypoint::UNDETECTED; BODY_KEYPOINTS],
            })
            .collect();
        let ranges = align(
            &frames,
            &[
                TranscriptWord::new("w", 0.5, 0.8),
                TranscriptWord::new("late", 5.0, 6.0),
                TranscriptWord::new("all", 0.0, 10.0),
            ],
        );
        assert_eq!(ranges[0], 5..8);
        assert!(ranges[1].is_empty());
        assert_eq!(ranges[2], 0..21);
    }

    #[test]
    fn align_word_between_frames_is_empty() {
        let frames = grid(3, 1.0);
        let ranges = align(&frames, &[TranscriptWord::new("gap", 0.2, 0.7)]);
        assert!(ranges[0].is_empty());
    }
}
