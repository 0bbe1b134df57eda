//! Deterministic synthetic talks: pose frames, a tagged transcript and a
//! small embedding table.
//!
//! Sentences cycle through a fixed set of templates so every generated talk
//! longer than a few sentences contains "tell", "Germany", "pros" and
//! "cons". Each sentence is accompanied by one gesture family. A second,
//! off-center person stands in the frame as an audience member.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

use crate::gesture::{
    NormalizedSkeleton, LEFT_ELBOW, LEFT_SHOULDER, LEFT_WRIST, MID_HIP, NECK, NOSE, RIGHT_ELBOW,
    RIGHT_SHOULDER, RIGHT_WRIST, UPPER_BODY,
};
use crate::ingest::{Keypoint, BODY_KEYPOINTS};

const WIDTH: f64 = 1280.0;
const HEIGHT: f64 = 720.0;
const SPEAKER_HEIGHT: f64 = 420.0;
const NOSE_PX: (f64, f64) = (640.0, 180.0);

const TEMPLATES: &[&[(&str, &str)]] = &[
    &[("Let", "VERB"), ("me", "PRON"), ("tell", "VERB"), ("you", "PRON"), ("about", "ADP"), ("Germany", "PROPN")],
    &[("The", "DET"), ("pros", "NOUN"), ("outweigh", "VERB"), ("the", "DET"), ("cons", "NOUN")],
    &[("I", "PRON"), ("will", "AUX"), ("tell", "VERB"), ("the", "DET"), ("whole", "ADJ"), ("story", "NOUN")],
    &[("People", "NOUN"), ("in", "ADP"), ("Germany", "PROPN"), ("build", "VERB"), ("strong", "ADJ"), ("cars", "NOUN")],
    &[("We", "PRON"), ("weigh", "VERB"), ("the", "DET"), ("pros", "NOUN"), ("and", "CCONJ"), ("cons", "NOUN")],
    &[("Teachers", "NOUN"), ("tell", "VERB"), ("students", "NOUN"), ("the", "DET"), ("truth", "NOUN")],
    &[("The", "DET"), ("economy", "NOUN"), ("of", "ADP"), ("Europe", "PROPN"), ("is", "AUX"), ("growing", "VERB")],
];

/// Word topics of the embedding table; words of a topic get nearby vectors.
const TOPICS: &[&[&str]] = &[
    &["tell", "let", "story", "truth", "teachers", "students", "people", "me", "you", "i", "we"],
    &["germany", "europe", "economy", "cars", "build", "growing", "strong"],
    &["pros", "cons", "weigh", "outweigh", "whole"],
];

/// Distractor words present in the table but never spoken.
const EXTRA_WORDS: &[&str] = &["france", "benefit", "drawback", "say"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GestureFamily {
    /// Hands rest low near the body.
    Rest,
    /// Wrists move far apart at chest height.
    Open,
    /// Hands held together in front of the chest.
    Closed,
    /// Both hands ramp upward.
    Raise,
    /// The right hand beats up and down.
    Beat,
}

impl GestureFamily {
    const SPOKEN: [GestureFamily; 4] = [
        GestureFamily::Open,
        GestureFamily::Closed,
        GestureFamily::Raise,
        GestureFamily::Beat,
    ];

    /// Wrist and elbow targets `[rw, lw, re, le]` at progress `phase` in [0,1].
    fn targets(self, phase: f64, t: f64) -> [(f64, f64); 4] {
        match self {
            GestureFamily::Rest => [(-0.10, -0.48), (0.10, -0.48), (-0.19, -0.32), (0.19, -0.32)],
            GestureFamily::Open => [
                (-0.45 - 0.1 * phase, -0.15),
                (0.45 + 0.1 * phase, -0.15),
                (-0.32, -0.22),
                (0.32, -0.22),
            ],
            GestureFamily::Closed => [(-0.04, -0.26), (0.04, -0.26), (-0.2, -0.33), (0.2, -0.33)],
            GestureFamily::Raise => [
                (-0.22, -0.05 + 0.3 * phase),
                (0.22, -0.05 + 0.3 * phase),
                (-0.26, -0.12),
                (0.26, -0.12),
            ],
            GestureFamily::Beat => [
                (-0.22, -0.30 + 0.06 * (t * 2.0 * std::f64::consts::TAU).sin()),
                (0.10, -0.48),
                (-0.25, -0.35),
                (0.19, -0.32),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub duration: f64,
    pub fps: f64,
    pub seed: u64,
    /// Mean silence between sentences, in seconds.
    pub mean_pause: f64,
    /// Add an off-center second person to every frame.
    pub audience: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            duration: 30.0,
            fps: 25.0,
            seed: 7,
            mean_pause: 1.2,
            audience: true,
        }
    }
}

impl SynthConfig {
    /// The ten-minute talk used for timing runs.
    pub fn long_talk() -> Self {
        SynthConfig {
            duration: 600.0,
            mean_pause: 9.0,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub start: f64,
    pub end: f64,
    pub family: GestureFamily,
}

/// Generated input files, ready to be written to disk or parsed.
#[derive(Debug, Clone)]
pub struct SyntheticTalk {
    pub pose_json: String,
    pub transcript_json: String,
    pub embeddings: String,
    pub sentences: Vec<Sentence>,
}

struct Word {
    text: &'static str,
    pos: &'static str,
    start: f64,
    end: f64,
    last: bool,
}

fn script(config: &SynthConfig, rng: &mut ChaCha8Rng) -> (Vec<Word>, Vec<Sentence>) {
    let mut words = Vec::new();
    let mut sentences = Vec::new();
    let mut t = 0.4;
    for template in TEMPLATES.iter().cycle() {
        let length: f64 = template.iter().map(|_| 0.34).sum::<f64>() + 0.2;
        if t + length > config.duration - 0.3 {
            break;
        }
        let start = t;
        for (k, &(text, pos)) in template.iter().enumerate() {
            let d = rng.random_range(0.24..0.38);
            let last = k + 1 == template.len();
            words.push(Word { text, pos, start: t, end: t + d, last });
            t += d + rng.random_range(0.02..0.08);
        }
        let family = GestureFamily::SPOKEN[rng.random_range(0..GestureFamily::SPOKEN.len())];
        sentences.push(Sentence { start, end: t, family });
        t += config.mean_pause * rng.random_range(0.6..1.4);
    }
    (words, sentences)
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Normalized upper-body pose at time `t`.
fn pose_at(t: f64, sentences: &[Sentence]) -> [(f64, f64); UPPER_BODY] {
    let rest = GestureFamily::Rest.targets(0.0, t);
    let active = sentences.iter().find(|s| t >= s.start - 0.3 && t < s.end + 0.3);
    let arms = match active {
        None => rest,
        Some(s) => {
            let weight = smoothstep((t - (s.start - 0.3)) / 0.3) * smoothstep((s.end + 0.3 - t) / 0.3);
            let phase = ((t - s.start) / (s.end - s.start)).clamp(0.0, 1.0);
            let target = s.family.targets(phase, t);
            let mut out = rest;
            for (o, (r, g)) in out.iter_mut().zip(rest.iter().zip(target)) {
                *o = (r.0 + (g.0 - r.0) * weight, r.1 + (g.1 - r.1) * weight);
            }
            out
        }
    };
    let mut p = [(0.0, 0.0); UPPER_BODY];
    p[NOSE] = (0.0, 0.0);
    p[NECK] = (0.0, -0.15);
    p[RIGHT_SHOULDER] = (-0.15, -0.15);
    p[LEFT_SHOULDER] = (0.15, -0.15);
    p[RIGHT_WRIST] = arms[0];
    p[LEFT_WRIST] = arms[1];
    p[RIGHT_ELBOW] = arms[2];
    p[LEFT_ELBOW] = arms[3];
    p[MID_HIP] = (0.0, -0.55);
    p
}

fn to_pixels(nose: (f64, f64), height: f64, p: (f64, f64)) -> (f64, f64) {
    (nose.0 + p.0 * height, nose.1 - p.1 * height)
}

fn body(nose: (f64, f64), height: f64, upper: &[(f64, f64); UPPER_BODY], conf: &mut dyn FnMut() -> f64) -> Vec<Value> {
    let lower: [(f64, f64); BODY_KEYPOINTS - UPPER_BODY] = [
        (-0.08, -0.55), // 9 right hip
        (-0.09, -0.78), // 10 right knee
        (-0.09, -1.0),  // 11 right ankle
        (0.08, -0.55),  // 12 left hip
        (0.09, -0.78),  // 13 left knee
        (0.09, -1.0),   // 14 left ankle
        (-0.02, 0.02),  // 15 right eye
        (0.02, 0.02),   // 16 left eye
        (-0.05, 0.01),  // 17 right ear
        (0.05, 0.01),   // 18 left ear
        (0.1, -1.02),   // 19 left big toe
        (0.12, -1.02),  // 20 left small toe
        (0.08, -1.01),  // 21 left heel
        (-0.1, -1.02),  // 22 right big toe
        (-0.12, -1.02), // 23 right small toe
        (-0.08, -1.01), // 24 right heel
    ];
    upper
        .iter()
        .chain(lower.iter())
        .map(|&p| {
            let (x, y) = to_pixels(nose, height, p);
            json!([round(x), round(y), round(conf())])
        })
        .collect()
}

fn round(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

/// Generate a talk. Equal configs give byte-identical files.
pub fn generate(config: &SynthConfig) -> SyntheticTalk {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (words, sentences) = script(config, &mut rng);
    let jitter = Normal::new(0.0, 0.004).expect("valid normal");

    let frame_count = (config.duration * config.fps).floor() as usize;
    let mut frames = Vec::with_capacity(frame_count);
    for index in 0..frame_count {
        let t = index as f64 / config.fps;
        let mut upper = pose_at(t, &sentences);
        for p in upper.iter_mut().skip(1) {
            p.0 += jitter.sample(&mut rng);
            p.1 += jitter.sample(&mut rng);
        }
        let mut conf = || rng.random_range(0.75..0.98);
        let mut speaker = body(NOSE_PX, SPEAKER_HEIGHT, &upper, &mut conf);
        // The left hand leaves the picture for a few frames, and every 97th
        // frame loses the face.
        if (10.0..10.4).contains(&t) {
            speaker[LEFT_WRIST] = json!([0.0, 0.0, 0.0]);
        }
        if index % 97 == 50 {
            speaker[NOSE] = json!([0.0, 0.0, 0.0]);
        }
        let mut people = vec![json!({ "keypoints": speaker })];
        if config.audience {
            let idle = pose_at(-100.0, &[]);
            let mut conf = || rng.random_range(0.3..0.6);
            let person = body((140.0, 560.0), 300.0, &idle, &mut conf);
            people.insert(0, json!({ "keypoints": person }));
        }
        frames.push(json!({ "index": index, "t": round(t * 1000.0) / 1000.0, "people": people }));
    }
    let pose = json!({ "width": WIDTH, "height": HEIGHT, "frames": frames });

    let mut transcript = Vec::new();
    for w in &words {
        transcript.push(json!({
            "word": w.text,
            "start": round(w.start),
            "end": round(w.end),
            "pos": w.pos,
        }));
        if w.last {
            transcript.push(json!({ "word": "." }));
        }
    }

    SyntheticTalk {
        pose_json: serde_json::to_string(&pose).expect("pose serializes"),
        transcript_json: serde_json::to_string_pretty(&transcript).expect("transcript serializes"),
        embeddings: embedding_text(config.seed),
        sentences,
    }
}

fn embedding_text(seed: u64) -> String {
    const DIM: usize = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let noise = Normal::new(0.0, 0.15).expect("valid normal");
    let mut out = String::new();
    for topic in TOPICS {
        let center: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
        for word in topic.iter() {
            out.push_str(word);
            for c in &center {
                out.push_str(&format!(" {:.4}", c + noise.sample(&mut rng)));
            }
            out.push('\n');
        }
    }
    for word in EXTRA_WORDS {
        out.push_str(word);
        for _ in 0..DIM {
            out.push_str(&format!(" {:.4}", rng.random_range(-1.0..1.0)));
        }
        out.push('\n');
    }
    out
}

/// The two families of the clustering check: both hands ramping upward, or
/// both hands ramping apart. Coordinates get Gaussian noise of `sigma`.
pub fn family_ramp(hands_up: bool, frames: usize, sigma: f64, rng: &mut impl Rng) -> Vec<NormalizedSkeleton> {
    let noise = Normal::new(0.0, sigma).expect("valid sigma");
    (0..frames)
        .map(|i| {
            let phase = if frames > 1 { i as f64 / (frames - 1) as f64 } else { 0.0 };
            let family = if hands_up { GestureFamily::Raise } else { GestureFamily::Open };
            let mut kp = [Keypoint::UNDETECTED; UPPER_BODY];
            let mut pose = pose_at(0.0, &[]);
            let arms = family.targets(phase, phase);
            pose[RIGHT_WRIST] = arms[0];
            pose[LEFT_WRIST] = arms[1];
            pose[RIGHT_ELBOW] = arms[2];
            pose[LEFT_ELBOW] = arms[3];
            for (k, p) in kp.iter_mut().zip(pose) {
                *k = Keypoint::new(p.0 + noise.sample(rng), p.1 + noise.sample(rng), 1.0);
            }
            kp[NOSE] = Keypoint::new(0.0, 0.0, 1.0);
            NormalizedSkeleton::new(kp)
        })
        .collect()
}
