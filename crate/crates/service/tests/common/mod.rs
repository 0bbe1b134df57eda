#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use gesturelens_service::cli::{run_analyze, AnalyzeArgs};

pub const VIDEO: &str = "talk30";
pub const MEDIA_LEN: usize = 4096;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/talk30").join(name)
}

pub fn analyze_args(out: &Path) -> AnalyzeArgs {
    AnalyzeArgs {
        pose: fixture("pose.json"),
        transcript: fixture("transcript.json"),
        out: out.to_path_buf(),
        config: None,
        phrases: None,
        embeddings: Some(fixture("embeddings.txt")),
        tag_fallback: false,
        seed: None,
        fps: None,
        title: Some("Thirty seconds".into()),
        media: None,
    }
}

pub fn media_bytes() -> Vec<u8> {
    (0..MEDIA_LEN).map(|i| (i % 251) as u8).collect()
}

/// One analyzed video, produced once per test binary.
fn template() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let video = dir.path().join("videos").join(VIDEO);
        std::fs::create_dir_all(&video).unwrap();
        std::fs::write(video.join("talk.mp4"), media_bytes()).unwrap();
        let mut args = analyze_args(&video);
        args.media = Some(video.join("talk.mp4"));
        run_analyze(&args).unwrap();
        // Keep the media path relative so copies stay self-contained.
        let meta = r#"{"id":"talk30","title":"Thirty seconds","media":"talk.mp4"}"#;
        std::fs::write(video.join("video.json"), meta).unwrap();
        dir
    })
    .path()
}

/// A fresh data root holding a copy of the analyzed fixture.
pub fn data_root() -> tempfile::TempDir {
    let root = tempfile::tempdir().unwrap();
    copy_dir(template(), root.path());
    root
}

fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.path().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}
