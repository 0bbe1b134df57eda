//! Flat-file exports of a bundle for offline inspection.

use std::io::Write;
use std::str::FromStr;

use crate::bundle::AnalysisBundle;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    /// Gesture DTW distance matrix as CSV.
    Matrix,
    /// Wrist heatmap as plain PGM.
    Heatmap,
    /// One CSV row per word with its scores and flags.
    TranscriptCsv,
}

impl FromStr for ExportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(ExportKind::Matrix),
            "heatmap" => Ok(ExportKind::Heatmap),
            "transcript-csv" => Ok(ExportKind::TranscriptCsv),
            other => Err(Error::Config(format!(
                "unknown export kind {other:?} (expected matrix, heatmap or transcript-csv)"
            ))),
        }
    }
}

pub fn export<W: Write>(bundle: &AnalysisBundle, kind: ExportKind, mut out: W) -> Result<()> {
    match kind {
        ExportKind::Matrix => bundle.gesture_distances.write_csv(out),
        ExportKind::Heatmap => {
            out.write_all(bundle.heatmap.to_pgm().as_bytes())?;
            Ok(())
        }
        ExportKind::TranscriptCsv => write_transcript_csv(bundle, out),
    }
}

fn write_transcript_csv<W: Write>(bundle: &AnalysisBundle, out: W) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "word_index",
        "word",
        "start",
        "end",
        "pos",
        "spatial_variation",
        "temporal_change",
        "high_variation",
        "large_change",
    ])
    .map_err(csv_err)?;
    let mut notes = bundle.annotations.iter().peekable();
    for (i, word) in bundle.words.iter().enumerate() {
        let note = notes.next_if(|a| a.word_index == i);
        let score = |f: fn(&crate::viewmodel::TranscriptAnnotation) -> f64| {
            note.map(|a| f(a).to_string()).unwrap_or_default()
        };
        let flag = |f: fn(&crate::viewmodel::TranscriptAnnotation) -> bool| {
            note.map(|a| f(a).to_string()).unwrap_or_default()
        };
        w.write_record([
            i.to_string(),
            word.text.clone(),
            word.start.to_string(),
            word.end.to_string(),
            word.pos_tag.clone().unwrap_or_default(),
            score(|a| a.spatial_variation),
            score(|a| a.temporal_change),
            flag(|a| a.high_variation_flag),
            flag(|a| a.large_change_flag),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
