//! HTTP routes.

use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get};
use axum::{Json, Router};
use gesturelens::semantics::{filter_phrases, PhraseFilter, PhraseKind};
use gesturelens::viewmodel::{build_trajectory, search_keyword, TimedSkeleton};
use gesturelens::AnalysisConfig;
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use tower::ServiceExt;
use tower_http::services::ServeFile;

use crate::error::ServiceError;
use crate::store::{NewBookmark, Store};

type ApiResult<T> = Result<T, ServiceError>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/videos", get(list_videos))
        .route("/videos/{id}/bundle", get(get_bundle))
        .route("/videos/{id}/media", get(get_media))
        .route("/videos/{id}/search", get(search))
        .route("/videos/{id}/phrases", get(phrases))
        .route("/videos/{id}/trajectory", get(trajectory))
        .route(
            "/videos/{id}/bookmarks",
            get(list_bookmarks).post(create_bookmark).delete(delete_bookmark_query),
        )
        .route("/videos/{id}/bookmarks/{bookmark}", delete(delete_bookmark))
        .route("/videos/{id}/screenshots", get(list_screenshots).post(create_screenshot))
        .route("/config", get(get_config).put(put_config))
        .with_state(store)
}

/// Run blocking store work off the async executor.
async fn blocking<T, F>(store: &Arc<Store>, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Store) -> ApiResult<T> + Send + 'static,
{
    let store = store.clone();
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ServiceError::Storage(format!("worker failed: {e}")))?
}

async fn list_videos(State(store): State<Arc<Store>>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, |s| s.list_videos()).await?))
}

/// The bundle with transcript flags recomputed for the configured
/// thresholds. The ETag is the hash of the body.
async fn get_bundle(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let (body, etag) = blocking(&store, move |s| {
        let thresholds = s.config()?.thresholds();
        let mut bundle = (*s.bundle(&id)?).clone();
        bundle.reannotate(&thresholds);
        let body = bundle.to_json();
        let etag = format!("\"{}\"", hex::encode(Sha256::digest(body.as_bytes())));
        Ok((body, etag))
    })
    .await?;
    let etag_value = HeaderValue::from_str(&etag).expect("hex etag is a valid header");
    let matches = headers
        .get(header::IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == etag || t.trim() == "*"));
    if matches {
        return Ok((StatusCode::NOT_MODIFIED, [(header::ETAG, etag_value)]).into_response());
    }
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("application/json")),
            (header::ETAG, etag_value),
        ],
        body,
    )
        .into_response())
}

async fn get_media(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    request: Request,
) -> ApiResult<Response> {
    let path = blocking(&store, move |s| s.media_path(&id)).await?;
    let response = ServeFile::new(path)
        .oneshot(request)
        .await
        .map_err(|e| ServiceError::Storage(format!("media: {e}")))?;
    Ok(response.map(Body::new))
}

#[derive(Debug, Deserialize)]
struct SearchQuery {
    #[serde(default)]
    q: String,
}

async fn search(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<SearchQuery>,
) -> ApiResult<impl IntoResponse> {
    let bundle = blocking(&store, move |s| s.bundle(&id)).await?;
    let matches: Vec<_> = search_keyword(&bundle.words, &query.q)
        .into_iter()
        .map(|i| {
            let w = &bundle.words[i];
            json!({ "word_index": i, "word": w.text, "start": w.start, "end": w.end })
        })
        .collect();
    Ok(Json(json!({ "query": query.q, "matches": matches })))
}

#[derive(Debug, Deserialize)]
struct PhraseQuery {
    /// Comma-separated kind labels, e.g. `NP,VP`.
    kinds: Option<String>,
    min_occurrence: Option<usize>,
    start: Option<f64>,
    end: Option<f64>,
}

impl PhraseQuery {
    fn filter(&self) -> ApiResult<PhraseFilter> {
        let kinds = match &self.kinds {
            None => None,
            Some(list) => Some(
                list.split(',')
                    .map(str::trim)
                    .filter(|k| !k.is_empty())
                    .map(|k| {
                        PhraseKind::from_label(k)
                            .ok_or_else(|| ServiceError::BadRequest(format!("unknown phrase kind {k:?}")))
                    })
                    .collect::<ApiResult<_>>()?,
            ),
        };
        let time_range = match (self.start, self.end) {
            (None, None) => None,
            (lo, hi) => Some((lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))),
        };
        Ok(PhraseFilter { time_range, min_occurrence: self.min_occurrence, kinds })
    }
}

async fn phrases(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<PhraseQuery>,
) -> ApiResult<impl IntoResponse> {
    let filter = query.filter()?;
    let bundle = blocking(&store, move |s| s.bundle(&id)).await?;
    let spans = filter_phrases(&bundle.phrases, &filter).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    Ok(Json(spans))
}

#[derive(Debug, Deserialize)]
struct RangeQuery {
    start: Option<f64>,
    end: Option<f64>,
}

async fn trajectory(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(range): Query<RangeQuery>,
) -> ApiResult<impl IntoResponse> {
    let start = range.start.unwrap_or(f64::NEG_INFINITY);
    let end = range.end.unwrap_or(f64::INFINITY);
    if !(start <= end) {
        return Err(ServiceError::BadRequest(format!("time range {start}..{end} is inverted")));
    }
    let bundle = blocking(&store, move |s| s.bundle(&id)).await?;
    let frames: Vec<TimedSkeleton> = bundle
        .frame_times
        .iter()
        .zip(&bundle.skeletons)
        .filter(|(t, _)| (start..=end).contains(*t))
        .map(|(&timestamp, s)| TimedSkeleton { timestamp, skeleton: *s })
        .collect();
    Ok(Json(build_trajectory(&frames)))
}

async fn list_bookmarks(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, move |s| s.bookmarks(&id)).await?))
}

async fn create_bookmark(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let new: NewBookmark =
        serde_json::from_slice(&body).map_err(|e| ServiceError::Validation(format!("invalid bookmark: {e}")))?;
    let bookmark = blocking(&store, move |s| s.create_bookmark(&id, new)).await?;
    Ok((StatusCode::CREATED, Json(bookmark)))
}

#[derive(Debug, Deserialize)]
struct BookmarkIdQuery {
    id: String,
}

async fn delete_bookmark_query(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(query): Query<BookmarkIdQuery>,
) -> ApiResult<StatusCode> {
    blocking(&store, move |s| s.delete_bookmark(&id, &query.id)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn delete_bookmark(
    State(store): State<Arc<Store>>,
    Path((id, bookmark)): Path<(String, String)>,
) -> ApiResult<StatusCode> {
    blocking(&store, move |s| s.delete_bookmark(&id, &bookmark)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn list_screenshots(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&store, move |s| s.screenshots(&id)).await?))
}

#[derive(Debug, Deserialize)]
struct NewScreenshot {
    timestamp: f64,
}

async fn create_screenshot(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let new: NewScreenshot =
        serde_json::from_slice(&body).map_err(|e| ServiceError::Validation(format!("invalid screenshot: {e}")))?;
    let record = blocking(&store, move |s| s.record_screenshot(&id, new.timestamp)).await?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn get_config(State(store): State<Arc<Store>>) -> ApiResult<impl IntoResponse> {
    let config = blocking(&store, |s| s.config()).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], config.to_json()))
}

async fn put_config(State(store): State<Arc<Store>>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let config = AnalysisConfig::from_json(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let saved = config.clone();
    blocking(&store, move |s| s.put_config(&saved)).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], config.to_json()))
}
