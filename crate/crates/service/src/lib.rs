//! HTTP service and batch commands over gesturelens analysis bundles.

pub mod api;
pub mod cli;
pub mod error;
pub mod store;

pub use api::router;
pub use error::ServiceError;
pub use store::Store;
