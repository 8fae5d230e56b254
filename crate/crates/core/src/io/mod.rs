//! File formats: JSON system specifications, bundled examples, covering-count
//! CSV files and PNG rasters.

mod covering_csv;
mod registry;
mod render;
mod spec;

pub use covering_csv::{emit_covering_csv, read_covering_csv, write_covering_csv};
pub use registry::{
    example_document, examples_registry, truncation_note, ExampleInfo, ExampleParams,
    DEFAULT_TRUNCATION,
};
pub use render::{rasterize, render_attractor, Raster, MAX_IMAGE_SIZE, STRIP_HEIGHT};
pub use spec::{parse_ifs_spec, serialize_ifs_spec, IfsSpecDocument, MapSpec, SCHEMA_VERSION};

/// Ordered `key: value` pairs describing a run; written into every output
/// file so the file alone reproduces it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends, or replaces an existing key in place.
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}
