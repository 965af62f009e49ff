//! Dataset files, statistics, numeric encodings and schematic rendering.

mod dataset;
mod encode;
mod record;
mod render;
mod stats;

pub use dataset::{
    decode_jsonl, encode_jsonl, read_dataset, read_manifest, read_predictions, write_dataset, write_predictions,
    Dataset, DatasetManifest, IoError, ScoringConvention, SplitEntry, FORMAT_VERSION, MANIFEST_FILE,
};
pub use encode::{decode_value, encode_object, encode_value, ObjectEncoding, OBJECT_ENCODING_LEN};
pub use record::{ObjectRecord, PredictionRecord, RecordError, SampleRecord};
pub use render::{fill_color, render_schematic, view_angle_degrees};
pub use stats::{stats_report, Bin, Histogram, NGramStats, StatsReport};
