//! Shared fixtures for the criterion benchmarks.

use belpm_core::series::{embed, split, EmbeddedDataset, Embedding};
use belpm_core::synthetic::mackey_glass;

/// Mackey-Glass series embedded with `dim = 3`, `horizon = 1` and split
/// into `n_train` training pairs and the rest for testing.
pub fn mackey_glass_split(n: usize, n_train: usize) -> (EmbeddedDataset, EmbeddedDataset) {
    let series = mackey_glass(n, 17, 1.2, 100).expect("generator");
    let data = embed(&series, Embedding::new(3, 1).expect("embedding")).expect("embed");
    split(&data, n_train).expect("split")
}
