//! Regenerates the bundled smoke dataset:
//! `cargo run -p freshx --example make_smoke -- crates/freshx/data/smoke`.

use std::path::PathBuf;

use freshx::ingest::{write_long_format, write_meta, write_targets, CsvOptions};
use freshx::synth::gen_two_class;
use freshx_core::MetaTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/freshx/data/smoke".into()));
    std::fs::create_dir_all(&dir)?;
    let (dataset, target) = gen_two_class(20, 64, 1.5, 2024)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut meta = MetaTable::new(vec!["age".into(), "load".into(), "batch".into()])?;
    for entity in dataset.entity_order() {
        let age = f64::from(rng.random_range(1u32..40));
        let load = (rng.random::<f64>() * 1000.0).round() / 1000.0;
        let batch = f64::from(rng.random_range(0u32..2));
        meta.insert(entity.clone(), vec![age, load, batch])?;
    }
    let dataset = dataset.with_meta(&meta)?;
    let options = CsvOptions::default();
    write_long_format(&dataset, &dir.join("series.csv"), &options)?;
    write_targets(dataset.entity_order(), &target, &dir.join("targets.csv"), &options)?;
    write_meta(&dataset, &dir.join("meta.csv"), &options)?;
    Ok(())
}
