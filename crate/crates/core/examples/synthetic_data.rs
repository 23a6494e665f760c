//! Generates both synthetic datasets, splits them and partitions the
//! columns between the two parties.

use cmosb::data::{train_test_split, vertical_partition, SyntheticSpec};

fn main() -> cmosb::Result<()> {
    for (name, spec) in [
        ("synthetic1", SyntheticSpec::synthetic1(7)),
        ("synthetic2", SyntheticSpec::synthetic2(7)),
    ] {
        let ds = spec.generate()?;
        let split = train_test_split(&ds, spec.seed)?;
        let part = vertical_partition(&ds, spec.active_features, spec.seed)?;
        println!(
            "{name}: {} rows x {} features, {} classes, histogram {:?}",
            ds.rows(),
            ds.cols(),
            ds.class_count(),
            ds.class_histogram()
        );
        println!(
            "  train/test {}/{}, active columns {:?}, passive columns {:?}",
            split.train_rows.len(),
            split.test_rows.len(),
            part.active_columns,
            part.passive_columns
        );
    }
    let path = std::env::temp_dir().join("cmosb_synthetic1.csv");
    SyntheticSpec::synthetic1(7).generate()?.write_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
