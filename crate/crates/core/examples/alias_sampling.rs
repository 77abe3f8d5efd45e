// O(1) sampling of an index with probability proportional to its weight.

use std::error::Error;

use linfactory::{AliasTable, RngStream};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let weights = [3.0, 0.0, 1.0, 4.0];
    let table = AliasTable::new(&weights)?;
    let mut stream = RngStream::new(5, 0);
    let n = 100_000;
    let mut counts = [0u64; 4];
    for _ in 0..n {
        counts[table.sample_index(&mut stream)] += 1;
    }
    for (i, (&w, &count)) in weights.iter().zip(&counts).enumerate() {
        let expected = w / table.total_weight();
        let observed = count as f64 / n as f64;
        println!("index {i}: weight {w} expected {expected:.4} observed {observed:.4}");
        assert!((observed - expected).abs() < 0.01);
    }
    assert_eq!(counts[1], 0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
