//! Writes a synthetic dataset with the Messidor shape to stdout.
//!
//! `cargo run --release -p drstack --example synthetic_csv -- [n_neg n_pos seed] > data.csv`

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let (n_neg, n_pos, seed) = match args[..] {
        [a, b, s] => (a as usize, b as usize, s),
        [] => (540, 611, 1),
        _ => panic!("expected: n_neg n_pos seed"),
    };
    let ds = drstack::synthetic::messidor_like(n_neg, n_pos, seed);
    ds.write_csv(std::io::stdout().lock()).expect("write csv");
}
