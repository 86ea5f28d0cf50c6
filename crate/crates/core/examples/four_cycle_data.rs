//! Writes `n` draws from the four-variable model whose concentration
//! matrix has unit diagonal and `-0.45` on the pairs 1-2, 2-4 and 3-4.
//!
//! ```text
//! cargo run -p ggm-select --example four_cycle_data -- 2000 7 > data.csv
//! ```

use ggm_select::simulation::sample_mvn;
use ggm_select::{linalg, Dataset};
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().as_deref().unwrap_or("2000").parse()?;
    let seed: u64 = args.next().as_deref().unwrap_or("7").parse()?;
    let mut k = DMatrix::identity(4, 4);
    for (i, j) in [(0, 1), (1, 3), (2, 3)] {
        k[(i, j)] = -0.45;
        k[(j, i)] = -0.45;
    }
    let sigma = linalg::spd_inverse(&k, "concentration matrix")?;
    let data = Dataset::unnamed(sample_mvn(&sigma, n, seed)?)?;
    data.write_csv(std::io::stdout().lock())?;
    Ok(())
}
