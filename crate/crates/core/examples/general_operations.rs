//! General bipartite maps acting on the relational matrix, and the reduced
//! system density computed two ways.
//!
//! Run with `cargo run --example general_operations`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaq::quantum_ops::{reduced_after_map_partial_trace, MapTerm};
use relaq::random;
use relaq::{apply_general_map, reduced_after_map, GeneralBipartiteMap, RelationalOperator, C64};

fn main() -> relaq::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let r0 = RelationalOperator::new(random::gaussian_matrix(2, 3, &mut rng).scale(C64::new(0.5, 0.0)));

    let lam = GeneralBipartiteMap::new(vec![
        MapTerm {
            alpha: C64::new(0.7, 0.0),
            b: random::gaussian_matrix(2, 2, &mut rng),
            c: random::gaussian_matrix(3, 3, &mut rng),
        },
        MapTerm {
            alpha: C64::new(0.0, 0.3),
            b: random::gaussian_matrix(2, 2, &mut rng),
            c: random::gaussian_matrix(3, 3, &mut rng),
        },
    ])?;

    let r_hat = apply_general_map(&r0, &lam)?;
    println!("R^ = sum alpha B R0 C^T (weight {:.6}):\n{:?}", r_hat.weight(), r_hat.matrix());

    let direct = reduced_after_map(&r0, &lam)?;
    let traced = reduced_after_map_partial_trace(&r0, &lam)?;
    println!("rho_S from the double sum:\n{direct:?}");
    println!("max difference from the partial-trace route {:.2e}", direct.max_abs_diff(&traced));
    Ok(())
}
