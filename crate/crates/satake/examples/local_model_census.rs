// Walks the component data of the parahoric moduli chains: standard
// representatives, dimensions, differential kernel ranks against the Lie
// algebra oracle, valuation bounds, and a finite-field census of chain
// points classified by rank signature.

use satake::local_model::{
    alpha_valuation_bound_symplectic, finite_field_census, lie_quotient_oracle_linear,
    lie_quotient_oracle_symplectic, normalized_exponent_linear, normalized_exponent_symplectic,
    strata_linear, strata_symplectic, CensusFamily,
};

fn main() -> satake::Result<()> {
    println!("symplectic components, genus 2:");
    for rec in strata_symplectic(2)? {
        let oracle = lie_quotient_oracle_symplectic(2, rec.parameter)?;
        println!(
            "  s = {}  span {:?}  diagonal {:?}  dim {}  kernel rank {} (oracle {})",
            rec.parameter, rec.index_set, rec.diagonal, rec.dimension, rec.dp1, oracle
        );
        assert_eq!(rec.dp1, oracle);
    }

    println!("\nlinear components, (n, p, q, j) = (3, 2, 1, 1):");
    for rec in strata_linear(3, 2, 1, 1)? {
        let oracle = lie_quotient_oracle_linear(3, 2, 1, 1, rec.parameter)?;
        println!(
            "  r = {}  span {:?}  diagonal {:?}  dim {}  kernel rank {} (oracle {})",
            rec.parameter, rec.index_set, rec.diagonal, rec.dimension, rec.dp1, oracle
        );
        assert_eq!(rec.dp1, oracle);
    }

    // Valuation bounds and normalization exponents attached to the strata.
    println!("\ngenus 2, weights (3, 1):");
    for s in 0..=2 {
        println!(
            "  valuation bound on component {s}: {}",
            alpha_valuation_bound_symplectic(&[3, 1], s)?
        );
    }
    println!(
        "  normalized exponent: {}",
        normalized_exponent_symplectic(&[3, 1])?
    );
    println!(
        "linear normalized exponent for a = (0, -1), b = (2), j = 1: {}",
        normalized_exponent_linear(&[0, -1], &[2], 1)?
    );

    // Chain points over tiny fields, classified by the ranks of the two
    // chain maps on subspaces and quotients. The signature count matches
    // the stratum count of the special fiber.
    for q0 in [2u64, 3] {
        let census = finite_field_census(&CensusFamily::Symplectic { g: 1 }, q0)?;
        println!("\ngenus 1 chain points over F_{q0}:");
        for (sig, count) in &census {
            println!("  signature {sig:?}: {count} points");
        }
    }
    let census = finite_field_census(
        &CensusFamily::Linear { n: 3, p: 2, q: 1, j: 1 },
        2,
    )?;
    let strata = strata_linear(3, 2, 1, 1)?;
    println!(
        "\nlinear (3, 2, 1, 1) over F_2: {} strata meet the special fiber, {} open components",
        census.len(),
        strata.len()
    );
    for (sig, count) in &census {
        println!("  signature {sig:?}: {count} points");
    }
    Ok(())
}
