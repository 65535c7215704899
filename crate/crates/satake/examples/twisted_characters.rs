// Weight multiplicity tables, trace functions of twisted classes on
// restriction blocks, and the unitriangular expansion of characters over
// orbit sums.

use satake::characters::{
    dominance_leq_int, orbit_expansion, twisted_character, weight_multiplicities,
};

fn main() -> satake::Result<()> {
    let lambda = [2i64, 1, 0];

    // The adjoint-type representation with highest weight (2, 1, 0): the
    // regular orbit appears once, the central weight twice, and the table
    // is constant on permutation orbits.
    let chi = twisted_character(1, &lambda)?;
    println!("character coefficients of {lambda:?}:");
    for key in [[2, 1, 0], [1, 2, 0], [0, 1, 2], [1, 1, 1]] {
        println!("  {key:?}: {}", chi.coeff(&key));
    }
    let dim: i64 = chi.coeffs.values().sum();
    println!("dimension: {dim}");
    assert_eq!(
        weight_multiplicities(&lambda)?.get(&vec![1, 1, 1]).copied(),
        Some(2)
    );

    // On a degree-d restriction block the trace function keeps the same
    // integer table; the block degree only rescales the exponent pairing.
    for d in 1..=3 {
        assert_eq!(twisted_character(d, &lambda)?, twisted_character(1, &lambda)?);
    }

    // Character over orbit sums: unitriangular with unit diagonal, and
    // supported on the dominance ideal.
    println!("\norbit-sum expansion of the character of {lambda:?}:");
    for (mu, c) in orbit_expansion(&lambda)? {
        assert!(dominance_leq_int(&mu, &lambda));
        println!("  [{}]: {c}", mu.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
    }

    // A bigger ideal: the expansion stays integer and unitriangular.
    let lambda = [3i64, 1, 0];
    println!("\norbit-sum expansion of the character of {lambda:?}:");
    for (mu, c) in orbit_expansion(&lambda)? {
        println!("  [{}]: {c}", mu.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
    }
    Ok(())
}
