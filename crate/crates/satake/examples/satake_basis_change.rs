// Counts cosets in a spherical double coset by brute-force lattice
// enumeration, interpolates the counts into polynomials in the residue
// field size, and prints the triangular basis change between the coset
// basis and the dual character basis.

use satake::characters::{
    satake_basis_change, satake_coset_oracle, satake_count_polynomials, INTERPOLATION_PRIMES,
};

fn poly_string(coeffs: &[i64]) -> String {
    let mut parts = Vec::new();
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let term = match (k, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "q".into(),
            (1, -1) => "-q".into(),
            (1, c) => format!("{c}q"),
            (k, 1) => format!("q^{k}"),
            (k, -1) => format!("-q^{k}"),
            (k, c) => format!("{c}q^{k}"),
        };
        parts.push(term);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn main() -> satake::Result<()> {
    let lambda = [2i64, 1, 0];

    // Raw coset tallies: for each prime, the number of left cosets whose
    // torus part has the given exponent vector.
    for p in [2u64, 3] {
        let tally = satake_coset_oracle(3, &lambda, p)?;
        let total: u64 = tally.values().sum();
        println!("p = {p}: {total} cosets over {} torus parts", tally.len());
    }

    // The same counts as polynomials in the field size, one per dominant
    // torus part, recovered by interpolation across small primes.
    println!("\ncount polynomials for lambda = {lambda:?}:");
    for (mu, poly) in satake_count_polynomials(3, &lambda)? {
        println!("  mu = {mu:?}: {}", poly_string(&poly));
    }

    // Basis change between the coset basis and the dual character basis.
    // Both directions are unitriangular with integer polynomial entries.
    let change = satake_basis_change(3, &lambda, &INTERPOLATION_PRIMES)?;
    println!("\nweights below {lambda:?}: {:?}", change.weights);
    println!("forward rows (coset basis over scaled characters):");
    for (nu, row) in &change.forward {
        for (mu, coeff) in row {
            println!("  {nu:?} -> {mu:?}: {}", poly_string(coeff));
        }
    }
    println!("inverse rows (scaled characters over the coset basis):");
    for (nu, row) in &change.inverse {
        for (mu, coeff) in row {
            println!("  {nu:?} -> {mu:?}: {}", poly_string(coeff));
        }
    }
    Ok(())
}
