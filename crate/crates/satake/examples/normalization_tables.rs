// Prints the integral normalization tables for the shipped preset
// settings, then reproduces one entry through the generic pairing path
// to show the closed forms and the root-datum route agree.

use satake::datum::RootDatum;
use satake::normalize::{
    generator_table, symplectic_exponent, t_basis_exponent, unitary_exponent, Preset,
    SignatureWeight,
};

fn print_table(preset: &Preset) -> satake::Result<()> {
    let table = generator_table(preset)?;
    println!("{}", table.label);
    for row in &table.rows {
        println!(
            "  {:6} {:24} exponent {:3}  invertible {}  {}",
            row.name, row.coweight, row.exponent, row.invertible, row.naive
        );
    }
    println!();
    Ok(())
}

fn main() -> satake::Result<()> {
    print_table(&Preset::ModularCurve { weight: 2 })?;
    print_table(&Preset::Hilbert {
        weights: vec![4, 2],
        central: -6,
    })?;
    print_table(&Preset::Siegel { weights: vec![3, 1] })?;
    print_table(&Preset::Gu21 { k1: 2, k2: 1 })?;

    // The closed form for one embedding of genus 2 with weights (3, 1);
    // the central coordinate is pinned to the negated weight sum.
    let closed = symplectic_exponent(&[vec![3, 1]], -4)?;
    println!("siegel T_p exponent, closed form: {closed}");

    // The same exponent through the generic path: pair the minuscule
    // coweight with the dominant representative of the infinitesimal
    // character on the similitude root datum.
    let datum = RootDatum::gsp(2)?;
    let kappa = datum.coords_int(&[3, 1], Some(-4))?;
    let lambda = datum.coords(
        vec![vec![satake::arith::q(-1, 2), satake::arith::q(-1, 2)]],
        Some(satake::arith::q(-1, 2)),
    )?;
    let paired = t_basis_exponent(&datum, &lambda, &kappa)?;
    println!("siegel T_p exponent, pairing path: {paired}");
    assert_eq!(satake::arith::q_int(closed), paired);

    // Unitary normalization: signature (2, 1), one active and one passive
    // embedding, all four generator degrees.
    let active = SignatureWeight::new(vec![0, -1], vec![2])?;
    let passive = SignatureWeight::new(vec![1, 0], vec![1])?;
    println!("\nunitary (2,1) exponents by generator degree:");
    for j in 0..=3 {
        let e = unitary_exponent(
            std::slice::from_ref(&active),
            std::slice::from_ref(&passive),
            j,
        )?;
        println!("  degree {j}: {e}");
    }
    Ok(())
}
