// Enumerates admissible sets in extended affine Weyl groups: stratum
// representatives in window notation, dimensions, point counts over small
// fields, and the component labels attached to the translation orbit.

use std::collections::BTreeSet;

use satake::affine::{admissible_set, kostant_representatives, point_count, AffineFamily};

fn main() -> satake::Result<()> {
    // Genus one at full level: the three strata of the classical modular
    // curve with Iwahori level structure.
    let family = AffineFamily::Symplectic { g: 1 };
    let level: BTreeSet<usize> = [0, 1].into();
    let strata = admissible_set(family, &level, &[1, 0])?;
    println!("symplectic g = 1, full level, mu = (1, 0):");
    for s in &strata {
        let pts: Vec<String> = [2u64, 3]
            .iter()
            .map(|&q0| format!("{} over F_{q0}", point_count(family, &level, &s.representative, q0)))
            .collect();
        println!(
            "  window {:?}  dim {}  points: {}",
            s.representative.window(),
            s.dimension,
            pts.join(", ")
        );
    }

    // The linear family: full level in rank three, one-box coweight.
    let family = AffineFamily::Linear { n: 3 };
    let level: BTreeSet<usize> = [0, 1, 2].into();
    let strata = admissible_set(family, &level, &[1, 0, 0])?;
    println!("\nlinear n = 3, full level, mu = (1, 0, 0): {} strata", strata.len());
    let top = strata.iter().map(|s| s.dimension).max().unwrap();
    for s in &strata {
        println!(
            "  window {:?}  dim {}{}",
            s.representative.window(),
            s.dimension,
            if s.dimension == top { "  (open)" } else { "" }
        );
    }

    // Maximal strata are translations indexed by the coweight orbit; the
    // minimal-length orbit representatives label the components.
    println!("\ncomponent labels for symplectic g = 2, mu = (1, 1, 0, 0):");
    for rep in kostant_representatives(AffineFamily::Symplectic { g: 2 }, &[1, 1, 0, 0])? {
        println!(
            "  orbit point {:?}  finite part {:?}  length {}",
            rep.coweight,
            rep.representative.window(),
            rep.length
        );
    }
    Ok(())
}
