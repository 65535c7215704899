// Newton points of twisted conjugacy classes: the dominance order, the
// equivalence between the direct comparison and the family of trace
// valuation inequalities, and the prefix-sum test for formal groups with
// prescribed slopes.

use satake::arith::{format_q, q, q_int, Q};
use satake::datum::RootDatum;
use satake::newton::{
    katz_mazur_check, lafforgue_check, newton_leq, newton_map, polygon_above, SatakeClass,
};

fn gl_class(vals: &[i64]) -> satake::Result<SatakeClass> {
    let datum = RootDatum::gl(vals.len())?;
    SatakeClass::new(datum, vec![vals.iter().map(|&v| q_int(v)).collect()])
}

fn main() -> satake::Result<()> {
    // Newton points sort the eigenvalue valuations into the dominant
    // chamber; the order of the inputs is irrelevant.
    let ordinary = gl_class(&[0, 2])?;
    let supersingular = SatakeClass::new(RootDatum::gl(2)?, vec![vec![q(1, 1), q(1, 1)]])?;
    let nu_ord = newton_map(&ordinary);
    let nu_ss = newton_map(&supersingular);
    let slopes = |b: &[Q]| b.iter().map(|&v| format_q(v)).collect::<Vec<_>>().join(", ");
    println!("ordinary class:      ({})", slopes(&nu_ord.point.blocks[0]));
    println!("supersingular class: ({})", slopes(&nu_ss.point.blocks[0]));
    println!(
        "supersingular <= ordinary: {}",
        newton_leq(&nu_ss, &nu_ord)?
    );
    println!(
        "ordinary <= supersingular: {}",
        newton_leq(&nu_ord, &nu_ss)?
    );

    // The same order through prefix sums of the slope vectors.
    assert!(polygon_above(&nu_ss.point.blocks[0], &nu_ord.point.blocks[0]));

    // Valuation criterion: a class lies below a target point exactly when
    // every dominant weight gives a trace valuation above the paired
    // bound. The sweep reports the first violating weight otherwise.
    let verdict = lafforgue_check(&ordinary, &nu_ord, 4)?;
    println!(
        "\nordinary against its own point: direct {}, trace side {}",
        verdict.direct, verdict.trace_side
    );
    let verdict = lafforgue_check(&ordinary, &nu_ss, 4)?;
    println!(
        "ordinary against the supersingular point: direct {}, trace side {}",
        verdict.direct, verdict.trace_side
    );
    if let Some(w) = &verdict.witness {
        println!("  violating weight: {w:?}");
    }

    // Prefix-sum inequality for the valuations of a formal group attached
    // to a weight-k eigenform: ordinary and supersingular slopes both
    // satisfy it, a unit root in the wrong place fails at the first step.
    let k = 4i64;
    let infchar = vec![vec![q_int(0), q_int(-(k - 1))]];
    let ordinary_vals = [q_int(0), q_int(k - 1)];
    let balanced_vals = [q(k - 1, 2), q(k - 1, 2)];
    let shifted_vals = [q_int(-1), q_int(k)];
    for (name, vals) in [
        ("ordinary", &ordinary_vals[..]),
        ("supersingular", &balanced_vals[..]),
        ("shifted", &shifted_vals[..]),
    ] {
        let report = katz_mazur_check(vals, &infchar)?;
        match report.first_failure {
            None => println!("weight {k} {name} slopes: pass = {}", report.pass),
            Some((k_star, slack)) => {
                println!("weight {k} {name} slopes: fails at prefix {k_star} with slack {slack}")
            }
        }
    }
    Ok(())
}
