//! Induced normal form, one LP per follower plan, and the LP solver itself.

use stackelberg::exact::{induce_normal_form, maximin_value, simplex_solve, solve_sse, LpProblem};
use stackelberg::suite::{generate_file, DescriptorFile, Family};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // maximize x + y  s.t.  x + 2y <= 4,  3x + y <= 6
    let lp = LpProblem::new(vec![1.0, 1.0]).le(vec![1.0, 2.0], 4.0).le(vec![3.0, 1.0], 6.0);
    println!("toy LP: {:?}", simplex_solve(&lp));

    let game = generate_file(&DescriptorFile::grid(Family::Wnz, 3, 3, 2, 4))?;
    let nf = induce_normal_form(&game)?;
    println!("{} leader plans x {} follower plans", nf.num_rows(), nf.num_cols());
    let sse = solve_sse(&nf)?;
    let support: Vec<(usize, f64)> = sse.mix.iter().copied().enumerate().filter(|(_, p)| *p > 1e-9).collect();
    println!(
        "commitment value {:.4} (follower {:.4}) inducing column {} after {} LPs",
        sse.value, sse.follower_value, sse.column, sse.lps_solved
    );
    println!("support {support:.3?}");
    println!("maximin value {:.4}", maximin_value(&nf)?);
    Ok(())
}
