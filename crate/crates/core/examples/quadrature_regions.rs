//! Gauss–Legendre integration over the unit cube and over the region
//! `t1 + t2 <= u`, with the refinement delta the term evaluators report.

use critline::quadrature::{integrate_c12_region, integrate_cube, GridSpec};

fn main() -> critline::Result<()> {
    let sep = integrate_cube(
        |t: &[f64]| t.iter().map(|x| 1.0 / (1.0 + x)).product::<f64>(),
        &GridSpec::new(5, 8)?,
    )?;
    println!(
        "cube  Π 1/(1+t_i)  {:.15}  exact {:.15}  delta {:.1e}",
        sep.value,
        std::f64::consts::LN_2.powi(5),
        sep.refinement_delta
    );

    let spec = GridSpec::new(3, 12)?;
    let vol = integrate_c12_region(|_, _, _| 1.0, &spec)?;
    let lin = integrate_c12_region(|t1, t2, _| t1 + t2, &spec)?;
    let smooth = integrate_c12_region(|t1, t2, u| (t1 - 2.0 * t2 + u).exp(), &spec)?;
    println!("region volume      {:.15}  exact {:.15}", vol.value, 1.0 / 6.0);
    println!("region t1 + t2     {:.15}  exact {:.15}", lin.value, 1.0 / 12.0);
    println!("region exp(...)    {:.15}  delta {:.1e}", smooth.value, smooth.refinement_delta);
    Ok(())
}
