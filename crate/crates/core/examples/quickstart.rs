//! Curvature of the unit 3-sphere at one point, both ways.

use sepcurv::curvature::{sectional_oracle, sectional_special, PlaneSection};
use sepcurv::geometry::solve_height;
use sepcurv::{Domain, Function1D, SeparableSurface, Tolerances};

fn main() -> sepcurv::Result<()> {
    let sq = || Function1D::parse("x^2", Domain::REAL_LINE).unwrap();
    let last = Function1D::parse("x^2 - 1", Domain::REAL_LINE).unwrap();
    let s = SeparableSurface::with_last_height(vec![sq(), sq(), sq(), last])?;
    let tol = Tolerances::default();
    let p = solve_height(&s, &[0.5, 0.5, 0.5], (0.0, 1.01), &tol)?;
    let closed = sectional_special(&s, &p, 0, 1, &tol)?;
    let plane = PlaneSection::coordinate(&s, &p, 0, 1, &tol)?;
    let oracle = sectional_oracle(&s, &p, &plane, &tol)?;
    println!("point {:?}: K = {closed} (oracle {oracle})", p.coords());
    Ok(())
}
