//! Membrane s-functions of an oval, then the oval back from them.

use ispd_core::inverse::{assemble_coefficients, build_basis, solve_multistart, MultiStartOptions};
use ispd_core::spectral_2d::{default_spacing, discretize, s_function, solve_eigen, PotentialSpec};
use ispd_core::{ConvexBody, OperatorKind, SupportFn};

fn main() -> Result<(), ispd_core::Error> {
    let body = ConvexBody::new(SupportFn::from_modes(1.0, &[(2, 0.2, 0.0)])?, 512)?;
    let op = discretize(&body, PotentialSpec::none(), default_spacing(&body))?;
    let data: Vec<_> = solve_eigen(&op, 4)?.iter().map(s_function).collect::<Result<_, _>>()?;

    let basis = build_basis(2);
    let sys = assemble_coefficients(&basis, &data, OperatorKind::Membrane)?;
    let mut opts = MultiStartOptions::default();
    opts.solve.fixed = basis.translation_indices();
    let best = &solve_multistart(&sys, &basis, &opts)?.solutions[0];
    println!("{:?}", best.alpha);
    Ok(())
}
