//! Conditional moments of the four-factor state from the generator matrix.
//!
//! The mean of `X1^I` has the closed form `1 + (x − 1)e^{−κt}`; its
//! second moment comes out of the degree-2 block of the moment formula.

use polydiv::ljd::{build_generator, FourFactorParams};
use polydiv::poly::{moment_formula, Basis, MultiIndex};

fn main() -> polydiv::Result<()> {
    let params = FourFactorParams::fixture();
    let spec = params.to_spec()?;
    let g = build_generator(&spec, 2)?;
    let basis = Basis::new(4, 2);
    let i1 = basis.index_of(&MultiIndex::unit(4, 1))?;
    let i11 = basis.index_of(&MultiIndex::new(vec![0, 2, 0, 0]))?;
    println!("generator: {} monomials, {} non-zeros", g.dim(), g.sparse().nnz());
    println!("t,mean,mean_closed_form,variance");
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let m = moment_formula(&g, &spec.x0, t)?;
        let closed = 1.0 + (spec.x0[1] - 1.0) * (-params.kappa1_i * t).exp();
        println!("{t},{:.12},{closed:.12},{:.6e}", m[i1], m[i11] - m[i1] * m[i1]);
    }
    Ok(())
}
