//! Prime-field linear algebra and the Vandermonde codes the schemes use.

use hotplug_cache::gf::{fe_arith, Field, FieldElement, FieldMatrix, FieldOp};
use hotplug_cache::mds::{assert_mds, vandermonde, vandermonde_certificate, MdsSpec};

fn main() -> anyhow::Result<()> {
    let a = FieldElement::new(7, 13)?;
    let b = FieldElement::new(9, 13)?;
    println!("7 + 9 = {} in GF(13)", fe_arith(a, b, FieldOp::Add)?.value);
    println!("1/5 = {} in GF(13)", FieldElement::new(5, 13)?.inv()?.value);

    let f = Field::new(7)?;
    let m = FieldMatrix::from_rows(f, &[vec![1, 2, 3], vec![2, 4, 6]])?;
    println!("rank {} with nullspace basis {:?}", m.rank(), m.nullspace());

    let sq = FieldMatrix::from_rows(f, &[vec![1, 1], vec![1, 2]])?;
    println!("[[1,1],[1,2]] x = [3,4] -> x = {:?}", sq.solve_vec(&[3, 4])?);

    // A rate 3/15 code: every 3 of the 15 rows must be independent.
    let spec = MdsSpec::new(3, 15, 17);
    let g = vandermonde(spec)?;
    println!("vandermonde(3, 15) over GF(17): brute force {:?}", assert_mds(&g, 3)?);
    println!("structural certificate: {}", vandermonde_certificate(&g));
    Ok(())
}
