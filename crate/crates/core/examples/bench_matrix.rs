use heckenil_core::basis::{BasisTag, HeckeMatrix};
use std::time::Instant;
fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let (p, ell, k) = (args[0] as u32, args[1] as u64, args[2]);
    let t = Instant::now();
    let m = HeckeMatrix::build(BasisTag::delta(p).unwrap(), ell, true, k, 16).unwrap();
    println!("build {:?}", t.elapsed());
    let t = Instant::now();
    let lad = m.doubling_ladder(11);
    println!("ladder {} levels {:?}", lad.len(), t.elapsed());
}
