//! Prints the nine energy levels of the excited-state NV with a 14N nucleus across the
//! level anti-crossing.

use nvdnp::model::{build_hamiltonian, NVSystemParams};

fn main() -> nvdnp::Result<()> {
    let p = NVSystemParams::default();
    println!("# B_gauss  E_1 .. E_9 (MHz)");
    for b in [0.0, 250.0, 450.0, 500.0, 550.0, 750.0] {
        let h = build_hamiltonian(&p.with_axial_field(b))?;
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(f64::total_cmp);
        let cols: Vec<String> = ev.iter().map(|e| format!("{e:9.2}")).collect();
        println!("{b:6.1}  {}", cols.join(" "));
    }
    Ok(())
}
