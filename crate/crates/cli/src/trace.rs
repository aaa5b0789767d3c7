//! Phase traces of the index ratio, for plotting.

use std::path::Path;

use coiso::maslov::{index_ratio, unwrap_phases};
use coiso::{CoisotropicLoop, MaslovSection};

use crate::error::CliError;

/// CSV of `θ, Re g, Im g, unwrapped arg g` over the loop's samples and the
/// closing point `θ = 2π`.
pub fn phase_trace(gamma: &CoisotropicLoop, zeta: &MaslovSection) -> Result<String, CliError> {
    let g = index_ratio(gamma, zeta)?;
    let phases = unwrap_phases(&g);
    let mut out = String::from("theta,re_g,im_g,unwrapped_phase\n");
    for (i, (z, p)) in g.iter().zip(&phases).enumerate() {
        let theta = if i < gamma.len() { gamma.theta(i) } else { std::f64::consts::TAU };
        out.push_str(&format!("{theta:.16e},{:.16e},{:.16e},{p:.16e}\n", z.re, z.im));
    }
    Ok(out)
}

pub fn emit_phase_trace(gamma: &CoisotropicLoop, zeta: &MaslovSection, path: &Path) -> Result<(), CliError> {
    let text = phase_trace(gamma, zeta)?;
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use coiso::families::lagrangian_rotation;
    use coiso::grassmann::SubspaceFamily;
    use coiso::symplin::{standard_model, SymplecticSpace};
    use nalgebra::Complex;
    use std::sync::Arc;

    fn unwrapped(csv: &str) -> Vec<f64> {
        csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect()
    }

    #[test]
    fn constant_loop_has_a_flat_trace() {
        let s = SymplecticSpace::new(2).unwrap();
        let c = standard_model(&s, 1).unwrap().space().clone();
        let fam: SubspaceFamily<f64> = Arc::new(move |_| Ok(c.clone()));
        let g = CoisotropicLoop::from_family(&s, 1, fam, 8).unwrap();
        let z = MaslovSection::on_loop(&g, vec![Complex::new(1.0, 0.0); 8]).unwrap();
        let csv = phase_trace(&g, &z).unwrap();
        assert!(csv.starts_with("theta,re_g,im_g,unwrapped_phase\n"));
        assert!(!csv.contains('\r'));
        let p = unwrapped(&csv);
        assert_eq!(p.len(), 9);
        assert!(p.iter().all(|x| (x - p[0]).abs() < 1e-12));
    }

    #[test]
    fn rotation_trace_spans_minus_two_pi() {
        let s = SymplecticSpace::new(1).unwrap();
        let g = CoisotropicLoop::from_family(&s, 0, lagrangian_rotation(1), 64).unwrap();
        let z = MaslovSection::on_loop(&g, vec![Complex::new(1.0, 0.0); g.len()]).unwrap();
        let p = unwrapped(&phase_trace(&g, &z).unwrap());
        let span = p.last().unwrap() - p[0];
        assert!((span + std::f64::consts::TAU).abs() < 0.05 * std::f64::consts::TAU);
    }

    #[test]
    fn twisted_section_over_a_constant_loop_spans_two_pi() {
        let s = SymplecticSpace::new(2).unwrap();
        let c = standard_model(&s, 1).unwrap().space().clone();
        let fam: SubspaceFamily<f64> = Arc::new(move |_| Ok(c.clone()));
        let g = CoisotropicLoop::from_family(&s, 1, fam, 32).unwrap();
        let vals = (0..32).map(|i| Complex::from_polar(1.0, g.theta(i))).collect();
        let z = MaslovSection::on_loop(&g, vals).unwrap();
        let p = unwrapped(&phase_trace(&g, &z).unwrap());
        assert!((p.last().unwrap() - p[0] - std::f64::consts::TAU).abs() < 1e-9);
    }
}
