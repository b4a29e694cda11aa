use kipq_core::diagnostics::{summarize, variable_d_residuals, MomentumSign, VariableDiffusion};
use kipq_core::entropy::catalog_table;
use kipq_core::gauge::{dg_chain, gauge_check};
use kipq_core::nfpe::{evolve_nfpe, l2_distance};
use kipq_core::nse::{evolve_with, gaussian_packet, Diffusion, Dynamics, NseScenario, Representation};
use kipq_core::scenario::parse_scenario;
use kipq_core::{EntropyModel, Error, Grid1D};

#[test]
fn nfpe_scenario_relaxes() {
    let s = parse_scenario(
        "[model]\nvariant = eip\nkappa = 0.5\n[physics]\ndiffusion = 1\n[potential]\nkind = harmonic\n\
         [initial]\nkind = equilibrium\nshift = 1\n[integrator]\nkind = nfpe\nt_end = 3\ncadence = 500\n",
    )
    .unwrap();
    let (scn, eq) = s.nfpe().unwrap();
    let traj = evolve_nfpe(&scn).unwrap();
    let d0 = l2_distance(&scn.grid, &scn.rho0, &eq);
    let d1 = l2_distance(&scn.grid, &traj.last().rho, &eq);
    assert!(d1 < 0.1 * d0, "{d0} -> {d1}");
    assert_eq!(traj.max_free_energy_increase, 0.0);
}

#[test]
fn gauge_check_from_scenario() {
    let s = parse_scenario(
        "[model]\nvariant = tsallis\nq = 1.5\n[physics]\ndiffusion = 0.05\n[initial]\nk = 1\n\
         [integrator]\nkind = gauge_check\nt_end = 0.2\n",
    )
    .unwrap();
    let rep = gauge_check(&s.nse().unwrap(), s.integrator.cadence).unwrap();
    assert!(rep.max_linf < 1e-5, "{}", rep.max_linf);
}

#[test]
fn linearization_chain_short() {
    let s = parse_scenario("[physics]\ndiffusion = 0.3\n[initial]\nk = 1\n[integrator]\nt_end = 0.2\n").unwrap();
    let rep = dg_chain(&s.nse().unwrap()).unwrap();
    assert!((rep.reduced_hbar - 0.8).abs() < 1e-15);
    assert!(rep.l2_psi_chi < 1e-5, "{rep:?}");
}

#[test]
fn chain_rejects_strong_diffusion() {
    let s = parse_scenario("[physics]\ndiffusion = 0.45\n[integrator]\nt_end = 0.1\n").unwrap();
    let mut scn = s.nse().unwrap();
    scn.diffusion = Diffusion::Constant(0.6);
    assert!(matches!(dg_chain(&scn), Err(Error::Config(_))));
}

#[test]
fn spatial_diffusion_momentum_source_has_noether_sign() {
    let grid = Grid1D::new(512, 40.0).unwrap();
    let mut psi0 = gaussian_packet(&grid, 0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    for (i, z) in psi0.values.iter_mut().enumerate() {
        let x = grid.x(i);
        *z *= num_complex::Complex64::from_polar(1.0, 0.25 * x * x);
    }
    let mut scn = NseScenario {
        model: EntropyModel::bg(),
        grid,
        potential: vec![0.0; 512],
        diffusion: Diffusion::Variable(VariableDiffusion::spatial_sine(0.3, 0.1, 40.0)),
        g_coeffs: vec![],
        hbar: 1.0,
        mass: 1.0,
        psi0,
        dt: 1.0,
        t_end: 0.3,
        cadence: 5,
        representation: Representation::Psi,
    };
    scn.dt = scn.t_end / (scn.t_end / scn.stable_dt()).ceil();
    let tr = evolve_with(&scn, Dynamics::Canonical, 0).unwrap();
    let flipped = summarize(&variable_d_residuals(&tr.records, MomentumSign::Flipped).unwrap());
    let printed = summarize(&variable_d_residuals(&tr.records, MomentumSign::AsPrinted).unwrap());
    assert!(flipped.r2_rel < 1e-3, "{flipped:?}");
    assert!(printed.r2_rel > 1.0, "{printed:?}");
}

#[test]
fn bg_catalog_has_unit_diffusion() {
    for row in catalog_table(&EntropyModel::bg(), &[1e-3, 0.1, 1.0, 10.0]) {
        assert!((row.f - 1.0).abs() < 1e-15);
        assert!((row.f_tilde - 1.0).abs() < 1e-15);
    }
}

#[test]
fn hydro_run_from_scenario_matches_psi_run() {
    let text = "[model]\nvariant = eip\nkappa = 0.5\ndrift = nonlinear\n[initial]\nk = 1\n[integrator]\nkind = nse\nt_end = 0.05\n";
    let s = parse_scenario(text).unwrap();
    let a = evolve_with(&s.nse().unwrap(), Dynamics::Canonical, 0).unwrap();
    let s = parse_scenario(&format!("{text}representation = hydro\n")).unwrap();
    let b = evolve_with(&s.nse().unwrap(), Dynamics::Canonical, 0).unwrap();
    let gap = a
        .final_state
        .density()
        .iter()
        .zip(b.final_state.density())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1e-6, "{gap}");
}
