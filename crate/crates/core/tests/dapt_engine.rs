mod common;

use common::{gamma, ground_dapt, infidelity, max_entry_diff};
use dapt_core::dapt::{assemble_state, CorrectionBlocks, InitialCondition};
use dapt_core::models::{GammaModel, SpinHalfModel};
use dapt_core::numerics::{c64, cis, identity, max_abs, max_abs_vec, unitary_expm, CMatrix, CVector};
use dapt_core::pipeline::{Dapt, InitialSpec, PipelineOptions};
use dapt_core::source::{ConstantHamiltonian, FnHamiltonian};
use std::f64::consts::PI;

fn closed<F: Fn(f64) -> CVector>(m: &GammaModel, d: &Dapt, f: F) -> Vec<CVector> {
    d.grid().points().map(|s| f(m.time(s))).collect()
}

#[test]
fn ground_dynamical_phase_is_linear() {
    let m = GammaModel::new(1.6, 1.0, 0.05).unwrap();
    let d = ground_dapt(&m, 101);
    for (k, w) in d.phases().omega(0).iter().enumerate() {
        assert!((w + 0.8 * d.grid().point(k)).abs() < 1e-13);
    }
}

#[test]
fn dynamical_phase_of_linear_energy() {
    let src = FnHamiltonian::new(2, |s: f64| {
        CMatrix::from_diagonal(&CVector::from_vec(vec![c64(s, 0.0), c64(s + 1.0, 0.0)]))
    });
    let d = Dapt::build(&src, 51, InitialSpec::Ground, &PipelineOptions::default()).unwrap();
    assert!((d.phases().omega(0).last().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn zero_energy_gives_zero_phase() {
    let h = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)]));
    let d = Dapt::build(&ConstantHamiltonian(h), 21, InitialSpec::Ground, &PipelineOptions::default()).unwrap();
    assert!(d.phases().omega(0).iter().all(|w| *w == 0.0));
}

#[test]
fn daa_matches_closed_form() {
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let m = gamma(theta, 0.05);
        let d = ground_dapt(&m, 4001);
        let got = d.computational(&d.state(0, m.v()).unwrap(), 0).unwrap();
        assert!(max_entry_diff(&got, &closed(&m, &d, |t| m.order0(t))) < 1e-6);
    }
}

#[test]
fn constant_hamiltonian_daa_is_a_pure_phase() {
    let h = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(-0.3, 0.0), c64(0.9, 0.0)]));
    let d = Dapt::build(&ConstantHamiltonian(h), 41, InitialSpec::Ground, &PipelineOptions::default()).unwrap();
    let v = 0.02;
    let psi = d.computational(&d.state(0, v).unwrap(), 0).unwrap();
    let e0 = d.path().frame(0).levels[0].block.column(0).into_owned();
    for (k, x) in psi.iter().enumerate() {
        let expected = &e0 * cis(0.3 * d.grid().point(k) / v);
        assert!(max_abs_vec(&(x - expected)) < 1e-13);
    }
    for p in 1..=2 {
        for m in 0..2 {
            for n in 0..2 {
                assert!(d.blocks(p).block(m, n).iter().all(|b| max_abs(b) == 0.0));
            }
        }
    }
}

#[test]
fn spin_daa_is_berry_phase_times_dynamical_phase() {
    let m = SpinHalfModel::new(1.0, 1.0, 0.02).unwrap();
    let d = Dapt::build(&m, 4001, InitialSpec::Ground, &PipelineOptions::default()).unwrap();
    assert_eq!(d.path().dims(), &[1, 1]);
    let psi = d.computational(&d.state(0, m.v()).unwrap(), 0).unwrap();
    for (k, x) in psi.iter().enumerate().step_by(200) {
        let t = m.time(d.grid().point(k));
        let ket = m.kets_at_phase(m.w() * t).column(0).into_owned();
        let expected = ket * (cis(0.5 * t) * m.berry_holonomy(t));
        assert!(max_abs_vec(&(x - expected)) < 1e-6);
    }
}

#[test]
fn j_integral_vanishes_at_start_and_for_constant_h() {
    let m = gamma(1.0, 0.05);
    let d = ground_dapt(&m, 101);
    assert!(max_abs(&d.j().get(0, 1)[0]) == 0.0);
    let h = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(-1.0, 0.0), c64(1.0, 0.0)]));
    let c = Dapt::build(&ConstantHamiltonian(h), 21, InitialSpec::Ground, &PipelineOptions::default()).unwrap();
    assert!(c.j().get(0, 1).iter().all(|x| max_abs(x) == 0.0));
}

#[test]
fn j_integral_carries_the_secular_coefficient() {
    // i J(s) U⁰ is the secular part i (w²t sin²θ / 4bv) Ψ⁽⁰⁾; with t = s/v and
    // v = w/2π this is J(s) = π² s sin²θ / b
    let theta = PI / 3.0;
    let m = GammaModel::new(1.3, theta, 0.05).unwrap();
    let d = ground_dapt(&m, 2001);
    for k in (0..d.grid().len()).step_by(250) {
        let expect = identity(2).scale(PI * PI * d.grid().point(k) * theta.sin().powi(2) / 1.3);
        assert!(max_abs(&(d.j().summed(0, k) - expect)) < 1e-6);
    }
}

#[test]
fn first_order_both_routes_match_closed_form() {
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0] {
        let m = GammaModel::new(1.3, theta, 0.05).unwrap();
        let d = ground_dapt(&m, 8001);
        let v = m.v();
        let expected = closed(&m, &d, |t| m.order1(t));
        let recursive = d.computational(&d.state(1, v).unwrap(), 0).unwrap();
        let explicit = assemble_state(&d.first_order_explicit().unwrap(), d.phases(), v).unwrap();
        let explicit = d.computational(&explicit, 0).unwrap();
        assert!(max_entry_diff(&recursive, &expected) < 1e-6);
        assert!(max_entry_diff(&explicit, &expected) < 1e-6);
        assert!(max_entry_diff(&explicit, &recursive) < 1e-6);
    }
}

#[test]
fn first_order_vanishes_for_aligned_field() {
    let m = gamma(0.0, 0.05);
    let d = ground_dapt(&m, 101);
    let psi = d.computational(&d.state(1, m.v()).unwrap(), 0).unwrap();
    assert!(psi.iter().all(|x| x.iter().all(|z| z.norm() < 1e-14)));
}

#[test]
fn corrections_vanish_at_start() {
    let m = gamma(1.0, 0.05);
    let d = ground_dapt(&m, 401);
    for p in 1..=2 {
        assert!(d.blocks(p).initial_defect() < 1e-10);
        let psi = d.state(p, m.v()).unwrap();
        assert!(max_abs(&psi.amplitudes()[0]) < 1e-10);
    }
}

#[test]
fn general_initial_condition_is_reproduced_at_start() {
    let m = gamma(1.0, 0.05);
    let gen = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.4), c64(0.3, 0.1), c64(-0.3, 0.1), c64(0.0, -0.2)]);
    let u0 = unitary_expm(&gen, 1.0).unwrap();
    let u1 = unitary_expm(&gen, -2.0).unwrap();
    let b = [c64(0.6, 0.0), c64(0.0, 0.8)];
    let init = InitialCondition::new(b.to_vec(), vec![u0.clone(), u1.clone()]).unwrap();
    let d = Dapt::build(&m, 201, InitialSpec::Condition(init), &PipelineOptions::default()).unwrap();
    let psi = d.state(0, m.v()).unwrap();
    let a0 = &psi.amplitudes()[0];
    for h in 0..2 {
        for g in 0..2 {
            assert!((a0[(h, g)] - b[0] * u0[(h, g)]).norm() < 1e-15);
            assert!((a0[(h, 2 + g)] - b[1] * u1[(h, g)]).norm() < 1e-15);
        }
    }
    for p in 1..=2 {
        assert!(max_abs(&d.state(p, m.v()).unwrap().amplitudes()[0]) < 1e-10);
    }
}

#[test]
fn state_initial_condition_round_trips() {
    let m = gamma(1.0, 0.05);
    let k = m.kets(0.0);
    let psi0 = (k.column(0) * c64(0.6, 0.0) + k.column(3) * c64(0.0, 0.8)).normalize();
    let d = Dapt::build(&m, 101, InitialSpec::State(psi0.clone()), &PipelineOptions::default()).unwrap();
    let start = &d.computational(&d.state(0, m.v()).unwrap(), 0).unwrap()[0];
    assert!(max_abs_vec(&(start - psi0)) < 1e-14);
}

#[test]
fn diagonal_constraint_regenerates_transport() {
    let m = gamma(PI / 3.0, 0.05);
    let d = ground_dapt(&m, 1001);
    let init = InitialCondition::ground(&[2, 2]);
    let b0 = CorrectionBlocks::zeroth_order(&init, d.holonomies()).unwrap();
    let zero_forcing = vec![CMatrix::zeros(2, 2); d.grid().len()];
    let solved = dapt_core::dapt::solve_constraint(&identity(2), &zero_forcing, &d.holonomies()[0]).unwrap();
    for ((x, y), u) in solved.iter().zip(b0.block(0, 0)).zip(d.holonomies()[0].unitaries()) {
        assert!(max_abs(&(x - u)) < 1e-8);
        assert!(max_abs(&(y - u)) < 1e-15);
    }
}

#[test]
fn zero_blocks_assemble_to_zero() {
    let m = gamma(0.0, 0.05);
    let d = ground_dapt(&m, 21);
    let psi = d.state(2, m.v()).unwrap();
    assert!(psi.amplitudes().iter().all(|a| max_abs(a) == 0.0));
}

#[test]
fn first_order_sum_tracks_exact_solution() {
    let m = gamma(PI / 3.0, 0.01);
    let d = ground_dapt(&m, 2001);
    let series = d.computational(&d.series(1, m.v()).unwrap(), 0).unwrap();
    for (k, x) in series.iter().enumerate().step_by(50) {
        let exact = m.exact(m.time(d.grid().point(k)));
        assert!(infidelity(&exact, x) < 1e-4);
    }
}

#[test]
fn validity_margins_behave() {
    let m = gamma(PI / 2.0, 0.01);
    let d = ground_dapt(&m, 2001);
    let slow = d.validity(m.v(), 0.1).unwrap();
    assert!(slow.adiabatic_ok);
    assert!(slow.q2_sup.iter().flatten().all(|q| *q < 10.0 * m.v()));
    let fast = d.validity(10.0 / (2.0 * PI), 0.1).unwrap();
    assert!(!fast.adiabatic_ok);
    assert!(fast.max_sup() > 1.0);
    let small = d.validity(1e-8, 0.1).unwrap();
    assert!(small.max_sup() < 1e-6);
    let half = d.validity(m.v() / 2.0, 0.1).unwrap();
    let ratio = slow.max_sup() / half.max_sup();
    assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn validity_reduces_to_scalars_without_degeneracy() {
    let m = SpinHalfModel::new(1.0, 1.0, 0.01).unwrap();
    let d = Dapt::build(&m, 1001, InitialSpec::Ground, &PipelineOptions::default()).unwrap();
    let r = d.validity(m.v(), 0.1).unwrap();
    assert_eq!(r.q1.len(), 1);
    assert_eq!(r.q2.len(), 1);
    assert_eq!(r.q2[0].len(), 1);
    assert!(r.adiabatic_ok);
}
