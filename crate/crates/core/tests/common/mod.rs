#![allow(dead_code)]

use dapt_core::models::GammaModel;
use dapt_core::numerics::{CVector, C64};
use dapt_core::pipeline::{Dapt, InitialSpec, PipelineOptions};

pub fn gamma(theta: f64, w: f64) -> GammaModel {
    GammaModel::new(1.0, theta, w).unwrap()
}

pub fn ground_dapt(model: &GammaModel, n: usize) -> Dapt {
    Dapt::build(model, n, InitialSpec::Ground, &PipelineOptions::default()).unwrap()
}

pub fn max_entry_diff(a: &[CVector], b: &[CVector]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

pub fn infidelity(a: &CVector, b: &CVector) -> f64 {
    let overlap: C64 = a.dotc(b);
    1.0 - overlap.norm_sqr() / (a.norm_squared() * b.norm_squared())
}
