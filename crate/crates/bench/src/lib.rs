//! Criterion benchmarks for the isocond core crate.

use std::hint::black_box;

use criterion::Criterion;
use isocond::conditioning::singular_values_3;
use isocond::geometry::Mat3;
use isocond::sweep::global_index;
use isocond::{
    assemble_matrices, default_params, direct_kinematics, find_isotropic, inverse_kinematics, sweep, MatrixKind, Pose,
    SweepSpec, WorkingMode,
};

pub fn benchmarks(c: &mut Criterion) {
    kinematics(c);
    conditioning(c);
    isotropy(c);
    sweeps(c);
}

fn kinematics(c: &mut Criterion) {
    let p = default_params();
    let pose = Pose::new(20.0, -35.0, 0.3);
    let limbs = inverse_kinematics(&p, &pose, WorkingMode::ALL_PLUS).unwrap();
    let rho = limbs.map(|s| s.rho);

    c.bench_function("inverse_kinematics", |b| {
        b.iter(|| inverse_kinematics(&p, black_box(&pose), WorkingMode::ALL_PLUS))
    });
    c.bench_function("assemble_matrices", |b| {
        b.iter(|| assemble_matrices(&p, black_box(&limbs), 141.421))
    });
    c.bench_function("direct_kinematics", |b| {
        b.iter(|| direct_kinematics(&p, black_box(&rho), &Pose::new(15.0, -30.0, 0.25)))
    });
}

fn conditioning(c: &mut Criterion) {
    let m = Mat3::new(3.0, -1.0, 0.5, 2.0, 4.0, -2.5, 0.1, 1.5, 6.0);
    c.bench_function("singular_values_3", |b| b.iter(|| singular_values_3(black_box(&m))));
}

fn isotropy(c: &mut Criterion) {
    let p = default_params();
    let mut group = c.benchmark_group("isotropy");
    group.sample_size(10);
    group.bench_function("find_isotropic", |b| {
        b.iter(|| find_isotropic(&p, WorkingMode::ALL_PLUS, black_box(141.421)))
    });
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let p = default_params();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for kind in MatrixKind::ALL {
        let spec = SweepSpec {
            nx: 41,
            ny: 41,
            n_theta: 60,
            ..SweepSpec::new(kind, WorkingMode::ALL_PLUS, 141.421)
        };
        group.bench_function(kind.label(), |b| {
            b.iter(|| global_index(&sweep(&p, black_box(&spec)).unwrap()))
        });
    }
    group.finish();
}
