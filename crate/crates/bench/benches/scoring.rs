use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use vqi_core::{v_access, v_content, view_angles, vqi, AccessThresholds, AngleBasis, Layer, Movement, Observer, SceneDescription, Vec2, WindowRect};

fn scoring(c: &mut Criterion) {
    let scene = SceneDescription::new(&[Layer::Sky, Layer::Landscape, Layer::Ground], 65.0)
        .with_nature(0.6)
        .with_movement(Movement::DistantOnly);
    let window = WindowRect::on_wall(Vec2::new(0.0, 0.0), Vec2::new(3.0, 0.0), 0.8, 2.4, true).unwrap();
    let observer = Observer::seated(Vec2::new(1.5, 2.0));
    let thresholds = AccessThresholds::new(14.0, 54.0, AngleBasis::Horizontal).unwrap();

    c.bench_function("v_content", |b| b.iter(|| v_content(black_box(&scene)).unwrap()));
    c.bench_function("view_angles", |b| b.iter(|| view_angles(black_box(&observer), black_box(&window)).unwrap()));
    c.bench_function("full_vqi", |b| {
        b.iter(|| {
            let content = v_content(black_box(&scene)).unwrap().value;
            let angles = view_angles(&observer, &window).unwrap();
            let access = v_access(angles.horizontal_deg, &thresholds).unwrap();
            vqi(content, access, 0.9).unwrap()
        })
    });
}

criterion_group!(benches, scoring);
criterion_main!(benches);
