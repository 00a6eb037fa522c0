use evroute::gen::{gen_random, RandomSpec};
use evroute::stage1::{EngineConfig, Stage1Engine};
use std::time::Instant;

fn main() {
    let n = 256usize;
    let g = gen_random(&RandomSpec { n, density: 1.0, gain_bound: 32, capacity: 32, seed: 9 })
        .unwrap().normalize().unwrap();
    let mut e = Stage1Engine::new(&g, EngineConfig::with_seed(9));
    let mut m = e.initial_table(&g);
    for round in 0..6 {
        let t = Instant::now();
        let before = m.vals.clone();
        m = e.update_shortcuts(m);
        eprintln!("update {round}: {:.1}s changed={}", t.elapsed().as_secs_f64(), before != m.vals);
    }
    // time a single SS pass on the stabilized table
    let t = Instant::now();
    let _m2 = e.short_shortcuts(&m);
    eprintln!("one SS pass: {:.3}s", t.elapsed().as_secs_f64());
}
