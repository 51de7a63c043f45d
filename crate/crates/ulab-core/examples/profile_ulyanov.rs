use std::time::Instant;
use ulab_core::funcs::FunctionConfig;
use ulab_core::smoothness::KEvaluator;
use ulab_core::weights::{JacobiIndex, Lp, WeightExponents};

fn main() {
    let f = FunctionConfig::Cosine { omega: 2.0 }.build().unwrap();
    let w = WeightExponents::legendre();
    let b = JacobiIndex::legendre();

    let t0 = Instant::now();
    let ev_q = KEvaluator::new(&f, Lp::Finite(4.0), w, b, 256).unwrap();
    println!("ev_q build: {:?}", t0.elapsed());

    for t in [0.125f64, 0.00390625] {
        let t1 = Instant::now();
        let v = ev_q.k_realized(1.0, t).unwrap();
        println!("lhs at t={t}: {:?} -> {v:.4e}", t1.elapsed());
    }
}
