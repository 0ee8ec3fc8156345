use std::sync::Arc;
use std::time::Instant;

use kneser_core::process::{compute_hitting_times, EdgeLabeling};
use kneser_core::{KneserGraph, Params};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().unwrap());
    let (n, k, trials) = (args.next().unwrap_or(9), args.next().unwrap_or(4), args.next().unwrap_or(20));
    let g = Arc::new(KneserGraph::new(Params::new(n as u32, k as u32).unwrap()).unwrap());
    let t = Instant::now();
    let (mut eq_alpha, mut eq_ekr, mut calls) = (0, 0, 0);
    for trial in 0..trials {
        let l = EdgeLabeling::sample(g.clone(), 1, trial);
        let s = Instant::now();
        let h = compute_hitting_times(&l, true).unwrap();
        eq_alpha += h.alpha_equals_super() as u32;
        eq_ekr += h.ekr_equals_near() as u32;
        calls += h.solver_calls;
        println!(
            "trial {trial}: super={} near={} alpha={:?} ekr={:?} calls={} {:?}",
            h.tau_super.count,
            h.tau_near.count,
            h.tau_alpha.map(|t| t.count),
            h.tau_ekr.map(|t| t.count),
            h.solver_calls,
            s.elapsed()
        );
    }
    println!("K({n},{k}) {trials} trials: alpha=super {eq_alpha}, ekr=near {eq_ekr}, solver calls {calls}, {:?}", t.elapsed());
}
